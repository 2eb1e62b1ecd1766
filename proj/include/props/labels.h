// Copyright 2026 The PROPS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>

namespace props {

// A binary preference label. Value 1 means the first response is preferred.
class BinaryLabel {
 public:
  constexpr BinaryLabel() : value_(0) {}
  constexpr explicit BinaryLabel(int value) : value_(0) {
    if (value != 0 && value != 1) {
      throw std::invalid_argument("BinaryLabel: value must be 0 or 1");
    }
    value_ = static_cast<std::uint8_t>(value);
  }

  static constexpr BinaryLabel from_bool(bool preferred_first) {
    return BinaryLabel(preferred_first ? 1 : 0);
  }

  constexpr int value() const { return value_; }
  constexpr BinaryLabel complement() const { return BinaryLabel(1 - value_); }

  friend constexpr bool operator==(BinaryLabel a, BinaryLabel b) = default;

  // XOR of two labels as an integer; 1 when the labels disagree.
  friend constexpr int operator^(BinaryLabel a, BinaryLabel b) {
    return a.value_ ^ b.value_;
  }

 private:
  std::uint8_t value_;
};

}  // namespace props
