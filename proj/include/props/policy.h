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

#include <span>
#include <vector>

#include "props/data.h"
#include "props/labels.h"

namespace props::policy {

// Weights of the log-linear policy plus the preference-loss temperature.
// The reference policy is the zero vector, so the implicit reward margin of
// a response pair collapses to beta * theta . (phi_1 - phi_2).
struct PolicyParams {
  std::vector<double> theta;
  double beta = 5.0;

  static PolicyParams zeros(int d, double beta);
};

// Feature view of a response pair; binds to either sample type.
struct FeaturePair {
  std::span<const double> phi_1;
  std::span<const double> phi_2;

  FeaturePair(std::span<const double> p1, std::span<const double> p2)
      : phi_1(p1), phi_2(p2) {}
  FeaturePair(const data::PreferenceSample& s)  // NOLINT(runtime/explicit)
      : phi_1(s.phi_1()), phi_2(s.phi_2()) {}
  FeaturePair(const data::PrivatizedSample& s)  // NOLINT(runtime/explicit)
      : phi_1(s.phi_1), phi_2(s.phi_2) {}
};

std::vector<FeaturePair> feature_pairs(const data::PrivatizedDataset& dataset);
std::vector<FeaturePair> feature_pairs(
    std::span<const data::PrivatizedSample> samples);
std::vector<FeaturePair> feature_pairs(
    std::span<const data::PreferenceSample> samples);

// Implicit reward margin oriented toward the first response:
// beta * theta . (phi_1 - phi_2).
double margin(const PolicyParams& params, const FeaturePair& pair);

// Deterministic ranking: 1 when the margin is strictly positive, else 0.
BinaryLabel predict_label(const PolicyParams& params, const FeaturePair& pair);

std::vector<BinaryLabel> predict_labels(const PolicyParams& params,
                                        std::span<const FeaturePair> pairs);

// Mean preference loss, -log sigmoid of the label-oriented margin. The
// supplied label column decides which response is treated as preferred.
double dpo_loss(const PolicyParams& params, std::span<const FeaturePair> pairs,
                std::span<const BinaryLabel> labels);

// Gradient of one sample's preference loss with respect to theta, written
// into `out` (length d): -sigmoid(-m) * beta * (phi_p - phi_np).
void example_gradient(const PolicyParams& params, const FeaturePair& pair,
                      BinaryLabel label, std::span<double> out);

// Mean gradient over the dataset. Accumulation is sequential in input order
// so results are bit-reproducible.
std::vector<double> dpo_gradient(const PolicyParams& params,
                                 std::span<const FeaturePair> pairs,
                                 std::span<const BinaryLabel> labels);

}  // namespace props::policy
