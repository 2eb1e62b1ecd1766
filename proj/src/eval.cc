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

#include "props/eval.h"

#include <cmath>
#include <stdexcept>

namespace props::eval {

double suboptimality_gap(std::span<const double> theta_hat,
                         std::span<const double> theta_star) {
  if (theta_hat.size() != theta_star.size()) {
    throw std::invalid_argument("suboptimality_gap: dimension mismatch");
  }
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < theta_hat.size(); ++j) {
    const double diff = theta_hat[j] - theta_star[j];
    sum_sq += diff * diff;
  }
  return std::sqrt(sum_sq);
}

double label_accuracy(const policy::PolicyParams& params,
                      std::span<const data::PreferenceSample> heldout) {
  if (heldout.empty()) {
    throw std::invalid_argument("label_accuracy: empty held-out set");
  }
  std::size_t correct = 0;
  for (const auto& sample : heldout) {
    const BinaryLabel predicted = policy::predict_label(params, sample);
    const BinaryLabel truth =
        data::OracleGate::true_label(sample, data::OracleScope::kEval);
    correct += predicted == truth ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(heldout.size());
}

WinTieLoss simulated_win_rate(const policy::PolicyParams& policy_a,
                              const policy::PolicyParams& policy_b,
                              std::span<const data::PreferenceSample> heldout,
                              std::span<const double> theta_star) {
  if (heldout.empty()) {
    throw std::invalid_argument("simulated_win_rate: empty held-out set");
  }
  std::size_t wins = 0;
  std::size_t ties = 0;
  std::size_t losses = 0;
  for (const auto& sample : heldout) {
    const bool pick_first_a =
        policy::predict_label(policy_a, sample).value() == 1;
    const bool pick_first_b =
        policy::predict_label(policy_b, sample).value() == 1;
    if (pick_first_a == pick_first_b) {
      ++ties;
      continue;
    }
    if (theta_star.size() != sample.phi_1().size()) {
      throw std::invalid_argument("simulated_win_rate: dimension mismatch");
    }
    // True-reward difference between the two responses.
    double margin_star = 0.0;
    for (std::size_t j = 0; j < theta_star.size(); ++j) {
      margin_star += theta_star[j] * (sample.phi_1()[j] - sample.phi_2()[j]);
    }
    if (margin_star == 0.0) {
      ++ties;
    } else if ((margin_star > 0.0) == pick_first_a) {
      ++wins;
    } else {
      ++losses;
    }
  }
  const double n = static_cast<double>(heldout.size());
  return WinTieLoss{static_cast<double>(wins) / n,
                    static_cast<double>(ties) / n,
                    static_cast<double>(losses) / n};
}

std::vector<BinaryLabel> true_labels_for_eval(
    std::span<const data::PreferenceSample> heldout) {
  std::vector<BinaryLabel> labels;
  labels.reserve(heldout.size());
  for (const auto& sample : heldout) {
    labels.push_back(
        data::OracleGate::true_label(sample, data::OracleScope::kEval));
  }
  return labels;
}

}  // namespace props::eval
