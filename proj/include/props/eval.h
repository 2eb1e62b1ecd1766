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
#include "props/mechanisms.h"
#include "props/policy.h"

namespace props::eval {

// Euclidean distance between a trained parameter vector and the ground-truth
// reward weights.
double suboptimality_gap(std::span<const double> theta_hat,
                         std::span<const double> theta_star);

// Fraction of held-out samples whose deterministic ranking matches ground
// truth. Reads labels through the audited eval gate.
double label_accuracy(const policy::PolicyParams& params,
                      std::span<const data::PreferenceSample> heldout);

struct WinTieLoss {
  double win = 0.0;
  double tie = 0.0;
  double loss = 0.0;
};

// Judges two policies by the true reward: each policy picks its argmax
// response per sample; A wins where its pick scores strictly higher under
// theta_star, ties where both pick the same response (or scores are equal).
// The triple sums to one.
WinTieLoss simulated_win_rate(const policy::PolicyParams& policy_a,
                              const policy::PolicyParams& policy_b,
                              std::span<const data::PreferenceSample> heldout,
                              std::span<const double> theta_star);

// Fraction of positions where two label sequences disagree; measurement
// counterpart of the combiner's flip-rate analysis.
inline double empirical_flip_rate(std::span<const BinaryLabel> labels_a,
                                  std::span<const BinaryLabel> labels_b) {
  return mechanisms::disagreement_rate(labels_a, labels_b);
}

// Ground-truth labels of a held-out set via the audited eval gate.
std::vector<BinaryLabel> true_labels_for_eval(
    std::span<const data::PreferenceSample> heldout);

}  // namespace props::eval
