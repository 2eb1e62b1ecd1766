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

namespace props::data {
struct PreferenceDataset;
}  // namespace props::data

namespace props::accounting {

// All logarithms in this module are natural logarithms.

// Per-labeler budget inputs: a preference-level budget, the number of labels
// one labeler contributed, and the advanced-composition slack.
struct LabelerBudget {
  double epsilon_pref = 0.0;
  int k = 1;
  double delta_prime = 1e-5;
};

// An (epsilon, delta) pair produced by a composition rule.
struct ComposedBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Labeler-level budget from k-fold basic composition: k * epsilon.
double basic_composition(double epsilon, int k);

// Labeler-level budget from advanced composition:
//   epsilon_labeler = k * epsilon^2 + epsilon * sqrt(2k * ln(1/delta_prime)),
//   delta_labeler   = delta_prime.
ComposedBudget advanced_composition(double epsilon, int k, double delta_prime);

inline double basic_composition(const LabelerBudget& budget) {
  return basic_composition(budget.epsilon_pref, budget.k);
}
inline ComposedBudget advanced_composition(const LabelerBudget& budget) {
  return advanced_composition(budget.epsilon_pref, budget.k,
                              budget.delta_prime);
}

// Gaussian noise multiplier for gradient perturbation:
//   sigma = sqrt(2 * ln(1.25 / delta)) / epsilon.
double dpsgd_noise_scale(double epsilon, double delta);

// Parameters of the Gaussian gradient mechanism. from_budget() enforces the
// sigma formula above; the plain aggregate permits a disabled mechanism
// (sigma = 0, unclipped) for equivalence checks.
struct GaussianMechanismParams {
  double epsilon;
  double delta;
  double clip_threshold;
  double sigma;

  static GaussianMechanismParams from_budget(double epsilon, double delta,
                                             double clip_threshold);
  static GaussianMechanismParams disabled();
};

// Largest number of samples attributed to any single labeler id. Throws on
// an empty dataset or a negative (missing) labeler id.
std::int64_t max_labeler_contribution(const data::PreferenceDataset& dataset);

}  // namespace props::accounting
