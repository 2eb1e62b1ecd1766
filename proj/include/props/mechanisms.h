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

#include <concepts>
#include <span>
#include <vector>

#include "props/labels.h"

namespace props::mechanisms {

// Clamp window applied to estimated model error rates before they enter the
// combiner. Keeps both log-odds finite.
inline constexpr double kGammaClampLo = 1e-4;
inline constexpr double kGammaClampHi = 0.5 - 1e-4;

// Flip probability of binary randomized response at privacy budget epsilon:
// 1 / (1 + e^epsilon). Strictly decreasing, 1/2 at epsilon = 0.
// Throws std::invalid_argument for negative or non-finite epsilon.
double flip_probability(double epsilon);

// Parameters of the randomized-response mechanism.
struct RRParams {
  double epsilon = 0.0;
  double gamma_eps = 0.5;

  // Standard construction: gamma derived from a finite budget.
  static RRParams from_epsilon(double epsilon);

  // Mechanism-off proxy (epsilon -> infinity): labels pass through unflipped.
  static RRParams noiseless();

  // Direct flip-probability construction, gamma in [0, 1/2]. The implied
  // epsilon is log((1 - gamma) / gamma). Used by tests and mechanism-off
  // equivalence checks.
  static RRParams with_gamma(double gamma);
};

template <typename S>
concept UniformSource = requires(S s) {
  { s.uniform() } -> std::convertible_to<double>;
};

// Flips each label independently with probability params.gamma_eps. Consumes
// exactly one uniform draw per label, in sequence order, so outputs are
// reproducible given a seeded stream.
template <UniformSource S>
std::vector<BinaryLabel> randomized_response(std::span<const BinaryLabel> labels,
                                             const RRParams& params, S& rng) {
  std::vector<BinaryLabel> out;
  out.reserve(labels.size());
  for (const BinaryLabel label : labels) {
    const bool flip = rng.uniform() < params.gamma_eps;
    out.push_back(flip ? label.complement() : label);
  }
  return out;
}

// Error rates of the two noisy label sources fused by the combiner. Both
// must lie strictly inside (0, 1/2) so the log-odds are finite and positive.
struct CombinerParams {
  double gamma_eps;
  double gamma_model;

  static CombinerParams checked(double gamma_eps, double gamma_model);
};

// Log-likelihood ratio of the hypothesis "true label 0" against "true label
// 1" given one randomized-response label and one model label:
//   (-1)^l_rr * log((1-gamma_eps)/gamma_eps)
//     + (-1)^l_model * log((1-gamma_model)/gamma_model).
double mle_statistic(BinaryLabel l_rr, BinaryLabel l_model,
                     const CombinerParams& params);

// Fused label: 1 when the statistic is <= 0, else 0. Ties resolve to 1.
// Equals the model label on all four input combinations when
// gamma_model < gamma_eps, and the randomized-response label when
// gamma_model > gamma_eps.
BinaryLabel props_label(BinaryLabel l_rr, BinaryLabel l_model,
                        const CombinerParams& params);

// Fraction of positions where the two label sequences disagree.
// Throws std::invalid_argument on length mismatch or empty input.
double disagreement_rate(std::span<const BinaryLabel> l_model,
                         std::span<const BinaryLabel> l_rr);

// Model error rate implied by a disagreement fraction mu against
// randomized-response labels with flip rate gamma_eps:
//   (mu - gamma_eps) / (1 - 2 * gamma_eps),
// unbiased when the two noise processes are independent. Throws
// EstimatorUndefinedError when gamma_eps >= 1/2 (epsilon = 0).
double estimate_model_error_unclamped(double mu, double gamma_eps);

// Same estimate clamped to [kGammaClampLo, kGammaClampHi] for use in the
// combiner.
double estimate_model_error(double mu, double gamma_eps);

}  // namespace props::mechanisms
