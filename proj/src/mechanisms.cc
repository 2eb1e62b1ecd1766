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

#include "props/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "props/errors.h"

namespace props::mechanisms {

double flip_probability(double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw std::invalid_argument(
        "flip_probability: epsilon must be finite and nonnegative");
  }
  // 1 / (1 + e^eps) computed as e^-eps / (1 + e^-eps) to avoid overflow.
  const double t = std::exp(-epsilon);
  return t / (1.0 + t);
}

RRParams RRParams::from_epsilon(double epsilon) {
  return RRParams{epsilon, flip_probability(epsilon)};
}

RRParams RRParams::noiseless() {
  return RRParams{std::numeric_limits<double>::infinity(), 0.0};
}

RRParams RRParams::with_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 0.5)) {
    throw std::invalid_argument("RRParams: gamma must lie in [0, 1/2]");
  }
  const double epsilon = gamma == 0.0
                             ? std::numeric_limits<double>::infinity()
                             : std::log((1.0 - gamma) / gamma);
  return RRParams{epsilon, gamma};
}

namespace {

void check_open_interval(double gamma, const char* name) {
  if (!(gamma > 0.0 && gamma < 0.5)) {
    throw std::invalid_argument(std::string("CombinerParams: ") + name +
                                " must lie strictly inside (0, 1/2)");
  }
}

}  // namespace

CombinerParams CombinerParams::checked(double gamma_eps, double gamma_model) {
  check_open_interval(gamma_eps, "gamma_eps");
  check_open_interval(gamma_model, "gamma_model");
  return CombinerParams{gamma_eps, gamma_model};
}

double mle_statistic(BinaryLabel l_rr, BinaryLabel l_model,
                     const CombinerParams& params) {
  check_open_interval(params.gamma_eps, "gamma_eps");
  check_open_interval(params.gamma_model, "gamma_model");
  const double rr_odds =
      std::log((1.0 - params.gamma_eps) / params.gamma_eps);
  const double model_odds =
      std::log((1.0 - params.gamma_model) / params.gamma_model);
  const double rr_sign = l_rr.value() == 0 ? 1.0 : -1.0;
  const double model_sign = l_model.value() == 0 ? 1.0 : -1.0;
  return rr_sign * rr_odds + model_sign * model_odds;
}

BinaryLabel props_label(BinaryLabel l_rr, BinaryLabel l_model,
                        const CombinerParams& params) {
  return BinaryLabel(mle_statistic(l_rr, l_model, params) <= 0.0 ? 1 : 0);
}

double disagreement_rate(std::span<const BinaryLabel> l_model,
                         std::span<const BinaryLabel> l_rr) {
  if (l_model.size() != l_rr.size()) {
    throw std::invalid_argument("disagreement_rate: length mismatch");
  }
  if (l_model.empty()) {
    throw std::invalid_argument("disagreement_rate: empty input");
  }
  std::size_t disagreements = 0;
  for (std::size_t i = 0; i < l_model.size(); ++i) {
    disagreements += static_cast<std::size_t>(l_model[i] ^ l_rr[i]);
  }
  return static_cast<double>(disagreements) /
         static_cast<double>(l_model.size());
}

double estimate_model_error_unclamped(double mu, double gamma_eps) {
  if (!(mu >= 0.0 && mu <= 1.0)) {
    throw std::invalid_argument(
        "estimate_model_error: mu must lie in [0, 1]");
  }
  if (!(gamma_eps >= 0.0)) {
    throw std::invalid_argument(
        "estimate_model_error: gamma_eps must be nonnegative");
  }
  if (gamma_eps >= 0.5) {
    throw EstimatorUndefinedError(
        "estimate_model_error: undefined for gamma_eps >= 1/2 (epsilon = 0)");
  }
  return (mu - gamma_eps) / (1.0 - 2.0 * gamma_eps);
}

double estimate_model_error(double mu, double gamma_eps) {
  return std::clamp(estimate_model_error_unclamped(mu, gamma_eps),
                    kGammaClampLo, kGammaClampHi);
}

}  // namespace props::mechanisms
