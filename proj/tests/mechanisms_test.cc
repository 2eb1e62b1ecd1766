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

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "props/errors.h"
#include "props/rng.h"
#include "test_oracles.h"

namespace props::mechanisms {
namespace {

using ::props::testing::ScriptedUniforms;
using ::props::testing::brute_force_combined_label;

std::vector<BinaryLabel> make_labels(std::initializer_list<int> values) {
  std::vector<BinaryLabel> labels;
  for (const int v : values) {
    labels.push_back(BinaryLabel(v));
  }
  return labels;
}

TEST(FlipProbability, KnownValues) {
  EXPECT_DOUBLE_EQ(flip_probability(0.0), 0.5);
  EXPECT_NEAR(flip_probability(std::log(3.0)), 0.25, 1e-15);
  // 1 / (1 + e^0.1) to high precision.
  EXPECT_NEAR(flip_probability(0.1), 0.47502081252106, 1e-12);
}

TEST(FlipProbability, MonotoneDecreasing) {
  double previous = flip_probability(0.0);
  for (double epsilon = 0.05; epsilon < 12.0; epsilon += 0.05) {
    const double gamma = flip_probability(epsilon);
    EXPECT_LT(gamma, previous) << "at epsilon = " << epsilon;
    EXPECT_GT(gamma, 0.0);
    EXPECT_LE(gamma, 0.5);
    previous = gamma;
  }
}

TEST(FlipProbability, RejectsBadEpsilon) {
  EXPECT_THROW(flip_probability(-0.1), std::invalid_argument);
  EXPECT_THROW(flip_probability(std::nan("")), std::invalid_argument);
  EXPECT_THROW(flip_probability(std::numeric_limits<double>::infinity()),
               std::invalid_argument);
}

TEST(RRParams, Construction) {
  const RRParams p = RRParams::from_epsilon(1.0);
  EXPECT_DOUBLE_EQ(p.gamma_eps, flip_probability(1.0));
  EXPECT_DOUBLE_EQ(RRParams::noiseless().gamma_eps, 0.0);
  EXPECT_TRUE(std::isinf(RRParams::noiseless().epsilon));
  // with_gamma inverts the flip probability.
  const RRParams q = RRParams::with_gamma(0.25);
  EXPECT_NEAR(q.epsilon, std::log(3.0), 1e-15);
  EXPECT_THROW(RRParams::with_gamma(0.6), std::invalid_argument);
  EXPECT_THROW(RRParams::with_gamma(-0.1), std::invalid_argument);
}

TEST(RandomizedResponse, NoiselessIsIdentity) {
  const auto labels = make_labels({0, 1, 1, 0, 1});
  Rng rng(7);
  const auto out = randomized_response(std::span<const BinaryLabel>(labels),
                                       RRParams::noiseless(), rng);
  ASSERT_EQ(out.size(), labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    EXPECT_EQ(out[i], labels[i]);
  }
}

TEST(RandomizedResponse, ForcedFlipViaScriptedStream) {
  const auto labels = make_labels({1});
  ScriptedUniforms stream{{0.1}};  // below gamma -> flip
  const auto out = randomized_response(std::span<const BinaryLabel>(labels),
                                       RRParams::with_gamma(0.25), stream);
  EXPECT_EQ(out[0], BinaryLabel(0));
}

TEST(RandomizedResponse, OneDrawPerLabelInOrder) {
  const auto labels = make_labels({1, 1, 1, 1});
  // Draws straddle gamma = 0.25: flip, keep, flip, keep.
  ScriptedUniforms stream{{0.2, 0.9, 0.1, 0.3}};
  const auto out = randomized_response(std::span<const BinaryLabel>(labels),
                                       RRParams::with_gamma(0.25), stream);
  EXPECT_EQ(out[0], BinaryLabel(0));
  EXPECT_EQ(out[1], BinaryLabel(1));
  EXPECT_EQ(out[2], BinaryLabel(0));
  EXPECT_EQ(out[3], BinaryLabel(1));
  EXPECT_EQ(stream.index, 4u);
}

TEST(RandomizedResponse, EmpiricalFlipFractionMatchesGamma) {
  const std::size_t n = 200000;
  std::vector<BinaryLabel> labels(n, BinaryLabel(1));
  const RRParams params = RRParams::from_epsilon(1.0);  // gamma ~ 0.26894
  Rng rng(12345);
  const auto out = randomized_response(std::span<const BinaryLabel>(labels),
                                       params, rng);
  std::size_t flips = 0;
  for (std::size_t i = 0; i < n; ++i) {
    flips += static_cast<std::size_t>(out[i] ^ labels[i]);
  }
  const double fraction = static_cast<double>(flips) / static_cast<double>(n);
  const double tolerance =
      3.0 * std::sqrt(params.gamma_eps * (1.0 - params.gamma_eps) /
                      static_cast<double>(n));
  EXPECT_NEAR(fraction, params.gamma_eps, tolerance);
}

TEST(MleStatistic, KnownValues) {
  const auto params = CombinerParams::checked(0.25, 0.1);
  // log 3 + log 9 = log 27.
  EXPECT_NEAR(mle_statistic(BinaryLabel(0), BinaryLabel(0), params),
              3.2958368660043291, 1e-12);
  // Disagreement resolved toward the stronger source: -log 3 + log 9 = log 3.
  EXPECT_NEAR(mle_statistic(BinaryLabel(1), BinaryLabel(0), params),
              std::log(3.0), 1e-12);
  // Sign symmetry.
  EXPECT_DOUBLE_EQ(mle_statistic(BinaryLabel(1), BinaryLabel(1), params),
                   -mle_statistic(BinaryLabel(0), BinaryLabel(0), params));
  EXPECT_LT(mle_statistic(BinaryLabel(1), BinaryLabel(1), params), 0.0);
}

TEST(MleStatistic, MatchesProbabilityTable) {
  // Against the explicit conditional-probability table, on a coarse grid.
  for (double ge = 0.05; ge < 0.5; ge += 0.1) {
    for (double gm = 0.05; gm < 0.5; gm += 0.1) {
      const auto params = CombinerParams::checked(ge, gm);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          auto prob = [](int observed, int truth, double gamma) {
            return observed == truth ? 1.0 - gamma : gamma;
          };
          const double expected =
              std::log((prob(a, 0, ge) * prob(b, 0, gm)) /
                       (prob(a, 1, ge) * prob(b, 1, gm)));
          EXPECT_NEAR(mle_statistic(BinaryLabel(a), BinaryLabel(b), params),
                      expected, 1e-12);
        }
      }
    }
  }
}

TEST(MleStatistic, RejectsBoundaryRates) {
  EXPECT_THROW(CombinerParams::checked(0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(CombinerParams::checked(0.5, 0.1), std::invalid_argument);
  EXPECT_THROW(CombinerParams::checked(0.25, 0.0), std::invalid_argument);
  EXPECT_THROW(CombinerParams::checked(0.25, 0.5), std::invalid_argument);
}

TEST(PropsLabel, KnownCases) {
  const auto params = CombinerParams::checked(0.25, 0.1);
  // Agreement passes through.
  EXPECT_EQ(props_label(BinaryLabel(0), BinaryLabel(0), params),
            BinaryLabel(0));
  EXPECT_EQ(props_label(BinaryLabel(1), BinaryLabel(1), params),
            BinaryLabel(1));
  // Disagreements go to the lower-error source (the model here).
  EXPECT_EQ(props_label(BinaryLabel(0), BinaryLabel(1), params),
            BinaryLabel(1));
  EXPECT_EQ(props_label(BinaryLabel(1), BinaryLabel(0), params),
            BinaryLabel(0));
  // Tied rates: the statistic is exactly zero on disagreements and the tie
  // rule picks 1.
  const auto tied = CombinerParams::checked(0.25, 0.25);
  EXPECT_EQ(props_label(BinaryLabel(1), BinaryLabel(0), tied), BinaryLabel(1));
  EXPECT_EQ(props_label(BinaryLabel(0), BinaryLabel(1), tied), BinaryLabel(1));
}

TEST(PropsLabel, MatchesBruteForceArgmaxOnGrid) {
  // Exact agreement with posterior argmax over the probability table for all
  // four label combinations on the 81-point rate grid.
  for (int ie = 1; ie <= 9; ++ie) {
    for (int im = 1; im <= 9; ++im) {
      const double ge = 0.05 * ie;
      const double gm = 0.05 * im;
      const auto params = CombinerParams::checked(ge, gm);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          EXPECT_EQ(props_label(BinaryLabel(a), BinaryLabel(b), params),
                    brute_force_combined_label(BinaryLabel(a), BinaryLabel(b),
                                               ge, gm))
              << "ge=" << ge << " gm=" << gm << " a=" << a << " b=" << b;
        }
      }
    }
  }
}

TEST(PropsLabel, SelectorProperty) {
  for (int ie = 1; ie <= 9; ++ie) {
    for (int im = 1; im <= 9; ++im) {
      if (ie == im) {
        continue;
      }
      const double ge = 0.05 * ie;
      const double gm = 0.05 * im;
      const auto params = CombinerParams::checked(ge, gm);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const BinaryLabel fused =
              props_label(BinaryLabel(a), BinaryLabel(b), params);
          if (gm < ge) {
            EXPECT_EQ(fused, BinaryLabel(b));
          } else {
            EXPECT_EQ(fused, BinaryLabel(a));
          }
        }
      }
    }
  }
}

TEST(DisagreementRate, BasicCases) {
  const auto a = make_labels({1, 0, 1, 0});
  const auto same = make_labels({1, 0, 1, 0});
  const auto complement = make_labels({0, 1, 0, 1});
  const auto half = make_labels({1, 1, 1, 1});
  EXPECT_DOUBLE_EQ(disagreement_rate(a, same), 0.0);
  EXPECT_DOUBLE_EQ(disagreement_rate(a, complement), 1.0);
  EXPECT_DOUBLE_EQ(disagreement_rate(a, half), 0.5);
}

TEST(DisagreementRate, RejectsBadInput) {
  const auto a = make_labels({1, 0});
  const auto b = make_labels({1});
  EXPECT_THROW(disagreement_rate(a, b), std::invalid_argument);
  const std::vector<BinaryLabel> empty;
  EXPECT_THROW(disagreement_rate(empty, empty), std::invalid_argument);
}

TEST(EstimateModelError, ClampedEndpoints) {
  // Zero numerator clamps up to the floor.
  EXPECT_DOUBLE_EQ(estimate_model_error(0.25, 0.25), 1e-4);
  // Maximal disagreement clamps just below 1/2.
  EXPECT_DOUBLE_EQ(estimate_model_error(0.5, 0.25), 0.5 - 1e-4);
  EXPECT_DOUBLE_EQ(estimate_model_error_unclamped(0.25, 0.25), 0.0);
  EXPECT_DOUBLE_EQ(estimate_model_error_unclamped(0.5, 0.25), 0.5);
}

TEST(EstimateModelError, UndefinedAtHalf) {
  EXPECT_THROW(estimate_model_error(0.3, 0.5), EstimatorUndefinedError);
  EXPECT_THROW(estimate_model_error(0.3, 0.7), EstimatorUndefinedError);
  EXPECT_THROW(estimate_model_error(1.5, 0.25), std::invalid_argument);
}

TEST(EstimateModelError, RecoversTrueRateFromSimulation) {
  // Independent-noise simulation: both observations are XOR corruptions of
  // the same truth; the disagreement rate then identifies the model rate.
  const double gamma_eps = 0.25;
  const double gamma_model = 0.1;
  const std::size_t n = 100000;
  Rng rng(99);
  std::size_t disagreements = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int u = rng.uniform() < gamma_eps ? 1 : 0;
    const int v = rng.uniform() < gamma_model ? 1 : 0;
    disagreements += static_cast<std::size_t>(u ^ v);
  }
  const double mu =
      static_cast<double>(disagreements) / static_cast<double>(n);
  EXPECT_NEAR(estimate_model_error(mu, gamma_eps), gamma_model, 0.01);
}

TEST(EstimateModelError, UnbiasedOverTrials) {
  // Mean of the unclamped estimate over 100 trials of n = 10^4 stays within
  // 0.003 of the true rate across a small rate grid.
  for (const double gamma_eps : {0.1, 0.25, 0.4}) {
    for (const double gamma_model : {0.1, 0.3}) {
      Rng rng(mix_seed(2026, static_cast<std::uint64_t>(
                                 1000 * gamma_eps + 10 * gamma_model)));
      double sum = 0.0;
      const int trials = 100;
      const std::size_t n = 10000;
      for (int t = 0; t < trials; ++t) {
        std::size_t disagreements = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const int u = rng.uniform() < gamma_eps ? 1 : 0;
          const int v = rng.uniform() < gamma_model ? 1 : 0;
          disagreements += static_cast<std::size_t>(u ^ v);
        }
        const double mu =
            static_cast<double>(disagreements) / static_cast<double>(n);
        sum += estimate_model_error_unclamped(mu, gamma_eps);
      }
      EXPECT_NEAR(sum / trials, gamma_model, 0.003)
          << "gamma_eps=" << gamma_eps << " gamma_model=" << gamma_model;
    }
  }
}

TEST(FlipRateLaw, CombinedLabelFlipsAtMinRate) {
  // Simulated truth plus independent corruptions; the fused label's flip
  // rate against truth lands within 0.01 of min(gamma_eps, gamma_model).
  const std::size_t n = 200000;
  for (const double gamma_eps : {0.1, 0.25, 0.4}) {
    for (const double gamma_model : {0.1, 0.25, 0.4}) {
      const auto params = CombinerParams::checked(gamma_eps, gamma_model);
      Rng rng(mix_seed(31337, static_cast<std::uint64_t>(
                                  1000 * gamma_eps + 10 * gamma_model)));
      std::size_t flips = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const BinaryLabel truth = BinaryLabel::from_bool(rng.uniform() < 0.5);
        const BinaryLabel l_rr = rng.uniform() < gamma_eps
                                     ? truth.complement()
                                     : truth;
        const BinaryLabel l_model = rng.uniform() < gamma_model
                                        ? truth.complement()
                                        : truth;
        flips += static_cast<std::size_t>(
            props_label(l_rr, l_model, params) ^ truth);
      }
      const double rate = static_cast<double>(flips) / static_cast<double>(n);
      EXPECT_NEAR(rate, std::min(gamma_eps, gamma_model), 0.01)
          << "gamma_eps=" << gamma_eps << " gamma_model=" << gamma_model;
    }
  }
}

}  // namespace
}  // namespace props::mechanisms
