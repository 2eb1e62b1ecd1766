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

#include "props/trainers.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "props/errors.h"
#include "props/mechanisms.h"
#include "props/rng.h"

namespace props::trainers {

namespace {

bool all_finite(std::span<const double> values) {
  for (const double v : values) {
    if (!std::isfinite(v)) {
      return false;
    }
  }
  return true;
}

std::vector<double> initial_theta(const TrainConfig& config, std::size_t d) {
  if (config.init_theta.empty()) {
    return std::vector<double>(d, 0.0);
  }
  if (config.init_theta.size() != d) {
    throw std::invalid_argument(
        "TrainConfig: init_theta length does not match feature dimension");
  }
  return config.init_theta;
}

// Shared descent loop. `batch_gradient` fills `grad` with the update
// direction for the index range [begin, end) of `order`.
template <typename BatchGradient>
policy::PolicyParams descend(std::span<const policy::FeaturePair> pairs,
                             const TrainConfig& config,
                             BatchGradient&& batch_gradient) {
  config.validate(pairs.size());
  const std::size_t n = pairs.size();
  const std::size_t d = pairs[0].phi_1.size();
  policy::PolicyParams params{initial_theta(config, d), config.beta};

  Rng shuffle_rng(mix_seed(config.seed, stream_tag::kTrainShuffle));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(d, 0.0);

  std::int64_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t begin = 0; begin < n;
         begin += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(n, begin + static_cast<std::size_t>(config.batch_size));
      batch_gradient(params, order, begin, end, grad);
      for (std::size_t j = 0; j < d; ++j) {
        params.theta[j] -= config.learning_rate * grad[j];
      }
      if (!all_finite(params.theta)) {
        throw TrainingDivergedError(step, "non-finite parameters");
      }
      ++step;
    }
  }
  return params;
}

std::vector<BinaryLabel> rr_labels(std::span<const data::PrivatizedSample> part) {
  std::vector<BinaryLabel> labels;
  labels.reserve(part.size());
  for (const auto& s : part) {
    labels.push_back(s.label_rr);
  }
  return labels;
}

std::vector<BinaryLabel> true_labels(std::span<const data::PreferenceSample> part,
                                     data::OracleScope scope) {
  std::vector<BinaryLabel> labels;
  labels.reserve(part.size());
  for (const auto& s : part) {
    labels.push_back(data::OracleGate::true_label(s, scope));
  }
  return labels;
}

}  // namespace

void TrainConfig::validate(std::size_t n) const {
  if (n == 0) {
    throw std::invalid_argument("TrainConfig: empty dataset");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument(
        "TrainConfig: learning_rate must be finite and positive");
  }
  if (epochs < 1) {
    throw std::invalid_argument("TrainConfig: epochs must be positive");
  }
  if (batch_size < 1 || static_cast<std::size_t>(batch_size) > n) {
    throw std::invalid_argument(
        "TrainConfig: batch_size must lie in [1, dataset size]");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("TrainConfig: beta must be positive");
  }
}

void PropsConfig::validate() const {
  if (stages < 2) {
    throw std::invalid_argument("PropsConfig: at least two stages required");
  }
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("PropsConfig: epsilon must be nonnegative");
  }
  if (stage_train.empty()) {
    throw std::invalid_argument("PropsConfig: stage_train must not be empty");
  }
  if (stage_train.size() != 1 &&
      stage_train.size() != static_cast<std::size_t>(stages)) {
    throw std::invalid_argument(
        "PropsConfig: stage_train must hold one config or one per stage");
  }
  if (force_gamma_eps &&
      !(*force_gamma_eps >= 0.0 && *force_gamma_eps <= 0.5)) {
    throw std::invalid_argument(
        "PropsConfig: forced gamma_eps must lie in [0, 1/2]");
  }
}

std::uint64_t train_stream_seed(std::uint64_t run_seed, int stage_index) {
  return mix_seed(mix_seed(run_seed, stream_tag::kTrainShuffle),
                  static_cast<std::uint64_t>(stage_index));
}

policy::PolicyParams train_dpo(std::span<const policy::FeaturePair> pairs,
                               std::span<const BinaryLabel> labels,
                               const TrainConfig& config) {
  if (pairs.size() != labels.size()) {
    throw std::invalid_argument("train_dpo: labels do not match dataset size");
  }
  const std::size_t d = pairs.empty() ? 0 : pairs[0].phi_1.size();
  std::vector<double> example(d, 0.0);
  return descend(pairs, config,
                 [&](const policy::PolicyParams& params,
                     const std::vector<std::size_t>& order, std::size_t begin,
                     std::size_t end, std::vector<double>& grad) {
                   std::fill(grad.begin(), grad.end(), 0.0);
                   for (std::size_t i = begin; i < end; ++i) {
                     const std::size_t idx = order[i];
                     policy::example_gradient(params, pairs[idx], labels[idx],
                                              example);
                     for (std::size_t j = 0; j < d; ++j) {
                       grad[j] += example[j];
                     }
                   }
                   const double inv = 1.0 / static_cast<double>(end - begin);
                   for (double& v : grad) {
                     v *= inv;
                   }
                 });
}

policy::PolicyParams train_dpsgd(
    const data::PreferenceDataset& dataset, const TrainConfig& config,
    const accounting::GaussianMechanismParams& mech) {
  // clip_threshold = 0 is a legal degenerate mechanism: every gradient is
  // clipped away and the noise scale collapses to zero.
  if (!(mech.clip_threshold >= 0.0)) {
    throw std::invalid_argument(
        "train_dpsgd: clip threshold must be nonnegative");
  }
  if (!(mech.sigma >= 0.0)) {
    throw std::invalid_argument("train_dpsgd: sigma must be nonnegative");
  }
  const auto pairs = policy::feature_pairs(
      std::span<const data::PreferenceSample>(dataset.samples));
  const auto labels = true_labels(dataset.samples, data::OracleScope::kTrainer);

  const std::size_t d = pairs.empty() ? 0 : pairs[0].phi_1.size();
  std::vector<double> example(d, 0.0);
  Rng noise_rng(mix_seed(config.seed, stream_tag::kGradientNoise));
  // sigma = 0 disables the mechanism even when the clip threshold is
  // infinite, so the product below must not be formed in that case.
  const double noise_stddev =
      mech.sigma == 0.0 ? 0.0 : mech.sigma * mech.clip_threshold;

  return descend(
      std::span<const policy::FeaturePair>(pairs), config,
      [&](const policy::PolicyParams& params,
          const std::vector<std::size_t>& order, std::size_t begin,
          std::size_t end, std::vector<double>& grad) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = begin; i < end; ++i) {
          const std::size_t idx = order[i];
          policy::example_gradient(params, pairs[idx], labels[idx], example);
          double norm_sq = 0.0;
          for (const double v : example) {
            norm_sq += v * v;
          }
          const double norm = std::sqrt(norm_sq);
          if (norm > mech.clip_threshold) {
            const double scale = mech.clip_threshold / norm;
            for (double& v : example) {
              v *= scale;
            }
          }
          for (std::size_t j = 0; j < d; ++j) {
            grad[j] += example[j];
          }
        }
        if (noise_stddev > 0.0) {
          for (std::size_t j = 0; j < d; ++j) {
            grad[j] += noise_stddev * noise_rng.normal();
          }
        }
        const double inv = 1.0 / static_cast<double>(end - begin);
        for (double& v : grad) {
          v *= inv;
        }
      });
}

PropsResult run_props(const data::PreferenceDataset& world,
                      const PropsConfig& config) {
  config.validate();
  if (world.samples.size() < static_cast<std::size_t>(config.stages)) {
    throw std::invalid_argument("run_props: fewer samples than stages");
  }
  const mechanisms::RRParams rr =
      config.force_gamma_eps
          ? mechanisms::RRParams::with_gamma(*config.force_gamma_eps)
          : mechanisms::RRParams::from_epsilon(config.epsilon);

  // One randomized-response pass over everything, then a K-way partition.
  Rng rr_rng(mix_seed(config.seed, stream_tag::kRandomizedResponse));
  const data::PrivatizedDataset privatized =
      data::privatize(world, rr, rr_rng);
  const auto parts = data::partition(
      std::span<const data::PrivatizedSample>(privatized.samples),
      config.stages);
  const auto truth_parts = data::partition(
      std::span<const data::PreferenceSample>(world.samples), config.stages);

  // Boundary flip rates carry no fusable signal; stages fall back to the
  // privatized labels (at gamma_eps = 0 those equal ground truth, at 1/2
  // they are pure noise).
  const bool combiner_usable = rr.gamma_eps > 0.0 && rr.gamma_eps < 0.5;

  auto stage_config = [&](int stage_index) {
    TrainConfig cfg = config.stage_train.size() == 1
                          ? config.stage_train[0]
                          : config.stage_train[static_cast<std::size_t>(
                                stage_index)];
    cfg.seed = train_stream_seed(config.seed, stage_index);
    return cfg;
  };

  PropsResult result;
  // Stage 1: privatized labels from the zero policy.
  {
    const auto pairs = policy::feature_pairs(parts[0]);
    const auto labels = rr_labels(parts[0]);
    result.params = train_dpo(pairs, labels, stage_config(0));
  }

  for (int k = 1; k < config.stages; ++k) {
    const auto part = parts[static_cast<std::size_t>(k)];
    const auto pairs = policy::feature_pairs(part);
    const std::vector<BinaryLabel> labels_rr = rr_labels(part);

    StageDiagnostics diag;
    diag.stage_index = k + 1;
    std::vector<BinaryLabel> labels_stage;
    if (!combiner_usable) {
      diag.combiner_skipped = true;
      labels_stage = labels_rr;
    } else {
      const std::vector<BinaryLabel> labels_model =
          policy::predict_labels(result.params, pairs);
      const double mu = mechanisms::disagreement_rate(labels_model, labels_rr);
      diag.disagreement_mu = mu;
      double gamma_model;
      if (config.gamma_model_mode == GammaModelMode::kOracle) {
        // Measured flip rate of the intermediate model against ground truth
        // on this stage's partition, through the audited gate.
        const auto truth =
            true_labels(truth_parts[static_cast<std::size_t>(k)],
                        data::OracleScope::kTrainer);
        gamma_model =
            std::clamp(mechanisms::disagreement_rate(labels_model, truth),
                       mechanisms::kGammaClampLo, mechanisms::kGammaClampHi);
      } else {
        gamma_model = mechanisms::estimate_model_error(mu, rr.gamma_eps);
      }
      diag.gamma_hat = gamma_model;
      const auto combiner =
          mechanisms::CombinerParams::checked(rr.gamma_eps, gamma_model);
      labels_stage.reserve(part.size());
      for (std::size_t i = 0; i < part.size(); ++i) {
        const BinaryLabel fused =
            mechanisms::props_label(labels_rr[i], labels_model[i], combiner);
        diag.labels_changed_vs_rr += fused ^ labels_rr[i];
        labels_stage.push_back(fused);
      }
    }

    TrainConfig cfg = stage_config(k);
    cfg.init_theta = result.params.theta;  // warm start from the prior stage
    result.params = train_dpo(pairs, labels_stage, cfg);
    result.stages.push_back(std::move(diag));
  }
  return result;
}

policy::PolicyParams run_rr_baseline(const data::PreferenceDataset& world,
                                     const mechanisms::RRParams& rr,
                                     const TrainConfig& config,
                                     std::uint64_t run_seed) {
  Rng rr_rng(mix_seed(run_seed, stream_tag::kRandomizedResponse));
  const data::PrivatizedDataset privatized =
      data::privatize(world, rr, rr_rng);
  const auto pairs = policy::feature_pairs(privatized);
  const auto labels =
      rr_labels(std::span<const data::PrivatizedSample>(privatized.samples));
  TrainConfig cfg = config;
  cfg.seed = train_stream_seed(run_seed, 0);
  return train_dpo(pairs, labels, cfg);
}

policy::PolicyParams run_nonprivate(const data::PreferenceDataset& world,
                                    const TrainConfig& config,
                                    std::uint64_t run_seed) {
  const auto pairs = policy::feature_pairs(
      std::span<const data::PreferenceSample>(world.samples));
  const auto labels = true_labels(world.samples, data::OracleScope::kTrainer);
  TrainConfig cfg = config;
  cfg.seed = train_stream_seed(run_seed, 0);
  return train_dpo(pairs, labels, cfg);
}

}  // namespace props::trainers
