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
#include <optional>
#include <span>
#include <vector>

#include "props/accounting.h"
#include "props/data.h"
#include "props/labels.h"
#include "props/policy.h"

namespace props::trainers {

// Mini-batch gradient-descent settings. `seed` drives the per-epoch shuffle
// order (and the gradient-noise stream for the private trainer); orchestrators
// overwrite it with a stage-derived value so whole runs are reproducible from
// a single run seed.
struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 3;
  int batch_size = 64;
  std::uint64_t seed = 0;
  std::vector<double> init_theta;  // empty means zeros
  double beta = 5.0;

  void validate(std::size_t n) const;
};

// How stage k > 1 obtains the model error rate fed to the label combiner.
// kOracle evaluates the intermediate model against ground truth through the
// audited gate; it exists to validate the estimator and is excluded from
// label-privacy claims.
enum class GammaModelMode { kEstimated, kOracle };

struct PropsConfig {
  int stages = 2;  // K
  double epsilon = 1.0;
  std::vector<TrainConfig> stage_train;  // size 1 replicates across stages
  GammaModelMode gamma_model_mode = GammaModelMode::kEstimated;
  std::uint64_t seed = 0;
  // Test hook: overrides the flip probability implied by epsilon
  // (mechanism-off equivalence checks).
  std::optional<double> force_gamma_eps;

  void validate() const;
};

// Per-stage account of the label fusion in stages 2..K.
struct StageDiagnostics {
  int stage_index = 0;  // 1-based; first combined stage is 2
  std::optional<double> gamma_hat;
  std::optional<double> disagreement_mu;
  std::int64_t labels_changed_vs_rr = 0;
  bool combiner_skipped = false;
};

struct PropsResult {
  policy::PolicyParams params;
  std::vector<StageDiagnostics> stages;
};

// Shuffle/noise seed for stage `stage_index` (0-based) of a run.
std::uint64_t train_stream_seed(std::uint64_t run_seed, int stage_index);

// Deterministic mini-batch gradient descent on the preference loss. Batch
// gradients are per-example sums divided by the batch size, accumulated in
// index order. Throws TrainingDivergedError (with the 0-based global step)
// if parameters stop being finite.
policy::PolicyParams train_dpo(std::span<const policy::FeaturePair> pairs,
                               std::span<const BinaryLabel> labels,
                               const TrainConfig& config);

// Gradient-perturbed variant: per-example gradients are clipped to L2 norm
// mech.clip_threshold, summed, perturbed with spherical Gaussian noise of
// per-coordinate standard deviation mech.sigma * mech.clip_threshold, and
// divided by the batch size. Consumes ground-truth labels through the
// audited trainer gate (this mechanism privatizes gradients, not labels).
policy::PolicyParams train_dpsgd(const data::PreferenceDataset& dataset,
                                 const TrainConfig& config,
                                 const accounting::GaussianMechanismParams& mech);

// The K-stage self-alignment loop: one randomized-response pass over the
// whole dataset, a K-way partition, stage 1 trained on the privatized labels
// from the zero policy, and each later stage trained (warm-started) on labels
// fused from the previous stage's predictions and the privatized labels.
// Ground truth is never read on this path unless gamma_model_mode is kOracle.
//
// At the flip-probability boundaries (gamma_eps = 0 or 1/2, the epsilon = 0
// and epsilon -> infinity cases) the combiner has nothing to fuse and stages
// fall back to the privatized labels, flagged in the diagnostics.
PropsResult run_props(const data::PreferenceDataset& world,
                      const PropsConfig& config);

// Baseline: one randomized-response pass, one training run over everything.
policy::PolicyParams run_rr_baseline(const data::PreferenceDataset& world,
                                     const mechanisms::RRParams& rr,
                                     const TrainConfig& config,
                                     std::uint64_t run_seed);

inline policy::PolicyParams run_rr_baseline(const data::PreferenceDataset& world,
                                            double epsilon,
                                            const TrainConfig& config,
                                            std::uint64_t run_seed) {
  return run_rr_baseline(world, mechanisms::RRParams::from_epsilon(epsilon),
                         config, run_seed);
}

// Ground-truth training through the audited gate; the recovery target for
// gap measurements.
policy::PolicyParams run_nonprivate(const data::PreferenceDataset& world,
                                    const TrainConfig& config,
                                    std::uint64_t run_seed);

}  // namespace props::trainers
