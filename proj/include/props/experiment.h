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
#include <string>
#include <vector>

#include "json.hpp"
#include "props/data.h"
#include "props/eval.h"
#include "props/trainers.h"

namespace props::experiment {

enum class Method { kNonprivate, kRr, kDpsgd, kProps };

std::string method_name(Method method);
Method method_from_name(const std::string& name);

// One entry of the config's method list: the method plus its trainer
// settings (resolved against the shared "train" block) and method-specific
// knobs.
struct MethodSpec {
  Method method = Method::kNonprivate;
  trainers::TrainConfig train;
  // DP-SGD only.
  double dpsgd_delta = 1e-10;
  double dpsgd_clip = 5.0;
  // Staged method only.
  trainers::GammaModelMode gamma_model_mode =
      trainers::GammaModelMode::kEstimated;
};

// Declarative description of a sweep: a world, methods, budgets, stage
// counts, and seeds. Every numeric choice lives here so a config plus a seed
// list reproduces a run exactly.
struct ExperimentConfig {
  data::WorldParams world;          // theta_star may be empty (drawn per seed)
  double theta_star_radius = 1.0;
  trainers::TrainConfig base_train;
  std::vector<MethodSpec> methods;
  std::vector<double> epsilons;
  std::vector<int> k_values{2};
  std::vector<std::uint64_t> seeds;
  double heldout_fraction = 0.2;
  // Slack used when reporting advanced-composition labeler budgets.
  double delta_prime = 1e-5;
  std::string output_dir = "out";
  int jobs = 1;

  void validate() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  // FNV-1a hash of the canonical JSON form, as fixed-width hex.
  std::string hash() const;
};

struct PairwiseResult {
  std::string opponent;
  double win = 0.0;
  double tie = 0.0;
  double loss = 0.0;
};

// One (method, epsilon, k, seed) cell's outcome. runtime_ms is the only
// field allowed to differ between identical reruns.
struct RunRecord {
  std::string method;
  double epsilon = 0.0;
  int k_stages = 1;
  std::uint64_t seed = 0;
  double beta = 0.0;
  std::vector<double> theta_hat;
  double gap = 0.0;
  double label_accuracy = 0.0;
  std::vector<PairwiseResult> comparisons;
  std::vector<trainers::StageDiagnostics> stage_diagnostics;
  bool label_privacy_claimed = false;
  std::int64_t oracle_reads_trainer = 0;
  std::int64_t oracle_reads_eval = 0;
  std::optional<double> delta;  // DP-SGD only
  // Labeler-level budgets for the label-privatizing methods, computed from
  // the heaviest labeler in the training split.
  std::optional<std::int64_t> labeler_k;
  std::optional<double> epsilon_labeler_basic;
  std::optional<double> epsilon_labeler_advanced;
  std::optional<double> delta_labeler;
  std::string error;            // nonempty when the cell failed
  std::string config_hash;
  double runtime_ms = 0.0;

  nlohmann::ordered_json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
};

// World shared by every method at one seed: ground-truth weights drawn from
// the seed (unless the config pins them), features from the world stream.
data::PreferenceDataset build_world_for_seed(const ExperimentConfig& config,
                                             std::uint64_t seed);

struct SplitWorld {
  data::PreferenceDataset train;
  data::PreferenceDataset heldout;
};

// Seed-fixed held-out split; identical across methods at the same seed.
SplitWorld split_heldout(const data::PreferenceDataset& world, double fraction,
                         std::uint64_t seed);

// Executes all cells (worker pool of config.jobs threads, deterministic cell
// order regardless of parallelism), then fills pairwise comparisons between
// methods at equal (epsilon, seed). When sweep_k is true the staged method
// expands over config.k_values; otherwise the first entry is used.
// A fixed world may be supplied to bypass per-seed generation.
std::vector<RunRecord> run_cells(
    const ExperimentConfig& config, bool sweep_k = false,
    const data::PreferenceDataset* fixed_world = nullptr);

// Writes results_<hash>.jsonl and summary_<hash>.csv under
// config.output_dir. Returns the results path.
std::string write_results(const ExperimentConfig& config,
                          const std::vector<RunRecord>& records);

std::vector<RunRecord> load_results(const std::string& path);

}  // namespace props::experiment
