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
//
// Experiment harness for preference-privacy training on a synthetic
// Bradley-Terry world: generate worlds, run method sweeps, account budgets,
// and re-score stored results.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "props/accounting.h"
#include "props/data.h"
#include "props/eval.h"
#include "props/experiment.h"

namespace {

using props::experiment::ExperimentConfig;
using props::experiment::RunRecord;

ExperimentConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config '" + path + "'");
  }
  nlohmann::json j;
  in >> j;
  return ExperimentConfig::from_json(j);
}

int cmd_generate(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed) {
  ExperimentConfig config = read_config(config_path);
  const std::uint64_t world_seed = seed.value_or(config.seeds.front());
  const auto world = props::experiment::build_world_for_seed(config, world_seed);
  props::data::save_dataset(out_path, world);

  std::size_t ones = 0;
  for (const auto& sample : world.samples) {
    ones += static_cast<std::size_t>(
        props::data::OracleGate::true_label(sample,
                                            props::data::OracleScope::kEval)
            .value());
  }
  std::cout << "wrote " << out_path << ": n=" << world.params.n
            << " d=" << world.params.d << " label_balance="
            << static_cast<double>(ones) / world.samples.size() << '\n';
  return 0;
}

int run_and_report(const ExperimentConfig& config, bool sweep_k,
                   const props::data::PreferenceDataset* fixed_world) {
  const auto records = props::experiment::run_cells(config, sweep_k,
                                                    fixed_world);
  const std::string path = props::experiment::write_results(config, records);

  std::size_t failed = 0;
  for (const auto& r : records) {
    if (!r.error.empty()) {
      ++failed;
      std::cerr << "cell failed: method=" << r.method << " epsilon="
                << r.epsilon << " seed=" << r.seed << ": " << r.error << '\n';
    }
  }
  std::cout << "wrote " << path << " (" << records.size() - failed << '/'
            << records.size() << " cells ok)\n";
  return failed == records.size() ? 1 : 0;
}

int cmd_run(const std::string& config_path, const std::string& data_path,
            const std::string& out_dir, int jobs, bool sweep_k) {
  ExperimentConfig config = read_config(config_path);
  if (!out_dir.empty()) {
    config.output_dir = out_dir;
  }
  if (jobs > 0) {
    config.jobs = jobs;
  }
  if (data_path.empty()) {
    return run_and_report(config, sweep_k, nullptr);
  }
  const auto world = props::data::load_dataset(data_path);
  return run_and_report(config, sweep_k, &world);
}

int cmd_account(double epsilon, int k, double delta_prime, double delta,
                const std::string& data_path) {
  if (!data_path.empty()) {
    const auto world = props::data::load_dataset(data_path);
    k = static_cast<int>(props::accounting::max_labeler_contribution(world));
    std::cout << "k (max labels per labeler in " << data_path << ") = " << k
              << '\n';
  }
  const props::accounting::LabelerBudget budget{epsilon, k, delta_prime};
  const double basic = props::accounting::basic_composition(budget);
  const auto advanced = props::accounting::advanced_composition(budget);
  std::cout << std::setprecision(10);
  std::cout << "preference-level budget: (" << epsilon << ", 0)\n";
  std::cout << "labeler-level, basic composition:    (" << basic << ", 0)\n";
  std::cout << "labeler-level, advanced composition: (" << advanced.epsilon
            << ", " << advanced.delta << ")\n";
  std::cout << "gradient-perturbation noise scale sigma(" << epsilon << ", "
            << delta << ") = "
            << props::accounting::dpsgd_noise_scale(epsilon, delta) << '\n';
  return 0;
}

int cmd_eval(const std::string& results_path, const std::string& config_path,
             const std::string& data_path) {
  const auto records = props::experiment::load_results(results_path);
  if (records.empty()) {
    std::cerr << "no records in " << results_path << '\n';
    return 1;
  }
  std::set<std::string> hashes;
  for (const auto& r : records) {
    hashes.insert(r.config_hash);
  }
  if (hashes.size() > 1) {
    std::cerr << "refusing to mix runs: " << hashes.size()
              << " distinct config hashes in " << results_path << '\n';
    return 1;
  }

  std::optional<ExperimentConfig> config;
  std::optional<props::data::PreferenceDataset> fixed_world;
  if (!config_path.empty()) {
    config = read_config(config_path);
    if (config->hash() != *hashes.begin()) {
      std::cerr << "refusing to mix runs: config hash " << config->hash()
                << " does not match records (" << *hashes.begin() << ")\n";
      return 1;
    }
  }
  if (!data_path.empty()) {
    fixed_world = props::data::load_dataset(data_path);
  }
  if (!config && !fixed_world) {
    std::cerr << "eval needs --config or --data to rebuild the world\n";
    return 1;
  }

  std::cout << "method,epsilon,k,seed,gap_stored,gap_recomputed,accuracy\n";
  const double heldout_fraction = config ? config->heldout_fraction : 0.2;
  for (const auto& r : records) {
    if (!r.error.empty()) {
      continue;
    }
    const props::data::PreferenceDataset world =
        fixed_world ? *fixed_world
                    : props::experiment::build_world_for_seed(*config, r.seed);
    const auto split =
        props::experiment::split_heldout(world, heldout_fraction, r.seed);
    const props::policy::PolicyParams params{r.theta_hat, r.beta};
    const double gap = props::eval::suboptimality_gap(
        r.theta_hat, split.train.params.theta_star);
    const double accuracy =
        props::eval::label_accuracy(params, split.heldout.samples);
    std::cout << r.method << ',' << r.epsilon << ',' << r.k_stages << ','
              << r.seed << ',' << std::setprecision(12) << r.gap << ',' << gap
              << ',' << accuracy << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference-privacy training experiments on a synthetic "
               "Bradley-Terry world"};
  app.require_subcommand(1);

  std::string config_path;
  std::string data_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  int jobs = 0;

  auto* generate = app.add_subcommand(
      "generate", "Draw a synthetic preference world and write it to a file");
  generate->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  generate->add_option("--out", out, "output dataset path")->required();
  generate->add_option("--seed", seed, "world seed (default: first config seed)");

  auto* run = app.add_subcommand(
      "run", "Run every (method, epsilon, seed) cell and write result tables");
  run->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  run->add_option("--data", data_path, "fixed world file (optional)");
  run->add_option("--out", out, "output directory override");
  run->add_option("--jobs", jobs, "worker threads");

  auto* sweep = app.add_subcommand(
      "sweep", "Run cells over every epsilon and stage count in the config");
  sweep->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  sweep->add_option("--data", data_path, "fixed world file (optional)");
  sweep->add_option("--out", out, "output directory override");
  sweep->add_option("--jobs", jobs, "worker threads");

  double epsilon = 0.1;
  int k = 1;
  double delta_prime = 1e-5;
  double delta = 1e-10;
  auto* account = app.add_subcommand(
      "account", "Print preference- and labeler-level budgets");
  account->add_option("--epsilon", epsilon, "preference-level budget")
      ->required();
  account->add_option("--k", k, "labels contributed by one labeler");
  account->add_option("--delta-prime", delta_prime,
                      "advanced-composition slack");
  account->add_option("--delta", delta, "delta for the noise-scale reference");
  account->add_option("--data", data_path,
                      "derive k from a dataset's labeler ids");

  std::string results_path;
  auto* eval = app.add_subcommand(
      "eval", "Re-score stored parameters against a world");
  eval->add_option("--results", results_path, "results_<hash>.jsonl file")
      ->required();
  eval->add_option("--config", config_path, "config used for the run");
  eval->add_option("--data", data_path, "fixed world file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      return cmd_generate(config_path, out, seed);
    }
    if (run->parsed()) {
      return cmd_run(config_path, data_path, out, jobs, /*sweep_k=*/false);
    }
    if (sweep->parsed()) {
      return cmd_run(config_path, data_path, out, jobs, /*sweep_k=*/true);
    }
    if (account->parsed()) {
      return cmd_account(epsilon, k, delta_prime, delta, data_path);
    }
    if (eval->parsed()) {
      return cmd_eval(results_path, config_path, data_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
