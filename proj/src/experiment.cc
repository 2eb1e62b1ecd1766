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

#include "props/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

#include "props/accounting.h"
#include "props/errors.h"

namespace props::experiment {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kMethodNames[] = {"nonprivate", "rr", "dpsgd", "props"};

}  // namespace

std::string method_name(Method method) {
  return kMethodNames[static_cast<int>(method)];
}

Method method_from_name(const std::string& name) {
  for (int i = 0; i < 4; ++i) {
    if (name == kMethodNames[i]) {
      return static_cast<Method>(i);
    }
  }
  throw std::invalid_argument("unknown method '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (world.d <= 0 || world.n <= 0) {
    throw std::invalid_argument("config: world.d and world.n must be positive");
  }
  if (!world.theta_star.empty() &&
      world.theta_star.size() != static_cast<std::size_t>(world.d)) {
    throw std::invalid_argument(
        "config: explicit theta_star length must equal world.d");
  }
  if (methods.empty()) {
    throw std::invalid_argument("config: at least one method required");
  }
  if (epsilons.empty()) {
    throw std::invalid_argument("config: at least one epsilon required");
  }
  if (seeds.empty()) {
    throw std::invalid_argument("config: at least one seed required");
  }
  if (k_values.empty()) {
    throw std::invalid_argument("config: at least one k value required");
  }
  for (const int k : k_values) {
    if (k < 2) {
      throw std::invalid_argument("config: k values must be at least 2");
    }
  }
  if (!(heldout_fraction > 0.0 && heldout_fraction < 1.0)) {
    throw std::invalid_argument(
        "config: heldout_fraction must lie in (0, 1)");
  }
  if (jobs < 1) {
    throw std::invalid_argument("config: jobs must be positive");
  }
}

namespace {

trainers::TrainConfig train_from_json(const json& j,
                                      trainers::TrainConfig base) {
  if (j.contains("learning_rate")) base.learning_rate = j["learning_rate"];
  if (j.contains("epochs")) base.epochs = j["epochs"];
  if (j.contains("batch_size")) base.batch_size = j["batch_size"];
  if (j.contains("beta")) base.beta = j["beta"];
  return base;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig config;
  const json& w = j.at("world");
  config.world.d = w.at("d");
  config.world.n = w.at("n");
  if (w.contains("beta_gen")) config.world.beta_gen = w["beta_gen"];
  if (w.contains("feature_scale")) config.world.feature_scale = w["feature_scale"];
  if (w.contains("labeler_count")) config.world.labeler_count = w["labeler_count"];
  if (w.contains("theta_star")) {
    config.world.theta_star = w["theta_star"].get<std::vector<double>>();
  }
  if (w.contains("theta_star_radius")) {
    config.theta_star_radius = w["theta_star_radius"];
  }
  if (j.contains("train")) {
    config.base_train = train_from_json(j["train"], config.base_train);
  }
  for (const json& m : j.at("methods")) {
    MethodSpec spec;
    spec.method = method_from_name(m.at("method"));
    spec.train = train_from_json(m, config.base_train);
    if (spec.method == Method::kDpsgd && !m.contains("epochs")) {
      spec.train.epochs = 1;  // single pass per gradient-perturbation run
    }
    if (m.contains("delta")) spec.dpsgd_delta = m["delta"];
    if (m.contains("clip_threshold")) spec.dpsgd_clip = m["clip_threshold"];
    if (m.contains("gamma_model_mode")) {
      const std::string mode = m["gamma_model_mode"];
      if (mode == "estimated") {
        spec.gamma_model_mode = trainers::GammaModelMode::kEstimated;
      } else if (mode == "oracle") {
        spec.gamma_model_mode = trainers::GammaModelMode::kOracle;
      } else {
        throw std::invalid_argument("config: unknown gamma_model_mode '" +
                                    mode + "'");
      }
    }
    config.methods.push_back(spec);
  }
  config.epsilons = j.at("epsilons").get<std::vector<double>>();
  if (j.contains("k_values")) {
    config.k_values = j["k_values"].get<std::vector<int>>();
  }
  config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("heldout_fraction")) {
    config.heldout_fraction = j["heldout_fraction"];
  }
  if (j.contains("delta_prime")) config.delta_prime = j["delta_prime"];
  if (j.contains("output_dir")) config.output_dir = j["output_dir"];
  if (j.contains("jobs")) config.jobs = j["jobs"];
  config.validate();
  return config;
}

ordered_json ExperimentConfig::to_json() const {
  ordered_json w{{"d", world.d},
                 {"n", world.n},
                 {"beta_gen", world.beta_gen},
                 {"feature_scale", world.feature_scale},
                 {"labeler_count", world.labeler_count},
                 {"theta_star_radius", theta_star_radius}};
  if (!world.theta_star.empty()) {
    w["theta_star"] = world.theta_star;
  }
  ordered_json methods_json = ordered_json::array();
  for (const MethodSpec& spec : methods) {
    ordered_json m{{"method", method_name(spec.method)},
                   {"learning_rate", spec.train.learning_rate},
                   {"epochs", spec.train.epochs},
                   {"batch_size", spec.train.batch_size},
                   {"beta", spec.train.beta}};
    if (spec.method == Method::kDpsgd) {
      m["delta"] = spec.dpsgd_delta;
      m["clip_threshold"] = spec.dpsgd_clip;
    }
    if (spec.method == Method::kProps) {
      m["gamma_model_mode"] =
          spec.gamma_model_mode == trainers::GammaModelMode::kOracle
              ? "oracle"
              : "estimated";
    }
    methods_json.push_back(m);
  }
  return ordered_json{{"world", w},
                      {"methods", methods_json},
                      {"epsilons", epsilons},
                      {"k_values", k_values},
                      {"seeds", seeds},
                      {"heldout_fraction", heldout_fraction},
                      {"delta_prime", delta_prime}};
}

std::string ExperimentConfig::hash() const {
  // FNV-1a over the canonical dump. Worker counts and output locations are
  // deliberately outside the hash: they cannot change a result.
  const std::string dump = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

ordered_json RunRecord::to_json() const {
  ordered_json stages_json = ordered_json::array();
  for (const auto& s : stage_diagnostics) {
    ordered_json e{{"stage_index", s.stage_index}};
    if (s.gamma_hat) e["gamma_hat"] = *s.gamma_hat;
    if (s.disagreement_mu) e["disagreement_mu"] = *s.disagreement_mu;
    e["labels_changed_vs_rr"] = s.labels_changed_vs_rr;
    e["combiner_skipped"] = s.combiner_skipped;
    stages_json.push_back(e);
  }
  ordered_json comparisons_json = ordered_json::array();
  for (const auto& c : comparisons) {
    comparisons_json.push_back(ordered_json{{"opponent", c.opponent},
                                            {"win", c.win},
                                            {"tie", c.tie},
                                            {"loss", c.loss},
                                            {"win_plus_tie", c.win + c.tie}});
  }
  ordered_json j{{"method", method},
                 {"epsilon", epsilon},
                 {"k_stages", k_stages},
                 {"seed", seed},
                 {"beta", beta},
                 {"theta_hat", theta_hat},
                 {"gap", gap},
                 {"label_accuracy", label_accuracy},
                 {"comparisons", comparisons_json},
                 {"stage_diagnostics", stages_json},
                 {"label_privacy_claimed", label_privacy_claimed},
                 {"oracle_reads_trainer", oracle_reads_trainer},
                 {"oracle_reads_eval", oracle_reads_eval}};
  if (delta) j["delta"] = *delta;
  if (labeler_k) j["labeler_k"] = *labeler_k;
  if (epsilon_labeler_basic) {
    j["epsilon_labeler_basic"] = *epsilon_labeler_basic;
  }
  if (epsilon_labeler_advanced) {
    j["epsilon_labeler_advanced"] = *epsilon_labeler_advanced;
  }
  if (delta_labeler) j["delta_labeler"] = *delta_labeler;
  j["error"] = error;
  j["config_hash"] = config_hash;
  j["runtime_ms"] = runtime_ms;
  return j;
}

RunRecord RunRecord::from_json(const json& j) {
  RunRecord r;
  r.method = j.at("method");
  r.epsilon = j.at("epsilon");
  r.k_stages = j.at("k_stages");
  r.seed = j.at("seed");
  r.beta = j.at("beta");
  r.theta_hat = j.at("theta_hat").get<std::vector<double>>();
  r.gap = j.at("gap");
  r.label_accuracy = j.at("label_accuracy");
  for (const json& c : j.at("comparisons")) {
    r.comparisons.push_back(
        PairwiseResult{c.at("opponent"), c.at("win"), c.at("tie"),
                       c.at("loss")});
  }
  for (const json& s : j.at("stage_diagnostics")) {
    trainers::StageDiagnostics d;
    d.stage_index = s.at("stage_index");
    if (s.contains("gamma_hat")) d.gamma_hat = s["gamma_hat"].get<double>();
    if (s.contains("disagreement_mu")) {
      d.disagreement_mu = s["disagreement_mu"].get<double>();
    }
    d.labels_changed_vs_rr = s.at("labels_changed_vs_rr");
    d.combiner_skipped = s.at("combiner_skipped");
    r.stage_diagnostics.push_back(d);
  }
  r.label_privacy_claimed = j.at("label_privacy_claimed");
  r.oracle_reads_trainer = j.at("oracle_reads_trainer");
  r.oracle_reads_eval = j.at("oracle_reads_eval");
  if (j.contains("delta")) r.delta = j["delta"].get<double>();
  if (j.contains("labeler_k")) r.labeler_k = j["labeler_k"].get<std::int64_t>();
  if (j.contains("epsilon_labeler_basic")) {
    r.epsilon_labeler_basic = j["epsilon_labeler_basic"].get<double>();
  }
  if (j.contains("epsilon_labeler_advanced")) {
    r.epsilon_labeler_advanced = j["epsilon_labeler_advanced"].get<double>();
  }
  if (j.contains("delta_labeler")) {
    r.delta_labeler = j["delta_labeler"].get<double>();
  }
  r.error = j.at("error");
  r.config_hash = j.at("config_hash");
  r.runtime_ms = j.at("runtime_ms");
  return r;
}

data::PreferenceDataset build_world_for_seed(const ExperimentConfig& config,
                                             std::uint64_t seed) {
  data::WorldParams params = config.world;
  Rng master(seed);
  if (params.theta_star.empty()) {
    Rng star_rng = master.substream(stream_tag::kThetaStar);
    params.theta_star =
        data::sample_theta_star(params.d, config.theta_star_radius, star_rng);
  }
  Rng world_rng = master.substream(stream_tag::kWorld);
  return data::generate_world(params, world_rng);
}

SplitWorld split_heldout(const data::PreferenceDataset& world, double fraction,
                         std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("split_heldout: fraction must lie in (0, 1)");
  }
  const std::size_t n = world.samples.size();
  std::size_t heldout_n = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(n)));
  heldout_n = std::clamp<std::size_t>(heldout_n, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng = Rng(seed).substream(stream_tag::kHeldoutSplit);
  split_rng.shuffle(order);

  std::vector<std::size_t> train_idx(order.begin(),
                                     order.end() - static_cast<std::ptrdiff_t>(heldout_n));
  std::vector<std::size_t> heldout_idx(
      order.end() - static_cast<std::ptrdiff_t>(heldout_n), order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(heldout_idx.begin(), heldout_idx.end());

  SplitWorld split{{world.params, {}}, {world.params, {}}};
  split.train.samples.reserve(train_idx.size());
  split.heldout.samples.reserve(heldout_idx.size());
  for (const std::size_t i : train_idx) {
    split.train.samples.push_back(world.samples[i]);
  }
  for (const std::size_t i : heldout_idx) {
    split.heldout.samples.push_back(world.samples[i]);
  }
  split.train.params.n = static_cast<int>(split.train.samples.size());
  split.heldout.params.n = static_cast<int>(split.heldout.samples.size());
  return split;
}

namespace {

struct Cell {
  MethodSpec spec;
  double epsilon;
  int k;
  std::uint64_t seed;
};

RunRecord execute_cell(const ExperimentConfig& config, const Cell& cell,
                       const data::PreferenceDataset* fixed_world) {
  RunRecord record;
  record.method = method_name(cell.spec.method);
  record.epsilon = cell.epsilon;
  record.k_stages = cell.spec.method == Method::kProps ? cell.k : 1;
  record.seed = cell.seed;
  record.beta = cell.spec.train.beta;
  record.config_hash = config.hash();

  const auto start = std::chrono::steady_clock::now();
  data::OracleGate::reset_counters();
  try {
    const data::PreferenceDataset world =
        fixed_world ? *fixed_world : build_world_for_seed(config, cell.seed);
    const SplitWorld split =
        split_heldout(world, config.heldout_fraction, cell.seed);

    if (cell.spec.method == Method::kRr || cell.spec.method == Method::kProps) {
      // Labeler-level view of the per-preference budget.
      const std::int64_t k = accounting::max_labeler_contribution(split.train);
      record.labeler_k = k;
      record.epsilon_labeler_basic =
          accounting::basic_composition(cell.epsilon, static_cast<int>(k));
      const auto advanced = accounting::advanced_composition(
          cell.epsilon, static_cast<int>(k), config.delta_prime);
      record.epsilon_labeler_advanced = advanced.epsilon;
      record.delta_labeler = advanced.delta;
    }

    policy::PolicyParams params;
    switch (cell.spec.method) {
      case Method::kNonprivate:
        record.label_privacy_claimed = false;
        params = trainers::run_nonprivate(split.train, cell.spec.train,
                                          cell.seed);
        break;
      case Method::kRr:
        record.label_privacy_claimed = true;
        params = trainers::run_rr_baseline(split.train, cell.epsilon,
                                           cell.spec.train, cell.seed);
        break;
      case Method::kDpsgd: {
        record.label_privacy_claimed = false;
        record.delta = cell.spec.dpsgd_delta;
        trainers::TrainConfig cfg = cell.spec.train;
        cfg.seed = trainers::train_stream_seed(cell.seed, 0);
        params = trainers::train_dpsgd(
            split.train, cfg,
            accounting::GaussianMechanismParams::from_budget(
                cell.epsilon, cell.spec.dpsgd_delta, cell.spec.dpsgd_clip));
        break;
      }
      case Method::kProps: {
        record.label_privacy_claimed =
            cell.spec.gamma_model_mode == trainers::GammaModelMode::kEstimated;
        trainers::PropsConfig props_config;
        props_config.stages = cell.k;
        props_config.epsilon = cell.epsilon;
        props_config.stage_train = {cell.spec.train};
        props_config.gamma_model_mode = cell.spec.gamma_model_mode;
        props_config.seed = cell.seed;
        trainers::PropsResult result = trainers::run_props(split.train,
                                                           props_config);
        params = std::move(result.params);
        record.stage_diagnostics = std::move(result.stages);
        break;
      }
    }
    record.oracle_reads_trainer =
        data::OracleGate::reads(data::OracleScope::kTrainer);

    record.theta_hat = params.theta;
    record.gap = eval::suboptimality_gap(params.theta,
                                         split.train.params.theta_star);
    record.label_accuracy = eval::label_accuracy(params, split.heldout.samples);
    record.oracle_reads_eval =
        data::OracleGate::reads(data::OracleScope::kEval);
  } catch (const std::exception& e) {
    record.error = e.what();
  }
  record.runtime_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - start)
          .count();
  return record;
}

}  // namespace

std::vector<RunRecord> run_cells(const ExperimentConfig& config, bool sweep_k,
                                 const data::PreferenceDataset* fixed_world) {
  config.validate();
  std::vector<int> ks = sweep_k ? config.k_values
                                : std::vector<int>{config.k_values.front()};

  // Deterministic cell order: method (config order), epsilon, k, seed.
  std::vector<Cell> cells;
  for (const MethodSpec& spec : config.methods) {
    for (const double epsilon : config.epsilons) {
      const std::vector<int> method_ks =
          spec.method == Method::kProps ? ks : std::vector<int>{ks.front()};
      for (const int k : method_ks) {
        for (const std::uint64_t seed : config.seeds) {
          cells.push_back(Cell{spec, epsilon, k, seed});
        }
      }
    }
  }

  std::vector<RunRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::max(1, std::min<int>(config.jobs,
                                                static_cast<int>(cells.size())));
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) {
        return;
      }
      records[i] = execute_cell(config, cells[i], fixed_world);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }

  // Pairwise comparisons between methods at equal (epsilon, seed), judged on
  // the same held-out set by the true reward.
  for (std::size_t a = 0; a < records.size(); ++a) {
    RunRecord& ra = records[a];
    if (!ra.error.empty()) {
      continue;
    }
    const data::PreferenceDataset world =
        fixed_world ? *fixed_world : build_world_for_seed(config, ra.seed);
    const SplitWorld split =
        split_heldout(world, config.heldout_fraction, ra.seed);
    for (std::size_t b = 0; b < records.size(); ++b) {
      const RunRecord& rb = records[b];
      if (a == b || !rb.error.empty() || ra.seed != rb.seed ||
          ra.epsilon != rb.epsilon) {
        continue;
      }
      if (ra.method == rb.method && ra.k_stages == rb.k_stages) {
        continue;
      }
      const policy::PolicyParams pa{ra.theta_hat, ra.beta};
      const policy::PolicyParams pb{rb.theta_hat, rb.beta};
      const eval::WinTieLoss w = eval::simulated_win_rate(
          pa, pb, split.heldout.samples, split.train.params.theta_star);
      std::string opponent = rb.method;
      if (rb.method == "props" && sweep_k) {
        opponent += "_k" + std::to_string(rb.k_stages);
      }
      ra.comparisons.push_back(PairwiseResult{opponent, w.win, w.tie, w.loss});
    }
  }
  return records;
}

namespace {

std::string csv_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

std::string write_results(const ExperimentConfig& config,
                          const std::vector<RunRecord>& records) {
  std::filesystem::create_directories(config.output_dir);
  const std::string hash = config.hash();
  const std::string results_path =
      config.output_dir + "/results_" + hash + ".jsonl";
  {
    std::ofstream out(results_path);
    if (!out) {
      throw std::runtime_error("cannot write " + results_path);
    }
    for (const RunRecord& r : records) {
      out << r.to_json().dump() << '\n';
    }
  }
  {
    std::ofstream out(config.output_dir + "/config_" + hash + ".json");
    out << config.to_json().dump(2) << '\n';
  }

  // Flat summary: per-(epsilon, k, method) aggregates, then pairwise rows.
  const std::string summary_path =
      config.output_dir + "/summary_" + hash + ".csv";
  std::ofstream out(summary_path);
  if (!out) {
    throw std::runtime_error("cannot write " + summary_path);
  }
  out << "row_type,epsilon,k,method,opponent,runs,gap_mean,gap_std,"
         "accuracy_mean,win,tie,loss,win_plus_tie\n";

  std::map<std::tuple<double, int, std::string>, std::vector<const RunRecord*>>
      groups;
  for (const RunRecord& r : records) {
    if (r.error.empty()) {
      groups[{r.epsilon, r.k_stages, r.method}].push_back(&r);
    }
  }
  for (const auto& [key, group] : groups) {
    const auto& [epsilon, k, method] = key;
    double gap_sum = 0.0;
    double acc_sum = 0.0;
    for (const RunRecord* r : group) {
      gap_sum += r->gap;
      acc_sum += r->label_accuracy;
    }
    const double n = static_cast<double>(group.size());
    const double gap_mean = gap_sum / n;
    double gap_var = 0.0;
    for (const RunRecord* r : group) {
      gap_var += (r->gap - gap_mean) * (r->gap - gap_mean);
    }
    const double gap_std =
        group.size() > 1 ? std::sqrt(gap_var / (n - 1.0)) : 0.0;
    out << "method," << csv_double(epsilon) << ',' << k << ',' << method
        << ",," << group.size() << ',' << csv_double(gap_mean) << ','
        << csv_double(gap_std) << ',' << csv_double(acc_sum / n) << ",,,,\n";

    // Mean pairwise win/tie/loss against each opponent.
    std::map<std::string, eval::WinTieLoss> pair_sums;
    std::map<std::string, int> pair_counts;
    for (const RunRecord* r : group) {
      for (const PairwiseResult& c : r->comparisons) {
        pair_sums[c.opponent].win += c.win;
        pair_sums[c.opponent].tie += c.tie;
        pair_sums[c.opponent].loss += c.loss;
        ++pair_counts[c.opponent];
      }
    }
    for (const auto& [opponent, sums] : pair_sums) {
      const double count = pair_counts[opponent];
      out << "pair," << csv_double(epsilon) << ',' << k << ',' << method << ','
          << opponent << ',' << pair_counts[opponent] << ",,,,"
          << csv_double(sums.win / count) << ',' << csv_double(sums.tie / count)
          << ',' << csv_double(sums.loss / count) << ','
          << csv_double((sums.win + sums.tie) / count) << '\n';
    }
  }
  return results_path;
}

std::vector<RunRecord> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read " + path);
  }
  std::vector<RunRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    records.push_back(RunRecord::from_json(json::parse(line)));
  }
  return records;
}

}  // namespace props::experiment
