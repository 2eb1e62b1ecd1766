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

#include <filesystem>
#include <fstream>
#include <set>

#include "gtest/gtest.h"

namespace props::experiment {
namespace {

ExperimentConfig small_config(const std::string& output_dir) {
  ExperimentConfig config;
  config.world.d = 4;
  config.world.n = 400;
  config.world.beta_gen = 5.0;
  config.base_train.epochs = 2;
  config.base_train.batch_size = 32;
  config.methods = {MethodSpec{Method::kNonprivate, config.base_train, 0, 0,
                               trainers::GammaModelMode::kEstimated},
                    MethodSpec{Method::kRr, config.base_train, 0, 0,
                               trainers::GammaModelMode::kEstimated},
                    MethodSpec{Method::kProps, config.base_train, 0, 0,
                               trainers::GammaModelMode::kEstimated}};
  config.epsilons = {1.0};
  config.seeds = {1, 2};
  config.output_dir = output_dir;
  return config;
}

class ExperimentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("props_experiment_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::filesystem::path dir_;
};

TEST_F(ExperimentTest, ConfigJsonRoundTripAndHash) {
  const ExperimentConfig config = small_config(dir_.string());
  const auto j = config.to_json();
  const ExperimentConfig parsed = ExperimentConfig::from_json(j);
  EXPECT_EQ(parsed.hash(), config.hash());
  EXPECT_EQ(parsed.methods.size(), config.methods.size());
  EXPECT_EQ(parsed.seeds, config.seeds);

  ExperimentConfig changed = config;
  changed.epsilons = {0.5};
  EXPECT_NE(changed.hash(), config.hash());
}

TEST_F(ExperimentTest, ConfigValidation) {
  ExperimentConfig config = small_config(dir_.string());
  config.methods.clear();
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = small_config(dir_.string());
  config.heldout_fraction = 1.5;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = small_config(dir_.string());
  config.k_values = {1};
  EXPECT_THROW(config.validate(), std::invalid_argument);

  // Degenerate world sizes are rejected with the field named.
  config = small_config(dir_.string());
  config.world.n = 0;
  try {
    config.validate();
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("world.n"), std::string::npos);
  }
}

TEST_F(ExperimentTest, WorldAndSplitAreSeedDeterministic) {
  const ExperimentConfig config = small_config(dir_.string());
  const auto world_a = build_world_for_seed(config, 9);
  const auto world_b = build_world_for_seed(config, 9);
  ASSERT_EQ(world_a.samples.size(), world_b.samples.size());
  EXPECT_EQ(world_a.params.theta_star, world_b.params.theta_star);

  const auto split_a = split_heldout(world_a, 0.2, 9);
  const auto split_b = split_heldout(world_b, 0.2, 9);
  EXPECT_EQ(split_a.heldout.samples.size(), 80u);
  EXPECT_EQ(split_a.train.samples.size(), 320u);

  // Disjoint cover by sample id.
  std::set<std::int64_t> ids;
  for (const auto& s : split_a.train.samples) {
    EXPECT_TRUE(ids.insert(s.sample_id()).second);
  }
  for (const auto& s : split_a.heldout.samples) {
    EXPECT_TRUE(ids.insert(s.sample_id()).second);
  }
  EXPECT_EQ(ids.size(), 400u);
  for (std::size_t i = 0; i < split_a.heldout.samples.size(); ++i) {
    EXPECT_EQ(split_a.heldout.samples[i].sample_id(),
              split_b.heldout.samples[i].sample_id());
  }
}

TEST_F(ExperimentTest, GeneratedDatasetFilesAreByteIdentical) {
  const ExperimentConfig config = small_config(dir_.string());
  const auto path_a = dir_ / "world_a.jsonl";
  const auto path_b = dir_ / "world_b.jsonl";
  data::save_dataset(path_a.string(), build_world_for_seed(config, 5));
  data::save_dataset(path_b.string(), build_world_for_seed(config, 5));
  std::ifstream a(path_a, std::ios::binary);
  std::ifstream b(path_b, std::ios::binary);
  const std::string bytes_a((std::istreambuf_iterator<char>(a)),
                            std::istreambuf_iterator<char>());
  const std::string bytes_b((std::istreambuf_iterator<char>(b)),
                            std::istreambuf_iterator<char>());
  EXPECT_EQ(bytes_a, bytes_b);
  EXPECT_FALSE(bytes_a.empty());
}

TEST_F(ExperimentTest, RunCellsProducesCompleteDeterministicRecords) {
  const ExperimentConfig config = small_config(dir_.string());
  const auto records = run_cells(config);
  ASSERT_EQ(records.size(), 6u);  // 3 methods x 1 epsilon x 2 seeds

  for (const auto& r : records) {
    EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_TRUE(std::isfinite(r.gap));
    EXPECT_GE(r.label_accuracy, 0.0);
    EXPECT_LE(r.label_accuracy, 1.0);
    EXPECT_EQ(r.theta_hat.size(), 4u);
    EXPECT_EQ(r.config_hash, config.hash());
    // Two opponents at the same (epsilon, seed).
    EXPECT_EQ(r.comparisons.size(), 2u);
    for (const auto& c : r.comparisons) {
      EXPECT_NEAR(c.win + c.tie + c.loss, 1.0, 1e-9);
    }
  }

  // Privacy-claimed cells never read ground truth in trainer scope.
  for (const auto& r : records) {
    if (r.label_privacy_claimed) {
      EXPECT_EQ(r.oracle_reads_trainer, 0) << r.method;
    }
    EXPECT_GT(r.oracle_reads_eval, 0);
  }

  // Stored gaps are recomputable from the stored parameters, and the
  // label-privatizing methods carry their labeler-level budgets.
  for (const auto& r : records) {
    const auto world = build_world_for_seed(config, r.seed);
    const auto split = split_heldout(world, config.heldout_fraction, r.seed);
    EXPECT_NEAR(r.gap,
                eval::suboptimality_gap(r.theta_hat,
                                        split.train.params.theta_star),
                1e-12);
    if (r.method == "rr" || r.method == "props") {
      ASSERT_TRUE(r.labeler_k.has_value());
      ASSERT_TRUE(r.epsilon_labeler_basic.has_value());
      ASSERT_TRUE(r.epsilon_labeler_advanced.has_value());
      EXPECT_DOUBLE_EQ(*r.epsilon_labeler_basic,
                       static_cast<double>(*r.labeler_k) * r.epsilon);
      EXPECT_GE(*r.epsilon_labeler_advanced, 0.0);
    } else {
      EXPECT_FALSE(r.labeler_k.has_value());
    }
  }

  // Re-running reproduces everything except runtimes.
  const auto again = run_cells(config);
  ASSERT_EQ(again.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto a = records[i].to_json();
    auto b = again[i].to_json();
    a.erase("runtime_ms");
    b.erase("runtime_ms");
    EXPECT_EQ(a.dump(), b.dump());
  }
}

TEST_F(ExperimentTest, ParallelExecutionMatchesSerial) {
  ExperimentConfig config = small_config(dir_.string());
  const auto serial = run_cells(config);
  config.jobs = 4;
  const auto parallel = run_cells(config);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].method, parallel[i].method);
    EXPECT_EQ(serial[i].theta_hat, parallel[i].theta_hat);
    EXPECT_EQ(serial[i].oracle_reads_trainer, parallel[i].oracle_reads_trainer);
  }
}

TEST_F(ExperimentTest, WriteAndLoadResultsRoundTrip) {
  const ExperimentConfig config = small_config(dir_.string());
  const auto records = run_cells(config);
  const std::string path = write_results(config, records);
  EXPECT_NE(path.find(config.hash()), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(path));
  EXPECT_TRUE(std::filesystem::exists(dir_ / ("summary_" + config.hash() + ".csv")));

  const auto loaded = load_results(path);
  ASSERT_EQ(loaded.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(loaded[i].to_json().dump(), records[i].to_json().dump());
  }

  // Summary rows carry both aggregate kinds.
  std::ifstream summary(dir_ / ("summary_" + config.hash() + ".csv"));
  std::string line;
  int method_rows = 0;
  int pair_rows = 0;
  while (std::getline(summary, line)) {
    if (line.rfind("method,", 0) == 0) ++method_rows;
    if (line.rfind("pair,", 0) == 0) ++pair_rows;
  }
  EXPECT_EQ(method_rows, 3);
  EXPECT_GT(pair_rows, 0);
}

TEST_F(ExperimentTest, CellFailuresAreIsolated) {
  ExperimentConfig config = small_config(dir_.string());
  // Sabotage one method with an impossible batch size; other cells proceed.
  config.methods[1].train.batch_size = 100000;
  const auto records = run_cells(config);
  int failed = 0;
  for (const auto& r : records) {
    if (!r.error.empty()) {
      ++failed;
      EXPECT_EQ(r.method, "rr");
    } else {
      EXPECT_TRUE(std::isfinite(r.gap));
    }
  }
  EXPECT_EQ(failed, 2);  // one per seed
}

TEST_F(ExperimentTest, SweepExpandsStageCounts) {
  ExperimentConfig config = small_config(dir_.string());
  config.methods = {MethodSpec{Method::kProps, config.base_train, 0, 0,
                               trainers::GammaModelMode::kEstimated}};
  config.k_values = {2, 4};
  const auto records = run_cells(config, /*sweep_k=*/true);
  ASSERT_EQ(records.size(), 4u);  // 2 k-values x 2 seeds
  std::set<int> ks;
  for (const auto& r : records) {
    ks.insert(r.k_stages);
    EXPECT_TRUE(r.error.empty()) << r.error;
    EXPECT_EQ(static_cast<int>(r.stage_diagnostics.size()), r.k_stages - 1);
  }
  EXPECT_EQ(ks, (std::set<int>{2, 4}));
}

}  // namespace
}  // namespace props::experiment
