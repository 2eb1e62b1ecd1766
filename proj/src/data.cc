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

#include "props/data.h"

#include <cmath>
#include <fstream>
#include <utility>

#include "json.hpp"
#include "props/errors.h"

namespace props::data {

namespace {

using nlohmann::json;

thread_local std::int64_t eval_reads = 0;
thread_local std::int64_t trainer_reads = 0;

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double t = std::exp(x);
  return t / (1.0 + t);
}

}  // namespace

void WorldParams::validate() const {
  if (d <= 0) {
    throw std::invalid_argument("WorldParams: d must be positive");
  }
  if (n <= 0) {
    throw std::invalid_argument("WorldParams: n must be positive");
  }
  if (!(beta_gen > 0.0) || !std::isfinite(beta_gen)) {
    throw std::invalid_argument("WorldParams: beta_gen must be positive");
  }
  if (!(feature_scale > 0.0) || !std::isfinite(feature_scale)) {
    throw std::invalid_argument("WorldParams: feature_scale must be positive");
  }
  if (labeler_count <= 0) {
    throw std::invalid_argument("WorldParams: labeler_count must be positive");
  }
  if (theta_star.size() != static_cast<std::size_t>(d)) {
    throw std::invalid_argument("WorldParams: theta_star length must equal d");
  }
  for (const double v : theta_star) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("WorldParams: theta_star must be finite");
    }
  }
}

BinaryLabel OracleGate::true_label(const PreferenceSample& sample,
                                   OracleScope scope) {
  if (scope == OracleScope::kEval) {
    ++eval_reads;
  } else {
    ++trainer_reads;
  }
  return sample.label_true_;
}

std::int64_t OracleGate::reads(OracleScope scope) {
  return scope == OracleScope::kEval ? eval_reads : trainer_reads;
}

void OracleGate::reset_counters() {
  eval_reads = 0;
  trainer_reads = 0;
}

PreferenceSample::PreferenceSample(std::int64_t sample_id,
                                   std::int64_t labeler_id,
                                   std::vector<double> phi_1,
                                   std::vector<double> phi_2,
                                   BinaryLabel label_true)
    : sample_id_(sample_id),
      labeler_id_(labeler_id),
      phi_1_(std::move(phi_1)),
      phi_2_(std::move(phi_2)),
      label_true_(label_true) {
  if (phi_1_.empty() || phi_1_.size() != phi_2_.size()) {
    throw std::invalid_argument(
        "PreferenceSample: feature vectors must be nonempty and equal length");
  }
  for (std::size_t i = 0; i < phi_1_.size(); ++i) {
    if (!std::isfinite(phi_1_[i]) || !std::isfinite(phi_2_[i])) {
      throw std::invalid_argument(
          "PreferenceSample: feature entries must be finite");
    }
  }
}

std::vector<double> sample_theta_star(int d, double radius, Rng& rng) {
  if (d <= 0) {
    throw std::invalid_argument("sample_theta_star: d must be positive");
  }
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("sample_theta_star: radius must be finite");
  }
  std::vector<double> v(static_cast<std::size_t>(d));
  double norm_sq = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm_sq += x * x;
  }
  const double norm = std::sqrt(norm_sq);
  if (norm == 0.0) {
    // Probability-zero draw; fall back to the first axis.
    v.assign(static_cast<std::size_t>(d), 0.0);
    v[0] = radius;
    return v;
  }
  for (double& x : v) {
    x *= radius / norm;
  }
  return v;
}

PreferenceDataset generate_world(const WorldParams& params, Rng& rng) {
  params.validate();
  PreferenceDataset dataset;
  dataset.params = params;
  dataset.samples.reserve(static_cast<std::size_t>(params.n));
  const std::size_t d = static_cast<std::size_t>(params.d);
  for (int i = 0; i < params.n; ++i) {
    std::vector<double> phi_1(d);
    std::vector<double> phi_2(d);
    for (std::size_t j = 0; j < d; ++j) {
      phi_1[j] = rng.normal() * params.feature_scale;
    }
    for (std::size_t j = 0; j < d; ++j) {
      phi_2[j] = rng.normal() * params.feature_scale;
    }
    double margin = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      margin += params.theta_star[j] * (phi_1[j] - phi_2[j]);
    }
    const double p_first = stable_sigmoid(params.beta_gen * margin);
    const BinaryLabel label = BinaryLabel::from_bool(rng.uniform() < p_first);
    dataset.samples.emplace_back(i, i % params.labeler_count, std::move(phi_1),
                                 std::move(phi_2), label);
  }
  return dataset;
}

PrivatizedDataset privatize(const PreferenceDataset& dataset,
                            const mechanisms::RRParams& params, Rng& rng) {
  std::vector<BinaryLabel> truth;
  truth.reserve(dataset.samples.size());
  for (const PreferenceSample& sample : dataset.samples) {
    truth.push_back(sample.label_true_);
  }
  const std::vector<BinaryLabel> flipped =
      mechanisms::randomized_response(std::span<const BinaryLabel>(truth),
                                      params, rng);

  PrivatizedDataset out;
  out.epsilon = params.epsilon;
  out.gamma_eps = params.gamma_eps;
  out.samples.reserve(dataset.samples.size());
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const PreferenceSample& sample = dataset.samples[i];
    out.samples.push_back(PrivatizedSample{
        sample.sample_id(), sample.labeler_id(),
        std::vector<double>(sample.phi_1().begin(), sample.phi_1().end()),
        std::vector<double>(sample.phi_2().begin(), sample.phi_2().end()),
        flipped[i], params.epsilon});
  }
  return out;
}

void save_dataset(const std::string& path, const PreferenceDataset& dataset) {
  std::ofstream out(path);
  if (!out) {
    throw DatasetIoError(0, "cannot open '" + path + "' for writing");
  }
  json header = {
      {"version", kDatasetFormatVersion},
      {"d", dataset.params.d},
      {"n", dataset.params.n},
      {"beta_gen", dataset.params.beta_gen},
      {"theta_star", dataset.params.theta_star},
      {"feature_scale", dataset.params.feature_scale},
      {"labeler_count", dataset.params.labeler_count},
  };
  out << header.dump() << '\n';
  for (const PreferenceSample& sample : dataset.samples) {
    json record = {
        {"sample_id", sample.sample_id()},
        {"labeler_id", sample.labeler_id()},
        {"phi_1", std::vector<double>(sample.phi_1().begin(),
                                      sample.phi_1().end())},
        {"phi_2", std::vector<double>(sample.phi_2().begin(),
                                      sample.phi_2().end())},
        {"label_true", sample.label_true_.value()},
    };
    out << record.dump() << '\n';
  }
  if (!out) {
    throw DatasetIoError(0, "failed while writing '" + path + "'");
  }
}

PreferenceDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DatasetIoError(0, "cannot open '" + path + "' for reading");
  }
  std::string line;
  std::int64_t line_no = 0;

  auto parse_line = [&](const std::string& text) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded()) {
      throw DatasetIoError(line_no, "malformed record");
    }
    return parsed;
  };

  if (!std::getline(in, line)) {
    throw DatasetIoError(1, "missing header");
  }
  line_no = 1;
  const json header = parse_line(line);
  PreferenceDataset dataset;
  try {
    if (header.at("version").get<int>() != kDatasetFormatVersion) {
      throw DatasetIoError(
          1, "unsupported format version " +
                 header.at("version").dump() + " (expected " +
                 std::to_string(kDatasetFormatVersion) + ")");
    }
    dataset.params.d = header.at("d").get<int>();
    dataset.params.n = header.at("n").get<int>();
    dataset.params.beta_gen = header.at("beta_gen").get<double>();
    dataset.params.theta_star =
        header.at("theta_star").get<std::vector<double>>();
    dataset.params.feature_scale = header.at("feature_scale").get<double>();
    dataset.params.labeler_count = header.at("labeler_count").get<int>();
  } catch (const json::exception& e) {
    throw DatasetIoError(1, std::string("bad header: ") + e.what());
  }

  const std::size_t d = static_cast<std::size_t>(dataset.params.d);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const json record = parse_line(line);
    try {
      auto phi_1 = record.at("phi_1").get<std::vector<double>>();
      auto phi_2 = record.at("phi_2").get<std::vector<double>>();
      if (phi_1.size() != d || phi_2.size() != d) {
        throw DatasetIoError(line_no,
                             "feature dimension does not match header d");
      }
      dataset.samples.emplace_back(record.at("sample_id").get<std::int64_t>(),
                                   record.at("labeler_id").get<std::int64_t>(),
                                   std::move(phi_1), std::move(phi_2),
                                   BinaryLabel(record.at("label_true").get<int>()));
    } catch (const DatasetIoError&) {
      throw;
    } catch (const std::exception& e) {
      throw DatasetIoError(line_no, std::string("bad record: ") + e.what());
    }
  }
  if (dataset.samples.size() != static_cast<std::size_t>(dataset.params.n)) {
    throw DatasetIoError(
        line_no, "truncated file: header announces n = " +
                     std::to_string(dataset.params.n) + " but found " +
                     std::to_string(dataset.samples.size()) + " records");
  }
  return dataset;
}

}  // namespace props::data
