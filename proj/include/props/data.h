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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "props/labels.h"
#include "props/mechanisms.h"
#include "props/rng.h"

namespace props::data {

// Parameters of the synthetic preference world. Labels are drawn from a
// Bradley-Terry model over a log-linear ground-truth reward: the first
// response is preferred with probability
//   sigmoid(beta_gen * theta_star . (phi_1 - phi_2)).
struct WorldParams {
  int d = 10;
  std::vector<double> theta_star;
  double beta_gen = 5.0;
  int n = 0;
  double feature_scale = 1.0;
  int labeler_count = 50;

  void validate() const;
};

class PreferenceSample;
struct PreferenceDataset;
struct PrivatizedDataset;

// Which consumer is reading a ground-truth label. Reads are counted per
// scope (and per thread) so a run can prove it never touched ground truth
// on a privacy-claimed path.
enum class OracleScope { kEval, kTrainer };

// The only read path for ground-truth labels outside the privatization
// mechanism. Counters are thread-local: a run executes on one thread, so its
// audit cannot be polluted by concurrent runs.
class OracleGate {
 public:
  static BinaryLabel true_label(const PreferenceSample& sample,
                                OracleScope scope);
  static std::int64_t reads(OracleScope scope);
  static void reset_counters();
};

// One preference item: a feature vector per response plus the ground-truth
// label. The label is private to the gate, the randomized-response
// mechanism, and the serializer; trainers cannot reach it.
class PreferenceSample {
 public:
  PreferenceSample(std::int64_t sample_id, std::int64_t labeler_id,
                   std::vector<double> phi_1, std::vector<double> phi_2,
                   BinaryLabel label_true);

  std::int64_t sample_id() const { return sample_id_; }
  std::int64_t labeler_id() const { return labeler_id_; }
  std::span<const double> phi_1() const { return phi_1_; }
  std::span<const double> phi_2() const { return phi_2_; }

 private:
  friend class OracleGate;
  // The privatization mechanism and the serializer are the only consumers
  // of ground truth outside the audited gate.
  friend PrivatizedDataset privatize(const PreferenceDataset&,
                                     const mechanisms::RRParams&, Rng&);
  friend void save_dataset(const std::string&, const PreferenceDataset&);

  std::int64_t sample_id_;
  std::int64_t labeler_id_;
  std::vector<double> phi_1_;
  std::vector<double> phi_2_;
  BinaryLabel label_true_;
};

struct PreferenceDataset {
  WorldParams params;
  std::vector<PreferenceSample> samples;
};

// A sample whose label has passed through randomized response. Carries no
// ground-truth field by construction.
struct PrivatizedSample {
  std::int64_t sample_id;
  std::int64_t labeler_id;
  std::vector<double> phi_1;
  std::vector<double> phi_2;
  BinaryLabel label_rr;
  double epsilon;
};

struct PrivatizedDataset {
  double epsilon = 0.0;
  double gamma_eps = 0.5;
  std::vector<PrivatizedSample> samples;
};

// Ground-truth reward weights drawn uniformly on the sphere of the given
// radius.
std::vector<double> sample_theta_star(int d, double radius, Rng& rng);

// Draws a world: i.i.d. N(0, feature_scale^2) features, Bradley-Terry
// labels, labeler ids assigned round-robin. Bit-reproducible given the
// stream.
PreferenceDataset generate_world(const WorldParams& params, Rng& rng);

// Splits items into k contiguous disjoint blocks covering the input, block
// sizes differing by at most one (larger blocks first), input order
// preserved. Throws when k < 1 or k > items.size().
template <typename T>
std::vector<std::span<const T>> partition(std::span<const T> items, int k) {
  if (k < 1) {
    throw std::invalid_argument("partition: k must be at least 1");
  }
  const std::size_t n = items.size();
  if (static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("partition: k exceeds dataset size");
  }
  std::vector<std::span<const T>> parts;
  parts.reserve(static_cast<std::size_t>(k));
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t remainder = n % static_cast<std::size_t>(k);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const std::size_t size = base + (i < remainder ? 1 : 0);
    parts.push_back(items.subspan(offset, size));
    offset += size;
  }
  return parts;
}

// Applies randomized response to the ground-truth label column. This is the
// privatization boundary: the output type cannot express ground truth.
PrivatizedDataset privatize(const PreferenceDataset& dataset,
                            const mechanisms::RRParams& params, Rng& rng);

inline PrivatizedDataset privatize(const PreferenceDataset& dataset,
                                   double epsilon, Rng& rng) {
  return privatize(dataset, mechanisms::RRParams::from_epsilon(epsilon), rng);
}

// Line-delimited persistence: one header line carrying
// {version, d, n, beta_gen, theta_star, ...}, then one record per sample.
// Floating point round-trips exactly. load_dataset names the offending line
// in every failure.
void save_dataset(const std::string& path, const PreferenceDataset& dataset);
PreferenceDataset load_dataset(const std::string& path);

inline constexpr int kDatasetFormatVersion = 1;

}  // namespace props::data
