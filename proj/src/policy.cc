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

#include "props/policy.h"

#include <cmath>
#include <stdexcept>

namespace props::policy {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double t = std::exp(x);
  return t / (1.0 + t);
}

// log(1 + e^x) without overflow.
double softplus(double x) {
  const double hi = x > 0.0 ? x : 0.0;
  return hi + std::log1p(std::exp(-std::abs(x)));
}

void check_dimensions(const PolicyParams& params, const FeaturePair& pair) {
  if (pair.phi_1.size() != params.theta.size() ||
      pair.phi_2.size() != params.theta.size()) {
    throw std::invalid_argument(
        "policy: feature dimension does not match theta");
  }
}

}  // namespace

PolicyParams PolicyParams::zeros(int d, double beta) {
  if (d <= 0) {
    throw std::invalid_argument("PolicyParams: d must be positive");
  }
  if (!(beta > 0.0)) {
    throw std::invalid_argument("PolicyParams: beta must be positive");
  }
  return PolicyParams{std::vector<double>(static_cast<std::size_t>(d), 0.0),
                      beta};
}

std::vector<FeaturePair> feature_pairs(const data::PrivatizedDataset& dataset) {
  return feature_pairs(std::span<const data::PrivatizedSample>(dataset.samples));
}

std::vector<FeaturePair> feature_pairs(
    std::span<const data::PrivatizedSample> samples) {
  std::vector<FeaturePair> pairs;
  pairs.reserve(samples.size());
  for (const auto& s : samples) {
    pairs.emplace_back(s);
  }
  return pairs;
}

std::vector<FeaturePair> feature_pairs(
    std::span<const data::PreferenceSample> samples) {
  std::vector<FeaturePair> pairs;
  pairs.reserve(samples.size());
  for (const auto& s : samples) {
    pairs.emplace_back(s);
  }
  return pairs;
}

double margin(const PolicyParams& params, const FeaturePair& pair) {
  check_dimensions(params, pair);
  double dot = 0.0;
  for (std::size_t j = 0; j < params.theta.size(); ++j) {
    dot += params.theta[j] * (pair.phi_1[j] - pair.phi_2[j]);
  }
  return params.beta * dot;
}

BinaryLabel predict_label(const PolicyParams& params, const FeaturePair& pair) {
  return BinaryLabel::from_bool(margin(params, pair) > 0.0);
}

std::vector<BinaryLabel> predict_labels(const PolicyParams& params,
                                        std::span<const FeaturePair> pairs) {
  std::vector<BinaryLabel> labels;
  labels.reserve(pairs.size());
  for (const FeaturePair& pair : pairs) {
    labels.push_back(predict_label(params, pair));
  }
  return labels;
}

double dpo_loss(const PolicyParams& params, std::span<const FeaturePair> pairs,
                std::span<const BinaryLabel> labels) {
  if (pairs.empty()) {
    throw std::invalid_argument("dpo_loss: empty dataset");
  }
  if (pairs.size() != labels.size()) {
    throw std::invalid_argument("dpo_loss: labels do not match dataset size");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double sign = labels[i].value() == 1 ? 1.0 : -1.0;
    const double m = sign * margin(params, pairs[i]);
    total += softplus(-m);  // -log sigmoid(m)
  }
  return total / static_cast<double>(pairs.size());
}

void example_gradient(const PolicyParams& params, const FeaturePair& pair,
                      BinaryLabel label, std::span<double> out) {
  check_dimensions(params, pair);
  if (out.size() != params.theta.size()) {
    throw std::invalid_argument("example_gradient: bad output length");
  }
  const double sign = label.value() == 1 ? 1.0 : -1.0;
  const double m = sign * margin(params, pair);
  const double weight = -stable_sigmoid(-m) * params.beta * sign;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = weight * (pair.phi_1[j] - pair.phi_2[j]);
  }
}

std::vector<double> dpo_gradient(const PolicyParams& params,
                                 std::span<const FeaturePair> pairs,
                                 std::span<const BinaryLabel> labels) {
  if (pairs.empty()) {
    throw std::invalid_argument("dpo_gradient: empty dataset");
  }
  if (pairs.size() != labels.size()) {
    throw std::invalid_argument(
        "dpo_gradient: labels do not match dataset size");
  }
  const std::size_t d = params.theta.size();
  std::vector<double> acc(d, 0.0);
  std::vector<double> g(d, 0.0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    example_gradient(params, pairs[i], labels[i], g);
    for (std::size_t j = 0; j < d; ++j) {
      acc[j] += g[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(pairs.size());
  for (double& v : acc) {
    v *= inv_n;
  }
  return acc;
}

}  // namespace props::policy
