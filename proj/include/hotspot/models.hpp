// Copyright 2026 The Hotspot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Class-weighted logistic regression and small feed-forward networks.
//
// Labels are 0 (not hot) and 1 (hot). Both model families return a two-class
// posterior; the decision is hot only when p_hot > p_not, so ties go to
// not hot.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hotspot/prosody.hpp"
#include "hotspot/rng.hpp"

namespace hotspot {

/// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

struct SchemaEntry {
  std::string block;
  std::size_t dim = 0;
  bool operator==(const SchemaEntry&) const = default;
};
using FeatureSchema = std::vector<SchemaEntry>;
std::size_t schema_dim(const FeatureSchema& schema);
std::string describe_schema(const FeatureSchema& schema);

struct Posterior {
  double p_hot = 0.5;
  double p_not = 0.5;
  double log_hot = -0.6931471805599453;
  double log_not = -0.6931471805599453;

  bool hot() const { return p_hot > p_not; }
  int label() const { return hot() ? 1 : 0; }
};

struct ClassWeights {
  double hot = 1.0;
  double not_hot = 1.0;
};

/// w_c = N / (2 N_c); both classes then carry equal total weight.
ClassWeights class_weights(std::span<const int> labels);
std::vector<double> sample_weights(std::span<const int> labels, const ClassWeights& w);

// ---------------------------------------------------------------------------
// Logistic regression

struct LRConfig {
  double l2_lambda = 1e-4;
  double grad_tol = 1e-6;
  std::size_t max_iters = 5000;
};

class LRModel {
 public:
  FeatureSchema schema;
  /// Standardization fitted on the training inputs; scale is 1 for
  /// constant columns.
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> weights;
  double bias = 0.0;
  double l2_lambda = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double objective = 0.0;

  /// Logit of the hot class. Throws ValidationError on a length mismatch.
  double decision(std::span<const double> x) const;
  Posterior predict(std::span<const double> x) const;
};

/// Weighted, L2-regularized logistic loss over standardized inputs:
///   sum_i s_i * logloss_i / sum_i s_i + lambda / 2 * |w|^2
/// params = (w..., b). Writes the gradient when grad is non-empty.
double lr_loss_and_gradient(std::span<const double> params, const Matrix& z,
                            std::span<const int> labels, std::span<const double> weights,
                            double l2_lambda, std::span<double> grad);

/// Population mean and standard deviation per column.
void fit_standardizer(const Matrix& x, std::vector<double>& mean, std::vector<double>& scale);
Matrix standardize(const Matrix& x, std::span<const double> mean, std::span<const double> scale);

/// Deterministic full-batch accelerated gradient descent with backtracking;
/// stops when the gradient infinity-norm drops below grad_tol.
LRModel train_lr(const Matrix& x, std::span<const int> labels, std::span<const double> weights,
                 const FeatureSchema& schema, const LRConfig& config = {});

// ---------------------------------------------------------------------------
// Feed-forward networks

/// Layer sizes from input to the 2-way output. When pooled, every layer but
/// the last is applied to each (channel, time) cell of a ProsodyGrid, and the
/// codes are max-pooled over channels then mean-pooled over time before the
/// final layer.
struct MLPArch {
  std::vector<std::size_t> sizes;
  bool pooled = false;
  double dropout = 0.0;

  /// "988-512-128-16-Pool-2" or "1024-64-32-12-2".
  static MLPArch parse(const std::string& text, double dropout = 0.0);
  std::string to_string() const;
  void validate() const;
};

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> w;  ///< out x in
  std::vector<double> b;
};

struct MLPConfig {
  double learning_rate = 1e-7;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  std::size_t patience = 10;
};

/// Inputs for one split: either flat rows or a grid source.
struct MLPData {
  const Matrix* flat = nullptr;
  std::function<ProsodyGrid(std::size_t)> grids;
  std::size_t count = 0;
  std::span<const int> labels;
  std::span<const double> weights;

  static MLPData from_matrix(const Matrix& x, std::span<const int> labels,
                             std::span<const double> weights);
  static MLPData from_grids(std::function<ProsodyGrid(std::size_t)> grids, std::size_t count,
                            std::span<const int> labels, std::span<const double> weights);
};

class MLPModel {
 public:
  MLPModel() = default;
  /// Glorot-uniform weights, zero biases.
  MLPModel(MLPArch arch, FeatureSchema schema, std::uint64_t seed);

  const MLPArch& arch() const { return arch_; }
  const FeatureSchema& schema() const { return schema_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }

  std::size_t parameter_count() const;
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> params);

  Posterior predict(std::span<const double> x) const;
  Posterior predict(const ProsodyGrid& grid) const;

  std::size_t epochs_trained = 0;
  double best_dev_uar = -1.0;

 private:
  MLPArch arch_;
  FeatureSchema schema_;
  std::vector<DenseLayer> layers_;
};

/// Weighted cross-entropy sum_i s_i * -log p(y_i) / sum_i s_i over the batch,
/// with its gradient in flat_parameters() order. Dropout is applied only
/// when dropout_rng is non-null.
double mlp_loss_and_gradient(const MLPModel& model, const MLPData& data,
                             std::span<const std::size_t> batch, std::span<double> grad,
                             Rng* dropout_rng = nullptr);

/// Mini-batch SGD; early stopping on development UAR when dev is given and
/// holds both classes. Throws when every training grid is empty.
MLPModel train_mlp(const MLPData& train, const MLPData* dev, const MLPArch& arch,
                   const FeatureSchema& schema, const MLPConfig& config);

Posterior predict_sample(const MLPModel& model, const MLPData& data, std::size_t i);

// ---------------------------------------------------------------------------
// Model files

nlohmann::json lr_to_json(const LRModel& m);
LRModel lr_from_json(const nlohmann::json& j);
nlohmann::json mlp_to_json(const MLPModel& m);
MLPModel mlp_from_json(const nlohmann::json& j);

/// Throws ValidationError when the stored schema differs from expected.
void check_schema(const FeatureSchema& stored, const FeatureSchema& expected);

}  // namespace hotspot
