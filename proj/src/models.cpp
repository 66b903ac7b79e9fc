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

#include "hotspot/models.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hotspot/error.hpp"
#include "hotspot/eval.hpp"
#include "hotspot/kernels.hpp"

namespace hotspot {

using nlohmann::json;

std::size_t schema_dim(const FeatureSchema& schema) {
  std::size_t n = 0;
  for (const auto& e : schema) n += e.dim;
  return n;
}

std::string describe_schema(const FeatureSchema& schema) {
  std::string s;
  for (const auto& e : schema) {
    if (!s.empty()) s += " + ";
    s += e.block + "(" + std::to_string(e.dim) + ")";
  }
  return s.empty() ? "(empty)" : s;
}

void check_schema(const FeatureSchema& stored, const FeatureSchema& expected) {
  if (stored != expected) {
    throw ValidationError("feature schema mismatch: model has " + describe_schema(stored) +
                          ", input has " + describe_schema(expected));
  }
}

namespace {

double softplus(double a) { return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a))); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Posterior posterior_from_logit(double z) {
  Posterior p;
  p.p_hot = sigmoid(z);
  p.p_not = sigmoid(-z);
  p.log_hot = -softplus(-z);
  p.log_not = -softplus(z);
  return p;
}

/// Posterior from (not hot, hot) logits.
Posterior posterior_from_logits(double l_not, double l_hot) {
  return posterior_from_logit(l_hot - l_not);
}

std::string block_of_column(const FeatureSchema& schema, std::size_t col) {
  for (const auto& e : schema) {
    if (col < e.dim) return e.block;
    col -= e.dim;
  }
  return "?";
}

}  // namespace

ClassWeights class_weights(std::span<const int> labels) {
  std::size_t hot = 0;
  for (int y : labels) hot += (y == 1);
  const std::size_t not_hot = labels.size() - hot;
  if (hot == 0 || not_hot == 0) {
    throw ValidationError("class weights need both classes (hot=" + std::to_string(hot) +
                          ", not hot=" + std::to_string(not_hot) + ")");
  }
  const double n = static_cast<double>(labels.size());
  return ClassWeights{n / (2.0 * hot), n / (2.0 * not_hot)};
}

std::vector<double> sample_weights(std::span<const int> labels, const ClassWeights& w) {
  std::vector<double> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] == 1 ? w.hot : w.not_hot;
  return out;
}

// ---------------------------------------------------------------------------
// Logistic regression

double LRModel::decision(std::span<const double> x) const {
  if (x.size() != weights.size()) {
    throw ValidationError("LR input has " + std::to_string(x.size()) + " values; schema " +
                          describe_schema(schema) + " needs " + std::to_string(weights.size()));
  }
  double z = bias;
  for (std::size_t j = 0; j < x.size(); ++j) z += weights[j] * ((x[j] - mean[j]) / scale[j]);
  return z;
}

Posterior LRModel::predict(std::span<const double> x) const {
  return posterior_from_logit(decision(x));
}

double lr_loss_and_gradient(std::span<const double> params, const Matrix& z,
                            std::span<const int> labels, std::span<const double> weights,
                            double l2_lambda, std::span<double> grad) {
  const std::size_t d = z.cols;
  const auto w = params.first(d);
  const double b = params[d];
  double total_weight = 0.0;
  for (double s : weights) total_weight += s;
  if (!(total_weight > 0.0)) throw ValidationError("LR: sample weights sum to zero");
  const bool want_grad = !grad.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;
  for (std::size_t i = 0; i < z.rows; ++i) {
    const auto xi = z.row(i);
    const double logit = b + kernels::dot(w, xi);
    const double coef = weights[i] / total_weight;
    loss += coef * (labels[i] == 1 ? softplus(-logit) : softplus(logit));
    if (want_grad) {
      const double r = coef * (sigmoid(logit) - (labels[i] == 1 ? 1.0 : 0.0));
      kernels::axpy(r, xi, grad.first(d));
      grad[d] += r;
    }
  }
  double reg = 0.0;
  for (double v : w) reg += v * v;
  loss += 0.5 * l2_lambda * reg;
  if (want_grad) kernels::axpy(l2_lambda, w, grad.first(d));
  return loss;
}

void fit_standardizer(const Matrix& x, std::vector<double>& mean, std::vector<double>& scale) {
  mean.assign(x.cols, 0.0);
  scale.assign(x.cols, 1.0);
  if (x.rows == 0) return;
  for (std::size_t i = 0; i < x.rows; ++i) kernels::axpy(1.0, x.row(i), mean);
  for (auto& m : mean) m /= static_cast<double>(x.rows);
  std::vector<double> var(x.cols, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto r = x.row(i);
    for (std::size_t j = 0; j < x.cols; ++j) {
      const double c = r[j] - mean[j];
      var[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < x.cols; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(x.rows));
    scale[j] = sd > 0.0 ? sd : 1.0;
  }
}

Matrix standardize(const Matrix& x, std::span<const double> mean, std::span<const double> scale) {
  Matrix z(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto src = x.row(i);
    auto dst = z.row(i);
    for (std::size_t j = 0; j < x.cols; ++j) dst[j] = (src[j] - mean[j]) / scale[j];
  }
  return z;
}

LRModel train_lr(const Matrix& x, std::span<const int> labels, std::span<const double> weights,
                 const FeatureSchema& schema, const LRConfig& config) {
  if (schema_dim(schema) != x.cols) {
    throw ValidationError("LR: schema " + describe_schema(schema) + " does not match " +
                          std::to_string(x.cols) + " input columns");
  }
  if (labels.size() != x.rows || weights.size() != x.rows) {
    throw ValidationError("LR: labels/weights do not match the number of rows");
  }
  if (x.rows == 0) throw ValidationError("LR: no training samples");
  for (std::size_t k = 0; k < x.data.size(); ++k) {
    if (!std::isfinite(x.data[k])) {
      throw NumericError("LR: non-finite input in feature block '" +
                         block_of_column(schema, k % x.cols) + "'");
    }
  }
  LRModel m;
  m.schema = schema;
  m.l2_lambda = config.l2_lambda;
  fit_standardizer(x, m.mean, m.scale);
  const Matrix z = standardize(x, m.mean, m.scale);

  const std::size_t n = x.cols + 1;
  auto eval = [&](std::span<const double> p, std::span<double> g) {
    const double f = lr_loss_and_gradient(p, z, labels, weights, config.l2_lambda, g);
    if (!std::isfinite(f)) {
      std::string block = "?";
      for (std::size_t j = 0; j < x.cols; ++j) {
        if (!std::isfinite(p[j])) {
          block = block_of_column(schema, j);
          break;
        }
      }
      throw NumericError("LR: non-finite loss (feature block '" + block + "')");
    }
    return f;
  };
  auto inf_norm = [](std::span<const double> g) {
    double a = 0.0;
    for (double v : g) a = std::max(a, std::abs(v));
    return a;
  };

  std::vector<double> cur(n, 0.0), g_cur(n), y(n), g_y(n), next(n), g_next(n);
  double f_cur = eval(cur, g_cur);
  y = cur;
  g_y = g_cur;
  double f_y = f_cur;
  double t = 1.0;
  double lipschitz = 1.0;
  bool at_restart = true;
  std::size_t it = 0;
  for (; it < config.max_iters; ++it) {
    if (inf_norm(g_cur) < config.grad_tol) {
      m.converged = true;
      break;
    }
    double g2 = 0.0;
    for (double v : g_y) g2 += v * v;
    double f_next;
    bool stalled = false;
    for (;;) {
      for (std::size_t k = 0; k < n; ++k) next[k] = y[k] - g_y[k] / lipschitz;
      f_next = eval(next, g_next);
      if (f_next <= f_y - 0.5 * g2 / lipschitz) break;
      lipschitz *= 2.0;
      if (lipschitz > 1e30) {
        stalled = true;
        break;
      }
    }
    if (stalled) break;
    if (f_next > f_cur) {
      // Momentum overshot: restart from the current iterate.
      if (at_restart) break;
      t = 1.0;
      y = cur;
      g_y = g_cur;
      f_y = f_cur;
      at_restart = true;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    for (std::size_t k = 0; k < n; ++k) y[k] = next[k] + beta * (next[k] - cur[k]);
    cur.swap(next);
    g_cur.swap(g_next);
    f_cur = f_next;
    t = t_next;
    f_y = beta == 0.0 ? f_cur : eval(y, g_y);
    if (beta == 0.0) g_y = g_cur;
    at_restart = false;
    lipschitz *= 0.9;
  }
  m.iterations = it;
  m.weights.assign(cur.begin(), cur.begin() + static_cast<long>(x.cols));
  m.bias = cur[x.cols];
  m.objective = f_cur;
  return m;
}

// ---------------------------------------------------------------------------
// Feed-forward networks

MLPArch MLPArch::parse(const std::string& text, double dropout) {
  MLPArch a;
  a.dropout = dropout;
  std::stringstream ss(text);
  std::string tok;
  bool pool_seen = false;
  std::size_t sizes_after_pool = 0;
  while (std::getline(ss, tok, '-')) {
    std::string lower = tok;
    std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
    if (lower == "pool") {
      if (pool_seen) throw ValidationError("architecture '" + text + "': Pool given twice");
      pool_seen = true;
      a.pooled = true;
      continue;
    }
    try {
      std::size_t used = 0;
      const long v = std::stol(tok, &used);
      if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
      a.sizes.push_back(static_cast<std::size_t>(v));
      if (pool_seen) ++sizes_after_pool;
    } catch (const std::exception&) {
      throw ValidationError("architecture '" + text + "': bad layer size '" + tok + "'");
    }
  }
  if (a.pooled && sizes_after_pool != 1) {
    throw ValidationError("architecture '" + text + "': Pool must precede the output layer");
  }
  a.validate();
  return a;
}

std::string MLPArch::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i > 0) s += "-";
    if (pooled && i + 1 == sizes.size()) s += "Pool-";
    s += std::to_string(sizes[i]);
  }
  return s;
}

void MLPArch::validate() const {
  if (sizes.size() < 2) throw ValidationError("architecture needs an input and an output size");
  if (sizes.back() != 2) throw ValidationError("architecture must end in a 2-way output");
  if (pooled && sizes.size() < 3) {
    throw ValidationError("pooled architecture needs at least one cell layer before Pool");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("dropout must be in [0, 1)");
}

MLPData MLPData::from_matrix(const Matrix& x, std::span<const int> labels,
                             std::span<const double> weights) {
  MLPData d;
  d.flat = &x;
  d.count = x.rows;
  d.labels = labels;
  d.weights = weights;
  return d;
}

MLPData MLPData::from_grids(std::function<ProsodyGrid(std::size_t)> grids, std::size_t count,
                            std::span<const int> labels, std::span<const double> weights) {
  MLPData d;
  d.grids = std::move(grids);
  d.count = count;
  d.labels = labels;
  d.weights = weights;
  return d;
}

MLPModel::MLPModel(MLPArch arch, FeatureSchema schema, std::uint64_t seed)
    : arch_(std::move(arch)), schema_(std::move(schema)) {
  arch_.validate();
  if (schema_dim(schema_) != arch_.sizes.front()) {
    throw ValidationError("MLP input size " + std::to_string(arch_.sizes.front()) +
                          " does not match schema " + describe_schema(schema_));
  }
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < arch_.sizes.size(); ++l) {
    DenseLayer layer;
    layer.in = arch_.sizes[l];
    layer.out = arch_.sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    layer.w.resize(layer.in * layer.out);
    for (auto& v : layer.w) v = rng.uniform(-limit, limit);
    layer.b.assign(layer.out, 0.0);
    layers_.push_back(std::move(layer));
  }
}

std::size_t MLPModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.w.size() + l.b.size();
  return n;
}

std::vector<double> MLPModel::flat_parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  for (const auto& l : layers_) {
    p.insert(p.end(), l.w.begin(), l.w.end());
    p.insert(p.end(), l.b.begin(), l.b.end());
  }
  return p;
}

void MLPModel::set_flat_parameters(std::span<const double> params) {
  if (params.size() != parameter_count()) throw ValidationError("parameter count mismatch");
  std::size_t k = 0;
  for (auto& l : layers_) {
    std::copy_n(params.begin() + static_cast<long>(k), l.w.size(), l.w.begin());
    k += l.w.size();
    std::copy_n(params.begin() + static_cast<long>(k), l.b.size(), l.b.begin());
    k += l.b.size();
  }
}

namespace {

/// Activations of the hidden (tanh) layers for one input vector.
struct Trace {
  std::vector<std::vector<double>> h;      ///< tanh outputs per hidden layer
  std::vector<std::vector<double>> keep;   ///< dropout scale per unit (empty: none)
  std::vector<std::vector<double>> out;    ///< h * keep, the next layer's input
};

/// Runs hidden layers [0, n_hidden) on x. Returns the final hidden output
/// (x itself when there are no hidden layers).
std::span<const double> forward_hidden(const std::vector<DenseLayer>& layers, std::size_t n_hidden,
                                       std::span<const double> x, double dropout, Rng* rng,
                                       Trace& tr) {
  tr.h.resize(n_hidden);
  tr.keep.resize(n_hidden);
  tr.out.resize(n_hidden);
  std::span<const double> in = x;
  for (std::size_t l = 0; l < n_hidden; ++l) {
    const auto& L = layers[l];
    auto& h = tr.h[l];
    h.resize(L.out);
    kernels::gemv(L.w, L.out, L.in, in, L.b, h);
    for (auto& v : h) v = std::tanh(v);
    auto& o = tr.out[l];
    o = h;
    if (rng != nullptr && dropout > 0.0) {
      auto& keep = tr.keep[l];
      keep.resize(L.out);
      const double s = 1.0 / (1.0 - dropout);
      for (std::size_t u = 0; u < L.out; ++u) {
        keep[u] = rng->uniform() < dropout ? 0.0 : s;
        o[u] *= keep[u];
      }
    } else {
      tr.keep[l].clear();
    }
    in = o;
  }
  return in;
}

/// Backpropagates g_out (gradient w.r.t. the final hidden output) through
/// hidden layers, accumulating into grads (per layer w then b).
void backward_hidden(const std::vector<DenseLayer>& layers, std::size_t n_hidden,
                     std::span<const double> x, const Trace& tr, std::vector<double> g_out,
                     std::span<double> grad, std::span<const std::size_t> offsets) {
  std::vector<double> g_in;
  for (std::size_t l = n_hidden; l-- > 0;) {
    const auto& L = layers[l];
    const auto& h = tr.h[l];
    for (std::size_t u = 0; u < L.out; ++u) {
      if (!tr.keep[l].empty()) g_out[u] *= tr.keep[l][u];
      g_out[u] *= 1.0 - h[u] * h[u];
    }
    const std::span<const double> in = l == 0 ? x : std::span<const double>(tr.out[l - 1]);
    auto gw = grad.subspan(offsets[l], L.w.size());
    auto gb = grad.subspan(offsets[l] + L.w.size(), L.b.size());
    kernels::outer_accumulate(1.0, g_out, in, gw);
    kernels::axpy(1.0, g_out, gb);
    if (l > 0) {
      g_in.assign(L.in, 0.0);
      kernels::gemv_t_accumulate(L.w, L.out, L.in, g_out, g_in);
      g_out.swap(g_in);
    }
  }
}

struct PoolTrace {
  std::vector<std::pair<std::size_t, std::size_t>> cells;  ///< present (c, t)
  std::vector<Trace> traces;
  std::vector<std::size_t> argmax;  ///< per (present step, dim): index into cells
  std::size_t present_steps = 0;
  std::vector<double> pooled;
};

void forward_pooled(const MLPModel& m, const ProsodyGrid& g, Rng* rng, PoolTrace& pt) {
  const auto& layers = m.layers();
  const std::size_t n_hidden = layers.size() - 1;
  const std::size_t code_dim = layers[n_hidden - 1].out;
  if (g.dim != layers.front().in) {
    throw ValidationError("prosody grid dim " + std::to_string(g.dim) + " != model input " +
                          std::to_string(layers.front().in));
  }
  pt.cells.clear();
  for (std::size_t t = 0; t < g.steps; ++t) {
    for (std::size_t c = 0; c < g.channels; ++c) {
      if (g.has(c, t)) pt.cells.emplace_back(c, t);
    }
  }
  pt.traces.resize(pt.cells.size());
  pt.pooled.assign(code_dim, 0.0);
  pt.argmax.clear();
  pt.present_steps = 0;
  std::vector<double> step_max(code_dim);
  std::size_t k = 0;
  while (k < pt.cells.size()) {
    const std::size_t t = pt.cells[k].second;
    const std::size_t begin = pt.argmax.size();
    pt.argmax.resize(begin + code_dim, k);
    bool first = true;
    for (; k < pt.cells.size() && pt.cells[k].second == t; ++k) {
      const auto [c, tt] = pt.cells[k];
      const auto code = forward_hidden(layers, n_hidden, g.cell(c, tt), m.arch().dropout, rng,
                                       pt.traces[k]);
      for (std::size_t d = 0; d < code_dim; ++d) {
        if (first || code[d] > step_max[d]) {
          step_max[d] = code[d];
          pt.argmax[begin + d] = k;
        }
      }
      first = false;
    }
    kernels::axpy(1.0, step_max, pt.pooled);
    ++pt.present_steps;
  }
  if (pt.present_steps > 0) kernels::scale(1.0 / pt.present_steps, pt.pooled);
}

std::vector<std::size_t> layer_offsets(const std::vector<DenseLayer>& layers) {
  std::vector<std::size_t> off;
  std::size_t k = 0;
  for (const auto& l : layers) {
    off.push_back(k);
    k += l.w.size() + l.b.size();
  }
  return off;
}

std::pair<double, double> output_logits(const DenseLayer& last, std::span<const double> in) {
  std::array<double, 2> z{};
  kernels::gemv(last.w, 2, last.in, in, last.b, z);
  return {z[0], z[1]};
}

}  // namespace

Posterior MLPModel::predict(std::span<const double> x) const {
  if (arch_.pooled) throw ValidationError("pooled MLP expects a prosody grid");
  if (x.size() != arch_.sizes.front()) {
    throw ValidationError("MLP input has " + std::to_string(x.size()) + " values; schema " +
                          describe_schema(schema_) + " needs " +
                          std::to_string(arch_.sizes.front()));
  }
  Trace tr;
  const auto h = forward_hidden(layers_, layers_.size() - 1, x, 0.0, nullptr, tr);
  const auto [l0, l1] = output_logits(layers_.back(), h);
  return posterior_from_logits(l0, l1);
}

Posterior MLPModel::predict(const ProsodyGrid& grid) const {
  if (!arch_.pooled) throw ValidationError("flat MLP cannot take a prosody grid");
  PoolTrace pt;
  forward_pooled(*this, grid, nullptr, pt);
  const auto [l0, l1] = output_logits(layers_.back(), pt.pooled);
  return posterior_from_logits(l0, l1);
}

Posterior predict_sample(const MLPModel& model, const MLPData& data, std::size_t i) {
  if (model.arch().pooled) return model.predict(data.grids(i));
  return model.predict(data.flat->row(i));
}

double mlp_loss_and_gradient(const MLPModel& model, const MLPData& data,
                             std::span<const std::size_t> batch, std::span<double> grad,
                             Rng* dropout_rng) {
  const auto& layers = model.layers();
  const std::size_t n_hidden = layers.size() - 1;
  const auto offsets = layer_offsets(layers);
  const bool want_grad = !grad.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
  double total_weight = 0.0;
  for (std::size_t i : batch) total_weight += data.weights[i];
  if (!(total_weight > 0.0)) return 0.0;

  const auto& last = layers.back();
  auto g_last_w = want_grad ? grad.subspan(offsets.back(), last.w.size()) : std::span<double>();
  auto g_last_b = want_grad ? grad.subspan(offsets.back() + last.w.size(), 2) : std::span<double>();
  double loss = 0.0;
  Trace tr;
  PoolTrace pt;
  ProsodyGrid grid;
  for (std::size_t i : batch) {
    const double coef = data.weights[i] / total_weight;
    std::span<const double> x;
    std::span<const double> top;
    if (model.arch().pooled) {
      grid = data.grids(i);
      forward_pooled(model, grid, dropout_rng, pt);
      top = pt.pooled;
    } else {
      x = data.flat->row(i);
      top = forward_hidden(layers, n_hidden, x, model.arch().dropout, dropout_rng, tr);
    }
    const auto [l0, l1] = output_logits(last, top);
    const Posterior p = posterior_from_logits(l0, l1);
    const int y = data.labels[i];
    loss -= coef * (y == 1 ? p.log_hot : p.log_not);
    if (!want_grad) continue;

    const std::array<double, 2> delta{coef * (p.p_not - (y == 0 ? 1.0 : 0.0)),
                                      coef * (p.p_hot - (y == 1 ? 1.0 : 0.0))};
    kernels::outer_accumulate(1.0, delta, top, g_last_w);
    kernels::axpy(1.0, delta, g_last_b);
    std::vector<double> g_top(last.in, 0.0);
    kernels::gemv_t_accumulate(last.w, 2, last.in, delta, g_top);

    if (!model.arch().pooled) {
      backward_hidden(layers, n_hidden, x, tr, std::move(g_top), grad, offsets);
      continue;
    }
    if (pt.present_steps == 0) continue;
    const std::size_t code_dim = g_top.size();
    std::vector<std::vector<double>> g_code(pt.cells.size());
    const double inv_steps = 1.0 / static_cast<double>(pt.present_steps);
    for (std::size_t s = 0; s < pt.present_steps; ++s) {
      for (std::size_t d = 0; d < code_dim; ++d) {
        const std::size_t k = pt.argmax[s * code_dim + d];
        if (g_code[k].empty()) g_code[k].assign(code_dim, 0.0);
        g_code[k][d] += g_top[d] * inv_steps;
      }
    }
    for (std::size_t k = 0; k < pt.cells.size(); ++k) {
      if (g_code[k].empty()) continue;
      const auto [c, t] = pt.cells[k];
      backward_hidden(layers, n_hidden, grid.cell(c, t), pt.traces[k], std::move(g_code[k]), grad,
                      offsets);
    }
  }
  return loss;
}

namespace {

double dev_uar(const MLPModel& model, const MLPData& dev) {
  std::vector<int> pred(dev.count);
  for (std::size_t i = 0; i < dev.count; ++i) pred[i] = predict_sample(model, dev, i).label();
  return uar(confusion(dev.labels, pred));
}

bool has_both_classes(std::span<const int> labels) {
  bool hot = false, not_hot = false;
  for (int y : labels) (y == 1 ? hot : not_hot) = true;
  return hot && not_hot;
}

}  // namespace

MLPModel train_mlp(const MLPData& train, const MLPData* dev, const MLPArch& arch,
                   const FeatureSchema& schema, const MLPConfig& config) {
  if (!(config.learning_rate > 0.0) || config.epochs == 0 || config.batch_size == 0) {
    throw ValidationError("MLP: learning rate, epochs and batch size must be positive");
  }
  if (train.count == 0) throw ValidationError("MLP: no training samples");
  if (arch.pooled) {
    if (!train.grids) throw ValidationError("pooled MLP needs grid inputs");
    bool any = false;
    for (std::size_t i = 0; i < train.count && !any; ++i) any = train.grids(i).present_count() > 0;
    if (!any) throw ValidationError("MLP: every training grid is empty (no prosody data)");
  } else if (train.flat == nullptr || train.flat->cols != arch.sizes.front()) {
    throw ValidationError("MLP: input dimension does not match architecture " + arch.to_string());
  }

  MLPModel model(arch, schema, derive_seed(config.seed, "init"));
  Rng rng(derive_seed(config.seed, "sgd"));
  std::vector<std::size_t> order(train.count);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(model.parameter_count());
  const bool early_stop = dev != nullptr && dev->count > 0 && has_both_classes(dev->labels);
  std::vector<double> best;
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const auto batch = std::span<const std::size_t>(order).subspan(
          b, std::min(config.batch_size, order.size() - b));
      const double loss = mlp_loss_and_gradient(model, train, batch, grad, &rng);
      if (!std::isfinite(loss)) {
        throw NumericError("MLP: non-finite loss at epoch " + std::to_string(epoch));
      }
      std::size_t k = 0;
      for (auto& layer : model.mutable_layers()) {
        kernels::axpy(-config.learning_rate, std::span<const double>(grad).subspan(k, layer.w.size()),
                      layer.w);
        k += layer.w.size();
        kernels::axpy(-config.learning_rate, std::span<const double>(grad).subspan(k, layer.b.size()),
                      layer.b);
        k += layer.b.size();
      }
    }
    model.epochs_trained = epoch + 1;
    if (!early_stop) continue;
    const double u = dev_uar(model, *dev);
    if (u > model.best_dev_uar) {
      model.best_dev_uar = u;
      best = model.flat_parameters();
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  if (!best.empty()) model.set_flat_parameters(best);
  return model;
}

// ---------------------------------------------------------------------------
// Model files

namespace {

json schema_json(const FeatureSchema& s) {
  json j = json::array();
  for (const auto& e : s) j.push_back(json::array({e.block, e.dim}));
  return j;
}

FeatureSchema schema_from_json(const json& j) {
  FeatureSchema s;
  for (const auto& e : j) s.push_back(SchemaEntry{e.at(0).get<std::string>(), e.at(1).get<std::size_t>()});
  return s;
}

void check_header(const json& j, const char* type) {
  if (j.value("format", "") != "hotspot-model" || j.value("version", 0) != 1) {
    throw ValidationError("not a hotspot model file (format/version)");
  }
  if (j.value("type", "") != type) {
    throw ValidationError(std::string("expected a model of type '") + type + "'");
  }
}

}  // namespace

json lr_to_json(const LRModel& m) {
  return {{"format", "hotspot-model"}, {"version", 1},          {"type", "lr"},
          {"schema", schema_json(m.schema)}, {"mean", m.mean},   {"scale", m.scale},
          {"weights", m.weights},        {"bias", m.bias},        {"l2_lambda", m.l2_lambda},
          {"iterations", m.iterations},  {"converged", m.converged},
          {"objective", m.objective}};
}

LRModel lr_from_json(const json& j) {
  check_header(j, "lr");
  LRModel m;
  try {
    m.schema = schema_from_json(j.at("schema"));
    m.mean = j.at("mean").get<std::vector<double>>();
    m.scale = j.at("scale").get<std::vector<double>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.l2_lambda = j.at("l2_lambda").get<double>();
    m.iterations = j.value("iterations", std::size_t{0});
    m.converged = j.value("converged", false);
    m.objective = j.value("objective", 0.0);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("LR model file: ") + e.what());
  }
  const std::size_t d = schema_dim(m.schema);
  if (m.mean.size() != d || m.scale.size() != d || m.weights.size() != d) {
    throw ValidationError("LR model file: parameter lengths do not match the schema");
  }
  return m;
}

json mlp_to_json(const MLPModel& m) {
  json layers = json::array();
  for (const auto& l : m.layers()) {
    layers.push_back({{"in", l.in}, {"out", l.out}, {"w", l.w}, {"b", l.b}});
  }
  return {{"format", "hotspot-model"},
          {"version", 1},
          {"type", "mlp"},
          {"arch", m.arch().to_string()},
          {"dropout", m.arch().dropout},
          {"schema", schema_json(m.schema())},
          {"layers", std::move(layers)},
          {"epochs_trained", m.epochs_trained},
          {"best_dev_uar", m.best_dev_uar}};
}

MLPModel mlp_from_json(const json& j) {
  check_header(j, "mlp");
  try {
    const auto arch = MLPArch::parse(j.at("arch").get<std::string>(), j.at("dropout").get<double>());
    MLPModel m(arch, schema_from_json(j.at("schema")), 0);
    const auto& jl = j.at("layers");
    if (jl.size() != m.layers().size()) throw ValidationError("MLP model file: layer count mismatch");
    for (std::size_t l = 0; l < jl.size(); ++l) {
      auto& layer = m.mutable_layers()[l];
      auto w = jl[l].at("w").get<std::vector<double>>();
      auto b = jl[l].at("b").get<std::vector<double>>();
      if (w.size() != layer.w.size() || b.size() != layer.b.size()) {
        throw ValidationError("MLP model file: layer " + std::to_string(l) + " has wrong shape");
      }
      layer.w = std::move(w);
      layer.b = std::move(b);
    }
    m.epochs_trained = j.value("epochs_trained", std::size_t{0});
    m.best_dev_uar = j.value("best_dev_uar", -1.0);
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("MLP model file: ") + e.what());
  }
}

}  // namespace hotspot
