#pragma once

// Small single-hidden-layer perceptron used to map uplink signal strengths to
// the beam to activate (softmax classifier) or to a normalized position
// (sigmoid regressor). Hand-rolled dense math: the layers are tiny and the
// training loop must be bit-reproducible for a given seed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace owcsim {

struct FeatureScaler {
  bool log_input = true;  // apply log10 before standardizing
  std::vector<double> mean;
  std::vector<double> stddev;

  static constexpr double kFloor = 1e-15;  // avoids log of an exactly dark PD

  std::vector<double> apply(const std::vector<double>& raw) const {
    if (raw.size() != mean.size()) throw std::invalid_argument("FeatureScaler: feature count");
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      double v = log_input ? std::log10(std::max(raw[i], kFloor)) : raw[i];
      out[i] = (v - mean[i]) / stddev[i];
    }
    return out;
  }

  static FeatureScaler fit(const std::vector<std::vector<double>>& rows, bool log_input) {
    if (rows.empty()) throw std::invalid_argument("FeatureScaler: empty training set");
    std::size_t dim = rows[0].size();
    FeatureScaler sc;
    sc.log_input = log_input;
    sc.mean.assign(dim, 0.0);
    sc.stddev.assign(dim, 0.0);
    std::vector<double> tmp(dim);
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < dim; ++i)
        sc.mean[i] += log_input ? std::log10(std::max(r[i], kFloor)) : r[i];
    }
    for (double& m : sc.mean) m /= static_cast<double>(rows.size());
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < dim; ++i) {
        double v = (log_input ? std::log10(std::max(r[i], kFloor)) : r[i]) - sc.mean[i];
        sc.stddev[i] += v * v;
      }
    }
    for (double& s : sc.stddev) {
      s = std::sqrt(s / static_cast<double>(rows.size()));
      if (s < 1e-12) s = 1.0;  // constant feature
    }
    return sc;
  }
};

enum class MlpOutput { softmax, sigmoid };

struct MlpModel {
  int n_in = 0;
  int n_hidden = 0;
  int n_out = 0;
  MlpOutput output = MlpOutput::softmax;
  // Row-major: w1[j*n_in + i] feeds hidden j from input i.
  std::vector<double> w1, b1, w2, b2;
  FeatureScaler scaler;

  // Forward pass on already-scaled input; fills hidden (post-ReLU) and out.
  void forward_scaled(const double* x, double* hidden, double* out) const {
    for (int j = 0; j < n_hidden; ++j) {
      double a = b1[j];
      const double* wrow = &w1[static_cast<std::size_t>(j) * n_in];
      for (int i = 0; i < n_in; ++i) a += wrow[i] * x[i];
      hidden[j] = a > 0.0 ? a : 0.0;
    }
    for (int k = 0; k < n_out; ++k) {
      double a = b2[k];
      const double* wrow = &w2[static_cast<std::size_t>(k) * n_hidden];
      for (int j = 0; j < n_hidden; ++j) a += wrow[j] * hidden[j];
      out[k] = a;
    }
    if (output == MlpOutput::softmax) {
      double mx = *std::max_element(out, out + n_out);
      double sum = 0.0;
      for (int k = 0; k < n_out; ++k) {
        out[k] = std::exp(out[k] - mx);
        sum += out[k];
      }
      for (int k = 0; k < n_out; ++k) out[k] /= sum;
    } else {
      for (int k = 0; k < n_out; ++k) out[k] = 1.0 / (1.0 + std::exp(-out[k]));
    }
  }
};

struct BeamPrediction {
  std::vector<double> probs;
  std::size_t index = 0;
};

inline BeamPrediction predict_beam(const MlpModel& model, const std::vector<double>& raw) {
  if (static_cast<int>(raw.size()) != model.n_in)
    throw std::invalid_argument("predict_beam: feature count mismatch");
  std::vector<double> x = model.scaler.apply(raw);
  std::vector<double> hidden(model.n_hidden);
  BeamPrediction pred;
  pred.probs.resize(model.n_out);
  model.forward_scaled(x.data(), hidden.data(), pred.probs.data());
  pred.index = static_cast<std::size_t>(
      std::max_element(pred.probs.begin(), pred.probs.end()) - pred.probs.begin());
  return pred;
}

inline std::pair<double, double> predict_position(const MlpModel& model,
                                                  const std::vector<double>& raw) {
  if (model.n_out != 2 || model.output != MlpOutput::sigmoid)
    throw std::invalid_argument("predict_position: not a position model");
  std::vector<double> x = model.scaler.apply(raw);
  std::vector<double> hidden(model.n_hidden);
  double out[2];
  model.forward_scaled(x.data(), hidden.data(), out);
  return {out[0], out[1]};
}

struct MlpGradients {
  std::vector<double> w1, b1, w2, b2;
};

// Mean loss over the batch and its gradients. Targets: one-hot class indices
// for softmax (cross-entropy), per-output values in [0,1] for sigmoid (MSE).
// Inputs must already be scaled.
inline double loss_and_gradients(const MlpModel& m,
                                 const std::vector<std::vector<double>>& x_scaled,
                                 const std::vector<int>& labels,
                                 const std::vector<std::vector<double>>& targets,
                                 MlpGradients* grads) {
  std::size_t n = x_scaled.size();
  if (n == 0) throw std::invalid_argument("loss_and_gradients: empty batch");
  bool classify = m.output == MlpOutput::softmax;
  if (classify && labels.size() != n)
    throw std::invalid_argument("loss_and_gradients: label count mismatch");
  if (!classify && targets.size() != n)
    throw std::invalid_argument("loss_and_gradients: target count mismatch");

  if (grads) {
    grads->w1.assign(m.w1.size(), 0.0);
    grads->b1.assign(m.b1.size(), 0.0);
    grads->w2.assign(m.w2.size(), 0.0);
    grads->b2.assign(m.b2.size(), 0.0);
  }

  std::vector<double> hidden(m.n_hidden), out(m.n_out), dout(m.n_out), dhid(m.n_hidden);
  double loss = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double* x = x_scaled[s].data();
    m.forward_scaled(x, hidden.data(), out.data());
    if (classify) {
      int y = labels[s];
      if (y < 0 || y >= m.n_out) throw std::invalid_argument("loss_and_gradients: bad label");
      loss += -std::log(std::max(out[y], 1e-300));
      for (int k = 0; k < m.n_out; ++k) dout[k] = out[k] - (k == y ? 1.0 : 0.0);
    } else {
      for (int k = 0; k < m.n_out; ++k) {
        double e = out[k] - targets[s][k];
        loss += 0.5 * e * e;
        dout[k] = e * out[k] * (1.0 - out[k]);  // through the sigmoid
      }
    }
    if (!grads) continue;
    for (int j = 0; j < m.n_hidden; ++j) {
      double acc = 0.0;
      for (int k = 0; k < m.n_out; ++k) acc += m.w2[static_cast<std::size_t>(k) * m.n_hidden + j] * dout[k];
      dhid[j] = hidden[j] > 0.0 ? acc : 0.0;
    }
    for (int k = 0; k < m.n_out; ++k) {
      grads->b2[k] += dout[k];
      double* row = &grads->w2[static_cast<std::size_t>(k) * m.n_hidden];
      for (int j = 0; j < m.n_hidden; ++j) row[j] += dout[k] * hidden[j];
    }
    for (int j = 0; j < m.n_hidden; ++j) {
      grads->b1[j] += dhid[j];
      double* row = &grads->w1[static_cast<std::size_t>(j) * m.n_in];
      for (int i = 0; i < m.n_in; ++i) row[i] += dhid[j] * x[i];
    }
  }
  double inv = 1.0 / static_cast<double>(n);
  loss *= inv;
  if (grads) {
    for (double& g : grads->w1) g *= inv;
    for (double& g : grads->b1) g *= inv;
    for (double& g : grads->w2) g *= inv;
    for (double& g : grads->b2) g *= inv;
  }
  return loss;
}

struct TrainOptions {
  int epochs = 80;
  int batch = 128;
  double learning_rate = 5e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 1;
  bool log_features = true;  // log10 the raw features before standardizing
};

struct TrainResult {
  MlpModel model;
  std::vector<double> epoch_loss;
};

namespace detail {

inline void he_init(std::vector<double>& w, int fan_in, RngStream& rng) {
  double s = std::sqrt(2.0 / fan_in);
  for (double& v : w) v = rng.normal(0.0, s);
}

struct AdamState {
  std::vector<double> m, v;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

inline void adam_step(std::vector<double>& w, const std::vector<double>& g, AdamState& st,
                      const TrainOptions& opt, double bias1, double bias2) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    st.m[i] = opt.beta1 * st.m[i] + (1.0 - opt.beta1) * g[i];
    st.v[i] = opt.beta2 * st.v[i] + (1.0 - opt.beta2) * g[i] * g[i];
    double mh = st.m[i] / bias1;
    double vh = st.v[i] / bias2;
    w[i] -= opt.learning_rate * mh / (std::sqrt(vh) + opt.adam_eps);
  }
}

inline TrainResult train_impl(const std::vector<std::vector<double>>& features,
                              const std::vector<int>& labels,
                              const std::vector<std::vector<double>>& targets,
                              int n_hidden, int n_out, MlpOutput output,
                              const TrainOptions& opt) {
  if (features.empty()) throw std::invalid_argument("train_mlp: empty training set");
  if (n_hidden < 1 || n_out < 1) throw std::invalid_argument("train_mlp: bad layer sizes");
  int n_in = static_cast<int>(features[0].size());

  TrainResult res;
  MlpModel& m = res.model;
  m.n_in = n_in;
  m.n_hidden = n_hidden;
  m.n_out = n_out;
  m.output = output;
  m.scaler = FeatureScaler::fit(features, opt.log_features);
  m.w1.resize(static_cast<std::size_t>(n_hidden) * n_in);
  m.b1.assign(n_hidden, 0.0);
  m.w2.resize(static_cast<std::size_t>(n_out) * n_hidden);
  m.b2.assign(n_out, 0.0);

  RngStream rng = derive_stream(opt.seed, stream_id::training);
  he_init(m.w1, n_in, rng);
  he_init(m.w2, n_hidden, rng);

  std::vector<std::vector<double>> x(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) x[i] = m.scaler.apply(features[i]);

  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  AdamState a_w1(m.w1.size()), a_b1(m.b1.size()), a_w2(m.w2.size()), a_b2(m.b2.size());
  MlpGradients g;
  std::vector<std::vector<double>> bx;
  std::vector<int> bl;
  std::vector<std::vector<double>> bt;
  long step = 0;

  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    // Fisher-Yates with the session stream; deterministic for a given seed.
    for (std::size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[rng.integer(i + 1)]);

    double epoch_loss = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < x.size(); start += opt.batch) {
      std::size_t stop = std::min(x.size(), start + opt.batch);
      bx.clear();
      bl.clear();
      bt.clear();
      for (std::size_t i = start; i < stop; ++i) {
        bx.push_back(x[order[i]]);
        if (output == MlpOutput::softmax)
          bl.push_back(labels[order[i]]);
        else
          bt.push_back(targets[order[i]]);
      }
      double loss = loss_and_gradients(m, bx, bl, bt, &g);
      ++step;
      double bias1 = 1.0 - std::pow(opt.beta1, step);
      double bias2 = 1.0 - std::pow(opt.beta2, step);
      adam_step(m.w1, g.w1, a_w1, opt, bias1, bias2);
      adam_step(m.b1, g.b1, a_b1, opt, bias1, bias2);
      adam_step(m.w2, g.w2, a_w2, opt, bias1, bias2);
      adam_step(m.b2, g.b2, a_b2, opt, bias1, bias2);
      epoch_loss += loss;
      ++n_batches;
    }
    epoch_loss /= static_cast<double>(n_batches);
    if (!std::isfinite(epoch_loss))
      throw std::runtime_error("train_mlp: loss diverged at epoch " + std::to_string(epoch) +
                               "; reduce the learning rate");
    res.epoch_loss.push_back(epoch_loss);
  }
  return res;
}

}  // namespace detail

inline TrainResult train_classifier(const std::vector<std::vector<double>>& features,
                                    const std::vector<int>& labels, int n_classes,
                                    int n_hidden, const TrainOptions& opt) {
  if (features.size() != labels.size())
    throw std::invalid_argument("train_classifier: feature/label count mismatch");
  return detail::train_impl(features, labels, {}, n_hidden, n_classes, MlpOutput::softmax, opt);
}

inline TrainResult train_regressor(const std::vector<std::vector<double>>& features,
                                   const std::vector<std::vector<double>>& targets,
                                   int n_hidden, const TrainOptions& opt) {
  if (features.size() != targets.size())
    throw std::invalid_argument("train_regressor: feature/target count mismatch");
  if (!targets.empty() && targets[0].size() != 2)
    throw std::invalid_argument("train_regressor: expected 2-d normalized positions");
  return detail::train_impl(features, {}, targets, n_hidden, 2, MlpOutput::sigmoid, opt);
}

inline double classification_accuracy(const MlpModel& model,
                                      const std::vector<std::vector<double>>& features,
                                      const std::vector<int>& labels, std::size_t begin,
                                      std::size_t end) {
  if (end > features.size() || begin >= end)
    throw std::invalid_argument("classification_accuracy: bad range");
  std::size_t hits = 0;
  for (std::size_t i = begin; i < end; ++i)
    if (predict_beam(model, features[i]).index == static_cast<std::size_t>(labels[i])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(end - begin);
}

}  // namespace owcsim
