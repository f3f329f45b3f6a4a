// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/error.hpp"
#include "vrvfl/fl_core.hpp"
#include "vrvfl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace vrvfl::fl {

bool ModelWeights::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

std::size_t parameter_count(int num_classes, int dims) {
  return static_cast<std::size_t>(num_classes) * (static_cast<std::size_t>(dims) + 1);
}

ModelWeights zero_model(int num_classes, int dims) {
  return {std::vector<double>(parameter_count(num_classes, dims), 0.0)};
}

namespace {

struct Shape {
  std::size_t classes;
  std::size_t dims;
};

Shape check_shape(const ModelWeights& w, const Partition& data, int num_classes) {
  const Shape s{static_cast<std::size_t>(num_classes), data.dims};
  if (w.size() != s.classes * (s.dims + 1)) {
    throw DomainError("model has " + std::to_string(w.size()) + " parameters, expected " +
                      std::to_string(s.classes * (s.dims + 1)));
  }
  return s;
}

// logits -> softmax in place; returns log-sum-exp
double softmax_inplace(std::span<double> z) {
  const double peak = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - peak);
    total += v;
  }
  for (double& v : z) v /= total;
  return peak + std::log(total);
}

void logits(const ModelWeights& w, Shape s, std::span<const double> x, std::span<double> z) {
  const std::span<const double> weights(w.values.data(), s.classes * s.dims);
  kernels::gemv(weights, s.classes, s.dims, x, z);
  for (std::size_t k = 0; k < s.classes; ++k) z[k] += w.values[s.classes * s.dims + k];
}

} // namespace

LossGradient loss_and_gradient(const ModelWeights& w, const Partition& data,
                               std::span<const std::size_t> rows, int num_classes,
                               const ModelWeights* prox_ref, double mu) {
  const Shape s = check_shape(w, data, num_classes);
  LossGradient out;
  out.gradient.assign(w.size(), 0.0);
  if (rows.empty()) return out;

  const double inv_m = 1.0 / static_cast<double>(rows.size());
  std::vector<double> z(s.classes);
  const std::span<double> grad_w(out.gradient.data(), s.classes * s.dims);
  for (std::size_t r : rows) {
    const auto x = data.row(r);
    logits(w, s, x, z);
    const auto label = static_cast<std::size_t>(data.labels[r]);
    const double z_label = z[label];
    const double lse = softmax_inplace(z);
    out.loss += (lse - z_label) * inv_m;
    z[label] -= 1.0;
    kernels::ger(inv_m, z, x, grad_w);
    for (std::size_t k = 0; k < s.classes; ++k) out.gradient[s.classes * s.dims + k] += z[k] * inv_m;
  }

  if (prox_ref != nullptr && mu != 0.0) {
    if (prox_ref->size() != w.size()) throw DomainError("proximal reference has the wrong dimension");
    double sq = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double d = w.values[i] - prox_ref->values[i];
      sq += d * d;
      out.gradient[i] += mu * d;
    }
    out.loss += 0.5 * mu * sq;
  }
  return out;
}

double full_loss(const ModelWeights& w, const Partition& data, int num_classes,
                 const ModelWeights* prox_ref, double mu) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return loss_and_gradient(w, data, rows, num_classes, prox_ref, mu).loss;
}

double learning_rate_at(int round, double base, int step) {
  return base / (1.0 + std::floor(static_cast<double>(round) / static_cast<double>(step)));
}

ModelWeights local_train(const ModelWeights& start, const Partition& data, const ModelWeights& global_ref,
                         const LocalTrainConfig& config, int num_classes, Rng& rng,
                         std::vector<double>* epoch_losses) {
  check_shape(start, data, num_classes);
  if (global_ref.size() != start.size()) throw DomainError("local_train: global reference dimension mismatch");
  if (config.batch_size < 1) throw ConfigError("learning.batch_size must be >= 1");

  ModelWeights w = start;
  std::vector<double> velocity(w.size(), 0.0);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t end = std::min(order.size(), begin + batch);
      const std::span<const std::size_t> rows(order.data() + begin, end - begin);
      const LossGradient lg = loss_and_gradient(w, data, rows, num_classes, &global_ref, config.prox_mu);
      if (!std::isfinite(lg.loss)) {
        throw RuntimeError("local_train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(begin / batch) + " (lr " + std::to_string(config.learning_rate) + ")");
      }
      for (std::size_t i = 0; i < velocity.size(); ++i) velocity[i] *= config.momentum;
      kernels::axpy(1.0, lg.gradient, velocity);
      kernels::axpy(-config.learning_rate, velocity, w.values);
    }
    if (epoch_losses != nullptr) {
      epoch_losses->push_back(full_loss(w, data, num_classes, &global_ref, config.prox_mu));
    }
  }
  return w;
}

Evaluation evaluate(const ModelWeights& w, const Partition& test_set, int num_classes) {
  if (test_set.size() == 0) throw DomainError("evaluate: empty test set");
  const Shape s = check_shape(w, test_set, num_classes);
  std::vector<double> z(s.classes);
  std::size_t correct = 0;
  double loss = 0.0;
  for (std::size_t r = 0; r < test_set.size(); ++r) {
    logits(w, s, test_set.row(r), z);
    const auto label = static_cast<std::size_t>(test_set.labels[r]);
    const auto best = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
    if (best == label) ++correct;
    const double z_label = z[label];
    loss += softmax_inplace(z) - z_label;
  }
  const auto n = static_cast<double>(test_set.size());
  return {static_cast<double>(correct) / n, loss / n};
}

} // namespace vrvfl::fl
