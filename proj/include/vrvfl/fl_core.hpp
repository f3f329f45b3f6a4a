// SPDX-License-Identifier: Apache-2.0
//
// Desk-scale federated learning: multinomial logistic regression on Gaussian
// class blobs, FedProx local training, and inverse-probability-weighted
// aggregation.
#pragma once

#include "vrvfl/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace vrvfl::fl {

struct ModelWeights {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool all_finite() const;
  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

/// Row-major feature matrix plus class labels; one per vehicle.
struct Partition {
  std::size_t dims = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * dims, dims};
  }
  void append(std::span<const double> x, int label);
  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Gaussian blobs with unit covariance; class k has mean separation * e_k.
class SyntheticTask {
public:
  SyntheticTask(int num_classes, int dims, double separation);

  int num_classes() const { return classes_; }
  int dims() const { return dims_; }
  double separation() const { return separation_; }
  void sample(Rng& rng, int label, std::span<double> out) const;

private:
  int classes_;
  int dims_;
  double separation_;
};

struct PartitionConfig {
  bool iid = true;
  int iid_per_class = 20;
  int non_iid_min = 100;
  int non_iid_max = 300;
  int non_iid_max_classes = 3;
};

/// IID: iid_per_class samples of every class per vehicle. Non-IID: per
/// vehicle, k ~ U{1..max_classes} distinct classes and U[min, max] samples,
/// each of the k classes appearing at least once.
std::vector<Partition> make_partitions(Rng& rng, std::size_t num_vehicles, const SyntheticTask& task,
                                       const PartitionConfig& config);

/// Balanced held-out set, per_class samples of every class.
Partition make_balanced_set(Rng& rng, const SyntheticTask& task, int per_class);

// ---- model -------------------------------------------------------------------

/// Parameter layout: weight matrix (classes x dims, row-major) then biases.
std::size_t parameter_count(int num_classes, int dims);
ModelWeights zero_model(int num_classes, int dims);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

/// Mean cross-entropy over `rows` plus (mu/2) ||w - prox_ref||^2. An empty
/// prox_ref disables the proximal term.
LossGradient loss_and_gradient(const ModelWeights& w, const Partition& data,
                               std::span<const std::size_t> rows, int num_classes,
                               const ModelWeights* prox_ref = nullptr, double mu = 0.0);

/// Loss only, same definition as loss_and_gradient over all rows.
double full_loss(const ModelWeights& w, const Partition& data, int num_classes,
                 const ModelWeights* prox_ref = nullptr, double mu = 0.0);

struct LocalTrainConfig {
  int epochs = 5;
  int batch_size = 32;
  double learning_rate = 0.1;
  double momentum = 0.9;
  double prox_mu = 0.0025;
};

/// 0.1 / (1 + floor(round / 25)) for the defaults.
double learning_rate_at(int round, double base = 0.1, int step = 25);

/// Mini-batch momentum SGD (v <- m v + g; w <- w - lr v) on the prox-regularized
/// loss, reshuffling rows every epoch from `rng`. Throws RuntimeError on a
/// non-finite loss.
ModelWeights local_train(const ModelWeights& start, const Partition& data, const ModelWeights& global_ref,
                         const LocalTrainConfig& config, int num_classes, Rng& rng,
                         std::vector<double>* epoch_losses = nullptr);

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;
};

Evaluation evaluate(const ModelWeights& w, const Partition& test_set, int num_classes);

// ---- aggregation -----------------------------------------------------------------

enum class AggregationMode {
  verbatim, // w = sum (D_v/D) w_v / (u_v P_v)
  anchored, // w = w_t + sum (D_v/D) (w_v - w_t) / (u_v P_v)
};

struct AggregationInput {
  const ModelWeights* weights = nullptr;
  double data_size = 0.0;
  double inclusion_prob = 1.0;
  double success_prob = 1.0;
};

/// Inputs must be the successful transmissions only, in ascending vehicle-id
/// order (the sum is accumulated in that order). Empty input returns global_prev.
ModelWeights aggregate(std::span<const AggregationInput> inputs, double total_data,
                       const ModelWeights& global_prev, AggregationMode mode);

struct ParticipationStat {
  double data_size = 0.0;
  double inclusion_prob = 1.0;
  double success_prob = 1.0;
};

/// sum (D_v/D) (1/(u_v P_v) - 1); +inf if any u_v P_v is 0.
double convergence_proxy(std::span<const ParticipationStat> stats, double total_data);

// ---- serialization --------------------------------------------------------------
//
//   vrvfl-weights v1 <count>\n<v_0>\n<v_1>\n...           (%.17g, one per line)
//   vrvfl-partition v1 <rows> <dims>\n<label> <x_0> ... <x_{dims-1}>\n...

void write_weights(std::ostream& os, const ModelWeights& w);
ModelWeights read_weights(std::istream& is);
void write_partition(std::ostream& os, const Partition& p);
Partition read_partition(std::istream& is);

} // namespace vrvfl::fl
