// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/error.hpp"
#include "vrvfl/fl_core.hpp"
#include "vrvfl/kernels.hpp"

#include <limits>

namespace vrvfl::fl {

ModelWeights aggregate(std::span<const AggregationInput> inputs, double total_data,
                       const ModelWeights& global_prev, AggregationMode mode) {
  if (inputs.empty()) return global_prev;
  if (!(total_data > 0.0)) throw DomainError("aggregate: total data must be positive");

  ModelWeights out = mode == AggregationMode::anchored ? global_prev
                                                        : ModelWeights{std::vector<double>(global_prev.size(), 0.0)};
  std::vector<double> delta(global_prev.size());
  for (const AggregationInput& in : inputs) {
    if (in.weights == nullptr || in.weights->size() != global_prev.size()) {
      throw DomainError("aggregate: local model dimension mismatch");
    }
    if (!(in.inclusion_prob > 0.0) || !(in.success_prob > 0.0)) {
      throw DomainError("aggregate: inclusion and success probabilities must be positive");
    }
    const double scale = in.data_size / (total_data * in.inclusion_prob * in.success_prob);
    if (mode == AggregationMode::verbatim) {
      kernels::axpy(scale, in.weights->values, out.values);
    } else {
      for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = in.weights->values[i] - global_prev.values[i];
      kernels::axpy(scale, delta, out.values);
    }
  }
  return out;
}

double convergence_proxy(std::span<const ParticipationStat> stats, double total_data) {
  double sum = 0.0;
  for (const ParticipationStat& s : stats) {
    const double reach = s.inclusion_prob * s.success_prob;
    if (!(reach > 0.0)) return std::numeric_limits<double>::infinity();
    sum += s.data_size / total_data * (1.0 / reach - 1.0);
  }
  return sum;
}

} // namespace vrvfl::fl
