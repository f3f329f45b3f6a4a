// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/error.hpp"
#include "vrvfl/scheduler.hpp"

#include <algorithm>
#include <random>

namespace vrvfl::scheduler {

Selection realize_selection(const RoundPlan& plan, Rng& rng, int resource_blocks) {
  Selection out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> drawn;
  for (std::size_t i = 0; i < plan.ids.size(); ++i) {
    // one uniform per vehicle keeps the stream aligned across plans
    const double r = unit(rng);
    if (r < plan.inclusion_probs[i]) drawn.push_back(i);
  }
  out.drawn = drawn.size();
  if (resource_blocks >= 0 && drawn.size() > static_cast<std::size_t>(resource_blocks)) {
    out.trimmed = true;
    std::stable_sort(drawn.begin(), drawn.end(), [&](std::size_t a, std::size_t b) {
      const double ka = plan.inclusion_probs[a] * plan.success_probs[a];
      const double kb = plan.inclusion_probs[b] * plan.success_probs[b];
      return ka != kb ? ka > kb : plan.ids[a] < plan.ids[b];
    });
    drawn.resize(static_cast<std::size_t>(resource_blocks));
  }
  for (std::size_t i : drawn) out.selected.push_back(plan.ids[i]);
  std::sort(out.selected.begin(), out.selected.end());
  return out;
}

double round_time(std::span<const double> successful_rates, double model_bits, double round_time_cap_s) {
  if (successful_rates.empty()) return round_time_cap_s;
  const double slowest = *std::min_element(successful_rates.begin(), successful_rates.end());
  if (!(slowest > 0.0)) throw DomainError("round_time: non-positive rate in the successful set");
  return model_bits / slowest;
}

} // namespace vrvfl::scheduler
