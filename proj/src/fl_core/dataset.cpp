// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/error.hpp"
#include "vrvfl/fl_core.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

namespace vrvfl::fl {

void Partition::append(std::span<const double> x, int label) {
  if (x.size() != dims) throw DomainError("Partition::append: feature length mismatch");
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(label);
}

SyntheticTask::SyntheticTask(int num_classes, int dims, double separation)
    : classes_(num_classes), dims_(dims), separation_(separation) {
  if (num_classes < 2) throw ConfigError("learning.classes must be >= 2");
  if (dims < num_classes) throw ConfigError("learning.dims must be >= learning.classes");
  if (!(separation > 0.0)) throw ConfigError("learning.separation must be positive");
}

void SyntheticTask::sample(Rng& rng, int label, std::span<double> out) const {
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int j = 0; j < dims_; ++j) out[static_cast<std::size_t>(j)] = noise(rng);
  out[static_cast<std::size_t>(label)] += separation_;
}

std::vector<Partition> make_partitions(Rng& rng, std::size_t num_vehicles, const SyntheticTask& task,
                                       const PartitionConfig& config) {
  const int classes = task.num_classes();
  if (config.iid) {
    if (config.iid_per_class < 1) throw ConfigError("learning.iid_per_class must be >= 1");
  } else {
    if (config.non_iid_max_classes < 1 || config.non_iid_max_classes > classes) {
      throw ConfigError("learning.non_iid_max_classes must lie in [1, classes]");
    }
    if (config.non_iid_min < config.non_iid_max_classes || config.non_iid_max < config.non_iid_min) {
      throw ConfigError("learning.non_iid_min/max cannot cover the class support");
    }
  }

  std::vector<Partition> out;
  out.reserve(num_vehicles);
  std::vector<double> x(static_cast<std::size_t>(task.dims()));
  for (std::size_t v = 0; v < num_vehicles; ++v) {
    Partition p;
    p.dims = static_cast<std::size_t>(task.dims());
    if (config.iid) {
      for (int k = 0; k < classes; ++k) {
        for (int i = 0; i < config.iid_per_class; ++i) {
          task.sample(rng, k, x);
          p.append(x, k);
        }
      }
    } else {
      std::uniform_int_distribution<int> support(1, config.non_iid_max_classes);
      std::uniform_int_distribution<int> count(config.non_iid_min, config.non_iid_max);
      const int k = support(rng);
      const int n = count(rng);
      std::vector<int> all(static_cast<std::size_t>(classes));
      std::iota(all.begin(), all.end(), 0);
      std::shuffle(all.begin(), all.end(), rng);
      all.resize(static_cast<std::size_t>(k));
      std::uniform_int_distribution<int> pick(0, k - 1);
      for (int i = 0; i < n; ++i) {
        const int label = i < k ? all[static_cast<std::size_t>(i)] : all[static_cast<std::size_t>(pick(rng))];
        task.sample(rng, label, x);
        p.append(x, label);
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

Partition make_balanced_set(Rng& rng, const SyntheticTask& task, int per_class) {
  PartitionConfig cfg;
  cfg.iid = true;
  cfg.iid_per_class = per_class;
  return make_partitions(rng, 1, task, cfg).front();
}

} // namespace vrvfl::fl
