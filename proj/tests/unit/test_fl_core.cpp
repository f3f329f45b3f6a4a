// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/error.hpp"
#include "vrvfl/fl_core.hpp"
#include "vrvfl/validation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

using namespace vrvfl;
using namespace vrvfl::fl;

namespace {

ModelWeights random_model(Rng& rng, int classes, int dims, double scale = 0.1) {
  std::normal_distribution<double> g(0.0, scale);
  ModelWeights w = zero_model(classes, dims);
  for (auto& x : w.values) x = g(rng);
  return w;
}

} // namespace

TEST_CASE("partitions") {
  const SyntheticTask task(10, 20, 3.0);
  Rng rng(1);
  PartitionConfig iid;
  iid.iid_per_class = 7;
  const auto parts = make_partitions(rng, 5, task, iid);
  REQUIRE(parts.size() == 5);
  for (const auto& p : parts) {
    CHECK(p.size() == 70);
    std::vector<int> count(10, 0);
    for (int l : p.labels) ++count[l];
    for (int c : count) CHECK(c == 7);
  }

  PartitionConfig non;
  non.iid = false;
  const auto skew = make_partitions(rng, 200, task, non);
  std::set<std::size_t> supports;
  for (const auto& p : skew) {
    CHECK(p.size() >= 100);
    CHECK(p.size() <= 300);
    std::set<int> labels(p.labels.begin(), p.labels.end());
    CHECK(labels.size() >= 1);
    CHECK(labels.size() <= 3);
    supports.insert(labels.size());
    CHECK(p.features.size() == p.size() * 20);
  }
  CHECK(supports.size() == 3);
}

TEST_CASE("local training edge cases") {
  const SyntheticTask task(4, 5, 3.0);
  Rng rng(2);
  const auto data = make_balanced_set(rng, task, 10);
  const auto start = random_model(rng, 4, 5);

  LocalTrainConfig cfg;
  cfg.epochs = 0;
  Rng r0(3);
  CHECK(local_train(start, data, start, cfg, 4, r0) == start);

  // mu = 0 must follow plain momentum SGD on the same batches
  cfg.epochs = 3;
  cfg.batch_size = 8;
  cfg.prox_mu = 0.0;
  const auto far = random_model(rng, 4, 5, 5.0);
  Rng r1(4), r2(4);
  const auto prox = local_train(start, data, far, cfg, 4, r1);

  ModelWeights w = start;
  std::vector<double> vel(w.size(), 0.0);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int e = 0; e < cfg.epochs; ++e) {
    std::shuffle(order.begin(), order.end(), r2);
    for (std::size_t b = 0; b < order.size(); b += 8) {
      const std::span<const std::size_t> rows(order.data() + b, std::min<std::size_t>(8, order.size() - b));
      const auto lg = loss_and_gradient(w, data, rows, 4);
      for (std::size_t i = 0; i < w.size(); ++i) {
        vel[i] = cfg.momentum * vel[i] + lg.gradient[i];
        w.values[i] -= cfg.learning_rate * vel[i];
      }
    }
  }
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(prox.values[i] == doctest::Approx(w.values[i]).epsilon(1e-12));
}

TEST_CASE("gradient matches central differences") {
  Rng rng(5);
  const SyntheticTask task(3, 4, 2.0);
  for (int k = 0; k < 5; ++k) {
    const auto data = make_balanced_set(rng, task, 4);
    const auto w = random_model(rng, 3, 4, 0.5);
    const auto ref = random_model(rng, 3, 4, 0.5);
    std::vector<std::size_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const auto lg = loss_and_gradient(w, data, rows, 3, &ref, 0.3);
    const auto fd = validation::finite_difference_gradient(w, data, 3, &ref, 0.3);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
      num += (lg.gradient[i] - fd[i]) * (lg.gradient[i] - fd[i]);
      den += fd[i] * fd[i];
    }
    CHECK(std::sqrt(num / den) < 1e-5);
    CHECK(lg.loss == doctest::Approx(validation::reference_loss(w, data, 3, &ref, 0.3)).epsilon(1e-12));
  }
}

TEST_CASE("full-batch descent does not increase the loss") {
  Rng rng(6);
  const SyntheticTask task(10, 20, 3.0);
  const auto data = make_balanced_set(rng, task, 20);
  ModelWeights w = zero_model(10, 20);
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  double prev = full_loss(w, data, 10);
  for (int it = 0; it < 50; ++it) {
    const auto lg = loss_and_gradient(w, data, rows, 10);
    for (std::size_t i = 0; i < w.size(); ++i) w.values[i] -= 1e-3 * lg.gradient[i];
    const double now = full_loss(w, data, 10);
    CHECK(now <= prev);
    prev = now;
  }
}

TEST_CASE("evaluate") {
  Rng rng(7);
  const SyntheticTask wide(10, 20, 10.0);
  const auto test = make_balanced_set(rng, wide, 100);
  const auto zero = zero_model(10, 20);
  const auto chance = evaluate(zero, test, 10);
  CHECK(std::abs(chance.accuracy - 0.1) <= 0.02);
  CHECK(chance.loss == doctest::Approx(std::log(10.0)));

  // class means as weights, equal biases: the Bayes rule for these blobs
  ModelWeights bayes = zero;
  for (int k = 0; k < 10; ++k) bayes.values[k * 20 + k] = 10.0;
  const auto e = evaluate(bayes, test, 10);
  CHECK(e.accuracy >= 0.99);
  const auto again = evaluate(bayes, test, 10);
  CHECK(again.accuracy == e.accuracy);
  CHECK(again.loss == e.loss);
  CHECK(learning_rate_at(0) == 0.1);
  CHECK(learning_rate_at(25) == doctest::Approx(0.05));
  CHECK(learning_rate_at(74) == doctest::Approx(0.1 / 3));
}

TEST_CASE("aggregation") {
  Rng rng(8);
  const auto prev = random_model(rng, 3, 4);
  const auto local = random_model(rng, 3, 4);
  std::vector<AggregationInput> one{{&local, 50.0, 1.0, 1.0}};
  CHECK(aggregate(one, 50.0, prev, AggregationMode::verbatim) == local);
  const auto anchored = aggregate(one, 50.0, prev, AggregationMode::anchored);
  for (std::size_t i = 0; i < local.size(); ++i) CHECK(anchored.values[i] == doctest::Approx(local.values[i]));
  CHECK(aggregate(std::span<const AggregationInput>{}, 50.0, prev, AggregationMode::verbatim) == prev);

  // only D_v / D matters
  const auto other = random_model(rng, 3, 4);
  std::vector<AggregationInput> two{{&local, 30.0, 0.5, 0.8}, {&other, 70.0, 0.9, 0.6}};
  std::vector<AggregationInput> scaled{{&local, 300.0, 0.5, 0.8}, {&other, 700.0, 0.9, 0.6}};
  const auto a = aggregate(two, 100.0, prev, AggregationMode::anchored);
  const auto b = aggregate(scaled, 1000.0, prev, AggregationMode::anchored);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-14));

  std::vector<AggregationInput> bad{{&local, 30.0, 0.0, 0.8}};
  CHECK_THROWS_AS(aggregate(bad, 100.0, prev, AggregationMode::verbatim), DomainError);
}

TEST_CASE("convergence proxy") {
  std::vector<ParticipationStat> full{{10, 1, 1}, {30, 1, 1}};
  CHECK(convergence_proxy(full, 40) == 0.0);
  std::vector<ParticipationStat> half{{10, 0.5, 0.5}};
  CHECK(convergence_proxy(half, 10) == doctest::Approx(3.0));
  std::vector<ParticipationStat> dead{{10, 0.5, 0.0}};
  CHECK(std::isinf(convergence_proxy(dead, 10)));
  double prev = convergence_proxy(half, 10);
  for (double u : {0.6, 0.7, 0.9, 1.0}) {
    std::vector<ParticipationStat> s{{10, u, 0.5}};
    const double now = convergence_proxy(s, 10);
    CHECK(now <= prev);
    prev = now;
  }
}

TEST_CASE("serialization round trips") {
  Rng rng(9);
  const auto w = random_model(rng, 3, 4, 1e3);
  std::stringstream ws;
  write_weights(ws, w);
  CHECK(read_weights(ws) == w);

  const auto p = make_balanced_set(rng, SyntheticTask(3, 4, 2.0), 3);
  std::stringstream ps;
  write_partition(ps, p);
  CHECK(read_partition(ps) == p);

  std::stringstream junk("vrvfl-weights v1 3\n1\n2\n");
  CHECK_THROWS(read_weights(junk));
}
