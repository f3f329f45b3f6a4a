// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/sim.hpp"
#include "vrvfl/error.hpp"

#include <algorithm>
#include <cmath>

namespace vrvfl::sim {

Simulation::Simulation(const SimConfig& config, std::uint64_t seed, SchedulerKind scheduler, double alpha)
    : cfg_(config),
      seed_(seed),
      scheduler_(scheduler),
      alpha_(alpha),
      geometry_(road_geometry(config)),
      pathloss_(pathloss_model(config)),
      speeds_(speed_range(config)),
      params_(scheduler_params(config)),
      task_(config.learning.classes, config.learning.dims, config.learning.separation),
      partition_cfg_(partition_config(config)),
      arrivals_(seed, config.geometry.lanes, config.traffic.arrival_rate) {
  validate_config(cfg_);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  params_.alpha = alpha;

  Rng test_rng = make_stream(seed_, "testset");
  test_set_ = fl::make_balanced_set(test_rng, task_, cfg_.learning.test_per_class);
  global_ = fl::zero_model(cfg_.learning.classes, cfg_.learning.dims);

  if (cfg_.traffic.warm_start) {
    const double mean_speed = 0.5 * (speeds_.min_mps + speeds_.max_mps);
    warmup_ = geometry_.road_length / mean_speed;
    double elapsed = 0.0;
    while (elapsed < warmup_) {
      const double step = std::min(1.0, warmup_ - elapsed);
      for (auto id : mobility::advance(vehicles_, step, geometry_).departed) partitions_.erase(id);
      spawn(step);
      elapsed += step;
    }
  }
}

void Simulation::spawn(double dt) {
  auto fresh = mobility::spawn_arrivals(arrivals_, dt, geometry_, speeds_, seed_,
                                        cfg_.channel.shadowing_sigma_db);
  const double now = arrivals_.now();
  for (auto& v : fresh) {
    arrival_log_.push_back({v.id, v.spawn_time});
    // the vehicle has been driving since its arrival inside the window
    v.position = v.velocity * (now - v.spawn_time);
    if (v.position > geometry_.road_length) continue;
    Rng data_rng = make_stream(seed_, "data", v.id);
    partitions_.emplace(v.id, std::move(fl::make_partitions(data_rng, 1, task_, partition_cfg_).front()));
    vehicles_.push_back(v);
  }
}

void Simulation::redraw_channels() {
  const auto& p = cfg_.physical;
  for (auto& v : vehicles_) {
    Rng rng = make_stream(seed_, "fading", v.id, static_cast<std::uint64_t>(round_));
    const channel::FadingPair pair = channel::sample_fading_pair(rng);
    v.channel.h_est = pair.h_est;
    v.channel.h_err = pair.h_err;
    v.channel.epsilon = channel::temporal_correlation(v.velocity, p.carrier_freq_hz, p.feedback_delay_s,
                                                      p.speed_of_light);
    v.channel.large_scale_gain =
        channel::large_scale_gain(mobility::nearest_rsu_distance(v, geometry_), p.carrier_freq_hz,
                                  v.shadowing_db, pathloss_);
  }
}

const fl::Partition& Simulation::partition(mobility::VehicleId id) const {
  const auto it = partitions_.find(id);
  if (it == partitions_.end()) throw DomainError("no partition for vehicle " + std::to_string(id));
  return it->second;
}

scheduler::RoundContext Simulation::prepare_round() {
  if (pending_dt_ > 0.0) {
    for (auto id : mobility::advance(vehicles_, pending_dt_, geometry_).departed) partitions_.erase(id);
    spawn(pending_dt_);
    pending_dt_ = 0.0;
  }
  redraw_channels();

  std::vector<scheduler::Candidate> candidates;
  candidates.reserve(vehicles_.size());
  double present_total = 0.0;
  for (const auto& v : vehicles_) {
    const double d = static_cast<double>(partition(v.id).size());
    present_total += d;
    candidates.push_back(scheduler::make_candidate(v, geometry_, params_, d));
  }
  std::optional<double> total;
  if (cfg_.optimization.total_data == DataTotalMode::present) total = present_total;
  prepared_ = true;
  return scheduler::build_context(candidates, params_, alpha_, total);
}

scheduler::RoundPlan Simulation::plan_round(const scheduler::RoundContext& ctx) const {
  const scheduler::BcdOptions opts{params_.bcd_tol, params_.bcd_max_iter, params_.block_tol,
                                   params_.block_max_iter};
  switch (scheduler_) {
  case SchedulerKind::vrvfl: return scheduler::bcd_solve(ctx, opts).plan;
  case SchedulerKind::scheme1: return scheduler::scheme1_baseline(ctx, opts);
  case SchedulerKind::scheme2: return scheduler::scheme2_baseline(ctx, opts);
  }
  throw ConfigError("unknown scheduler");
}

RoundRecord Simulation::finish_round(const scheduler::RoundContext& ctx, scheduler::RoundPlan plan) {
  if (!prepared_) throw RuntimeError("finish_round called before prepare_round");
  prepared_ = false;
  const std::string where = "round " + std::to_string(round_) + ": ";

  RoundRecord rec;
  rec.t = round_;
  rec.time_start = time_;
  rec.feasible_count = plan.ids.size();
  rec.dropped_count = plan.dropped.size();

  try {
    Rng sel_rng = make_stream(seed_, "selection", static_cast<std::uint64_t>(round_));
    const scheduler::Selection sel = scheduler::realize_selection(plan, sel_rng, params_.resource_blocks);
    rec.selected_count = sel.selected.size();
    rec.trimmed = sel.trimmed;

    std::unordered_map<mobility::VehicleId, const mobility::VehicleState*> by_id;
    for (const auto& v : vehicles_) by_id.emplace(v.id, &v);

    const fl::LocalTrainConfig train_cfg{cfg_.learning.epochs, cfg_.learning.batch_size,
                                         fl::learning_rate_at(round_, cfg_.learning.lr_base, cfg_.learning.lr_step),
                                         cfg_.learning.momentum, cfg_.learning.prox_mu};
    std::vector<fl::ModelWeights> locals;
    std::vector<std::size_t> winners;
    std::vector<double> success_rates;
    locals.reserve(sel.selected.size());
    for (const auto id : sel.selected) {
      const std::size_t i = *plan.index_of(id);
      const auto* v = by_id.at(id);
      const auto coeffs = channel::outage_coefficients(plan.rates[i], params_.bandwidth_per_vehicle(),
                                                       v->channel.epsilon, params_.tx_power_w,
                                                       v->channel.large_scale_gain, params_.noise_density_w_hz);
      if (!channel::transmission_succeeds(coeffs, v->channel.h_est_power(), v->channel.h_err_power())) continue;
      Rng train_rng = make_stream(seed_, "training", id, static_cast<std::uint64_t>(round_));
      locals.push_back(fl::local_train(global_, partition(id), global_, train_cfg, cfg_.learning.classes, train_rng));
      winners.push_back(i);
      success_rates.push_back(plan.rates[i]);
    }
    rec.success_count = winners.size();

    std::vector<fl::AggregationInput> inputs;
    for (std::size_t k = 0; k < winners.size(); ++k) {
      const std::size_t i = winners[k];
      inputs.push_back({&locals[k], plan.data_sizes[i], plan.inclusion_probs[i], plan.success_probs[i]});
    }
    fl::ModelWeights next = fl::aggregate(inputs, plan.total_data, global_, cfg_.learning.aggregation);
    if (!next.all_finite()) throw RuntimeError("aggregated model is not finite");
    global_ = std::move(next);

    rec.round_time = scheduler::round_time(success_rates, params_.model_bits, params_.round_time_cap_s);

    std::vector<fl::ParticipationStat> stats;
    for (std::size_t i = 0; i < plan.ids.size(); ++i) {
      stats.push_back({plan.data_sizes[i], plan.inclusion_probs[i], plan.success_probs[i]});
    }
    rec.proxy = stats.empty() ? 0.0 : fl::convergence_proxy(stats, plan.total_data);
    rec.objective = plan.skipped ? std::nan("") : scheduler::objective(plan.inclusion_probs, plan.rates, ctx);

    const fl::Evaluation ev = fl::evaluate(global_, test_set_, cfg_.learning.classes);
    rec.accuracy = ev.accuracy;
    rec.loss = ev.loss;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw RuntimeError(where + e.what());
  }

  rec.time_end = rec.time_start + rec.round_time;
  time_ = rec.time_end;
  pending_dt_ = rec.round_time;
  ++round_;
  return rec;
}

RoundRecord Simulation::run_round() {
  const scheduler::RoundContext ctx = prepare_round();
  return finish_round(ctx, plan_round(ctx));
}

} // namespace vrvfl::sim
