// SPDX-License-Identifier: Apache-2.0
//
// Round orchestration and experiment runners.
//
// Randomness: every stream is make_stream(seed, name, a, b) with
//   "arrivals" (lane)          inter-arrival clocks, absolute time
//   "vehicle"  (id)            speed and shadowing
//   "data"     (id)            the vehicle's partition
//   "testset"                  held-out set
//   "fading"   (id, round)     (h_est, h_err) of the round
//   "selection"(round)         Bernoulli inclusion draws
//   "training" (id, round)     mini-batch shuffles
// The environment streams never see a draw made on behalf of the scheduler,
// so all schedulers share arrivals, speeds, data and fading for a given seed.
#pragma once

#include "vrvfl/config.hpp"
#include "vrvfl/fl_core.hpp"
#include "vrvfl/mobility.hpp"
#include "vrvfl/scheduler.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace vrvfl::sim {

struct RoundRecord {
  int t = 0;
  double time_start = 0.0;
  double time_end = 0.0;
  double round_time = 0.0; // T_t
  std::size_t feasible_count = 0;
  std::size_t selected_count = 0;
  std::size_t success_count = 0;
  double objective = 0.0;  // NaN when the feasible set is empty
  double proxy = 0.0;
  double accuracy = 0.0;
  double loss = 0.0;
  bool trimmed = false;
  std::size_t dropped_count = 0;
};

struct ArrivalLog {
  mobility::VehicleId id = 0;
  double time = 0.0; // absolute, warm-up included
};

class Simulation {
public:
  Simulation(const SimConfig& config, std::uint64_t seed, SchedulerKind scheduler, double alpha);

  /// Mobility by the previous round time, arrivals, fading redraw; returns
  /// the scheduling problem of the round about to run.
  scheduler::RoundContext prepare_round();
  scheduler::RoundPlan plan_round(const scheduler::RoundContext& ctx) const;
  /// Selection, success draws, training, aggregation, timing and evaluation.
  RoundRecord finish_round(const scheduler::RoundContext& ctx, scheduler::RoundPlan plan);
  RoundRecord run_round();

  int round() const { return round_; }
  double time() const { return time_; }
  const std::vector<mobility::VehicleState>& vehicles() const { return vehicles_; }
  const std::vector<ArrivalLog>& arrival_log() const { return arrival_log_; }
  const fl::Partition& partition(mobility::VehicleId id) const;
  const fl::ModelWeights& global_model() const { return global_; }
  const fl::Partition& test_set() const { return test_set_; }
  double warmup_duration() const { return warmup_; }

private:
  void spawn(double dt);
  void redraw_channels();

  SimConfig cfg_;
  std::uint64_t seed_;
  SchedulerKind scheduler_;
  double alpha_;
  mobility::RoadGeometry geometry_;
  channel::PathlossModel pathloss_;
  mobility::SpeedRange speeds_;
  scheduler::SchedulerParams params_;
  fl::SyntheticTask task_;
  fl::PartitionConfig partition_cfg_;

  mobility::ArrivalProcess arrivals_;
  std::vector<mobility::VehicleState> vehicles_;
  std::unordered_map<mobility::VehicleId, fl::Partition> partitions_;
  std::vector<ArrivalLog> arrival_log_;
  fl::Partition test_set_;
  fl::ModelWeights global_;

  int round_ = 0;
  double time_ = 0.0;
  double pending_dt_ = 0.0;
  double warmup_ = 0.0;
  bool prepared_ = false;
};

// ---- experiments -------------------------------------------------------------

struct RunSpec {
  SchedulerKind scheduler = SchedulerKind::vrvfl;
  double alpha = 0.4; // used by vrvfl only
  std::uint64_t seed = 1;

  /// "vrvfl_a0.4", "scheme1", "scheme2".
  std::string label() const;
};

inline constexpr const char* kCsvHeader =
    "t,time_start,T_t,time_cum,n_feasible,n_selected,n_success,objective,proxy,accuracy,loss";

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const RoundRecord& r);

struct ExperimentResult {
  RunSpec spec;
  std::vector<RoundRecord> records;
  bool ok = true;
  std::string error;
  double wall_clock_s = 0.0;
};

/// Runs cfg.run.rounds rounds. Rows are streamed to `csv` (if given) and
/// flushed per round; exceptions propagate after the rows already written.
ExperimentResult run_experiment(const SimConfig& cfg, const RunSpec& spec, std::ostream* csv = nullptr);

/// Structured-text manifest: seed, labels, config hash, git describe, ISA,
/// status, wall clock, and the full config echo.
std::string make_manifest(const SimConfig& cfg, const ExperimentResult& result, const std::string& csv_name);

/// Writes <label>_seed<seed>.csv and .manifest under out_dir. A failure
/// leaves the partial CSV and a manifest with the error, then rethrows.
ExperimentResult run_to_dir(const SimConfig& cfg, const RunSpec& spec, const std::filesystem::path& out_dir);

std::string csv_name(const RunSpec& spec);

/// Mean accuracy over the last `window` rounds.
double final_accuracy(const std::vector<RoundRecord>& records, int window = 10);
/// Cumulative time at the end of the first round whose accuracy reaches the threshold.
std::optional<double> time_to_accuracy(const std::vector<RoundRecord>& records, double threshold);

struct SeedSummary {
  std::string label;
  std::uint64_t seed = 0;
  double final_accuracy = 0.0;
  double threshold = 0.0;                 // shared by all runs of the seed
  std::optional<double> time_to_threshold;
  double total_time = 0.0;
};

/// Per seed, the threshold is threshold_fraction times the lowest final
/// accuracy among the runs of that seed.
std::vector<SeedSummary> summarize(const std::vector<ExperimentResult>& results, double threshold_fraction = 0.9);

/// Jobs ordered by (scheduler, alpha, seed): vrvfl per alpha, then scheme1, scheme2.
std::vector<RunSpec> compare_jobs(const SimConfig& cfg);

struct CompareResult {
  std::vector<ExperimentResult> results; // compare_jobs order
  std::vector<SeedSummary> summary;
};

/// Runs compare_jobs on cfg.run.threads workers; writes every run's CSV and
/// manifest, then compare_merged.csv and compare_summary.csv.
CompareResult run_compare(const SimConfig& cfg, const std::filesystem::path& out_dir,
                          std::ostream* progress = nullptr);

void write_merged(std::ostream& os, const std::vector<ExperimentResult>& results);
void write_summary(std::ostream& os, const std::vector<SeedSummary>& summary);

} // namespace vrvfl::sim
