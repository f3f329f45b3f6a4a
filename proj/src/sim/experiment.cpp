// SPDX-License-Identifier: Apache-2.0
#include "vrvfl/sim.hpp"
#include "vrvfl/error.hpp"
#include "vrvfl/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#ifndef VRVFL_GIT_DESCRIBE
#define VRVFL_GIT_DESCRIBE "unknown"
#endif

namespace vrvfl::sim {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

} // namespace

std::string RunSpec::label() const {
  if (scheduler == SchedulerKind::vrvfl) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "vrvfl_a%g", alpha);
    return buf;
  }
  return std::string(to_string(scheduler));
}

std::string csv_name(const RunSpec& spec) {
  return spec.label() + "_seed" + std::to_string(spec.seed) + ".csv";
}

void write_csv_header(std::ostream& os) { os << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& os, const RoundRecord& r) {
  os << r.t << ',' << num(r.time_start) << ',' << num(r.round_time) << ',' << num(r.time_end) << ','
     << r.feasible_count << ',' << r.selected_count << ',' << r.success_count << ',' << num(r.objective) << ','
     << num(r.proxy) << ',' << num(r.accuracy) << ',' << num(r.loss) << '\n';
}

ExperimentResult run_experiment(const SimConfig& cfg, const RunSpec& spec, std::ostream* csv) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.spec = spec;
  auto finish_clock = [&] {
    result.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  if (csv != nullptr) {
    write_csv_header(*csv);
    csv->flush();
  }
  try {
    Simulation sim(cfg, spec.seed, spec.scheduler, spec.alpha);
    for (int t = 0; t < cfg.run.rounds; ++t) {
      result.records.push_back(sim.run_round());
      if (csv != nullptr) {
        write_csv_row(*csv, result.records.back());
        csv->flush();
        if (!*csv) throw RuntimeError("write failed for round " + std::to_string(t));
      }
    }
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
    finish_clock();
    throw;
  }
  finish_clock();
  return result;
}

std::string make_manifest(const SimConfig& cfg, const ExperimentResult& result, const std::string& csv_file) {
  std::ostringstream os;
  os << "# vrvfl-manifest v1\n";
  os << "label = " << result.spec.label() << '\n';
  os << "scheduler = " << to_string(result.spec.scheduler) << '\n';
  os << "alpha = " << num(result.spec.alpha) << '\n';
  os << "seed = " << result.spec.seed << '\n';
  os << "config_hash = " << hex(config_hash(cfg)) << '\n';
  os << "git_describe = " << VRVFL_GIT_DESCRIBE << '\n';
  os << "isa = " << kernels::isa_name(kernels::active_isa()) << '\n';
  os << "csv = " << csv_file << '\n';
  os << "rounds_completed = " << result.records.size() << '\n';
  os << "status = " << (result.ok ? "ok" : "failed") << '\n';
  if (!result.ok) os << "error = " << result.error << '\n';
  os << "wall_clock_s = " << num(result.wall_clock_s) << '\n';
  os << "\n# config\n" << serialize_config(cfg);
  return os.str();
}

ExperimentResult run_to_dir(const SimConfig& cfg, const RunSpec& spec, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string name = csv_name(spec);
  const auto csv_path = out_dir / name;
  auto manifest_path = csv_path;
  manifest_path.replace_extension(".manifest");

  std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
  if (!csv) throw RuntimeError("cannot open " + csv_path.string());

  auto write_manifest = [&](const ExperimentResult& r) {
    std::ofstream m(manifest_path, std::ios::binary | std::ios::trunc);
    m << make_manifest(cfg, r, name);
    if (!m) throw RuntimeError("cannot write " + manifest_path.string());
  };

  ExperimentResult partial;
  partial.spec = spec;
  try {
    ExperimentResult r = run_experiment(cfg, spec, &csv);
    write_manifest(r);
    return r;
  } catch (const std::exception& e) {
    partial.ok = false;
    partial.error = e.what();
    write_manifest(partial);
    throw;
  }
}

double final_accuracy(const std::vector<RoundRecord>& records, int window) {
  if (records.empty()) return 0.0;
  const std::size_t n = std::min(records.size(), static_cast<std::size_t>(std::max(window, 1)));
  double s = 0.0;
  for (std::size_t i = records.size() - n; i < records.size(); ++i) s += records[i].accuracy;
  return s / static_cast<double>(n);
}

std::optional<double> time_to_accuracy(const std::vector<RoundRecord>& records, double threshold) {
  for (const auto& r : records) {
    if (r.accuracy >= threshold) return r.time_end;
  }
  return std::nullopt;
}

std::vector<SeedSummary> summarize(const std::vector<ExperimentResult>& results, double threshold_fraction) {
  std::map<std::uint64_t, double> lowest;
  for (const auto& r : results) {
    const double f = final_accuracy(r.records);
    auto [it, fresh] = lowest.emplace(r.spec.seed, f);
    if (!fresh) it->second = std::min(it->second, f);
  }
  std::vector<SeedSummary> out;
  for (const auto& r : results) {
    SeedSummary s;
    s.label = r.spec.label();
    s.seed = r.spec.seed;
    s.final_accuracy = final_accuracy(r.records);
    s.threshold = threshold_fraction * lowest.at(r.spec.seed);
    s.time_to_threshold = time_to_accuracy(r.records, s.threshold);
    s.total_time = r.records.empty() ? 0.0 : r.records.back().time_end;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<RunSpec> compare_jobs(const SimConfig& cfg) {
  std::vector<RunSpec> jobs;
  for (double a : cfg.run.compare_alphas) {
    for (auto seed : cfg.run.seeds) jobs.push_back({SchedulerKind::vrvfl, a, seed});
  }
  for (auto kind : {SchedulerKind::scheme1, SchedulerKind::scheme2}) {
    for (auto seed : cfg.run.seeds) jobs.push_back({kind, cfg.optimization.alpha, seed});
  }
  return jobs;
}

void write_merged(std::ostream& os, const std::vector<ExperimentResult>& results) {
  os << "label,seed,t,time_cum,accuracy,loss\n";
  for (const auto& r : results) {
    const std::string label = r.spec.label();
    for (const auto& rec : r.records) {
      os << label << ',' << r.spec.seed << ',' << rec.t << ',' << num(rec.time_end) << ',' << num(rec.accuracy)
         << ',' << num(rec.loss) << '\n';
    }
  }
}

void write_summary(std::ostream& os, const std::vector<SeedSummary>& summary) {
  os << "label,seed,final_accuracy,threshold,time_to_threshold,total_time\n";
  for (const auto& s : summary) {
    os << s.label << ',' << s.seed << ',' << num(s.final_accuracy) << ',' << num(s.threshold) << ','
       << (s.time_to_threshold ? num(*s.time_to_threshold) : std::string("nan")) << ',' << num(s.total_time)
       << '\n';
  }
}

CompareResult run_compare(const SimConfig& cfg, const std::filesystem::path& out_dir, std::ostream* progress) {
  validate_config(cfg);
  std::filesystem::create_directories(out_dir);
  const std::vector<RunSpec> jobs = compare_jobs(cfg);
  CompareResult out;
  out.results.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        out.results[i] = run_to_dir(cfg, jobs[i], out_dir);
        if (progress != nullptr) {
          std::lock_guard lock(mu);
          *progress << "done " << jobs[i].label() << " seed " << jobs[i].seed << " ("
                    << num(out.results[i].wall_clock_s) << " s)\n";
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(jobs.size());
        return;
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.run.threads), jobs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  out.summary = summarize(out.results);
  std::ofstream merged(out_dir / "compare_merged.csv", std::ios::binary | std::ios::trunc);
  write_merged(merged, out.results);
  std::ofstream summary(out_dir / "compare_summary.csv", std::ios::binary | std::ios::trunc);
  write_summary(summary, out.summary);
  if (!merged || !summary) throw RuntimeError("cannot write compare tables under " + out_dir.string());
  return out;
}

} // namespace vrvfl::sim
