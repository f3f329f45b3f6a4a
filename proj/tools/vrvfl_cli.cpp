// SPDX-License-Identifier: Apache-2.0
//
// vrvfl: run, compare, validate, dump-instance.
// Exit codes: 0 ok, 1 validation failure, 2 config error, 3 runtime error.
#include "vrvfl/config.hpp"
#include "vrvfl/error.hpp"
#include "vrvfl/kernels.hpp"
#include "vrvfl/sim.hpp"
#include "vrvfl/validation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace vrvfl;

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::vector<double> alphas;
  std::string scheduler;
  std::optional<int> rounds;
  std::optional<int> threads;
  std::string out_dir;
  std::vector<std::string> overrides;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--config", o.config_path, "config file of 'section.key = value' lines");
  cmd.add_option("--seed", o.seed, "master seed of a single run");
  cmd.add_option("--seeds", o.seeds, "comma-separated seeds for compare, e.g. 1,2,3");
  cmd.add_option("--alpha", o.alphas, "alpha value(s); compare runs VR-VFL once per value")->delimiter(',');
  cmd.add_option("--scheduler", o.scheduler, "vrvfl|scheme1|scheme2")
      ->check(CLI::IsMember({"vrvfl", "scheme1", "scheme2"}));
  cmd.add_option("--rounds", o.rounds, "FL rounds per experiment");
  cmd.add_option("--threads", o.threads, "worker threads for compare");
  cmd.add_option("--out-dir", o.out_dir, "output directory (default: $OUT_DIR, else ./out)");
  cmd.add_option("--set", o.overrides, "override any key, e.g. --set learning.iid=false");
}

SimConfig resolve_config(const CommonOptions& o) {
  SimConfig cfg = o.config_path.empty() ? SimConfig{} : load_config_file(o.config_path);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) cfg.run.seed = *o.seed;
  if (!o.seeds.empty()) set_config_value(cfg, "run.seeds", o.seeds);
  if (!o.alphas.empty()) {
    cfg.run.compare_alphas = o.alphas;
    cfg.optimization.alpha = o.alphas.front();
  }
  if (!o.scheduler.empty()) cfg.run.scheduler = parse_scheduler(o.scheduler);
  if (o.rounds) cfg.run.rounds = *o.rounds;
  if (o.threads) cfg.run.threads = *o.threads;
  validate_config(cfg);
  return cfg;
}

std::filesystem::path resolve_out_dir(const CommonOptions& o) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv("OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "out";
}

std::string key_reference() {
  std::ostringstream os;
  os << "Configuration keys (defaults shown; [reference setup: ...] marks values of the published highway setup):\n";
  const SimConfig defaults;
  for (const auto& k : config_keys()) {
    std::string value;
    try {
      value = get_config_value(defaults, k.name);
    } catch (const ConfigError&) {
      value = "(input alias)";
    }
    os << "  " << k.name << " = " << value << "\n      " << k.help;
    if (!k.reference.empty()) os << "  [reference setup: " << k.reference << "]";
    os << "\n";
  }
  os << "\nExit codes: 0 ok, 1 validation failure, 2 config error, 3 runtime error.\n";
  return os.str();
}

int cmd_run(const CommonOptions& o) {
  const SimConfig cfg = resolve_config(o);
  const sim::RunSpec spec{cfg.run.scheduler, cfg.optimization.alpha, cfg.run.seed};
  const auto dir = resolve_out_dir(o);
  const auto result = sim::run_to_dir(cfg, spec, dir);
  const double total = result.records.empty() ? 0.0 : result.records.back().time_end;
  std::printf("%s seed %llu: %zu rounds, simulated %.1f s, final accuracy %.4f -> %s\n", spec.label().c_str(),
              static_cast<unsigned long long>(spec.seed), result.records.size(), total,
              sim::final_accuracy(result.records), (dir / sim::csv_name(spec)).string().c_str());
  return kOk;
}

int cmd_compare(const CommonOptions& o) {
  const SimConfig cfg = resolve_config(o);
  const auto dir = resolve_out_dir(o);
  const auto result = sim::run_compare(cfg, dir, &std::cerr);
  std::printf("%-14s %6s %10s %10s %14s %12s\n", "label", "seed", "final_acc", "threshold", "time_to_thr_s",
              "total_s");
  for (const auto& s : result.summary) {
    std::printf("%-14s %6llu %10.4f %10.4f %14s %12.1f\n", s.label.c_str(), static_cast<unsigned long long>(s.seed),
                s.final_accuracy, s.threshold,
                s.time_to_threshold ? std::to_string(static_cast<long long>(*s.time_to_threshold)).c_str() : "never",
                s.total_time);
  }
  std::printf("tables: %s, %s\n", (dir / "compare_merged.csv").string().c_str(),
              (dir / "compare_summary.csv").string().c_str());
  return kOk;
}

int cmd_validate(bool acceptance, const std::vector<int>& criteria) {
  const auto scratch = std::filesystem::temp_directory_path() / "vrvfl_validate";
  std::filesystem::create_directories(scratch);
  std::vector<validation::CriterionResult> results;
  if (acceptance || !criteria.empty()) {
    std::vector<int> ids = criteria;
    if (ids.empty())
      for (int k = 1; k <= validation::kCriterionCount; ++k) ids.push_back(k);
    for (int id : ids) {
      results.push_back(validation::run_criterion(id, scratch));
      std::cout << validation::format_result(results.back()) << std::endl;
    }
  } else {
    results = validation::run_property_suites(scratch);
    for (const auto& r : results) std::cout << validation::format_result(r) << '\n';
  }
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (failed ? "FAILED " : "OK ") << results.size() - failed << "/" << results.size() << " passed\n";
  return failed ? kValidationFailure : kOk;
}

int cmd_dump_instance(const CommonOptions& o, int round, const std::string& output) {
  const SimConfig cfg = resolve_config(o);
  const double alpha = cfg.optimization.alpha;
  sim::Simulation simulation(cfg, cfg.run.seed, cfg.run.scheduler, alpha);
  for (int t = 0; t < round; ++t) simulation.run_round();
  const scheduler::RoundContext ctx = simulation.prepare_round();
  if (output.empty() || output == "-") {
    scheduler::write_instance(std::cout, ctx);
  } else {
    std::ofstream f(output, std::ios::binary | std::ios::trunc);
    scheduler::write_instance(f, ctx);
    if (!f) throw RuntimeError("cannot write " + output);
  }
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicular federated learning with joint client and rate selection under imperfect CSI"};
  app.require_subcommand(1);
  app.footer(key_reference());
  app.add_option_function<std::string>(
      "--simd", [](const std::string& isa) { kernels::force_isa(isa == "scalar" ? kernels::Isa::scalar : kernels::Isa::avx2); },
      "pin the kernel variant (scalar|avx2); default picks the best available")
      ->check(CLI::IsMember({"scalar", "avx2"}));

  CommonOptions run_opts, compare_opts, dump_opts;
  auto* run = app.add_subcommand("run", "run one experiment and write <label>_seed<seed>.csv and .manifest");
  add_common(*run, run_opts);
  auto* compare = app.add_subcommand("compare", "VR-VFL per alpha, Scheme 1 and Scheme 2 on shared seeds");
  add_common(*compare, compare_opts);

  bool acceptance = false;
  std::vector<int> criteria;
  auto* validate = app.add_subcommand("validate", "Monte Carlo and oracle property suites");
  validate->add_flag("--acceptance", acceptance, "run the full acceptance criteria instead (includes the long trend run)");
  validate->add_option("--criterion", criteria, "run only these acceptance criteria (1-9)")->check(CLI::Range(1, 9));

  int dump_round = 0;
  std::string dump_output;
  auto* dump = app.add_subcommand("dump-instance", "write the scheduling problem of one round");
  add_common(*dump, dump_opts);
  dump->add_option("--round", dump_round, "round index to dump (earlier rounds are simulated)")->check(CLI::NonNegativeNumber);
  dump->add_option("-o,--output", dump_output, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*compare) return cmd_compare(compare_opts);
    if (*validate) return cmd_validate(acceptance, criteria);
    if (*dump) return cmd_dump_instance(dump_opts, dump_round, dump_output);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
