// Command-line front end: run / tune / bench / verify / info.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 runtime or numeric error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "stenfuse/stenfuse.hpp"

using nlohmann::json;
using namespace stenfuse;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

MachineProfile host_default_profile() {
  MachineProfile p;
  p.name = "host-default";
  p.peak_bw_gib_s = 40;
  p.peak_fp64_tflops = 0.5;
  p.peak_fp32_tflops = 1.0;
  p.tdp_w = 100;
  p.simd_width = 8;
  p.cache_line_bytes = 64;
  p.shared_kib = 64;
  p.l1_kib = 32;
  p.l2_mib = 1;
  return p;
}

struct CommonArgs {
  std::string spec_path;
  std::string profile_path;
  int workers = -1;
};

struct LoadedProblem {
  ProblemSpec spec;
  std::unique_ptr<Problem> problem;
  std::optional<MachineProfile> profile;
};

LoadedProblem load(const CommonArgs& args) {
  LoadedProblem lp;
  lp.spec = load_problem_spec(args.spec_path);
  if (args.workers >= 0) lp.spec.workers = args.workers;
  lp.problem = Problem::build(lp.spec);
  if (!args.profile_path.empty()) lp.profile = load_machine_profile(args.profile_path);
  return lp;
}

TilePlan pick_plan(const LoadedProblem& lp, const std::string& requested) {
  TilePlan plan = lp.problem->default_plan();
  if (requested == "streaming") {
    plan.strategy = Strategy::streaming;
    plan.tau_x = plan.tau_y = plan.tau_z = 8;
  }
  return plan;
}

TuneResult tune_problem(LoadedProblem& lp) {
  const MachineProfile profile = lp.profile ? *lp.profile : host_default_profile();
  const auto candidates = enumerate_candidates(lp.spec.tune, profile, lp.spec.dtype);
  lp.problem->randomize();
  TuneOptions opt;
  opt.strict = lp.spec.tune.strict;
  Problem& p = *lp.problem;
  return tune(lp.problem->kernel(), candidates,
              BufferBudget::from_kib(lp.spec.tune_buffer_kib), lp.spec.dtype, &profile,
              [&p](const TilePlan& plan) { p.step(plan); }, opt);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write file: " + path);
  out << content;
}

json checksum_json(const LoadedProblem& lp, int steps) {
  json j;
  j["case"] = lp.spec.case_id;
  j["steps"] = steps;
  j["dtype"] = dtype_name(lp.spec.dtype);
  json sums = json::object();
  char buf[64];
  for (const auto& [name, sum] : lp.problem->state_checksums()) {
    std::snprintf(buf, sizeof buf, "%.17g", sum);
    sums[name] = buf;
  }
  j["checksums"] = sums;
  return j;
}

int cmd_run(const CommonArgs& args, int steps_override, const std::string& baseline_out,
            const std::string& plan_kind) {
  LoadedProblem lp = load(args);
  const int steps = steps_override >= 0 ? steps_override : lp.spec.run_steps;
  const TilePlan plan = pick_plan(lp, plan_kind);

  lp.problem->randomize();
  const auto clock = steady_clock_fn();
  const double t0 = clock();
  lp.problem->advance(plan, steps);
  const double t1 = clock();

  std::cout << "case: " << lp.spec.case_id << "\n";
  std::cout << "plan: " << plan.str() << "\n";
  std::cout << "steps: " << steps << "  wall: " << (t1 - t0) << " s\n";
  for (const auto& [name, sum] : lp.problem->state_checksums())
    std::cout << "sum[" << name << "] = " << std::setprecision(17) << sum << "\n";

  if (!baseline_out.empty()) {
    write_file(baseline_out, checksum_json(lp, steps).dump(2) + "\n");
    std::cout << "baseline written to " << baseline_out << "\n";
  }
  return kExitOk;
}

int cmd_tune(const CommonArgs& args, const std::string& csv_path) {
  LoadedProblem lp = load(args);
  const TuneResult result = tune_problem(lp);

  std::cout << trial_csv_header() << "\n";
  for (const auto& t : result.trials) std::cout << trial_csv_row(t) << "\n";
  std::cout << "best: " << result.best.str() << "\n";

  if (!csv_path.empty()) {
    std::ostringstream os;
    os << trial_csv_header() << "\n";
    for (const auto& t : result.trials) os << trial_csv_row(t) << "\n";
    write_file(csv_path, os.str());
  }
  return kExitOk;
}

int cmd_bench(const CommonArgs& args, int iters_override, int warmups_override, bool do_tune,
              const std::string& csv_path) {
  LoadedProblem lp = load(args);
  const MachineProfile* profile = lp.profile ? &*lp.profile : nullptr;
  const int iters = iters_override > 0 ? iters_override : lp.spec.bench.iters;
  const int warmups = warmups_override >= 0 ? warmups_override : lp.spec.bench.warmups;

  TilePlan plan = lp.problem->default_plan();
  if (do_tune) {
    plan = tune_problem(lp).best;
    std::cerr << "tuned plan: " << plan.str() << "\n";
  }

  std::vector<BenchRecord> records;
  if (lp.spec.bench.sweep_radius && lp.spec.kind == ProblemKind::crosscorr &&
      !lp.spec.crosscorr.explicit_stencil) {
    for (int r = 1; r <= 1024; r *= 2) {
      ProblemSpec s = lp.spec;
      s.crosscorr.radius = r;
      s.halo = r;
      s.case_id = lp.spec.case_id + "-r" + std::to_string(r);
      // resolve the generated stencil at the new radius
      s = parse_problem_spec(serialize_problem_spec(s));
      auto problem = Problem::build(s);
      records.push_back(run_benchmark(*problem, plan, iters, warmups, profile));
    }
  } else {
    records.push_back(run_benchmark(*lp.problem, plan, iters, warmups, profile));
  }

  std::cout << bench_csv_header() << "\n";
  for (const auto& r : records) std::cout << bench_csv_row(r) << "\n";
  if (!csv_path.empty()) {
    std::ostringstream os;
    os << bench_csv_header() << "\n";
    for (const auto& r : records) os << bench_csv_row(r) << "\n";
    write_file(csv_path, os.str());
  }
  return kExitOk;
}

int cmd_verify(const CommonArgs& args, const std::string& against, const std::string& plan_kind) {
  LoadedProblem lp = load(args);
  const TilePlan plan = pick_plan(lp, plan_kind);
  lp.problem->randomize();

  if (against == "oracle") {
    const VerifyResult r = lp.problem->verify_against_oracle(plan);
    if (r.pass) {
      std::cout << "verify: PASS (fused matches the unfused oracle)\n";
      return kExitOk;
    }
    std::cout << "verify: FAIL at index " << r.first_index << ": fused=" << std::setprecision(17)
              << r.a << " oracle=" << r.b << " (" << r.ulp << " ULP)\n";
    return kExitVerifyFail;
  }

  // Baseline file comparison.
  std::ifstream in(against);
  if (!in) throw config_error("cannot open baseline: " + against);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error("bad baseline file " + against + ": " + e.what());
  }
  const int steps = j.at("steps").get<int>();
  lp.problem->advance(plan, steps);
  const json now = checksum_json(lp, steps);
  if (now.at("checksums") != j.at("checksums")) {
    std::cout << "verify: FAIL (checksums differ from baseline " << against << ")\n";
    std::cout << "expected: " << j.at("checksums").dump() << "\n";
    std::cout << "actual:   " << now.at("checksums").dump() << "\n";
    return kExitVerifyFail;
  }
  std::cout << "verify: PASS (baseline match, " << steps << " steps)\n";
  return kExitOk;
}

int cmd_info(const std::string& profile_path, double buffer_kib) {
  const MachineProfile p =
      profile_path.empty() ? host_default_profile() : load_machine_profile(profile_path);
  std::cout << "profile: " << p.name << "\n";
  std::cout << "machine balance fp64: " << machine_balance(p, Dtype::f64) << " FLOP/word\n";
  std::cout << "machine balance fp32: " << machine_balance(p, Dtype::f32) << " FLOP/word\n";
  std::cout << "tile buffer budget: " << (buffer_kib > 0 ? buffer_kib : p.shared_kib)
            << " KiB\n";
  std::cout << "tau_x quantum fp64: " << p.cache_line_bytes / 8 << "\n";
  std::cout << "tau_x quantum fp32: " << p.cache_line_bytes / 4 << "\n";
  std::cout << "simd width: " << p.simd_width << "\n";
  const auto ws = working_set_elements(8, 8, 8, 3, 8);
  std::cout << "working set (8,8,8) r=3 nf=8: " << ws << " elements ("
            << static_cast<double>(ws) * 8 / 1024 << " KiB fp64)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stenfuse: fused stencil engine and benchmark harness"};
  app.require_subcommand(1);

  CommonArgs common;
  int steps_override = -1, iters_override = -1, warmups_override = -1;
  bool do_tune = false;
  std::string csv_path, baseline_out, against = "oracle", plan_kind = "direct";
  std::string info_profile;
  double info_buffer_kib = 0;

  auto add_common = [&](CLI::App* sub, bool with_profile = true) {
    sub->add_option("spec", common.spec_path, "problem spec (TOML)")->required();
    if (with_profile) sub->add_option("--profile", common.profile_path, "machine profile (TOML)");
    sub->add_option("--workers", common.workers, "worker threads (0 = all cores)");
    sub->add_option("--plan", plan_kind, "plan strategy: direct|streaming")
        ->check(CLI::IsMember({"direct", "streaming"}));
  };

  CLI::App* run = app.add_subcommand("run", "advance the problem and report checksums");
  add_common(run);
  run->add_option("--steps", steps_override, "override [run].steps");
  run->add_option("--save-baseline", baseline_out, "write a checksum baseline (JSON)");

  CLI::App* tune = app.add_subcommand("tune", "search tile plans and report trials");
  add_common(tune);
  tune->add_option("--csv", csv_path, "write the trial log as CSV");

  CLI::App* bench = app.add_subcommand("bench", "median-of-N timing with derived metrics");
  add_common(bench);
  bench->add_option("--iters", iters_override, "timed iterations (default from spec)");
  bench->add_option("--warmups", warmups_override, "untimed warm-up iterations");
  bench->add_flag("--tune", do_tune, "autotune the plan before timing");
  bench->add_option("--csv", csv_path, "write records as CSV");

  CLI::App* verify = app.add_subcommand("verify", "check fused output against a reference");
  add_common(verify);
  verify->add_option("--against", against, "oracle (default) or a baseline JSON path");

  CLI::App* info = app.add_subcommand("info", "print machine-profile derived figures");
  info->add_option("--profile", info_profile, "machine profile (TOML)");
  info->add_option("--buffer-kib", info_buffer_kib, "tile buffer budget override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(common, steps_override, baseline_out, plan_kind);
    if (tune->parsed()) return cmd_tune(common, csv_path);
    if (bench->parsed())
      return cmd_bench(common, iters_override, warmups_override, do_tune, csv_path);
    if (verify->parsed()) return cmd_verify(common, against, plan_kind);
    if (info->parsed()) return cmd_info(info_profile, info_buffer_kib);
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
