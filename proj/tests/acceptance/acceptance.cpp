// Acceptance suite: runs the project's acceptance criteria end to end and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.
//
//   acceptance --cli <path-to-stenfuse-binary> --data <repo-root>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "stenfuse/stenfuse.hpp"

using namespace stenfuse;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string g_cli;
std::string g_data;
fs::path g_tmp;

struct Check {
  int id;
  std::string name;
  std::function<void(std::ostream&)> fn;  // throws on failure
};

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

void expect(bool ok, const std::string& msg) {
  if (!ok) fail(msg);
}

int run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " > " + (g_tmp / "cli_out.txt").string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  expect(rc != -1, "failed to spawn CLI");
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string write_tmp(const std::string& name, const std::string& body) {
  const auto p = g_tmp / name;
  std::ofstream out(p);
  out << body;
  return p.string();
}

// --- criterion 1 -------------------------------------------------------
void machine_balance_check(std::ostream& log) {
  const std::vector<std::pair<std::string, double>> expected = {
      {"a100.toml", 50}, {"v100.toml", 70}, {"mi250x-gcd.toml", 117}, {"mi100.toml", 75}};
  for (const auto& [file, want] : expected) {
    const MachineProfile p = load_machine_profile(g_data + "/profiles/" + file);
    const double got = machine_balance(p, Dtype::f64);
    log << p.name << "=" << got << " ";
    expect(std::abs(got - want) <= 1.0,
           p.name + ": balance " + std::to_string(got) + " not within 1 of " +
               std::to_string(want));
  }
}

// --- criterion 2 -------------------------------------------------------
void working_set_check(std::ostream& log) {
  const long long elems = working_set_elements(8, 8, 8, 3, 8);
  const double kib = static_cast<double>(elems) * 8.0 / 1024.0;
  log << elems << " elements, " << kib << " KiB fp64";
  expect(elems == 21952, "working set must be exactly 21952 elements");
  expect(std::abs(kib - 171.5) < 0.05, "working set must be ~171.5 KiB in fp64");
}

// --- criterion 3 -------------------------------------------------------
template <typename T>
void check_against_oracle(const FieldSet<T>& state, const FusedKernel& kernel,
                          const std::vector<TilePlan>& plans, const std::string& label) {
  const FieldSet<T> oracle = naive_oracle_step(state, kernel);
  RunParams run;
  run.budget = BufferBudget::from_kib(256.0);
  for (const TilePlan& plan : plans) {
    const FieldSet<T> fused = fused_step(state, kernel, plan, run);
    for (int f = 0; f < fused.count(); ++f) {
      const auto a = fused.field(f).interior();
      const auto b = oracle.field(f).interior();
      const double floor = default_abs_floor(std::span<const T>(b));
      const auto r = verify_ulp(std::span<const T>(a), std::span<const T>(b), 5, floor);
      if (!r.pass) {
        std::ostringstream os;
        os << label << " plan " << plan.str() << " field " << fused.name(f) << " index "
           << r.first_index << ": " << r.a << " vs " << r.b << " (" << r.ulp << " ULP)";
        fail(os.str());
      }
    }
  }
}

void fusion_oracle_check(std::ostream& log) {
  // diffusion 64^3
  {
    DiffusionProblem p;
    p.dims = 3;
    p.accuracy = 6;
    p.alpha = 1.0;
    p.dt = 1.1920928955078125e-07;
    const double h = kTwoPi / 64;
    p.h = {h, h, h};
    const FusedKernel kernel = prune(diffusion_as_fused(p));
    FieldSet<double> state(Shape(64, 64, 64), 3, BoundaryPolicy::periodic(), {"f"});
    state.fill_random(-1e-5, 1e-5, 301);

    std::vector<TilePlan> plans;
    for (const auto& [tx, ty, tz] : std::vector<std::array<int, 3>>{
             {8, 8, 8}, {16, 8, 4}, {64, 8, 8}}) {
      TilePlan d;
      d.tau_x = tx;
      d.tau_y = ty;
      d.tau_z = tz;
      plans.push_back(d);
      TilePlan s = d;
      s.strategy = Strategy::streaming;
      s.columns_per_pass = 1;
      plans.push_back(s);
    }
    check_against_oracle(state, kernel, plans, "diffusion-64");
    log << "diffusion 64^3 ok (" << plans.size() << " plans); ";
  }
  // MHD 16^3 and 32^3
  MHDParams mp;
  mp.K = 5e-4;
  mp.zeta = 1e-3;
  for (const long long n : {16LL, 32LL}) {
    const double h = kTwoPi / static_cast<double>(n);
    const FusedKernel kernel = prune(make_mhd_kernel(6, {h, h, h}, mp));
    FieldSet<double> state = make_mhd_state<double>(Shape(n, n, n));
    state.fill_random(-1e-5, 1e-5, 400 + n);
    state.refresh_halos();

    std::vector<TilePlan> plans;
    for (const auto& [tx, ty, tz] : std::vector<std::array<int, 3>>{
             {8, 8, 8}, {16, 4, 8}, {8, 16, 16}}) {
      TilePlan d;
      d.tau_x = tx;
      d.tau_y = ty;
      d.tau_z = tz;
      plans.push_back(d);
      TilePlan s = d;
      s.strategy = Strategy::streaming;
      s.columns_per_pass = 4;
      plans.push_back(s);
    }
    check_against_oracle(state, kernel, plans, "mhd-" + std::to_string(n));
    log << "mhd " << n << "^3 ok (" << plans.size() << " plans); ";
  }
}

// --- criterion 4 -------------------------------------------------------
void strategy_invariance_check(std::ostream& log) {
  MHDParams mp;
  const double h = kTwoPi / 32;
  const FusedKernel kernel = prune(make_mhd_kernel(6, {h, h, h}, mp));
  FieldSet<double> state = make_mhd_state<double>(Shape(32, 32, 32));
  state.fill_random(-1e-5, 1e-5, 500);
  state.refresh_halos();

  // 12 candidates: 6 direct, 6 streaming (one oversized -> rejected).
  std::vector<TilePlan> candidates;
  for (const auto& [tx, ty, tz] : std::vector<std::array<int, 3>>{
           {8, 8, 8}, {16, 8, 8}, {32, 4, 4}, {8, 4, 16}, {16, 16, 2}, {32, 32, 32}}) {
    TilePlan d;
    d.tau_x = tx;
    d.tau_y = ty;
    d.tau_z = tz;
    candidates.push_back(d);
    TilePlan s = d;
    s.strategy = Strategy::streaming;
    s.columns_per_pass = 4;
    candidates.push_back(s);
  }

  RunParams run;
  run.budget = BufferBudget::from_kib(64.0);
  std::vector<double> reference;
  int validated = 0, rejected = 0;
  for (const TilePlan& plan : candidates) {
    const PlanCheck chk = validate_plan(plan, kernel, run.budget, Dtype::f64);
    if (!chk.ok) {
      ++rejected;
      continue;
    }
    ++validated;
    const FieldSet<double> out = fused_step(state, kernel, plan, run);
    std::vector<double> flat;
    for (int f = 0; f < out.count(); ++f) {
      const auto v = out.field(f).interior();
      flat.insert(flat.end(), v.begin(), v.end());
    }
    if (reference.empty()) {
      reference = std::move(flat);
    } else {
      expect(flat.size() == reference.size(), "output size mismatch");
      for (std::size_t i = 0; i < flat.size(); ++i) {
        if (std::memcmp(&flat[i], &reference[i], sizeof(double)) != 0) {
          const auto r = verify_ulp(std::span<const double>(flat),
                                    std::span<const double>(reference), 5, 0.0);
          fail("plan " + plan.str() + " output differs bitwise" +
               (r.pass ? " (but within 5 ULP)" : " and beyond 5 ULP"));
        }
      }
    }
  }
  log << validated << " validated plans bitwise-identical, " << rejected << " rejected";
  expect(validated >= 8, "expected most of the 12-candidate sweep to validate");
}

// --- criterion 5 -------------------------------------------------------
void pruning_check(std::ostream& log) {
  MHDParams mp;
  mp.K = 1e-4;
  const double h = kTwoPi / 16;
  FusedKernel kernel = make_mhd_kernel(6, {h, h, h}, mp);
  FieldSet<double> state = make_mhd_state<double>(Shape(16, 16, 16));
  state.fill_random(-1e-5, 1e-5, 600);
  state.refresh_halos();

  FusedKernel unpruned = kernel;
  unpruned.set_pruned(false);
  const FusedKernel pruned = prune(kernel);
  log << "macs " << pruned.mac_count() << " < " << unpruned.mac_count();
  expect(pruned.mac_count() < unpruned.mac_count(), "pruned MAC count must shrink");

  const auto a = fused_step(state, unpruned, TilePlan{}, RunParams{});
  const auto b = fused_step(state, pruned, TilePlan{}, RunParams{});
  expect(testsupport::bitwise_equal(a, b), "pruning changed outputs");
}

// --- criterion 6 -------------------------------------------------------
void fusion_identity_check(std::ostream& log) {
  int cases = 0;
  for (const int dims : {1, 2, 3}) {
    for (const int acc : {2, 6}) {
      const long long n = dims == 1 ? 512 : dims == 2 ? 96 : 32;
      const double h = kTwoPi / static_cast<double>(n);
      DiffusionProblem p;
      p.dims = dims;
      p.accuracy = acc;
      p.alpha = 1.0;
      p.dt = 0.1 * h * h;  // dt*alpha/h^2 = 0.1
      p.h = {h, h, h};

      const Shape shape(n, dims >= 2 ? n : 1, dims == 3 ? n : 1);
      PaddedField<double> f(shape, acc / 2, BoundaryPolicy::periodic());
      f.fill_random(0, 1, 700 + dims * 10 + acc);

      const auto fused = diffusion_step(f, p);  // one pass with the combined kernel
      const auto ident = cross_correlate(f, identity_kernel(dims));
      const auto lap = cross_correlate(f, laplacian_kernel(dims, acc, p.h));

      const double eps = 2.220446049250313e-16;
      const Shape& sh = f.shape();
      for (long long k = 0; k < sh.nz; ++k)
        for (long long j = 0; j < sh.ny; ++j)
          for (long long i = 0; i < sh.nx; ++i) {
            const double two_pass = ident.at(i, j, k) + p.dt * p.alpha * lap.at(i, j, k);
            const double diff = std::abs(fused.at(i, j, k) - two_pass);
            const double tol = 8 * eps * std::max(1.0, std::abs(two_pass));
            if (diff > tol) {
              std::ostringstream os;
              os << "dims=" << dims << " acc=" << acc << " at (" << i << "," << j << "," << k
                 << "): fused " << fused.at(i, j, k) << " vs two-pass " << two_pass
                 << " (diff " << diff << " > " << tol << ")";
              fail(os.str());
            }
          }
      ++cases;
    }
  }
  log << cases << " (dims, accuracy) combinations within 8 eps";
}

// --- criterion 7 -------------------------------------------------------
void fd_correctness_check(std::ostream& log) {
  std::vector<double> errs;
  for (const long long n : {32LL, 64LL, 128LL}) {
    const double h = kTwoPi / n;
    PaddedField<double> f(Shape(n), 3, BoundaryPolicy::periodic());
    testsupport::fill_with(f,
                           [&](long long i, long long, long long) { return std::sin(i * h); });
    const auto out = cross_correlate(f, central_difference(1, 6, 0, h));
    double err = 0;
    for (long long i = 0; i < n; ++i)
      err = std::max(err, std::abs(out.at(i, 0, 0) - std::cos(i * h)));
    errs.push_back(err);
  }
  const double r1 = errs[0] / errs[1], r2 = errs[1] / errs[2];
  log << "error ratios " << r1 << ", " << r2;
  expect(r1 >= 54.4 && r1 <= 73.6, "first halving ratio outside 64 +/- 15%");
  expect(r2 >= 54.4 && r2 <= 73.6, "second halving ratio outside 64 +/- 15%");

  // polynomial exactness at 16 eps scaled
  const double h = 0.5;
  const long long n = 16;
  for (const int acc : {2, 4, 6})
    for (const int deriv : {1, 2})
      for (int q = 0; q <= acc + deriv - 1; ++q) {
        PaddedField<double> f(Shape(n), 3, BoundaryPolicy::zero());
        testsupport::fill_with(
            f, [&](long long i, long long, long long) { return std::pow(i * h, q); });
        const auto out = cross_correlate(f, central_difference(deriv, acc, 0, h));
        const long long i = n / 2;
        const double x = i * h;
        const double expected = deriv == 1 ? (q == 0 ? 0.0 : q * std::pow(x, q - 1))
                                           : (q <= 1 ? 0.0 : q * (q - 1) * std::pow(x, q - 2));
        const double scale = std::max(1.0, std::pow(x + 3 * h, q) / (h * h));
        expect(std::abs(out.at(i, 0, 0) - expected) <= 16 * 2.220446049250313e-16 * scale,
               "polynomial exactness failed");
      }
}

// --- criterion 8 -------------------------------------------------------
void rk3_check(std::ostream& log) {
  auto integrate = [](double dt) {
    double u = 1.0, w = 0.0;
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < n; ++i)
      for (int s = 0; s < 3; ++s) {
        w = rk3::alpha[static_cast<std::size_t>(s)] * w + dt * (-u);
        u += rk3::beta[static_cast<std::size_t>(s)] * w;
      }
    return u;
  };
  const double exact = std::exp(-1.0);
  const double e1 = std::abs(integrate(0.1) - exact);
  const double e2 = std::abs(integrate(0.05) - exact);
  const double e3 = std::abs(integrate(0.025) - exact);
  log << "ratios " << e1 / e2 << ", " << e2 / e3;
  expect(e1 / e2 >= 6.5 && e1 / e2 <= 9.5, "rk3 convergence ratio out of range");
  expect(e2 / e3 >= 6.5 && e2 / e3 <= 9.5, "rk3 convergence ratio out of range");

  MHDParams mp;
  mp.K = 1e-3;
  const double h = kTwoPi / 12;
  const FusedKernel kernel = prune(make_mhd_kernel(6, {h, h, h}, mp));
  FieldSet<double> state = make_mhd_state<double>(Shape(12, 12, 12));
  FieldSet<double> w = make_mhd_state<double>(Shape(12, 12, 12));
  FieldSet<double> rhs = make_mhd_state<double>(Shape(12, 12, 12));
  const FieldSet<double> before = state;
  for (int i = 0; i < 10; ++i)
    rk3_step(state, w, rhs, 1.1920928955078125e-07, kernel, TilePlan{}, RunParams{});
  expect(testsupport::bitwise_equal(state, before),
         "uniform state drifted under 10 RK3 steps");
  log << "; uniform state bitwise stable over 10 steps";
}

// --- criterion 9 -------------------------------------------------------
void conservation_check(std::ostream& log) {
  const long long n = 64;
  DiffusionProblem p;
  p.dims = 3;
  p.accuracy = 6;
  p.alpha = 1.0;
  const double h = kTwoPi / n;
  p.h = {h, h, h};
  p.dt = 1e-4;

  PaddedField<double> f(Shape(n, n, n), 3, BoundaryPolicy::periodic());
  f.fill_random(0, 1, 900);
  const double total = static_cast<double>(f.shape().count());
  double prev;
  {
    const auto xs = f.interior();
    prev = compensated_sum(std::span<const double>(xs));
  }
  double worst = 0;
  for (int step = 0; step < 100; ++step) {
    f = diffusion_step(f, p);
    f.refresh_halo();
    const auto xs = f.interior();
    double mx = 0;
    for (const double v : xs) mx = std::max(mx, std::abs(v));
    const double sum = compensated_sum(std::span<const double>(xs));
    const double tol = total * 4 * 2.220446049250313e-16 * mx;
    worst = std::max(worst, std::abs(sum - prev) / tol);
    expect(std::abs(sum - prev) <= tol, "interior sum drifted beyond n*4eps*max|f| at step " +
                                            std::to_string(step));
    prev = sum;
  }
  log << "100 steps, worst drift " << worst << " of tolerance";
}

// --- criterion 10 ------------------------------------------------------
void autotuner_check(std::ostream& log) {
  MHDParams mp;
  const double h = kTwoPi / 16;
  const FusedKernel kernel = prune(make_mhd_kernel(6, {h, h, h}, mp));

  MachineProfile prof = load_machine_profile(g_data + "/profiles/host-generic.toml");
  SearchSpace space;
  space.tau_x = {4, 8, 16};
  space.tau_y = {4, 8};
  space.tau_z = {8};
  space.strategies = {Strategy::direct, Strategy::streaming};
  space.columns_per_pass = {4, 8};
  const auto candidates = enumerate_candidates(space, prof, Dtype::f64);
  for (const auto& c : candidates)
    expect(c.tau_x % 8 == 0, "tau_x pruning must exclude non-multiples of 64/8");

  // deterministic clock: later candidates are faster; rejected plans
  // must appear in the log and never win
  std::vector<double> durations;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    for (int it = 0; it < 3; ++it)
      durations.push_back(static_cast<double>(candidates.size() - i));
  testsupport::FakeClock clock(testsupport::FakeClock::from_durations(durations));
  TuneOptions opt;
  opt.clock = [&clock] { return clock(); };
  opt.warmup_iters = 0;
  opt.strict = true;

  const auto result = tune(kernel, candidates, BufferBudget::from_kib(64.0), Dtype::f64, &prof,
                           [](const TilePlan&) {}, opt);

  double best = 1e300;
  TilePlan argmin;
  int rejected = 0;
  for (const auto& t : result.trials) {
    if (t.status == TrialStatus::rejected) {
      ++rejected;
      expect(!(t.plan == result.best), "a rejected plan was selected");
      continue;
    }
    if (t.status == TrialStatus::ok && t.median_s < best) {
      best = t.median_s;
      argmin = t.plan;
    }
  }
  expect(argmin == result.best, "tune did not return the argmin of the trial log");
  expect(rejected > 0, "expected at least one budget-rejected streaming plan");
  log << result.trials.size() << " trials, " << rejected << " rejected, best "
      << result.best.str();
}

// --- criterion 11 ------------------------------------------------------
void bench_protocol_check(std::ostream& log) {
  auto spec = parse_problem_spec(
      "[problem]\nkind = \"diffusion\"\nnx = 24\nny = 24\nnz = 24\n");
  auto problem = Problem::build(spec);

  std::vector<double> durations;
  for (int i = 1; i <= 100; ++i) durations.push_back(i * 1e-3);
  testsupport::FakeClock clock(testsupport::FakeClock::from_durations(durations));
  const auto rec = run_benchmark(*problem, problem->default_plan(), 100, 0, nullptr,
                                 [&clock] { return clock(); });
  log << "median " << rec.median_s * 1e3 << " ms, timed refreshes " << rec.timed_halo_refreshes;
  expect(std::abs(rec.median_s - 50.5e-3) < 1e-12, "median of 1..100 ms must be 50.5 ms");
  expect(rec.timed_halo_refreshes == 0, "halo refresh ran inside a timed region");

  const auto real = run_benchmark(*problem, problem->default_plan(), 5, 2, nullptr);
  expect(real.timed_halo_refreshes == 0, "halo refresh ran inside a timed region (real clock)");
}

// --- criterion 12 ------------------------------------------------------
void metric_roundtrip_check(std::ostream& log) {
  const double v = energy_efficiency(128LL * 128 * 128, 0.874e-3, 400.0);
  log << "128^3 in 0.874 ms at 400 W -> " << v << " Mupd/s/W";
  expect(std::abs(v - 6.0) <= 0.1, "energy metric must be 6.0 +/- 0.1");
}

// --- criterion 13 ------------------------------------------------------
void parsing_check(std::ostream& log) {
  int specs = 0;
  for (const auto& entry : fs::directory_iterator(g_data + "/cases")) {
    if (entry.path().extension() != ".toml") continue;
    const ProblemSpec a = load_problem_spec(entry.path().string());
    const ProblemSpec b = parse_problem_spec(serialize_problem_spec(a));
    expect(a == b, "round-trip mismatch for " + entry.path().filename().string());
    ++specs;
  }
  expect(specs >= 5, "expected the shipped example specs to be present");
  for (const auto& entry : fs::directory_iterator(g_data + "/profiles")) {
    if (entry.path().extension() != ".toml") continue;
    const MachineProfile p = load_machine_profile(entry.path().string());
    expect(parse_machine_profile(serialize_machine_profile(p)) == p,
           "profile round-trip mismatch for " + entry.path().filename().string());
  }

  // documented exit codes through the CLI
  const auto ok = write_tmp("accept_ok.toml",
                            "[problem]\nkind = \"diffusion\"\nnx = 16\nny = 16\nnz = 16\n");
  expect(run_cli("verify " + ok) == 0, "verify should exit 0 on success");

  const auto bad = write_tmp("accept_bad.toml", "[problem]\nkind = \"diffusion\"\nwat = 1\n");
  expect(run_cli("run " + bad) == 2, "unknown key should exit 2");

  const auto halo = write_tmp("accept_halo.toml", "[problem]\nkind = \"diffusion\"\nhalo = 1\n");
  expect(run_cli("run " + halo) == 2, "halo < radius should exit 2");

  const auto tau = write_tmp("accept_tau.toml",
                             "[problem]\nkind = \"diffusion\"\n[tune]\ntau_x = [4]\n");
  expect(run_cli("tune " + tau) == 2, "tau_x = 4 with strict pruning should exit 2");

  const auto baseline = (g_tmp / "accept_base.json").string();
  expect(run_cli("run " + ok + " --steps 1 --save-baseline " + baseline) == 0,
         "baseline write should exit 0");
  expect(run_cli("verify " + ok + " --against " + baseline) == 0,
         "baseline verify should exit 0");
  {
    std::ifstream in(baseline);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string content = ss.str();
    const auto pos = content.find("\"f\": \"");
    expect(pos != std::string::npos, "baseline missing checksum");
    content[pos + 6] = content[pos + 6] == '1' ? '2' : '1';
    std::ofstream(baseline) << content;
  }
  expect(run_cli("verify " + ok + " --against " + baseline) == 1,
         "tampered baseline should exit 1");

  const auto unstable = write_tmp("accept_unstable.toml", R"(
[problem]
kind = "diffusion"
nx = 16
ny = 16
nz = 16

[diffusion]
accuracy = 2
dt = 1.0e12

[init]
lo = -1.0
hi = 1.0

[run]
steps = 60
)");
  expect(run_cli("run " + unstable) == 3, "numeric blow-up should exit 3");
  log << specs << " spec round-trips; exit codes 0/1/2/3 verified";
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--cli") g_cli = argv[i + 1];
    if (std::string(argv[i]) == "--data") g_data = argv[i + 1];
  }
  if (g_data.empty()) g_data = ".";
  g_tmp = fs::temp_directory_path() / "stenfuse-acceptance";
  fs::create_directories(g_tmp);

  const std::vector<Check> checks = {
      {1, "machine balance (A100 50, V100 70, MI250X GCD 117, MI100 75)", machine_balance_check},
      {2, "working-set arithmetic (21952 elements, 171.5 KiB fp64)", working_set_check},
      {3, "fusion oracle equivalence (<5 ULP, both strategies, 3+ tiles)", fusion_oracle_check},
      {4, "strategy/tile invariance on MHD 32^3 (12-candidate sweep)", strategy_invariance_check},
      {5, "pruning is semantics-free (bitwise, fewer MACs)", pruning_check},
      {6, "fused diffusion equals the two-pass identity within 8 eps", fusion_identity_check},
      {7, "finite-difference convergence and polynomial exactness", fd_correctness_check},
      {8, "RK3 order 3 and bitwise uniform fixed point", rk3_check},
      {9, "periodic diffusion conserves the interior sum (64^3, 100 steps)", conservation_check},
      {10, "autotuner contract (argmin, pruning, budget rejections)", autotuner_check},
      {11, "benchmark protocol (median 50.5 ms, no timed refreshes)", bench_protocol_check},
      {12, "energy metric round-trip (6.0 +/- 0.1 Mupd/s/W)", metric_roundtrip_check},
      {13, "spec/profile parsing round-trips and exit codes", parsing_check},
  };

  int failures = 0;
  for (const auto& c : checks) {
    std::ostringstream log;
    bool ok = true;
    std::string error;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.fn(log);
    } catch (const std::exception& e) {
      ok = false;
      error = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d. %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                log.str().empty() ? "" : ("  -- " + log.str()).c_str(),
                error.empty() ? "" : ("  !! " + error).c_str());
    if (!ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) FAILED\n", failures);
  else std::printf("all %zu criteria passed\n", checks.size());
  return failures == 0 ? 0 : 1;
}
