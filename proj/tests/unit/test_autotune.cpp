#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "stenfuse/autotune.hpp"
#include "stenfuse/mhd.hpp"

using namespace stenfuse;

namespace {

MachineProfile test_profile(int simd = 8, int line = 64) {
  MachineProfile p;
  p.name = "test";
  p.peak_bw_gib_s = 100;
  p.peak_fp64_tflops = 1;
  p.peak_fp32_tflops = 2;
  p.tdp_w = 100;
  p.simd_width = simd;
  p.cache_line_bytes = line;
  p.shared_kib = 64;
  return p;
}

FusedKernel tiny_kernel() {
  MHDParams p;
  const double h = 0.196349540849362;
  return prune(make_mhd_kernel(6, {h, h, h}, p));
}

}  // namespace

TEST_CASE("enumerate_candidates applies the tau_x and SIMD rules") {
  SearchSpace space;
  space.tau_x = {4, 8, 16, 24};
  space.tau_y = {1, 3, 8};
  space.tau_z = {1};
  space.strategies = {Strategy::direct};

  const auto plans = enumerate_candidates(space, test_profile(8, 64), Dtype::f64);
  for (const auto& p : plans) {
    CHECK(p.tau_x % 8 == 0);  // 64 B / 8 B = 8
    CHECK((static_cast<long long>(p.tau_x) * p.tau_y * p.tau_z) % 8 == 0);
  }
  // tau_x = 4 never survives
  for (const auto& p : plans) CHECK(p.tau_x != 4);
  // (8,1,1) and (8,3,1) both keep products divisible by 8
  bool seen_811 = false, seen_831 = false;
  for (const auto& p : plans) {
    if (p.tau_x == 8 && p.tau_y == 1) seen_811 = true;
    if (p.tau_x == 8 && p.tau_y == 3) seen_831 = true;
  }
  CHECK(seen_811);
  CHECK(seen_831);

  // with warp width 64, a bare (8,1,1) is excluded
  const auto wide = enumerate_candidates(space, test_profile(64, 64), Dtype::f64);
  for (const auto& p : wide)
    CHECK((static_cast<long long>(p.tau_x) * p.tau_y * p.tau_z) % 64 == 0);
}

TEST_CASE("fp32 halves the dtype size and doubles the tau_x quantum") {
  SearchSpace space;
  space.tau_x = {8, 16, 32};
  space.tau_y = {1};
  space.tau_z = {1};
  space.strategies = {Strategy::direct};
  const auto plans = enumerate_candidates(space, test_profile(1, 64), Dtype::f32);
  for (const auto& p : plans) CHECK(p.tau_x % 16 == 0);  // 64/4
}

TEST_CASE("an exhausted space is an error") {
  SearchSpace space;
  space.tau_x = {4};  // violates the multiple-of-8 rule
  space.tau_y = {1};
  space.tau_z = {1};
  CHECK_THROWS_AS(enumerate_candidates(space, test_profile(), Dtype::f64), config_error);
}

TEST_CASE("max_candidates coarsens the space deterministically") {
  SearchSpace space;
  space.tau_x = {8, 16, 24, 32, 40, 48, 56, 64};
  space.tau_y = {1, 2, 3, 4, 5, 6, 7, 8};
  space.tau_z = {1, 2, 3, 4};
  space.strategies = {Strategy::direct};
  space.max_candidates = 20;
  const auto a = enumerate_candidates(space, test_profile(1, 64), Dtype::f64);
  const auto b = enumerate_candidates(space, test_profile(1, 64), Dtype::f64);
  CHECK(a.size() <= 20);
  CHECK(a == b);
}

TEST_CASE("tune selects the argmin of recorded medians") {
  const FusedKernel kernel = tiny_kernel();

  std::vector<TilePlan> candidates;
  for (const int tx : {8, 16, 24}) {
    TilePlan p;
    p.tau_x = tx;
    p.tau_y = 8;
    p.tau_z = 8;
    candidates.push_back(p);
  }

  // Injected clock: candidate i gets per-iteration duration (3 - i) s,
  // so the last candidate is fastest.
  std::vector<double> durations;
  for (int i = 0; i < 3; ++i)
    for (int it = 0; it < 3; ++it) durations.push_back(3.0 - i);
  testsupport::FakeClock clock(testsupport::FakeClock::from_durations(durations));

  TuneOptions opt;
  opt.clock = [&clock] { return clock(); };
  opt.warmup_iters = 0;
  opt.strict = false;

  int steps = 0;
  const StepFn step = [&](const TilePlan&) { ++steps; };
  const auto result = tune(kernel, candidates, BufferBudget{}, Dtype::f64, nullptr, step, opt);
  CHECK(steps == 9);
  CHECK(result.best.tau_x == 24);
  REQUIRE(result.trials.size() == 3);
  CHECK(result.trials[0].median_s == 3.0);
  CHECK(result.trials[2].median_s == 1.0);

  // selection equals the argmin over the trial log
  double best = 1e300;
  TilePlan argmin;
  for (const auto& t : result.trials)
    if (t.status == TrialStatus::ok && t.median_s < best) {
      best = t.median_s;
      argmin = t.plan;
    }
  CHECK(argmin == result.best);
}

TEST_CASE("tune is deterministic under a fake timer and breaks ties lexicographically") {
  const FusedKernel kernel = tiny_kernel();
  std::vector<TilePlan> candidates;
  for (const int tx : {16, 8}) {
    TilePlan p;
    p.tau_x = tx;
    p.tau_y = 8;
    p.tau_z = 8;
    candidates.push_back(p);
  }
  auto run_once = [&] {
    std::vector<double> durations(6, 2.0);  // all equal -> tie
    testsupport::FakeClock clock(testsupport::FakeClock::from_durations(durations));
    TuneOptions opt;
    opt.clock = [&clock] { return clock(); };
    opt.warmup_iters = 0;
    opt.strict = false;
    return tune(kernel, candidates, BufferBudget{}, Dtype::f64, nullptr,
                [](const TilePlan&) {}, opt);
  };
  const auto r1 = run_once();
  const auto r2 = run_once();
  CHECK(r1.best == r2.best);
  CHECK(r1.best.tau_x == 8);  // lexicographically smallest wins the tie
}

TEST_CASE("budget violations are logged as rejected and never selected") {
  const FusedKernel kernel = tiny_kernel();

  TilePlan ok;
  ok.tau_x = ok.tau_y = ok.tau_z = 8;
  TilePlan too_big = ok;
  too_big.strategy = Strategy::streaming;
  too_big.columns_per_pass = 8;  // 110.25 KiB > 64 KiB

  std::vector<double> durations(3, 1.0);
  testsupport::FakeClock clock(testsupport::FakeClock::from_durations(durations));
  TuneOptions opt;
  opt.clock = [&clock] { return clock(); };
  opt.warmup_iters = 0;
  opt.strict = false;

  const auto result = tune(kernel, {too_big, ok}, BufferBudget::from_kib(64), Dtype::f64,
                           nullptr, [](const TilePlan&) {}, opt);
  CHECK(result.best == ok);
  REQUIRE(result.trials.size() == 2);
  CHECK(result.trials[0].status == TrialStatus::rejected);
  CHECK(result.trials[1].status == TrialStatus::ok);
}

TEST_CASE("a single valid candidate is returned; zero valid is an error") {
  const FusedKernel kernel = tiny_kernel();
  TilePlan only;
  only.tau_x = 16;
  only.tau_y = 8;
  only.tau_z = 8;

  std::vector<double> durations(3, 1.0);
  testsupport::FakeClock clock(testsupport::FakeClock::from_durations(durations));
  TuneOptions opt;
  opt.clock = [&clock] { return clock(); };
  opt.warmup_iters = 0;
  opt.strict = false;
  const auto result =
      tune(kernel, {only}, BufferBudget{}, Dtype::f64, nullptr, [](const TilePlan&) {}, opt);
  CHECK(result.best == only);

  TilePlan invalid;
  invalid.tau_x = 0;
  CHECK_THROWS_AS(tune(kernel, {invalid}, BufferBudget{}, Dtype::f64, nullptr,
                       [](const TilePlan&) {}, opt),
                  config_error);
}

TEST_CASE("failed steps are recorded and skipped") {
  const FusedKernel kernel = tiny_kernel();
  TilePlan a;
  a.tau_x = 8;
  a.tau_y = 8;
  a.tau_z = 8;
  TilePlan b = a;
  b.tau_x = 16;

  std::vector<double> durations(6, 1.0);
  testsupport::FakeClock clock(testsupport::FakeClock::from_durations(durations));
  TuneOptions opt;
  opt.clock = [&clock] { return clock(); };
  opt.warmup_iters = 0;
  opt.strict = false;

  const StepFn step = [&](const TilePlan& p) {
    if (p.tau_x == 8) throw numeric_error("boom");
  };
  const auto result = tune(kernel, {a, b}, BufferBudget{}, Dtype::f64, nullptr, step, opt);
  CHECK(result.best == b);
  CHECK(result.trials[0].status == TrialStatus::failed);
}
