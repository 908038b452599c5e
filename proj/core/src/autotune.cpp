#include "stenfuse/autotune.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace stenfuse {

ClockFn steady_clock_fn() {
  return [] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
  };
}

std::vector<TilePlan> enumerate_candidates(const SearchSpace& space, const MachineProfile& profile,
                                           Dtype dtype) {
  profile.validate();
  const int xq = std::max(1, profile.cache_line_bytes / dtype_bytes(dtype));

  std::vector<int> tx = space.tau_x, ty = space.tau_y, tz = space.tau_z;
  auto build = [&]() {
    std::vector<TilePlan> out;
    for (int x : tx) {
      if (x < 1 || x % xq != 0) continue;
      for (int y : ty) {
        if (y < 1) continue;
        for (int z : tz) {
          if (z < 1) continue;
          if ((static_cast<long long>(x) * y * z) % profile.simd_width != 0) continue;
          for (Strategy st : space.strategies)
            for (int opi : space.outputs_per_item)
              for (MacUnroll mu : space.mac_unroll)
                for (int cpp : (st == Strategy::streaming ? space.columns_per_pass
                                                          : std::vector<int>{1})) {
                  TilePlan p;
                  p.tau_x = x;
                  p.tau_y = y;
                  p.tau_z = z;
                  p.strategy = st;
                  p.outputs_per_item = opi;
                  p.mac_unroll = mu;
                  p.columns_per_pass = cpp;
                  out.push_back(p);
                }
        }
      }
    }
    std::sort(out.begin(), out.end(),
              [](const TilePlan& a, const TilePlan& b) { return a.order_key() < b.order_key(); });
    return out;
  };

  std::vector<TilePlan> plans = build();
  if (plans.empty()) throw config_error("enumerate_candidates: pruning left an empty space");

  // Coarsen stride lists round-robin until the cap is met.
  int which = 0;
  while (space.max_candidates > 0 && static_cast<int>(plans.size()) > space.max_candidates) {
    std::vector<int>* lists[3] = {&tx, &ty, &tz};
    std::vector<int>& list = *lists[which % 3];
    which++;
    if (list.size() <= 1) {
      if (tx.size() <= 1 && ty.size() <= 1 && tz.size() <= 1) break;
      continue;
    }
    std::vector<int> kept;
    for (std::size_t i = 0; i < list.size(); i += 2) kept.push_back(list[i]);
    list = std::move(kept);
    plans = build();
    if (plans.empty()) throw config_error("enumerate_candidates: pruning left an empty space");
  }
  return plans;
}

TuneResult tune(const FusedKernel& kernel, const std::vector<TilePlan>& candidates,
                const BufferBudget& budget, Dtype dtype, const MachineProfile* profile,
                const StepFn& step, const TuneOptions& options) {
  if (candidates.empty()) throw config_error("tune: no candidates");
  const ClockFn now = options.clock ? options.clock : steady_clock_fn();

  TuneResult result;
  bool have_best = false;
  double best_time = 0.0;

  for (const TilePlan& plan : candidates) {
    Trial trial;
    trial.plan = plan;
    const PlanCheck chk = validate_plan(plan, kernel, budget, dtype, profile, options.strict);
    if (!chk.ok) {
      trial.status = TrialStatus::rejected;
      trial.reason = chk.reason;
      result.trials.push_back(std::move(trial));
      continue;
    }
    try {
      for (int i = 0; i < options.warmup_iters; ++i) step(plan);
      std::vector<double> times;
      times.reserve(static_cast<std::size_t>(options.timed_iters));
      for (int i = 0; i < options.timed_iters; ++i) {
        const double t0 = now();
        step(plan);
        times.push_back(now() - t0);
      }
      std::sort(times.begin(), times.end());
      const std::size_t n = times.size();
      trial.median_s = n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
    } catch (const std::exception& e) {
      trial.status = TrialStatus::failed;
      trial.reason = e.what();
      result.trials.push_back(std::move(trial));
      continue;
    }
    if (!have_best || trial.median_s < best_time ||
        (trial.median_s == best_time && trial.plan.order_key() < result.best.order_key())) {
      have_best = true;
      best_time = trial.median_s;
      result.best = trial.plan;
    }
    result.trials.push_back(std::move(trial));
  }

  if (!have_best) {
    std::ostringstream os;
    os << "tune: no candidate produced a valid run;";
    for (const auto& t : result.trials)
      os << "\n  " << t.plan.str() << ": " << trial_status_name(t.status) << " (" << t.reason
         << ")";
    throw config_error(os.str());
  }
  return result;
}

}  // namespace stenfuse
