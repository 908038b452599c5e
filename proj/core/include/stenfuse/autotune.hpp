#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stenfuse/machine.hpp"
#include "stenfuse/plan.hpp"

namespace stenfuse {

// Candidate plans for the heuristic tile-shape search.
struct SearchSpace {
  std::vector<int> tau_x{8, 16, 32, 64};
  std::vector<int> tau_y{1, 2, 4, 8};
  std::vector<int> tau_z{1, 2, 4, 8};
  std::vector<Strategy> strategies{Strategy::direct, Strategy::streaming};
  std::vector<int> outputs_per_item{1};
  std::vector<MacUnroll> mac_unroll{MacUnroll::none};
  std::vector<int> columns_per_pass{4};
  int max_candidates = 256;
  bool strict = true;

  friend bool operator==(const SearchSpace&, const SearchSpace&) = default;
};

enum class TrialStatus { ok, rejected, failed };

inline const char* trial_status_name(TrialStatus s) {
  switch (s) {
    case TrialStatus::ok: return "ok";
    case TrialStatus::rejected: return "rejected";
    case TrialStatus::failed: return "failed";
  }
  return "?";
}

struct Trial {
  TilePlan plan;
  TrialStatus status = TrialStatus::ok;
  double median_s = 0.0;   // median of the timed iterations (ok trials)
  std::string reason;      // rejection/failure detail
};

struct TuneResult {
  TilePlan best;
  std::vector<Trial> trials;
};

// Monotonic seconds. Injectable so the selection logic is testable with
// deterministic timings.
using ClockFn = std::function<double()>;
ClockFn steady_clock_fn();

struct TuneOptions {
  int warmup_iters = 1;
  int timed_iters = 3;
  bool strict = true;
  ClockFn clock;  // defaults to the steady clock
};

// Applies the pruning rules and returns surviving plans in deterministic
// order: tau_x must be a multiple of cache_line/dtype and the tile item
// count a multiple of the SIMD width. Oversized spaces are coarsened by
// dropping every other tau candidate until max_candidates is met.
std::vector<TilePlan> enumerate_candidates(const SearchSpace& space, const MachineProfile& profile,
                                           Dtype dtype);

// Times each valid candidate (median of timed_iters after warmup) with
// a sequential protocol and returns the argmin plan. Ties break to the
// lexicographically smallest (tau_x, tau_y, tau_z), direct before
// streaming.
using StepFn = std::function<void(const TilePlan&)>;
TuneResult tune(const FusedKernel& kernel, const std::vector<TilePlan>& candidates,
                const BufferBudget& budget, Dtype dtype, const MachineProfile* profile,
                const StepFn& step, const TuneOptions& options = {});

}  // namespace stenfuse
