#pragma once

#include <string>
#include <vector>

#include "stenfuse/autotune.hpp"
#include "stenfuse/machine.hpp"
#include "stenfuse/problem.hpp"

namespace stenfuse {

struct BenchRecord {
  std::string case_id;
  Dtype dtype = Dtype::f64;
  int radius = 0;
  Shape domain;
  TilePlan plan;
  int iters = 0;
  int warmups = 0;
  double median_s = 0;
  double eff_bw_gib_s = 0;
  double mupdates_s = 0;
  double mupd_s_w = 0;  // NaN when no profile supplies a TDP
  std::uint64_t timed_halo_refreshes = 0;
};

// (2 * problem_bytes) / time in GiB/s: one read plus one write of the
// field set per step.
double effective_bandwidth_gib_s(long long problem_bytes, double time_s);

// Million element updates per second per watt.
double energy_efficiency(long long updates, double time_s, double tdp_w);

// Median of `iters` timed steps after `warmups` untimed ones. The input
// is randomized once up front; halo refreshes never run inside the timed
// windows, which the record's counter asserts.
BenchRecord run_benchmark(Problem& problem, const TilePlan& plan, int iters, int warmups,
                          const MachineProfile* profile = nullptr, const ClockFn& clock = {});

std::string bench_csv_header();
std::string bench_csv_row(const BenchRecord& r);

std::string trial_csv_header();
std::string trial_csv_row(const Trial& t);

}  // namespace stenfuse
