#include "stenfuse/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stenfuse {

double effective_bandwidth_gib_s(long long problem_bytes, double time_s) {
  if (time_s <= 0) throw std::invalid_argument("effective_bandwidth: time must be > 0");
  return 2.0 * static_cast<double>(problem_bytes) / time_s / kGiB;
}

double energy_efficiency(long long updates, double time_s, double tdp_w) {
  if (updates <= 0 || time_s <= 0 || tdp_w <= 0)
    throw std::invalid_argument("energy_efficiency: arguments must be positive");
  return static_cast<double>(updates) / time_s / tdp_w / 1e6;
}

BenchRecord run_benchmark(Problem& problem, const TilePlan& plan, int iters, int warmups,
                          const MachineProfile* profile, const ClockFn& clock) {
  if (iters < 1) throw std::invalid_argument("run_benchmark: iters must be >= 1");
  if (warmups < 0) throw std::invalid_argument("run_benchmark: warmups must be >= 0");
  const ClockFn now = clock ? clock : steady_clock_fn();

  BenchRecord rec;
  rec.case_id = problem.spec().case_id;
  rec.dtype = problem.dtype();
  rec.radius = problem.radius();
  rec.domain = problem.spec().domain;
  rec.plan = plan;
  rec.iters = iters;
  rec.warmups = warmups;

  problem.randomize();  // once, before the warm-up calls
  for (int i = 0; i < warmups; ++i) problem.step(plan);

  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(iters));
  std::uint64_t refreshes_in_timed = 0;
  int failed_iteration = -1;
  std::string failure;
  for (int i = 0; i < iters; ++i) {
    const std::uint64_t h0 = instrument::halo_refresh_count();
    const double t0 = now();
    try {
      problem.step(plan);
    } catch (const std::exception& e) {
      failed_iteration = i;
      failure = e.what();
      break;
    }
    const double t1 = now();
    refreshes_in_timed += instrument::halo_refresh_count() - h0;
    times.push_back(t1 - t0);
  }
  if (failed_iteration >= 0)
    throw numeric_error("benchmark step failed at iteration " +
                        std::to_string(failed_iteration) + ": " + failure);

  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  rec.median_s = n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
  rec.timed_halo_refreshes = refreshes_in_timed;

  rec.eff_bw_gib_s = effective_bandwidth_gib_s(problem.fieldset_bytes(), rec.median_s);
  rec.mupdates_s = static_cast<double>(problem.interior_points()) / rec.median_s / 1e6;
  rec.mupd_s_w = profile ? energy_efficiency(problem.interior_points(), rec.median_s,
                                             profile->tdp_w)
                         : std::numeric_limits<double>::quiet_NaN();
  return rec;
}

std::string bench_csv_header() {
  return "case,dtype,radius,nx,ny,nz,strategy,tau_x,tau_y,tau_z,cols_per_pass,"
         "median_ms,eff_bw_gib_s,mupdates_s,mupd_s_w";
}

std::string bench_csv_row(const BenchRecord& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.case_id << ',' << dtype_name(r.dtype) << ',' << r.radius << ',' << r.domain.nx << ','
     << r.domain.ny << ',' << r.domain.nz << ',' << strategy_name(r.plan.strategy) << ','
     << r.plan.tau_x << ',' << r.plan.tau_y << ',' << r.plan.tau_z << ','
     << r.plan.columns_per_pass << ',' << r.median_s * 1e3 << ',' << r.eff_bw_gib_s << ','
     << r.mupdates_s << ',' << r.mupd_s_w;
  return os.str();
}

std::string trial_csv_header() {
  return "strategy,tau_x,tau_y,tau_z,outputs_per_item,mac_unroll,cols_per_pass,status,"
         "median_ms,reason";
}

std::string trial_csv_row(const Trial& t) {
  std::ostringstream os;
  os.precision(17);
  std::string reason = t.reason;
  std::replace(reason.begin(), reason.end(), ',', ';');
  std::replace(reason.begin(), reason.end(), '\n', ' ');
  os << strategy_name(t.plan.strategy) << ',' << t.plan.tau_x << ',' << t.plan.tau_y << ','
     << t.plan.tau_z << ',' << t.plan.outputs_per_item << ','
     << mac_unroll_name(t.plan.mac_unroll) << ',' << t.plan.columns_per_pass << ','
     << trial_status_name(t.status) << ',' << t.median_s * 1e3 << ',' << '"' << reason << '"';
  return os.str();
}

}  // namespace stenfuse
