#include "stenfuse/engine.hpp"

#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace stenfuse {

std::string TilePlan::str() const {
  std::ostringstream os;
  os << strategy_name(strategy) << "(" << tau_x << "," << tau_y << "," << tau_z
     << ") opi=" << outputs_per_item << " unroll=" << mac_unroll_name(mac_unroll)
     << " cpp=" << columns_per_pass;
  return os.str();
}

std::vector<Tile> partition_domain(const Shape& shape, int tau_x, int tau_y, int tau_z) {
  if (tau_x < 1 || tau_y < 1 || tau_z < 1)
    throw std::invalid_argument("partition_domain: tile extents must be >= 1");
  std::vector<Tile> tiles;
  for (long long z = 0; z < shape.nz; z += tau_z)
    for (long long y = 0; y < shape.ny; y += tau_y)
      for (long long x = 0; x < shape.nx; x += tau_x) {
        Tile t;
        t.x0 = x;
        t.y0 = y;
        t.z0 = z;
        t.nx = std::min<long long>(tau_x, shape.nx - x);
        t.ny = std::min<long long>(tau_y, shape.ny - y);
        t.nz = std::min<long long>(tau_z, shape.nz - z);
        tiles.push_back(t);
      }
  return tiles;
}

long long working_set_elements(int tau_x, int tau_y, int tau_z, int r, int n_f) {
  if (tau_x < 1 || tau_y < 1 || tau_z < 1 || r < 0 || n_f < 1)
    throw std::invalid_argument("working_set_elements: bad arguments");
  return static_cast<long long>(n_f) * (tau_x + 2LL * r) * (tau_y + 2LL * r) *
         (tau_z + 2LL * r);
}

StreamingBuffers streaming_buffer_elements(int tau_x, int tau_y, int tau_z, int r,
                                           int columns_per_pass) {
  if (tau_x < 1 || tau_y < 1 || tau_z < 1 || r < 0 || columns_per_pass < 1)
    throw std::invalid_argument("streaming_buffer_elements: bad arguments");
  StreamingBuffers b;
  const long long cross = (tau_x + 2LL * r) * (tau_y + 2LL * r);
  b.block = columns_per_pass * cross * tau_z;
  b.prefetch = columns_per_pass * cross;
  return b;
}

PlanCheck validate_plan(const TilePlan& plan, const FusedKernel& kernel,
                        const BufferBudget& budget, Dtype dtype, const MachineProfile* profile,
                        bool strict) {
  if (plan.tau_x < 1 || plan.tau_y < 1 || plan.tau_z < 1)
    return PlanCheck::reject("tile extents must be >= 1");
  if (plan.outputs_per_item < 1) return PlanCheck::reject("outputs_per_item must be >= 1");
  if (plan.columns_per_pass < 1) return PlanCheck::reject("columns_per_pass must be >= 1");

  if (plan.strategy == Strategy::streaming) {
    if (kernel.dims() != 3)
      return PlanCheck::reject("streaming strategy requires a 3-D footprint");
    if (plan.columns_per_pass > kernel.n_fields())
      return PlanCheck::reject("columns_per_pass exceeds the field count");
    const StreamingBuffers b = streaming_buffer_elements(plan.tau_x, plan.tau_y, plan.tau_z,
                                                         kernel.radius(), plan.columns_per_pass);
    const long long bytes = b.total() * dtype_bytes(dtype);
    if (bytes > budget.max_tile_buffer_bytes) {
      std::ostringstream os;
      os << "tile buffer needs " << bytes << " B ((" << b.block << "+" << b.prefetch
         << ") elements) but the budget is " << budget.max_tile_buffer_bytes << " B";
      return PlanCheck::reject(os.str());
    }
  }

  if (strict && profile) {
    const int xq = profile->cache_line_bytes / dtype_bytes(dtype);
    if (xq > 0 && plan.tau_x % xq != 0) {
      std::ostringstream os;
      os << "tau_x=" << plan.tau_x << " is not a multiple of cache_line/dtype = "
         << profile->cache_line_bytes << "/" << dtype_bytes(dtype) << " = " << xq;
      return PlanCheck::reject(os.str());
    }
    const long long items =
        static_cast<long long>(plan.tau_x) * plan.tau_y * plan.tau_z;
    if (profile->simd_width > 0 && items % profile->simd_width != 0) {
      std::ostringstream os;
      os << "tile item count " << items << " is not a multiple of the SIMD width "
         << profile->simd_width;
      return PlanCheck::reject(os.str());
    }
  }
  return PlanCheck::accept();
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_tiles(int workers, std::size_t n_tiles,
                    const std::function<void(std::size_t, int)>& fn) {
  workers = resolve_workers(workers);
  if (workers == 1 || n_tiles <= 1) {
    for (std::size_t i = 0; i < n_tiles; ++i) fn(i, 0);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto body = [&](int w) {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n_tiles) return;
      try {
        fn(i, w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(body, w);
  body(0);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace stenfuse
