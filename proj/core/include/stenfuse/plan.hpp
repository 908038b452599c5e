#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "stenfuse/common.hpp"
#include "stenfuse/fusion.hpp"
#include "stenfuse/machine.hpp"
#include "stenfuse/shape.hpp"

namespace stenfuse {

enum class Strategy { direct, streaming };
enum class MacUnroll { none, full };

inline const char* strategy_name(Strategy s) {
  return s == Strategy::direct ? "direct" : "streaming";
}
inline const char* mac_unroll_name(MacUnroll u) { return u == MacUnroll::none ? "none" : "full"; }

// Tile shape and scheduling knobs for one execution strategy.
// outputs_per_item groups outputs within the x loop (element-wise
// unrolling); mac_unroll controls unrolling of the per-point MAC loop;
// columns_per_pass is the number of fields staged together by the
// streaming strategy. None of the knobs change arithmetic order.
struct TilePlan {
  int tau_x = 8, tau_y = 8, tau_z = 8;
  Strategy strategy = Strategy::direct;
  int outputs_per_item = 1;
  MacUnroll mac_unroll = MacUnroll::none;
  int columns_per_pass = 4;

  static TilePlan whole_domain(const Shape& s) {
    TilePlan p;
    p.tau_x = static_cast<int>(s.nx);
    p.tau_y = static_cast<int>(s.ny);
    p.tau_z = static_cast<int>(s.nz);
    return p;
  }

  friend bool operator==(const TilePlan&, const TilePlan&) = default;

  // Deterministic ordering used for tie-breaks: tile dims, then direct
  // before streaming, then the scheduling knobs.
  auto order_key() const {
    return std::tuple(tau_x, tau_y, tau_z, strategy == Strategy::streaming ? 1 : 0,
                      outputs_per_item, mac_unroll == MacUnroll::full ? 1 : 0, columns_per_pass);
  }

  std::string str() const;
};

// Capacity of the per-worker software-managed tile buffer (the analog of
// shared memory in the streaming strategy).
struct BufferBudget {
  long long max_tile_buffer_bytes = 64 * 1024;

  static BufferBudget from_kib(double kib) {
    BufferBudget b;
    b.max_tile_buffer_bytes = static_cast<long long>(kib * 1024.0);
    return b;
  }
};

struct Tile {
  long long x0 = 0, y0 = 0, z0 = 0;
  long long nx = 0, ny = 0, nz = 0;
  long long count() const { return nx * ny * nz; }
};

// Disjoint tiles covering the interior exactly; edge tiles are clipped.
std::vector<Tile> partition_domain(const Shape& shape, int tau_x, int tau_y, int tau_z);

// Elements of the full input working set of one tile:
// n_f (tau_x+2r)(tau_y+2r)(tau_z+2r).
long long working_set_elements(int tau_x, int tau_y, int tau_z, int r, int n_f);

struct StreamingBuffers {
  long long block = 0;     // columns_per_pass * (tau_x+2r)(tau_y+2r) * tau_z
  long long prefetch = 0;  // columns_per_pass * (tau_x+2r)(tau_y+2r)
  long long total() const { return block + prefetch; }
};

StreamingBuffers streaming_buffer_elements(int tau_x, int tau_y, int tau_z, int r,
                                           int columns_per_pass);

struct PlanCheck {
  bool ok = true;
  std::string reason;

  static PlanCheck accept() { return {}; }
  static PlanCheck reject(std::string why) { return {false, std::move(why)}; }
};

// Validates a plan against the kernel, the tile-buffer budget and, when
// strict mode is on and a profile is available, the autotuner's pruning
// rules. Rejection is a value, not an error.
PlanCheck validate_plan(const TilePlan& plan, const FusedKernel& kernel,
                        const BufferBudget& budget, Dtype dtype,
                        const MachineProfile* profile = nullptr, bool strict = false);

}  // namespace stenfuse
