#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <vector>

#include "stenfuse/field.hpp"
#include "stenfuse/fusion.hpp"
#include "stenfuse/plan.hpp"

namespace stenfuse {

// Called for every element staged into the streaming tile buffer.
// Used by tests to assert single-load accounting.
using LoadObserver = std::function<void(int tile, int field, long long gx, long long gy,
                                        long long gz)>;

struct RunParams {
  int workers = 0;              // 0 = hardware concurrency
  bool strict_numerics = true;  // non-finite outputs raise numeric_error
  BufferBudget budget{};
  const MachineProfile* profile = nullptr;  // enables strict plan rules
  bool strict_plan = false;
  const LoadObserver* load_observer = nullptr;
};

// Dispatches tile indices to a pool of workers; each tile runs on
// exactly one worker. Results must not depend on the assignment.
void parallel_tiles(int workers, std::size_t n_tiles,
                    const std::function<void(std::size_t tile, int worker)>& fn);

// Actual worker count for a request (0 = hardware concurrency).
int resolve_workers(int requested);

namespace detail {

template <typename T>
struct EngineCtx {
  const FusedKernel* fk = nullptr;
  const MacPlan* plan = nullptr;
  std::vector<T> a;  // coefficient matrix cast to the working precision
  int ns = 0, nk = 0, nf = 0, nout = 0, r = 0, dims = 0;
};

template <typename T>
EngineCtx<T> make_ctx(const FusedKernel& fk) {
  EngineCtx<T> c;
  c.fk = &fk;
  c.plan = &fk.plan();
  c.ns = fk.A().n_rows();
  c.nk = fk.A().n_cols();
  c.nf = fk.n_fields();
  c.nout = fk.n_outputs();
  c.r = fk.radius();
  c.dims = fk.dims();
  c.a.resize(fk.A().values().size());
  for (std::size_t i = 0; i < c.a.size(); ++i) c.a[i] = static_cast<T>(fk.A().values()[i]);
  return c;
}

// Tracks the scan-order-first non-finite output across workers.
struct StrictTracker {
  std::atomic<long long> first{-1};

  void note(long long idx) {
    long long cur = first.load(std::memory_order_relaxed);
    while ((cur < 0 || idx < cur) &&
           !first.compare_exchange_weak(cur, idx, std::memory_order_relaxed)) {
    }
  }
};

template <typename T>
struct Scratch {
  std::vector<T> b;        // gathered block, nk x nf
  std::vector<T> q;        // linear-stage output, ns x nf (direct path)
  std::vector<T> out;      // one point's outputs
  std::vector<T> qtile;    // streaming per-tile Q accumulators
  std::vector<T> ring;     // streaming circular plane buffer
  std::vector<T> prefetch; // streaming leading-edge plane
  std::vector<long long> gather_off;  // per-k relative offset into padded data
  std::vector<long long> buf_off;     // per-entry in-plane offset
};

template <typename T>
struct FieldPtrs {
  std::vector<const T*> in;
  std::vector<T*> out;
  long long sy = 0, sz = 0;  // padded strides (shared by all fields)
  int halo = 0;
  Shape shape;
};

template <typename T>
FieldPtrs<T> field_ptrs(const FieldSet<T>& in, FieldSet<T>& out) {
  FieldPtrs<T> p;
  p.shape = in.shape();
  p.halo = in.halo();
  p.sy = in.field(0).stride_y();
  p.sz = in.field(0).stride_z();
  for (int f = 0; f < in.count(); ++f) p.in.push_back(in.field(f).data());
  for (int f = 0; f < out.count(); ++f) p.out.push_back(out.field(f).data());
  return p;
}

// The MAC stream of one footprint slice. mac_unroll=full unrolls the
// entry loop by hand; the per-entry arithmetic and its order are
// identical in both variants.
template <typename T>
inline void mac_entries(const MacPlan::Slice& slice, const std::vector<T>& a, int nk, int nf,
                        const std::vector<std::vector<int>>& row_fields, const T* b, T* q,
                        bool unroll) {
  const auto body = [&](std::size_t e) {
    const auto& en = slice.entries[e];
    const T av = a[static_cast<std::size_t>(en.row) * nk + en.k];
    const T* brow = b + static_cast<std::size_t>(en.k) * nf;
    T* qrow = q + static_cast<std::size_t>(en.row) * nf;
    for (int j : row_fields[static_cast<std::size_t>(en.row)]) qrow[j] += av * brow[j];
  };
  const std::size_t n = slice.entries.size();
  if (unroll) {
    std::size_t e = 0;
    for (; e + 4 <= n; e += 4) {
      body(e);
      body(e + 1);
      body(e + 2);
      body(e + 3);
    }
    for (; e < n; ++e) body(e);
  } else {
    for (std::size_t e = 0; e < n; ++e) body(e);
  }
}

// One output point on the direct path: gather the box, run the MAC
// stream in ascending-k order, apply phi, write.
template <typename T>
inline void direct_point(const EngineCtx<T>& ctx, const FieldPtrs<T>& fp, Scratch<T>& s,
                         long long x, long long y, long long z, bool unroll, bool strict,
                         StrictTracker* tracker) {
  const long long center = (x + fp.halo) + (y + fp.halo) * fp.sy + (z + fp.halo) * fp.sz;
  T* b = s.b.data();
  for (int k = 0; k < ctx.nk; ++k) {
    const long long src = center + s.gather_off[static_cast<std::size_t>(k)];
    for (int j = 0; j < ctx.nf; ++j)
      b[static_cast<std::size_t>(k) * ctx.nf + j] = fp.in[static_cast<std::size_t>(j)][src];
  }
  T* q = s.q.data();
  std::fill(s.q.begin(), s.q.end(), T(0));
  for (const auto& slice : ctx.plan->slices)
    mac_entries(slice, ctx.a, ctx.nk, ctx.nf, ctx.plan->row_fields, b, q, unroll);

  ctx.fk->phi().eval(q, ctx.ns, ctx.nf, Coord{x, y, z}, s.out.data());
  for (int jo = 0; jo < ctx.nout; ++jo) {
    const T v = s.out[static_cast<std::size_t>(jo)];
    if (strict && !std::isfinite(static_cast<double>(v)) && tracker)
      tracker->note(((z * fp.shape.ny + y) * fp.shape.nx + x) * ctx.nout + jo);
    fp.out[static_cast<std::size_t>(jo)][center] = v;
  }
}

template <typename T>
void direct_tile(const EngineCtx<T>& ctx, const FieldPtrs<T>& fp, Scratch<T>& s, const Tile& t,
                 const TilePlan& plan, bool strict, StrictTracker* tracker) {
  s.b.resize(static_cast<std::size_t>(ctx.nk) * ctx.nf);
  s.q.resize(static_cast<std::size_t>(ctx.ns) * ctx.nf);
  s.out.resize(static_cast<std::size_t>(ctx.nout));
  if (s.gather_off.empty()) {
    s.gather_off.resize(static_cast<std::size_t>(ctx.nk));
    for (int k = 0; k < ctx.nk; ++k) {
      const Offset o = ctx.fk->A().footprint_offset(k);
      s.gather_off[static_cast<std::size_t>(k)] = o.x + o.y * fp.sy + o.z * fp.sz;
    }
  }
  const bool unroll = plan.mac_unroll == MacUnroll::full;
  const int group = std::max(1, plan.outputs_per_item);
  for (long long z = t.z0; z < t.z0 + t.nz; ++z)
    for (long long y = t.y0; y < t.y0 + t.ny; ++y)
      for (long long x = t.x0; x < t.x0 + t.nx; x += group) {
        const long long xe = std::min(t.x0 + t.nx, x + group);
        for (long long xg = x; xg < xe; ++xg)
          direct_point(ctx, fp, s, xg, y, z, unroll, strict, tracker);
      }
}

// One tile on the streaming path: a circular buffer of tau_z halo-wide
// planes advanced along z one plane at a time, the incoming plane landing
// in a prefetch buffer before replacing the slot of the plane that was
// just consumed. Fields stream through in groups of columns_per_pass;
// Q accumulates across groups and per-point accumulation still visits k
// in ascending order, so outputs match the direct path bit for bit.
template <typename T>
void streaming_tile(const EngineCtx<T>& ctx, const FieldPtrs<T>& fp, Scratch<T>& s, const Tile& t,
                    const TilePlan& plan,
                    const std::vector<std::vector<std::vector<int>>>& group_row_fields,
                    bool strict, StrictTracker* tracker, int tile_id,
                    const LoadObserver* observer) {
  const int r = ctx.r;
  const long long X = t.nx, Y = t.ny, Z = t.nz;
  const long long W = X + 2 * r, H = Y + 2 * r, P = Z + 2 * r;
  const long long depth = std::min<long long>(plan.tau_z, P);
  const int cpp = std::min(plan.columns_per_pass, ctx.nf);
  const long long plane = W * H;

  s.qtile.assign(static_cast<std::size_t>(X * Y * Z) * ctx.ns * ctx.nf, T(0));
  s.ring.resize(static_cast<std::size_t>(cpp * depth * plane));
  s.prefetch.resize(static_cast<std::size_t>(cpp) * plane);
  s.out.resize(static_cast<std::size_t>(ctx.nout));

  // In-plane offsets of MAC entries for this tile width.
  const MacPlan& mp = *ctx.plan;
  s.buf_off.clear();
  std::vector<std::size_t> slice_start(mp.slices.size() + 1, 0);
  for (std::size_t si = 0; si < mp.slices.size(); ++si) {
    for (const auto& e : mp.slices[si].entries) s.buf_off.push_back(e.sy * W + e.sx);
    slice_start[si + 1] = slice_start[si] + mp.slices[si].entries.size();
  }

  auto stage_plane = [&](int gsz, int f0, long long pz, T* dst) {
    const long long gz = t.z0 - r + pz;
    for (int lf = 0; lf < gsz; ++lf) {
      const T* src = fp.in[static_cast<std::size_t>(f0 + lf)];
      for (long long yy = 0; yy < H; ++yy) {
        const long long gy = t.y0 - r + yy;
        const long long base = (t.x0 - r + fp.halo) + (gy + fp.halo) * fp.sy +
                               (gz + fp.halo) * fp.sz;
        T* row = dst + static_cast<std::size_t>(lf) * plane + yy * W;
        for (long long xx = 0; xx < W; ++xx) row[xx] = src[base + xx];
        if (observer && *observer)
          for (long long xx = 0; xx < W; ++xx)
            (*observer)(tile_id, f0 + lf, t.x0 - r + xx, gy, gz);
      }
    }
  };

  const int n_groups = (ctx.nf + cpp - 1) / cpp;
  for (int g = 0; g < n_groups; ++g) {
    const int f0 = g * cpp;
    const int gsz = std::min(cpp, ctx.nf - f0);
    const auto& rows_g = group_row_fields[static_cast<std::size_t>(g)];

    // Fill the buffer, then stream: consume plane pz from its slot while
    // the next plane enters through the prefetch buffer.
    for (long long pz = 0; pz < depth; ++pz)
      stage_plane(gsz, f0, pz, s.ring.data() + static_cast<std::size_t>(pz % depth) * cpp * plane);

    for (long long pz = 0; pz < P; ++pz) {
      const long long slot = pz % depth;
      const T* buf = s.ring.data() + static_cast<std::size_t>(slot) * cpp * plane;

      const long long zlo = std::max<long long>(0, pz - 2 * r);
      const long long zhi = std::min<long long>(Z - 1, pz);
      for (long long z = zlo; z <= zhi; ++z) {
        const auto& slice = mp.slices[static_cast<std::size_t>(pz - z)];
        const std::size_t eoff = slice_start[static_cast<std::size_t>(pz - z)];
        for (long long y = 0; y < Y; ++y) {
          for (long long x = 0; x < X; ++x) {
            T* q = s.qtile.data() +
                   (static_cast<std::size_t>((z * Y + y) * X + x)) * ctx.ns * ctx.nf;
            const long long pbase = y * W + x;
            for (std::size_t e = 0; e < slice.entries.size(); ++e) {
              const auto& en = slice.entries[e];
              const T av = ctx.a[static_cast<std::size_t>(en.row) * ctx.nk + en.k];
              const long long addr = pbase + s.buf_off[eoff + e];
              T* qrow = q + static_cast<std::size_t>(en.row) * ctx.nf;
              for (int j : rows_g[static_cast<std::size_t>(en.row)])
                qrow[j] += av * buf[static_cast<std::size_t>(j - f0) * plane + addr];
            }
          }
        }
      }

      if (pz + depth < P) {
        stage_plane(gsz, f0, pz + depth, s.prefetch.data());
        // Rotate: the incoming plane takes over the slot just consumed.
        T* dst = s.ring.data() + static_cast<std::size_t>((pz + depth) % depth) * cpp * plane;
        std::copy(s.prefetch.begin(),
                  s.prefetch.begin() + static_cast<std::ptrdiff_t>(gsz * plane), dst);
      }
    }
  }

  // Nonlinear stage once all field groups contributed to Q.
  for (long long z = 0; z < Z; ++z)
    for (long long y = 0; y < Y; ++y)
      for (long long x = 0; x < X; ++x) {
        const T* q =
            s.qtile.data() + (static_cast<std::size_t>((z * Y + y) * X + x)) * ctx.ns * ctx.nf;
        const long long gx = t.x0 + x, gy = t.y0 + y, gz = t.z0 + z;
        ctx.fk->phi().eval(q, ctx.ns, ctx.nf, Coord{gx, gy, gz}, s.out.data());
        const long long center = (gx + fp.halo) + (gy + fp.halo) * fp.sy + (gz + fp.halo) * fp.sz;
        for (int jo = 0; jo < ctx.nout; ++jo) {
          const T v = s.out[static_cast<std::size_t>(jo)];
          if (strict && !std::isfinite(static_cast<double>(v)) && tracker)
            tracker->note(((gz * fp.shape.ny + gy) * fp.shape.nx + gx) * ctx.nout + jo);
          fp.out[static_cast<std::size_t>(jo)][center] = v;
        }
      }
}

template <typename T>
void check_step_args(const FieldSet<T>& in, const FusedKernel& kernel, const TilePlan& plan,
                     const RunParams& params) {
  if (in.count() != kernel.n_fields())
    throw config_error("fused_step: field count does not match kernel");
  if (in.halo() < kernel.radius())
    throw config_error("fused_step: halo " + std::to_string(in.halo()) +
                       " smaller than kernel radius " + std::to_string(kernel.radius()));
  const PlanCheck chk = validate_plan(plan, kernel, params.budget, dtype_of<T>(), params.profile,
                                      params.strict_plan);
  if (!chk.ok) throw config_error("fused_step: invalid plan: " + chk.reason);
}

template <typename T>
void throw_if_bad(const StrictTracker& tracker, const FieldSet<T>& out, int nout) {
  const long long idx = tracker.first.load();
  if (idx < 0) return;
  const Shape& sh = out.shape();
  const int jo = static_cast<int>(idx % nout);
  long long p = idx / nout;
  const long long x = p % sh.nx;
  const long long y = (p / sh.nx) % sh.ny;
  const long long z = p / (sh.nx * sh.ny);
  throw numeric_error("non-finite output at (" + std::to_string(x) + "," + std::to_string(y) +
                      "," + std::to_string(z) + ") of output field " +
                      out.name(jo));
}

}  // namespace detail

template <typename T>
void run_direct_into(const FieldSet<T>& in, const FusedKernel& kernel, const TilePlan& plan,
                     const RunParams& params, FieldSet<T>& out) {
  if (plan.strategy != Strategy::direct)
    throw config_error("run_direct: plan strategy is not direct");
  detail::check_step_args(in, kernel, plan, params);

  auto ctx = detail::make_ctx<T>(kernel);
  auto fp = detail::field_ptrs(in, out);
  const auto tiles = partition_domain(in.shape(), plan.tau_x, plan.tau_y, plan.tau_z);
  const int workers = resolve_workers(params.workers);
  detail::StrictTracker tracker;

  std::vector<detail::Scratch<T>> scratch(static_cast<std::size_t>(workers));
  parallel_tiles(workers, tiles.size(), [&](std::size_t ti, int w) {
    detail::direct_tile(ctx, fp, scratch[static_cast<std::size_t>(w)], tiles[ti], plan,
                        params.strict_numerics, &tracker);
  });
  if (params.strict_numerics) detail::throw_if_bad(tracker, out, ctx.nout);
}

template <typename T>
void run_streaming_into(const FieldSet<T>& in, const FusedKernel& kernel, const TilePlan& plan,
                        const RunParams& params, FieldSet<T>& out) {
  if (plan.strategy != Strategy::streaming)
    throw config_error("run_streaming: plan strategy is not streaming");
  detail::check_step_args(in, kernel, plan, params);

  auto ctx = detail::make_ctx<T>(kernel);
  auto fp = detail::field_ptrs(in, out);
  const auto tiles = partition_domain(in.shape(), plan.tau_x, plan.tau_y, plan.tau_z);
  const int workers = resolve_workers(params.workers);
  detail::StrictTracker tracker;

  const int cpp = std::min(plan.columns_per_pass, ctx.nf);
  const int n_groups = (ctx.nf + cpp - 1) / cpp;
  std::vector<std::vector<std::vector<int>>> group_row_fields(
      static_cast<std::size_t>(n_groups));
  for (int g = 0; g < n_groups; ++g) {
    const int f0 = g * cpp, f1 = std::min(ctx.nf, f0 + cpp);
    auto& rows = group_row_fields[static_cast<std::size_t>(g)];
    rows.resize(ctx.plan->row_fields.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (int j : ctx.plan->row_fields[i])
        if (j >= f0 && j < f1) rows[i].push_back(j);
  }

  std::vector<detail::Scratch<T>> scratch(static_cast<std::size_t>(workers));
  parallel_tiles(workers, tiles.size(), [&](std::size_t ti, int w) {
    const Tile& t = tiles[ti];
    auto& s = scratch[static_cast<std::size_t>(w)];
    if (t.nz < 2 * ctx.r + 1) {
      // Degenerate circular buffer; clipped edge tiles take the direct
      // path with identical arithmetic.
      detail::direct_tile(ctx, fp, s, t, plan, params.strict_numerics, &tracker);
    } else {
      detail::streaming_tile(ctx, fp, s, t, plan, group_row_fields, params.strict_numerics,
                             &tracker, static_cast<int>(ti), params.load_observer);
    }
  });
  if (params.strict_numerics) detail::throw_if_bad(tracker, out, ctx.nout);
}

template <typename T>
void fused_step_into(const FieldSet<T>& in, const FusedKernel& kernel, const TilePlan& plan,
                     const RunParams& params, FieldSet<T>& out) {
  if (plan.strategy == Strategy::direct)
    run_direct_into(in, kernel, plan, params, out);
  else
    run_streaming_into(in, kernel, plan, params, out);
}

template <typename T>
FieldSet<T> make_output_set(const FieldSet<T>& in, const FusedKernel& kernel) {
  std::vector<std::string> names;
  if (kernel.n_outputs() == in.count()) {
    names = in.names();
  } else {
    for (int j = 0; j < kernel.n_outputs(); ++j) names.push_back("out" + std::to_string(j));
  }
  return FieldSet<T>(in.shape(), in.halo(), in.field(0).policy(), std::move(names));
}

template <typename T>
FieldSet<T> fused_step(const FieldSet<T>& in, const FusedKernel& kernel, const TilePlan& plan,
                       const RunParams& params) {
  FieldSet<T> out = make_output_set(in, kernel);
  fused_step_into(in, kernel, plan, params, out);
  return out;
}

template <typename T>
FieldSet<T> run_direct(const FieldSet<T>& in, const FusedKernel& kernel, const TilePlan& plan,
                       const RunParams& params) {
  FieldSet<T> out = make_output_set(in, kernel);
  run_direct_into(in, kernel, plan, params, out);
  return out;
}

template <typename T>
FieldSet<T> run_streaming(const FieldSet<T>& in, const FusedKernel& kernel, const TilePlan& plan,
                          const RunParams& params) {
  FieldSet<T> out = make_output_set(in, kernel);
  run_streaming_into(in, kernel, plan, params, out);
  return out;
}

}  // namespace stenfuse
