#include "stenfuse/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "stenfuse/correlate.hpp"
#include "stenfuse/diffusion.hpp"
#include "stenfuse/mhd.hpp"
#include "stenfuse/oracle.hpp"
#include "stenfuse/phi_expr.hpp"
#include "stenfuse/toml.hpp"

namespace stenfuse {
namespace {

constexpr double kTwoPi = 6.28318530717958647692528676655900577;

// Wraps a parsed table and records which keys the loader consumed, so
// unknown keys fail with their line number.
class TrackedTable {
 public:
  explicit TrackedTable(toml::Table t) : t_(std::move(t)) {}

  bool has(const std::string& k) const { return t_.has(k); }
  const toml::Table& raw() const { return t_; }

  bool get_bool(const std::string& k, bool fb) { return mark(k), t_.get_bool(k, fb); }
  std::int64_t get_int(const std::string& k, std::int64_t fb) { return mark(k), t_.get_int(k, fb); }
  double get_double(const std::string& k, double fb) { return mark(k), t_.get_double(k, fb); }
  std::string get_string(const std::string& k, const std::string& fb) {
    return mark(k), t_.get_string(k, fb);
  }
  const toml::Value* find(const std::string& k) {
    mark(k);
    return t_.find(k);
  }
  const toml::Value& require(const std::string& k) {
    mark(k);
    return t_.require(k);
  }
  void mark_prefix(const std::string& prefix) {
    for (const auto& k : t_.keys())
      if (k.rfind(prefix, 0) == 0) consumed_.insert(k);
  }

  void check_unknown() const {
    for (const auto& k : t_.keys())
      if (!consumed_.count(k)) t_.fail(k, "unknown key");
  }

  [[noreturn]] void fail(const std::string& k, const std::string& msg) const { t_.fail(k, msg); }

 private:
  void mark(const std::string& k) { consumed_.insert(k); }
  toml::Table t_;
  std::set<std::string> consumed_;
};

std::vector<int> int_list(TrackedTable& t, const std::string& key, std::vector<int> fb) {
  const toml::Value* v = t.find(key);
  if (!v) return fb;
  std::vector<int> out;
  for (const auto& e : v->as_array()) out.push_back(static_cast<int>(e.as_int()));
  if (out.empty()) t.fail(key, "empty list");
  return out;
}

Strategy parse_strategy(const std::string& s, TrackedTable& t, const std::string& key) {
  if (s == "direct") return Strategy::direct;
  if (s == "streaming") return Strategy::streaming;
  t.fail(key, "unknown strategy '" + s + "' (expected direct|streaming)");
}

MacUnroll parse_unroll(const std::string& s, TrackedTable& t, const std::string& key) {
  if (s == "none") return MacUnroll::none;
  if (s == "full") return MacUnroll::full;
  t.fail(key, "unknown mac_unroll '" + s + "' (expected none|full)");
}

Shape default_domain(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::crosscorr: return Shape(1 << 24, 1, 1);
    case ProblemKind::diffusion: return Shape(256, 256, 256);
    case ProblemKind::mhd: return Shape(128, 128, 128);
    case ProblemKind::custom: return Shape(1, 1, 1);  // must be explicit
  }
  return Shape(1, 1, 1);
}

StencilKernel box_kernel(int radius) {
  std::vector<Offset> offsets;
  std::vector<double> coeffs;
  const double c = 1.0 / (2.0 * radius + 1.0);
  for (int j = -radius; j <= radius; ++j) {
    offsets.push_back({j, 0, 0});
    coeffs.push_back(c);
  }
  return StencilKernel::from_points(1, std::move(offsets), std::move(coeffs));
}

NamedStencil parse_stencil(TrackedTable& t, const std::string& prefix, const std::string& name) {
  NamedStencil st;
  st.name = name;
  if (t.has(prefix + ".offsets")) {
    st.explicit_points = true;
    const auto& offs = t.require(prefix + ".offsets").as_array();
    const auto& cfs = t.require(prefix + ".coeffs").as_array();
    if (offs.size() != cfs.size()) t.fail(prefix + ".coeffs", "offsets/coeffs length mismatch");
    std::vector<Offset> offsets;
    std::vector<double> coeffs;
    for (const auto& o : offs) {
      const auto& triple = o.as_array();
      if (triple.empty() || triple.size() > 3)
        t.fail(prefix + ".offsets", "each offset needs 1..3 components");
      Offset off;
      off.x = static_cast<int>(triple[0].as_int());
      if (triple.size() > 1) off.y = static_cast<int>(triple[1].as_int());
      if (triple.size() > 2) off.z = static_cast<int>(triple[2].as_int());
      offsets.push_back(off);
    }
    for (const auto& cv : cfs) coeffs.push_back(cv.as_double());
    int dims = 1;
    for (const auto& o : offsets) dims = std::max(dims, o.z != 0 ? 3 : o.y != 0 ? 2 : 1);
    st.kernel = StencilKernel::from_points(dims, std::move(offsets), std::move(coeffs));
  } else {
    st.derivative = static_cast<int>(t.get_int(prefix + ".derivative", 1));
    st.accuracy = static_cast<int>(t.get_int(prefix + ".accuracy", 2));
    st.axis = static_cast<int>(t.get_int(prefix + ".axis", 0));
    st.kernel = central_difference(st.derivative, st.accuracy, st.axis, 1.0);
  }
  return st;
}

void serialize_stencil(std::ostream& os, const NamedStencil& st) {
  os << "[stencil." << st.name << "]\n";
  if (st.explicit_points) {
    os << "offsets = [";
    for (std::size_t i = 0; i < st.kernel.offsets().size(); ++i) {
      const Offset& o = st.kernel.offsets()[i];
      os << (i ? ", " : "") << "[" << o.x << ", " << o.y << ", " << o.z << "]";
    }
    os << "]\ncoeffs = [";
    for (std::size_t i = 0; i < st.kernel.coeffs().size(); ++i)
      os << (i ? ", " : "") << st.kernel.coeffs()[i];
    os << "]\n";
  } else {
    os << "derivative = " << st.derivative << "\n";
    os << "accuracy = " << st.accuracy << "\n";
    os << "axis = " << st.axis << "\n";
  }
}

int spec_radius(const ProblemSpec& s) {
  switch (s.kind) {
    case ProblemKind::crosscorr: return s.crosscorr.g.empty() ? 0 : s.crosscorr.g.radius();
    case ProblemKind::diffusion: return s.diffusion.accuracy / 2;
    case ProblemKind::mhd: return s.mhd.accuracy / 2;
    case ProblemKind::custom: {
      int r = 0;
      for (const auto& st : s.custom.stencils)
        if (!st.kernel.empty()) r = std::max(r, st.kernel.radius());
      return r;
    }
  }
  return 0;
}

}  // namespace

const char* problem_kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::crosscorr: return "crosscorr";
    case ProblemKind::diffusion: return "diffusion";
    case ProblemKind::mhd: return "mhd";
    case ProblemKind::custom: return "custom";
  }
  return "?";
}

std::array<double, 3> ProblemSpec::grid_spacing() const {
  return {kTwoPi / static_cast<double>(domain.nx), kTwoPi / static_cast<double>(domain.ny),
          kTwoPi / static_cast<double>(domain.nz)};
}

ProblemSpec parse_problem_spec(const std::string& text, const std::string& origin) {
  TrackedTable t(toml::Table::parse(text, origin));
  ProblemSpec s;

  const std::string kind = t.require("problem.kind").as_string();
  if (kind == "crosscorr") s.kind = ProblemKind::crosscorr;
  else if (kind == "diffusion") s.kind = ProblemKind::diffusion;
  else if (kind == "mhd") s.kind = ProblemKind::mhd;
  else if (kind == "custom") s.kind = ProblemKind::custom;
  else t.fail("problem.kind", "unknown kind '" + kind + "'");

  const std::string dt = t.get_string("problem.dtype", "fp64");
  if (dt == "fp32") s.dtype = Dtype::f32;
  else if (dt == "fp64") s.dtype = Dtype::f64;
  else t.fail("problem.dtype", "unknown dtype '" + dt + "' (expected fp32|fp64)");

  // Kind-specific configuration.
  switch (s.kind) {
    case ProblemKind::crosscorr: {
      s.crosscorr.radius = static_cast<int>(t.get_int("crosscorr.radius", 1));
      if (s.crosscorr.radius < 0) t.fail("crosscorr.radius", "radius must be >= 0");
      if (t.has("stencil.g.offsets")) {
        NamedStencil st = parse_stencil(t, "stencil.g", "g");
        s.crosscorr.explicit_stencil = true;
        s.crosscorr.g = st.kernel;
        s.crosscorr.radius = st.kernel.empty() ? 0 : st.kernel.radius();
      } else {
        s.crosscorr.g = box_kernel(s.crosscorr.radius);
      }
      break;
    }
    case ProblemKind::diffusion: {
      s.diffusion.alpha = t.get_double("diffusion.alpha", s.diffusion.alpha);
      s.diffusion.dt = t.get_double("diffusion.dt", s.diffusion.dt);
      s.diffusion.accuracy = static_cast<int>(t.get_int("diffusion.accuracy", 6));
      if (s.diffusion.accuracy != 2 && s.diffusion.accuracy != 4 && s.diffusion.accuracy != 6)
        t.fail("diffusion.accuracy", "accuracy must be one of 2, 4, 6");
      break;
    }
    case ProblemKind::mhd: {
      auto& m = s.mhd;
      m.accuracy = static_cast<int>(t.get_int("mhd.accuracy", 6));
      m.dt = t.get_double("mhd.dt", m.dt);
      m.nu = t.get_double("mhd.nu", m.nu);
      m.zeta = t.get_double("mhd.zeta", m.zeta);
      m.eta = t.get_double("mhd.eta", m.eta);
      m.mu0 = t.get_double("mhd.mu0", m.mu0);
      m.cp = t.get_double("mhd.cp", m.cp);
      m.cv = t.get_double("mhd.cv", m.cv);
      m.K = t.get_double("mhd.K", m.K);
      m.heat = t.get_double("mhd.heat", m.heat);
      m.cool = t.get_double("mhd.cool", m.cool);
      m.cs0 = t.get_double("mhd.cs0", m.cs0);
      m.rho0 = t.get_double("mhd.rho0", m.rho0);
      m.T0 = t.get_double("mhd.T0", m.T0);
      const std::string shear = t.get_string("mhd.shear_term", "viscous");
      if (shear == "viscous") m.literal_shear_term = false;
      else if (shear == "literal") m.literal_shear_term = true;
      else t.fail("mhd.shear_term", "expected viscous|literal");
      break;
    }
    case ProblemKind::custom: {
      const toml::Value* fields = t.find("custom.fields");
      if (!fields) t.fail("problem.kind", "custom problems require custom.fields");
      for (const auto& f : fields->as_array()) s.custom.fields.push_back(f.as_string());
      const toml::Value* rows = t.find("custom.rows");
      if (!rows) t.fail("problem.kind", "custom problems require custom.rows");
      for (const auto& r : rows->as_array()) s.custom.rows.push_back(r.as_string());
      const toml::Value* phi = t.find("custom.phi");
      if (!phi) t.fail("problem.kind", "custom problems require custom.phi");
      for (const auto& p : phi->as_array()) s.custom.phi.push_back(p.as_string());

      std::set<std::string> names;
      for (const auto& key : t.raw().keys()) {
        if (key.rfind("stencil.", 0) != 0) continue;
        const std::string rest = key.substr(8);
        const std::size_t dot = rest.find('.');
        if (dot != std::string::npos) names.insert(rest.substr(0, dot));
      }
      for (const auto& name : names) {
        t.mark_prefix("stencil." + name + ".");
        TrackedTable scoped(t.raw());  // reuse the raw table for value reads
        s.custom.stencils.push_back(parse_stencil(scoped, "stencil." + name, name));
      }
      for (const auto& rname : s.custom.rows) {
        const bool known = std::any_of(s.custom.stencils.begin(), s.custom.stencils.end(),
                                       [&](const NamedStencil& st) { return st.name == rname; });
        if (!known) t.fail("custom.rows", "row references undefined stencil '" + rname + "'");
      }
      if (s.custom.phi.empty()) t.fail("custom.phi", "need at least one output expression");
      for (const auto& key : t.raw().keys())
        if (key.rfind("params.", 0) == 0) {
          t.mark_prefix(key);
          s.custom.params[key.substr(7)] = t.raw().find(key)->as_double();
        }
      // Parse-check the expressions now so syntax errors carry locations.
      for (const auto& ptext : s.custom.phi) (void)PhiExpr::parse(ptext);
      break;
    }
  }

  // Domain: explicit or the default problem size for the kind.
  const Shape dflt = default_domain(s.kind);
  if (s.kind == ProblemKind::custom && !t.has("problem.nx"))
    t.fail("problem.kind", "custom problems require explicit problem.nx/ny/nz");
  s.domain = Shape(t.get_int("problem.nx", dflt.nx), t.get_int("problem.ny", dflt.ny),
                   t.get_int("problem.nz", dflt.nz));

  const std::string boundary = t.get_string("problem.boundary", "periodic");
  if (boundary == "periodic") s.boundary = BoundaryPolicy::periodic();
  else if (boundary == "zero") s.boundary = BoundaryPolicy::zero();
  else if (boundary == "constant")
    s.boundary = BoundaryPolicy::constant(t.get_double("problem.boundary_value", 0.0));
  else t.fail("problem.boundary", "expected zero|constant|periodic");
  t.get_double("problem.boundary_value", 0.0);  // consume when present

  const int radius = spec_radius(s);
  s.halo = static_cast<int>(t.get_int("problem.halo", radius));
  if (s.halo < radius)
    t.fail(t.has("problem.halo") ? "problem.halo" : "problem.kind",
           "halo " + std::to_string(s.halo) + " is smaller than the stencil radius " +
               std::to_string(radius));

  s.workers = static_cast<int>(t.get_int("problem.workers", 0));
  s.strict_numerics = t.get_bool("problem.strict", true);
  s.case_id = t.get_string("problem.case",
                           std::string(problem_kind_name(s.kind)) + "-" + dtype_name(s.dtype) +
                               "-r" + std::to_string(radius));

  // Init ranges: verification default [0,1]; the MHD benchmark init is
  // the small symmetric range.
  if (s.kind == ProblemKind::mhd) {
    s.init.lo = -1e-5;
    s.init.hi = 1e-5;
  }
  s.init.lo = t.get_double("init.lo", s.init.lo);
  s.init.hi = t.get_double("init.hi", s.init.hi);
  s.init.seed = static_cast<std::uint64_t>(t.get_int("init.seed", 1234));
  if (s.init.lo > s.init.hi) t.fail("init.lo", "init.lo > init.hi");

  // Tune space.
  const int dims = s.domain.dims();
  s.tune.tau_x = int_list(t, "tune.tau_x", {8, 16, 32, 64});
  s.tune.tau_y = int_list(t, "tune.tau_y", dims >= 2 ? std::vector<int>{1, 2, 4, 8}
                                                     : std::vector<int>{1});
  s.tune.tau_z = int_list(t, "tune.tau_z", dims == 3 ? std::vector<int>{1, 2, 4, 8}
                                                     : std::vector<int>{1});
  s.tune.strategies.clear();
  if (const toml::Value* v = t.find("tune.strategies")) {
    for (const auto& e : v->as_array())
      s.tune.strategies.push_back(parse_strategy(e.as_string(), t, "tune.strategies"));
  } else {
    s.tune.strategies = {Strategy::direct};
    if (dims == 3) s.tune.strategies.push_back(Strategy::streaming);
  }
  s.tune.outputs_per_item = int_list(t, "tune.outputs_per_item", {1});
  s.tune.mac_unroll.clear();
  if (const toml::Value* v = t.find("tune.mac_unroll")) {
    for (const auto& e : v->as_array())
      s.tune.mac_unroll.push_back(parse_unroll(e.as_string(), t, "tune.mac_unroll"));
  } else {
    s.tune.mac_unroll = {MacUnroll::none};
  }
  int default_cpp = 4;
  if (s.kind == ProblemKind::custom)
    default_cpp = std::max(1, std::min(4, static_cast<int>(s.custom.fields.size())));
  if (s.kind != ProblemKind::mhd && s.kind != ProblemKind::custom) default_cpp = 1;
  s.tune.columns_per_pass = int_list(t, "tune.columns_per_pass", {default_cpp});
  s.tune.max_candidates = static_cast<int>(t.get_int("tune.max_candidates", 256));
  s.tune.strict = t.get_bool("tune.strict", true);
  s.tune_buffer_kib = t.get_double("tune.buffer_kib", 64.0);

  // The pruning rule is checked against 64-byte cache lines at parse
  // time; enumerate_candidates re-applies it with the actual profile.
  if (s.tune.strict) {
    const int xq = 64 / dtype_bytes(s.dtype);
    for (int tx : s.tune.tau_x)
      if (tx % xq != 0)
        t.fail(t.has("tune.tau_x") ? "tune.tau_x" : "problem.kind",
               "tau_x=" + std::to_string(tx) + " violates the pruning rule: tau_x must be a " +
                   "multiple of cache_line/dtype = 64/" + std::to_string(dtype_bytes(s.dtype)) +
                   " = " + std::to_string(xq));
  }

  s.bench.iters = static_cast<int>(t.get_int("bench.iters", 100));
  s.bench.warmups = static_cast<int>(t.get_int("bench.warmups", 10));
  s.bench.sweep_radius = t.get_bool("bench.sweep_radius", false);
  if (s.bench.iters < 1) t.fail("bench.iters", "iters must be >= 1");
  if (s.bench.warmups < 0) t.fail("bench.warmups", "warmups must be >= 0");

  s.run_steps = static_cast<int>(t.get_int("run.steps", 1));
  if (s.run_steps < 0) t.fail("run.steps", "steps must be >= 0");

  t.check_unknown();
  return s;
}

ProblemSpec load_problem_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open problem spec: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem_spec(ss.str(), path);
}

std::string serialize_problem_spec(const ProblemSpec& s) {
  std::ostringstream os;
  os.precision(17);
  os << "[problem]\n";
  os << "kind = \"" << problem_kind_name(s.kind) << "\"\n";
  os << "dtype = \"" << dtype_name(s.dtype) << "\"\n";
  os << "nx = " << s.domain.nx << "\nny = " << s.domain.ny << "\nnz = " << s.domain.nz << "\n";
  os << "boundary = \"" << s.boundary.name() << "\"\n";
  if (s.boundary.kind == BoundaryPolicy::Kind::Constant)
    os << "boundary_value = " << s.boundary.value << "\n";
  os << "halo = " << s.halo << "\n";
  os << "workers = " << s.workers << "\n";
  os << "strict = " << (s.strict_numerics ? "true" : "false") << "\n";
  os << "case = \"" << s.case_id << "\"\n";

  os << "\n[init]\n";
  os << "lo = " << s.init.lo << "\nhi = " << s.init.hi << "\nseed = " << s.init.seed << "\n";

  switch (s.kind) {
    case ProblemKind::crosscorr:
      os << "\n[crosscorr]\n";
      os << "radius = " << s.crosscorr.radius << "\n";
      if (s.crosscorr.explicit_stencil) {
        NamedStencil st;
        st.name = "g";
        st.explicit_points = true;
        st.kernel = s.crosscorr.g;
        os << "\n";
        serialize_stencil(os, st);
      }
      break;
    case ProblemKind::diffusion:
      os << "\n[diffusion]\n";
      os << "alpha = " << s.diffusion.alpha << "\n";
      os << "dt = " << s.diffusion.dt << "\n";
      os << "accuracy = " << s.diffusion.accuracy << "\n";
      break;
    case ProblemKind::mhd: {
      const auto& m = s.mhd;
      os << "\n[mhd]\n";
      os << "accuracy = " << m.accuracy << "\ndt = " << m.dt << "\n";
      os << "nu = " << m.nu << "\nzeta = " << m.zeta << "\neta = " << m.eta << "\n";
      os << "mu0 = " << m.mu0 << "\ncp = " << m.cp << "\ncv = " << m.cv << "\n";
      os << "K = " << m.K << "\nheat = " << m.heat << "\ncool = " << m.cool << "\n";
      os << "cs0 = " << m.cs0 << "\nrho0 = " << m.rho0 << "\nT0 = " << m.T0 << "\n";
      os << "shear_term = \"" << (m.literal_shear_term ? "literal" : "viscous") << "\"\n";
      break;
    }
    case ProblemKind::custom: {
      os << "\n[custom]\n";
      os << "fields = [";
      for (std::size_t i = 0; i < s.custom.fields.size(); ++i)
        os << (i ? ", " : "") << '"' << s.custom.fields[i] << '"';
      os << "]\nrows = [";
      for (std::size_t i = 0; i < s.custom.rows.size(); ++i)
        os << (i ? ", " : "") << '"' << s.custom.rows[i] << '"';
      os << "]\nphi = [";
      for (std::size_t i = 0; i < s.custom.phi.size(); ++i)
        os << (i ? ", " : "") << '"' << s.custom.phi[i] << '"';
      os << "]\n";
      if (!s.custom.params.empty()) {
        os << "\n[params]\n";
        for (const auto& [k, v] : s.custom.params) os << k << " = " << v << "\n";
      }
      for (const auto& st : s.custom.stencils) {
        os << "\n";
        serialize_stencil(os, st);
      }
      break;
    }
  }

  os << "\n[tune]\n";
  auto emit_ints = [&](const char* key, const std::vector<int>& xs) {
    os << key << " = [";
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? ", " : "") << xs[i];
    os << "]\n";
  };
  emit_ints("tau_x", s.tune.tau_x);
  emit_ints("tau_y", s.tune.tau_y);
  emit_ints("tau_z", s.tune.tau_z);
  os << "strategies = [";
  for (std::size_t i = 0; i < s.tune.strategies.size(); ++i)
    os << (i ? ", " : "") << '"' << strategy_name(s.tune.strategies[i]) << '"';
  os << "]\n";
  emit_ints("outputs_per_item", s.tune.outputs_per_item);
  os << "mac_unroll = [";
  for (std::size_t i = 0; i < s.tune.mac_unroll.size(); ++i)
    os << (i ? ", " : "") << '"' << mac_unroll_name(s.tune.mac_unroll[i]) << '"';
  os << "]\n";
  emit_ints("columns_per_pass", s.tune.columns_per_pass);
  os << "max_candidates = " << s.tune.max_candidates << "\n";
  os << "strict = " << (s.tune.strict ? "true" : "false") << "\n";
  os << "buffer_kib = " << s.tune_buffer_kib << "\n";

  os << "\n[bench]\n";
  os << "iters = " << s.bench.iters << "\nwarmups = " << s.bench.warmups << "\n";
  os << "sweep_radius = " << (s.bench.sweep_radius ? "true" : "false") << "\n";

  os << "\n[run]\nsteps = " << s.run_steps << "\n";
  return os.str();
}

// ---------------------------------------------------------------------
// Built problems
// ---------------------------------------------------------------------

namespace {

template <typename T>
class ProblemT final : public Problem {
 public:
  explicit ProblemT(ProblemSpec spec) : spec_(std::move(spec)) { build_kernel(); }

  const ProblemSpec& spec() const override { return spec_; }
  const FusedKernel& kernel() const override { return kernel_; }
  Dtype dtype() const override { return dtype_of<T>(); }
  int radius() const override { return kernel_.radius(); }
  long long interior_points() const override { return spec_.domain.count(); }
  long long fieldset_bytes() const override {
    return spec_.domain.count() * kernel_.n_fields() * static_cast<long long>(sizeof(T));
  }

  void randomize() override { state_.fill_random(spec_.init.lo, spec_.init.hi, spec_.init.seed); }

  void step(const TilePlan& plan) override { fused_step_into(state_, kernel_, plan, params_, out_); }

  void advance(const TilePlan& plan, int steps) override {
    if (spec_.kind == ProblemKind::mhd) {
      for (int i = 0; i < steps; ++i)
        rk3_step(state_, w_, out_, spec_.mhd.dt, kernel_, plan, params_);
      return;
    }
    for (int i = 0; i < steps; ++i) {
      state_.refresh_halos();
      fused_step_into(state_, kernel_, plan, params_, out_);
      if (out_.count() == state_.count()) std::swap(state_, out_);
    }
    state_.refresh_halos();
  }

  VerifyResult verify_against_oracle(const TilePlan& plan) override {
    state_.refresh_halos();
    FieldSet<T> fused = fused_step(state_, kernel_, plan, params_);
    FieldSet<T> ref = naive_oracle_step(state_, kernel_);
    for (int f = 0; f < fused.count(); ++f) {
      const std::vector<T> a = fused.field(f).interior();
      const std::vector<T> b = ref.field(f).interior();
      const double floor = default_abs_floor(std::span<const T>(b));
      const VerifyResult r =
          verify_ulp(std::span<const T>(a), std::span<const T>(b), 5, floor);
      if (!r.pass) return r;
    }
    return {};
  }

  std::map<std::string, double> state_checksums() const override {
    std::map<std::string, double> sums;
    for (int f = 0; f < state_.count(); ++f) {
      const std::vector<T> xs = state_.field(f).interior();
      sums[state_.name(f)] = compensated_sum(std::span<const T>(xs));
    }
    return sums;
  }

  RunParams run_params() const override { return params_; }

  TilePlan default_plan() const override {
    TilePlan p;
    p.tau_x = static_cast<int>(std::min<long long>(spec_.domain.nx, 8192));
    p.tau_y = static_cast<int>(std::min<long long>(spec_.domain.ny, 8));
    p.tau_z = static_cast<int>(std::min<long long>(spec_.domain.nz, 8));
    p.columns_per_pass = std::max(1, std::min(4, kernel_.n_fields()));
    return p;
  }

 private:
  void build_kernel() {
    const auto h = spec_.grid_spacing();
    const int dims = spec_.domain.dims();
    switch (spec_.kind) {
      case ProblemKind::crosscorr: {
        const StencilKernel& g = spec_.crosscorr.g;
        const int r = g.empty() ? 0 : g.radius();
        CoefficientMatrix A = CoefficientMatrix::from_kernels(
            {g}, {RowDescriptor{RowOp::custom, "g"}}, r, std::max(dims, g.dims()));
        kernel_ = FusedKernel(std::move(A), std::make_shared<PassThroughPhi>(0, 1), 1);
        field_names_ = {"f"};
        break;
      }
      case ProblemKind::diffusion: {
        DiffusionProblem p;
        p.alpha = spec_.diffusion.alpha;
        p.dt = spec_.diffusion.dt;
        p.accuracy = spec_.diffusion.accuracy;
        p.dims = dims;
        p.h = h;
        p.boundary = spec_.boundary;
        kernel_ = diffusion_as_fused(p);
        field_names_ = {"f"};
        break;
      }
      case ProblemKind::mhd: {
        MHDParams mp;
        mp.nu = spec_.mhd.nu;
        mp.zeta = spec_.mhd.zeta;
        mp.eta = spec_.mhd.eta;
        mp.mu0 = spec_.mhd.mu0;
        mp.cp = spec_.mhd.cp;
        mp.cv = spec_.mhd.cv;
        mp.K = spec_.mhd.K;
        mp.heat = spec_.mhd.heat;
        mp.cool = spec_.mhd.cool;
        mp.cs0 = spec_.mhd.cs0;
        mp.rho0 = spec_.mhd.rho0;
        mp.T0 = spec_.mhd.T0;
        mp.literal_shear_term = spec_.mhd.literal_shear_term;
        kernel_ = make_mhd_kernel(spec_.mhd.accuracy, h, mp);
        field_names_.assign(kMhdFieldNames.begin(), kMhdFieldNames.end());
        break;
      }
      case ProblemKind::custom: {
        std::vector<StencilKernel> kernels;
        std::vector<RowDescriptor> descs;
        int r = 0;
        for (const auto& rname : spec_.custom.rows) {
          for (const auto& st : spec_.custom.stencils)
            if (st.name == rname) {
              kernels.push_back(st.kernel);
              descs.push_back({RowOp::custom, rname});
              if (!st.kernel.empty()) r = std::max(r, st.kernel.radius());
            }
        }
        CoefficientMatrix A = CoefficientMatrix::from_kernels(kernels, descs, r, dims);
        std::vector<PhiExpr> exprs;
        for (const auto& ptext : spec_.custom.phi) exprs.push_back(PhiExpr::parse(ptext));
        auto phi = std::make_shared<ExpressionPhi>(std::move(exprs), spec_.custom.params,
                                                   A.n_rows(),
                                                   static_cast<int>(spec_.custom.fields.size()));
        kernel_ = FusedKernel(std::move(A), std::move(phi),
                              static_cast<int>(spec_.custom.fields.size()));
        field_names_ = spec_.custom.fields;
        break;
      }
    }
    kernel_.set_pruned(true);

    if (spec_.halo < kernel_.radius())
      throw config_error("problem: halo " + std::to_string(spec_.halo) +
                         " smaller than kernel radius " + std::to_string(kernel_.radius()));

    state_ = FieldSet<T>(spec_.domain, spec_.halo, spec_.boundary, field_names_);
    out_ = make_output_set(state_, kernel_);
    if (spec_.kind == ProblemKind::mhd)
      w_ = FieldSet<T>(spec_.domain, spec_.halo, spec_.boundary, field_names_);

    params_.workers = spec_.workers;
    params_.strict_numerics = spec_.strict_numerics;
    params_.budget = BufferBudget::from_kib(spec_.tune_buffer_kib);
  }

  ProblemSpec spec_;
  FusedKernel kernel_;
  std::vector<std::string> field_names_;
  FieldSet<T> state_, out_, w_;
  RunParams params_;
};

}  // namespace

std::unique_ptr<Problem> Problem::build(const ProblemSpec& spec) {
  if (spec.dtype == Dtype::f32) return std::make_unique<ProblemT<float>>(spec);
  return std::make_unique<ProblemT<double>>(spec);
}

}  // namespace stenfuse
