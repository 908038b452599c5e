#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stenfuse/autotune.hpp"
#include "stenfuse/boundary.hpp"
#include "stenfuse/common.hpp"
#include "stenfuse/engine.hpp"
#include "stenfuse/kernel.hpp"
#include "stenfuse/shape.hpp"
#include "stenfuse/verify.hpp"

namespace stenfuse {

enum class ProblemKind { crosscorr, diffusion, mhd, custom };

const char* problem_kind_name(ProblemKind k);

struct InitSettings {
  double lo = 0.0, hi = 1.0;
  std::uint64_t seed = 1234;
  friend bool operator==(const InitSettings&, const InitSettings&) = default;
};

struct BenchSettings {
  int iters = 100;
  int warmups = 10;
  bool sweep_radius = false;  // crosscorr: radius in powers of two up to 1024
  friend bool operator==(const BenchSettings&, const BenchSettings&) = default;
};

struct CrosscorrConfig {
  int radius = 1;
  bool explicit_stencil = false;
  StencilKernel g;  // resolved; generated as a normalized box unless explicit
  friend bool operator==(const CrosscorrConfig&, const CrosscorrConfig&) = default;
};

struct DiffusionConfig {
  double alpha = 1.0;
  double dt = 1.1920928955078125e-07;  // FLT_EPSILON
  int accuracy = 6;
  friend bool operator==(const DiffusionConfig&, const DiffusionConfig&) = default;
};

struct MhdSpecConfig {
  int accuracy = 6;
  double dt = 1.1920928955078125e-07;  // FLT_EPSILON
  double nu = 5e-3, zeta = 0.0, eta = 5e-3, mu0 = 1.0;
  double cp = 1.0, cv = 0.6, K = 0.0, heat = 0.0, cool = 0.0;
  double cs0 = 1.0, rho0 = 1.0, T0 = 0.0;
  bool literal_shear_term = false;
  friend bool operator==(const MhdSpecConfig&, const MhdSpecConfig&) = default;
};

struct NamedStencil {
  std::string name;
  bool explicit_points = false;
  // generator form (used when !explicit_points)
  int derivative = 1;
  int accuracy = 2;
  int axis = 0;
  // explicit form
  StencilKernel kernel;
  friend bool operator==(const NamedStencil&, const NamedStencil&) = default;
};

struct CustomConfig {
  std::vector<std::string> fields;
  std::vector<NamedStencil> stencils;
  std::vector<std::string> rows;  // stencil names, in A-row order
  std::vector<std::string> phi;   // one expression per output field
  std::map<std::string, double> params;
  friend bool operator==(const CustomConfig&, const CustomConfig&) = default;
};

// A fully-resolved problem description: what a spec file parses to, with
// every default applied. parse -> serialize -> parse is the identity.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::diffusion;
  Dtype dtype = Dtype::f64;
  Shape domain{1, 1, 1};
  BoundaryPolicy boundary = BoundaryPolicy::periodic();
  int halo = 0;  // resolved to >= kernel radius

  CrosscorrConfig crosscorr;
  DiffusionConfig diffusion;
  MhdSpecConfig mhd;
  CustomConfig custom;

  InitSettings init;
  SearchSpace tune;
  double tune_buffer_kib = 64.0;
  BenchSettings bench;
  std::string case_id;
  int run_steps = 1;
  int workers = 0;
  bool strict_numerics = true;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;

  // Grid spacing 2*pi/n per axis (periodic-cube convention).
  std::array<double, 3> grid_spacing() const;
};

ProblemSpec parse_problem_spec(const std::string& text, const std::string& origin = "");
ProblemSpec load_problem_spec(const std::string& path);
std::string serialize_problem_spec(const ProblemSpec& spec);

// A built problem: state allocated, fused kernel constructed, ready to
// step. Type-erases the working precision.
class Problem {
 public:
  virtual ~Problem() = default;

  static std::unique_ptr<Problem> build(const ProblemSpec& spec);

  virtual const ProblemSpec& spec() const = 0;
  virtual const FusedKernel& kernel() const = 0;
  virtual Dtype dtype() const = 0;
  virtual int radius() const = 0;
  virtual long long interior_points() const = 0;
  virtual long long fieldset_bytes() const = 0;

  // Deterministic re-initialization from the spec's init settings
  // (halos refreshed afterward).
  virtual void randomize() = 0;

  // One timed unit: a single fused evaluation over the domain (for MHD,
  // one RHS evaluation, the per-substep kernel cost). Never refreshes
  // halos; inputs are left unchanged.
  virtual void step(const TilePlan& plan) = 0;

  // Problem-semantics time advance (diffusion: forward-Euler steps; MHD:
  // full RK3 steps; crosscorr/custom: repeated application writing back).
  virtual void advance(const TilePlan& plan, int steps) = 0;

  // Fused output of one evaluation versus the unfused whole-array
  // oracle, under the configured acceptance criterion.
  virtual VerifyResult verify_against_oracle(const TilePlan& plan) = 0;

  // Per-field compensated interior sums of the current state, keyed by
  // field name (baseline files and reporting).
  virtual std::map<std::string, double> state_checksums() const = 0;

  virtual RunParams run_params() const = 0;
  virtual TilePlan default_plan() const = 0;
};

}  // namespace stenfuse
