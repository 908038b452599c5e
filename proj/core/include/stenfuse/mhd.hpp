#pragma once

#include <array>
#include <memory>

#include "stenfuse/engine.hpp"
#include "stenfuse/fusion.hpp"

namespace stenfuse {

// Field order of the 8-field state: logarithmic density, velocity,
// specific entropy, magnetic vector potential.
enum MhdField : int {
  F_LNRHO = 0,
  F_UX = 1,
  F_UY = 2,
  F_UZ = 3,
  F_SS = 4,
  F_AX = 5,
  F_AY = 6,
  F_AZ = 7,
};
inline constexpr int kMhdFields = 8;
inline constexpr int kMhdHalo = 3;
extern const std::array<const char*, kMhdFields> kMhdFieldNames;

// Rows of the MHD coefficient matrix: value, the three gradients, the
// per-axis second derivatives, and the three mixed partials. Laplacians
// are the sum of the diagonal rows; gradient-of-divergence and
// curl-of-curl terms need the diagonal and mixed rows individually.
enum MhdRow : int {
  R_VAL = 0,
  R_DX = 1,
  R_DY = 2,
  R_DZ = 3,
  R_DXX = 4,
  R_DYY = 5,
  R_DZZ = 6,
  R_DXY = 7,
  R_DYZ = 8,
  R_DXZ = 9,
};
inline constexpr int kMhdRows = 10;

struct MHDParams {
  double nu = 5e-3;    // kinematic viscosity
  double zeta = 0.0;   // bulk viscosity
  double eta = 5e-3;   // magnetic diffusivity
  double mu0 = 1.0;    // vacuum permeability
  double cp = 1.0;
  double cv = 0.6;
  double K = 0.0;      // radiative thermal conductivity
  double heat = 0.0;   // explicit heating
  double cool = 0.0;   // explicit cooling
  double cs0 = 1.0;    // reference sound speed at (rho0, s = 0)
  double rho0 = 1.0;
  double T0 = 0.0;     // 0 = derive from cs0: cs0^2 / (cp (gamma-1))

  // Whether the shear term enters the momentum equation outside the
  // viscosity bracket (the literal equation layout) instead of as
  // nu * 2 S.grad(ln rho). Recorded in run metadata.
  bool literal_shear_term = false;

  double gamma() const { return cp / cv; }
  double resolved_T0() const { return T0 > 0 ? T0 : cs0 * cs0 / (cp * (gamma() - 1.0)); }
  void validate() const;
};

CoefficientMatrix build_mhd_coefficient_matrix(int accuracy, const std::array<double, 3>& h);

// The nonlinear stage evaluating the eight time derivatives from Q.
class MhdPhi final : public PointPhi {
 public:
  explicit MhdPhi(MHDParams params);

  int n_outputs() const override { return kMhdFields; }
  void eval(const double* q, int ns, int nf, Coord c, double* out) const override;
  void eval(const float* q, int ns, int nf, Coord c, float* out) const override;
  std::vector<QRef> used_entries(int output) const override;
  double flops_per_point() const override;
  std::string name() const override;

  const MHDParams& params() const { return p_; }

 private:
  template <typename T>
  void rhs(const T* q, int nf, T* out) const;

  MHDParams p_;
};

FusedKernel make_mhd_kernel(int accuracy, const std::array<double, 3>& h,
                            const MHDParams& params);

template <typename T>
FieldSet<T> make_mhd_state(const Shape& shape, BoundaryPolicy policy = BoundaryPolicy::periodic()) {
  std::vector<std::string> names(kMhdFieldNames.begin(), kMhdFieldNames.end());
  return FieldSet<T>(shape, kMhdHalo, policy, std::move(names));
}

// Low-storage 2N Runge-Kutta (three stages, third order):
//   w <- alpha_s w + dt f(y);  y <- y + beta_s w.
namespace rk3 {
inline constexpr std::array<double, 3> alpha{0.0, -5.0 / 9.0, -153.0 / 128.0};
inline constexpr std::array<double, 3> beta{1.0 / 3.0, 15.0 / 16.0, 8.0 / 15.0};
}  // namespace rk3

// One RK3 substage: refreshes halos, evaluates the fused RHS once, and
// applies the low-storage update pointwise on the interior.
template <typename T>
void rk3_substep(FieldSet<T>& state, FieldSet<T>& w, FieldSet<T>& rhs, int substep, double dt,
                 const FusedKernel& kernel, const TilePlan& plan, const RunParams& params) {
  if (substep < 0 || substep > 2) throw std::invalid_argument("rk3_substep: substep in {0,1,2}");
  state.refresh_halos();
  fused_step_into(state, kernel, plan, params, rhs);

  const T a = static_cast<T>(rk3::alpha[static_cast<std::size_t>(substep)]);
  const T b = static_cast<T>(rk3::beta[static_cast<std::size_t>(substep)]);
  const T dtT = static_cast<T>(dt);
  const Shape& sh = state.shape();
  for (int f = 0; f < state.count(); ++f) {
    auto& sf = state.field(f);
    auto& wf = w.field(f);
    const auto& rf = rhs.field(f);
    for (long long k = 0; k < sh.nz; ++k)
      for (long long j = 0; j < sh.ny; ++j)
        for (long long i = 0; i < sh.nx; ++i) {
          T& wv = wf.at(i, j, k);
          wv = (substep == 0 ? T(0) : a * wv) + dtT * rf.at(i, j, k);
          sf.at(i, j, k) += b * wv;
        }
  }
}

template <typename T>
void rk3_step(FieldSet<T>& state, FieldSet<T>& w, FieldSet<T>& rhs, double dt,
              const FusedKernel& kernel, const TilePlan& plan, const RunParams& params) {
  for (int s = 0; s < 3; ++s) rk3_substep(state, w, rhs, s, dt, kernel, plan, params);
}

}  // namespace stenfuse
