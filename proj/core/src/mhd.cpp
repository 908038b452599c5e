#include "stenfuse/mhd.hpp"

#include <cmath>

namespace stenfuse {

const std::array<const char*, kMhdFields> kMhdFieldNames = {"lnrho", "ux", "uy", "uz",
                                                            "ss",    "ax", "ay", "az"};

void MHDParams::validate() const {
  if (mu0 <= 0) throw config_error("mhd: mu0 must be > 0");
  if (!(cp > cv && cv > 0)) throw config_error("mhd: need cp > cv > 0");
  if (cs0 <= 0 || rho0 <= 0) throw config_error("mhd: cs0 and rho0 must be > 0");
  if (nu < 0 || zeta < 0 || eta < 0 || K < 0)
    throw config_error("mhd: transport coefficients must be >= 0");
}

CoefficientMatrix build_mhd_coefficient_matrix(int accuracy, const std::array<double, 3>& h) {
  const int dims = 3;
  std::vector<StencilKernel> kernels;
  std::vector<RowDescriptor> rows;
  kernels.push_back(identity_kernel(dims));
  rows.push_back({RowOp::value, "value"});
  const RowOp grad_ops[3] = {RowOp::ddx, RowOp::ddy, RowOp::ddz};
  const char* grad_names[3] = {"d/dx", "d/dy", "d/dz"};
  for (int axis = 0; axis < 3; ++axis) {
    kernels.push_back(central_difference(1, accuracy, axis, h[static_cast<std::size_t>(axis)], dims));
    rows.push_back({grad_ops[axis], grad_names[axis]});
  }
  const RowOp diag_ops[3] = {RowOp::dxx, RowOp::dyy, RowOp::dzz};
  const char* diag_names[3] = {"d2/dx2", "d2/dy2", "d2/dz2"};
  for (int axis = 0; axis < 3; ++axis) {
    kernels.push_back(central_difference(2, accuracy, axis, h[static_cast<std::size_t>(axis)], dims));
    rows.push_back({diag_ops[axis], diag_names[axis]});
  }
  kernels.push_back(mixed_partial(0, 1, accuracy, h[0], h[1], dims));
  rows.push_back({RowOp::dxy, "d2/dxdy"});
  kernels.push_back(mixed_partial(1, 2, accuracy, h[1], h[2], dims));
  rows.push_back({RowOp::dyz, "d2/dydz"});
  kernels.push_back(mixed_partial(0, 2, accuracy, h[0], h[2], dims));
  rows.push_back({RowOp::dxz, "d2/dxdz"});

  return CoefficientMatrix::from_kernels(kernels, rows, accuracy / 2, dims);
}

MhdPhi::MhdPhi(MHDParams params) : p_(params) { p_.validate(); }

template <typename T>
void MhdPhi::rhs(const T* q, int nf, T* out) const {
  auto Q = [&](int row, int field) -> T { return q[row * nf + field]; };

  const T lnrho = Q(R_VAL, F_LNRHO);
  const T ss = Q(R_VAL, F_SS);
  const T u[3] = {Q(R_VAL, F_UX), Q(R_VAL, F_UY), Q(R_VAL, F_UZ)};

  const T glnrho[3] = {Q(R_DX, F_LNRHO), Q(R_DY, F_LNRHO), Q(R_DZ, F_LNRHO)};
  const T gss[3] = {Q(R_DX, F_SS), Q(R_DY, F_SS), Q(R_DZ, F_SS)};

  // gu[i][j] = d u_i / d x_j
  T gu[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gu[i][j] = Q(R_DX + j, F_UX + i);
  const T divu = gu[0][0] + gu[1][1] + gu[2][2];

  auto lap = [&](int f) -> T { return Q(R_DXX, f) + Q(R_DYY, f) + Q(R_DZZ, f); };
  const T lap_lnrho = lap(F_LNRHO);
  const T lap_ss = lap(F_SS);
  const T lap_u[3] = {lap(F_UX), lap(F_UY), lap(F_UZ)};
  const T lap_a[3] = {lap(F_AX), lap(F_AY), lap(F_AZ)};

  auto graddiv = [&](int fx, int fy, int fz, T* gd) {
    gd[0] = Q(R_DXX, fx) + Q(R_DXY, fy) + Q(R_DXZ, fz);
    gd[1] = Q(R_DXY, fx) + Q(R_DYY, fy) + Q(R_DYZ, fz);
    gd[2] = Q(R_DXZ, fx) + Q(R_DYZ, fy) + Q(R_DZZ, fz);
  };
  T gdu[3], gda[3];
  graddiv(F_UX, F_UY, F_UZ, gdu);
  graddiv(F_AX, F_AY, F_AZ, gda);

  // B = curl A; j = mu0^-1 curl B = mu0^-1 (grad div A - lap A)
  const T B[3] = {Q(R_DY, F_AZ) - Q(R_DZ, F_AY), Q(R_DZ, F_AX) - Q(R_DX, F_AZ),
                  Q(R_DX, F_AY) - Q(R_DY, F_AX)};
  const T inv_mu0 = T(1) / static_cast<T>(p_.mu0);
  const T jc[3] = {(gda[0] - lap_a[0]) * inv_mu0, (gda[1] - lap_a[1]) * inv_mu0,
                   (gda[2] - lap_a[2]) * inv_mu0};

  // Traceless rate-of-shear: S_ij = (d_j u_i + d_i u_j)/2 - delta_ij div(u)/3
  const T half = static_cast<T>(0.5);
  const T third = T(1) / T(3);
  T S[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      S[i][j] = half * (gu[i][j] + gu[j][i]) - (i == j ? third * divu : T(0));
  T SS2 = T(0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) SS2 += S[i][j] * S[i][j];
  T Sglnrho[3];
  for (int i = 0; i < 3; ++i)
    Sglnrho[i] = S[i][0] * glnrho[0] + S[i][1] * glnrho[1] + S[i][2] * glnrho[2];

  // Ideal-gas closure: cs^2 and T scale with exp(gamma s/cp + (gamma-1) ln(rho/rho0)).
  const T gam = static_cast<T>(p_.gamma());
  const T cp = static_cast<T>(p_.cp);
  const T rho = std::exp(lnrho);
  const T expo = gam * ss / cp + (gam - T(1)) * (lnrho - static_cast<T>(std::log(p_.rho0)));
  const T egain = std::exp(expo);
  const T cs2 = static_cast<T>(p_.cs0 * p_.cs0) * egain;
  const T TT = static_cast<T>(p_.resolved_T0()) * egain;

  // ln T derivatives by the chain rule (constant-K conduction uses
  // div(K grad T) = K T (lap lnT + |grad lnT|^2)).
  T glnT[3];
  for (int i = 0; i < 3; ++i) glnT[i] = (gam / cp) * gss[i] + (gam - T(1)) * glnrho[i];
  const T lap_lnT = (gam / cp) * lap_ss + (gam - T(1)) * lap_lnrho;
  const T glnT2 = glnT[0] * glnT[0] + glnT[1] * glnT[1] + glnT[2] * glnT[2];

  const T nu = static_cast<T>(p_.nu);
  const T zeta = static_cast<T>(p_.zeta);
  const T eta = static_cast<T>(p_.eta);

  // Continuity: D lnrho / Dt = -div u
  out[F_LNRHO] = -(u[0] * glnrho[0] + u[1] * glnrho[1] + u[2] * glnrho[2]) - divu;

  // Momentum
  const T jxB[3] = {jc[1] * B[2] - jc[2] * B[1], jc[2] * B[0] - jc[0] * B[2],
                    jc[0] * B[1] - jc[1] * B[0]};
  for (int i = 0; i < 3; ++i) {
    const T adv = u[0] * gu[i][0] + u[1] * gu[i][1] + u[2] * gu[i][2];
    const T pressure = cs2 * (gss[i] / cp + glnrho[i]);
    T visc;
    if (p_.literal_shear_term)
      visc = nu * (lap_u[i] + third * gdu[i]) + T(2) * Sglnrho[i];
    else
      visc = nu * (lap_u[i] + third * gdu[i] + T(2) * Sglnrho[i]);
    out[F_UX + i] = -adv - pressure + jxB[i] / rho + visc + zeta * gdu[i];
  }

  // Entropy: rho T Ds/Dt = H - C + div(K grad T) + eta mu0 j^2
  //                        + 2 rho nu S:S + zeta rho (div u)^2
  const T j2 = jc[0] * jc[0] + jc[1] * jc[1] + jc[2] * jc[2];
  const T heating = static_cast<T>(p_.heat) - static_cast<T>(p_.cool) +
                    static_cast<T>(p_.K) * TT * (lap_lnT + glnT2) +
                    eta * static_cast<T>(p_.mu0) * j2 + T(2) * rho * nu * SS2 +
                    zeta * rho * divu * divu;
  out[F_SS] = -(u[0] * gss[0] + u[1] * gss[1] + u[2] * gss[2]) + heating / (rho * TT);

  // Induction: dA/dt = u x B + eta lap A
  out[F_AX] = (u[1] * B[2] - u[2] * B[1]) + eta * lap_a[0];
  out[F_AY] = (u[2] * B[0] - u[0] * B[2]) + eta * lap_a[1];
  out[F_AZ] = (u[0] * B[1] - u[1] * B[0]) + eta * lap_a[2];
}

void MhdPhi::eval(const double* q, int, int nf, Coord, double* out) const { rhs(q, nf, out); }
void MhdPhi::eval(const float* q, int, int nf, Coord, float* out) const { rhs(q, nf, out); }

std::vector<QRef> MhdPhi::used_entries(int output) const {
  std::vector<QRef> refs;
  auto add = [&](int row, int field) { refs.push_back({row, field}); };
  auto add_all_first = [&](int field) {
    add(R_DX, field);
    add(R_DY, field);
    add(R_DZ, field);
  };
  auto add_diag = [&](int field) {
    add(R_DXX, field);
    add(R_DYY, field);
    add(R_DZZ, field);
  };
  // Mixed-partial reads follow the grad-div structure: dxy touches the
  // x/y components, dyz the y/z components, dxz the x/z components.
  auto add_graddiv = [&](int fx, int fy, int fz) {
    add_diag(fx);
    add_diag(fy);
    add_diag(fz);
    add(R_DXY, fx);
    add(R_DXY, fy);
    add(R_DYZ, fy);
    add(R_DYZ, fz);
    add(R_DXZ, fx);
    add(R_DXZ, fz);
  };

  if (output == F_LNRHO) {
    for (int c = 0; c < 3; ++c) add(R_VAL, F_UX + c);
    add_all_first(F_LNRHO);
    add(R_DX, F_UX);
    add(R_DY, F_UY);
    add(R_DZ, F_UZ);
  } else if (output >= F_UX && output <= F_UZ) {
    add(R_VAL, F_LNRHO);
    add(R_VAL, F_SS);
    for (int c = 0; c < 3; ++c) add(R_VAL, F_UX + c);
    for (int f = 0; f < kMhdFields; ++f) add_all_first(f);
    add_graddiv(F_UX, F_UY, F_UZ);
    add_graddiv(F_AX, F_AY, F_AZ);
  } else if (output == F_SS) {
    add(R_VAL, F_LNRHO);
    add(R_VAL, F_SS);
    for (int c = 0; c < 3; ++c) add(R_VAL, F_UX + c);
    add_all_first(F_LNRHO);
    add_all_first(F_SS);
    for (int c = 0; c < 3; ++c) add_all_first(F_UX + c);
    add_diag(F_LNRHO);
    add_diag(F_SS);
    add_graddiv(F_AX, F_AY, F_AZ);
  } else {
    for (int c = 0; c < 3; ++c) add(R_VAL, F_UX + c);
    for (int c = 0; c < 3; ++c) add_all_first(F_AX + c);
    add_diag(output);
  }
  return refs;
}

double MhdPhi::flops_per_point() const {
  // Hand count of the arithmetic in rhs(), with exp/log weighted as one
  // operation each. An estimate for intensity metrics, not a contract.
  return 210.0;
}

std::string MhdPhi::name() const {
  return p_.literal_shear_term ? "mhd[shear=literal]" : "mhd[shear=viscous]";
}

FusedKernel make_mhd_kernel(int accuracy, const std::array<double, 3>& h,
                            const MHDParams& params) {
  CoefficientMatrix A = build_mhd_coefficient_matrix(accuracy, h);
  return FusedKernel(std::move(A), std::make_shared<MhdPhi>(params), kMhdFields);
}

}  // namespace stenfuse
