#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "twofluid/closure.hpp"
#include "twofluid/linalg.hpp"

namespace twofluid {

/// State in the symmetrizing variables U = (p, u, s): pressure, velocity,
/// and the mass ratio s = R/Q, together with the total density rho = R+Q.
struct PrimitiveState {
  double p;
  Vec3 u;
  double s;
  double rho;
};

/// The four symmetric 5x5 coefficient matrices of the first-order system
/// A0 dU/dt + sum_i Ai dU/dx_i = 0 in the variables (p, u1, u2, u3, s).
struct SymmetricSystem {
  Mat<5> A0, A1, A2, A3;
};

/// Change of variables (R, Q) -> (rho, s) = (R+Q, R/Q).
inline std::pair<double, double> to_rho_s(const MixtureState& st) {
  if (!(st.Q > 0.0)) throw std::invalid_argument("to_rho_s: Q must be positive");
  if (!(st.R > 0.0)) throw std::invalid_argument("to_rho_s: R must be positive");
  return {st.R + st.Q, st.R / st.Q};
}

/// Algebraic inverse of to_rho_s.
inline MixtureState from_rho_s(double rho, double s) {
  if (!(rho > 0.0 && s > 0.0))
    throw std::invalid_argument("from_rho_s: rho and s must be positive");
  return {rho * s / (1.0 + s), rho / (1.0 + s)};
}

/// Assemble the symmetric system at a state point. The time matrix is
/// diag(1/(rho c^2), rho, rho, rho, 1) with c^2 = dp/drho at fixed s; each
/// space matrix is u_i times that diagonal plus a unit coupling between
/// the pressure row and the i-th velocity row.
inline SymmetricSystem assemble(const PrimitiveState& st, double dp_drho) {
  if (!(st.rho > 0.0)) throw std::invalid_argument("assemble: rho must be positive");
  if (!(dp_drho > 0.0)) throw std::invalid_argument("assemble: dp/drho must be positive");
  SymmetricSystem sys{};
  const double a_p = 1.0 / (st.rho * dp_drho);
  const double diag[5] = {a_p, st.rho, st.rho, st.rho, 1.0};
  for (int i = 0; i < 5; ++i) sys.A0[i][i] = diag[i];
  Mat<5>* space[3] = {&sys.A1, &sys.A2, &sys.A3};
  for (int axis = 0; axis < 3; ++axis) {
    Mat<5>& a = *space[axis];
    for (int i = 0; i < 5; ++i) a[i][i] = st.u[axis] * diag[i];
    a[0][1 + axis] = 1.0;
    a[1 + axis][0] = 1.0;
  }
  return sys;
}

/// Characteristic speeds in direction n (|n| = 1): the generalized
/// eigenvalues of sum_i n_i Ai relative to A0, sorted ascending. For the
/// assembled system these are u.n (three times) and u.n +- sqrt(dp/drho).
inline std::array<double, 5> char_speeds(const SymmetricSystem& sys, const Vec3& n) {
  if (std::abs(norm3(n) - 1.0) > 1e-12)
    throw std::invalid_argument("char_speeds: direction must be a unit vector");
  Mat<5> a{};
  const Mat<5>* space[3] = {&sys.A1, &sys.A2, &sys.A3};
  for (int axis = 0; axis < 3; ++axis)
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) a[i][j] += n[axis] * (*space[axis])[i][j];
  // cholesky() rejects a non-positive-definite A0.
  return generalized_eigenvalues(a, sys.A0);
}

}  // namespace twofluid
