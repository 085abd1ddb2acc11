// Independent oracles used by the test suite. These deliberately avoid the
// library's own code paths: the closure oracle is a plain bisection, the
// eigenvalue oracles go through Eigen, and the flux/pressure oracles are
// re-derived from the formulas by hand.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <random>

#include "twofluid/grid.hpp"
#include "twofluid/linalg.hpp"

namespace oracles {

/// Bisection solve of (Z - R) Z^{g-1} = Q on the excess variable, 200
/// halvings, no Newton anywhere.
inline double bisect_Z(double R, double Q, double gamma) {
  if (Q == 0.0) return R;
  if (R == 0.0) return std::pow(Q, 1.0 / gamma);
  double lo = 0.0;
  double hi = std::max(2.0 * R, std::pow(2.0 * Q, 1.0 / gamma)) - R;
  auto f = [&](double d) { return d * std::pow(R + d, gamma - 1.0) - Q; };
  while (f(hi) < 0.0) hi *= 1.0 + 1e-10;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return R + 0.5 * (lo + hi);
}

/// Dense generalized symmetric eigenvalue oracle via Eigen, ascending.
inline std::array<double, 5> generalized_eig5(const twofluid::Mat<5>& a,
                                              const twofluid::Mat<5>& b) {
  Eigen::Matrix<double, 5, 5> ea, eb;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      ea(i, j) = a[i][j];
      eb(i, j) = b[i][j];
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> solver(ea, eb);
  std::array<double, 5> out{};
  for (int i = 0; i < 5; ++i) out[i] = solver.eigenvalues()(i);
  return out;
}

/// Dense symmetric 3x3 eigenvalue oracle via Eigen, largest eigenvalue.
inline double lambda_max_eigen(const twofluid::Mat<3>& m) {
  Eigen::Matrix3d em;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) em(i, j) = m[i][j];
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(em);
  return solver.eigenvalues()(2);
}

/// Independently coded exact flux: u = m / (R+Q), then
/// (R u.n, Q u.n, m (u.n) + p n) written out longhand.
inline std::array<double, 5> flux_by_hand(double R, double Q, const twofluid::Vec3& m,
                                          const twofluid::Vec3& n, double p) {
  const double rho = R + Q;
  const double un = (m[0] * n[0] + m[1] * n[1] + m[2] * n[2]) / rho;
  return {R * un, Q * un, m[0] * un + p * n[0], m[1] * un + p * n[1], m[2] * un + p * n[2]};
}

/// Liquid-gas pressure re-derived independently: p/C is the positive root
/// of y^2 + 2by - c = 0, evaluated through the rationalized quadratic
/// formula when b >= 0 and the direct one otherwise.
inline double liquid_gas_by_quadratic(double R, double Q, double C, double k0, double a0) {
  const double b = k0 - R - a0 * Q;
  const double c = 4.0 * k0 * a0 * Q;
  const double disc = std::sqrt(b * b + c);
  if (b < 0.0) return C * (disc - b);
  return (b + disc) == 0.0 ? 0.0 : C * (c / (b + disc));
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(unsigned long seed) : gen(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(gen));
  }
  double gauss() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
  twofluid::Vec3 unit_vector() {
    twofluid::Vec3 v{gauss(), gauss(), gauss()};
    const double n = twofluid::norm3(v);
    return {v[0] / n, v[1] / n, v[2] / n};
  }
};

}  // namespace oracles
