#pragma once

#include <array>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace twofluid {

using Vec3 = std::array<double, 3>;

template <std::size_t N>
using Mat = std::array<std::array<double, N>, N>;

inline double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm3(const Vec3& v) { return std::sqrt(dot3(v, v)); }

inline Vec3 scale3(const Vec3& v, double c) { return {c * v[0], c * v[1], c * v[2]}; }

inline Vec3 add3(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

/// Deterministic pairwise summation; independent of thread count and
/// reproducible across runs for fixed input order.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 16) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t h = x.size() / 2;
  return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

template <std::size_t N>
double frobenius_norm(const Mat<N>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) s += a[i][j] * a[i][j];
  return std::sqrt(s);
}

template <std::size_t N>
double max_asymmetry(const Mat<N>& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) m = std::max(m, std::abs(a[i][j] - a[j][i]));
  return m;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending. Small fixed sizes only; converges quadratically once the
/// off-diagonal mass is small.
template <std::size_t N>
std::array<double, N> jacobi_eigenvalues(Mat<N> a, int max_sweeps = 64) {
  const double scale = std::max(1.0, frobenius_norm(a));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
    if (std::sqrt(off) <= 1e-15 * scale) break;
    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        if (std::abs(a[p][q]) <= 1e-300) continue;
        const double tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::array<double, N> eig{};
  for (std::size_t i = 0; i < N; ++i) eig[i] = a[i][i];
  std::sort(eig.begin(), eig.end());
  return eig;
}

/// Cholesky factor L (lower) of a symmetric positive definite matrix.
/// Throws if a pivot is not strictly positive.
template <std::size_t N>
Mat<N> cholesky(const Mat<N>& a) {
  Mat<N> l{};
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (!(s > 0.0)) throw std::invalid_argument("cholesky: matrix not positive definite");
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  return l;
}

/// Eigenvalues of the symmetric-definite pencil (A, B): solutions of
/// det(A - lambda B) = 0 with B spd. Reduced to a standard symmetric
/// problem through the Cholesky factor of B.
template <std::size_t N>
std::array<double, N> generalized_eigenvalues(const Mat<N>& a, const Mat<N>& b) {
  const Mat<N> l = cholesky(b);
  // C = L^{-1} A L^{-T}, via forward substitutions on both sides.
  Mat<N> y{};  // Y = L^{-1} A
  for (std::size_t col = 0; col < N; ++col) {
    for (std::size_t i = 0; i < N; ++i) {
      double s = a[i][col];
      for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * y[k][col];
      y[i][col] = s / l[i][i];
    }
  }
  Mat<N> c{};  // C = Y L^{-T}  <=>  C^T = L^{-1} Y^T
  for (std::size_t row = 0; row < N; ++row) {
    for (std::size_t i = 0; i < N; ++i) {
      double s = y[row][i];
      for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * c[row][k];
      c[row][i] = s / l[i][i];
    }
  }
  // Symmetrize away rounding noise before the Jacobi sweep.
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      const double m = 0.5 * (c[i][j] + c[j][i]);
      c[i][j] = c[j][i] = m;
    }
  return jacobi_eigenvalues(c);
}

/// Eigenvalues of a symmetric 3x3 matrix, ascending. Closed-form
/// trigonometric solution of the characteristic cubic; falls back to
/// Jacobi when the discriminant is nearly degenerate, where acos loses
/// accuracy.
inline std::array<double, 3> eigenvalues_sym3(const Mat<3>& a) {
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  if (p1 == 0.0) {
    std::array<double, 3> eig{a[0][0], a[1][1], a[2][2]};
    std::sort(eig.begin(), eig.end());
    return eig;
  }
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) +
                    (a[2][2] - q) * (a[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Mat<3> b = a;
  for (int i = 0; i < 3; ++i) b[i][i] -= q;
  for (auto& row : b)
    for (double& v : row) v /= p;
  const double detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                      b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                      b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  double r = detb / 2.0;
  if (std::abs(r) > 1.0 - 1e-4) return jacobi_eigenvalues(a);
  const double phi = std::acos(r) / 3.0;
  const double e_hi = q + 2.0 * p * std::cos(phi);
  const double e_lo = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double e_mid = 3.0 * q - e_hi - e_lo;
  return {e_lo, e_mid, e_hi};
}

}  // namespace twofluid
