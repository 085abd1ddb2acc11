#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "twofluid/closure.hpp"
#include "twofluid/linalg.hpp"

namespace twofluid {

/// Symmetric 3x3 matrix, six independent entries.
struct Sym3 {
  double xx = 0.0, yy = 0.0, zz = 0.0;
  double xy = 0.0, xz = 0.0, yz = 0.0;

  Mat<3> dense() const {
    return {{{xx, xy, xz}, {xy, yy, yz}, {xz, yz, zz}}};
  }
};

/// Traceless symmetric 3x3 matrix: the zz entry is derived, so the trace
/// is zero by construction.
struct TracelessSym3 {
  double xx = 0.0, yy = 0.0;
  double xy = 0.0, xz = 0.0, yz = 0.0;

  double zz() const { return -xx - yy; }
  Sym3 sym() const { return {xx, yy, zz(), xy, xz, yz}; }
};

/// Outer product w (x) w as a symmetric matrix.
inline Sym3 outer(const Vec3& w) {
  return {w[0] * w[0], w[1] * w[1], w[2] * w[2], w[0] * w[1], w[0] * w[2], w[1] * w[2]};
}

/// Traceless part of w (x) w / rho; the maximal-eigenvalue inequality is
/// an equality exactly at this matrix.
inline TracelessSym3 traceless_projection(const Vec3& w, double rho) {
  const double third = dot3(w, w) / (3.0 * rho);
  return {w[0] * w[0] / rho - third, w[1] * w[1] / rho - third, w[0] * w[1] / rho,
          w[0] * w[2] / rho, w[1] * w[2] / rho};
}

/// Largest eigenvalue of a symmetric 3x3 matrix (closed form with an
/// iterative fallback near degenerate spectra, see eigenvalues_sym3).
inline double lambda_max(const Sym3& m) { return eigenvalues_sym3(m.dense())[2]; }

inline double lambda_max(const Mat<3>& m) {
  if (max_asymmetry(m) > 0.0) throw std::invalid_argument("lambda_max: matrix not symmetric");
  return eigenvalues_sym3(m)[2];
}

/// The convex function E(v, U) = lambda_max(v (x) v - U) on vectors and
/// traceless symmetric matrices.
inline double convex_E(const Vec3& v, const TracelessSym3& u) {
  const Sym3 vv = outer(v);
  const Sym3 us = u.sym();
  return lambda_max(Sym3{vv.xx - us.xx, vv.yy - us.yy, vv.zz - us.zz, vv.xy - us.xy,
                         vv.xz - us.xz, vv.yz - us.yz});
}

/// One pointwise instance of the subsolution inequality.
struct SubsolutionSample {
  Vec3 v{0.0, 0.0, 0.0};        // solenoidal momentum part
  Vec3 gradPsi{0.0, 0.0, 0.0};  // gradient part
  double dtPsi = 0.0;
  double R = 0.0;
  double Q = 0.0;
  TracelessSym3 U;
  double Lambda = 0.0;
};

/// Kinetic-energy bound e = Lambda - (3/2)(Z^{gamma_plus} + dPsi/dt) at a
/// sample's state.
inline double kinetic_energy_bound(const SubsolutionSample& s, const PhaseParams& pp) {
  const ClosureResult c = solve_Z({s.R, s.Q}, pp);
  return s.Lambda - 1.5 * (c.p + s.dtPsi);
}

/// Slack in the strict subsolution inequality:
///   e - (3/2) lambda_max[ (v + grad Psi) (x) (v + grad Psi) / (R+Q) - U ].
/// Positive means the sample is a strict subsolution point.
inline double subsolution_gap(const SubsolutionSample& s, const PhaseParams& pp) {
  const double rho = s.R + s.Q;
  if (!(rho > 0.0)) throw std::invalid_argument("subsolution_gap: R + Q must be positive");
  const Vec3 w = add3(s.v, s.gradPsi);
  const Sym3 ww = outer(w);
  const Sym3 us = s.U.sym();
  const Sym3 m{ww.xx / rho - us.xx, ww.yy / rho - us.yy, ww.zz / rho - us.zz,
               ww.xy / rho - us.xy, ww.xz / rho - us.xz, ww.yz / rho - us.yz};
  return kinetic_energy_bound(s, pp) - 1.5 * lambda_max(m);
}

/// Pointwise fields feeding the Lambda selection: candidate solenoidal
/// field, potential gradient and time derivative, and densities, all on
/// the same sample set.
struct SubsolutionFields {
  std::vector<Vec3> v0;
  std::vector<Vec3> gradPsi;
  std::vector<double> dtPsi;
  std::vector<double> R;
  std::vector<double> Q;

  std::size_t size() const { return v0.size(); }
  void validate() const {
    const std::size_t n = v0.size();
    if (n == 0) throw std::invalid_argument("subsolution fields: empty grid");
    if (gradPsi.size() != n || dtPsi.size() != n || R.size() != n || Q.size() != n)
      throw std::invalid_argument("subsolution fields: size mismatch");
  }
};

/// Per-point constant that would make the inequality tight with U = 0:
///   (3/2) lambda_max[(v0+gradPsi)(x)(v0+gradPsi)/(R+Q)] + (3/2)(Z^{g+} + dtPsi).
inline double lambda_needed_at(const SubsolutionFields& f, std::size_t i,
                               const PhaseParams& pp) {
  const double rho = f.R[i] + f.Q[i];
  if (!(rho > 0.0)) throw std::invalid_argument("lambda selection: R + Q must be positive");
  const Vec3 w = add3(f.v0[i], f.gradPsi[i]);
  // lambda_max of the rank-one matrix w (x) w / rho is |w|^2 / rho.
  const double lam = dot3(w, w) / rho;
  const ClosureResult c = solve_Z({f.R[i], f.Q[i]}, pp);
  return 1.5 * lam + 1.5 * (c.p + f.dtPsi[i]);
}

/// Select the constant making the strict inequality hold with margin at
/// every sample: (1 + margin) * max_i lambda_needed_at(i).
inline double min_lambda(const SubsolutionFields& f, const PhaseParams& pp, double margin) {
  f.validate();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i)
    worst = std::max(worst, lambda_needed_at(f, i, pp));
  if (!(worst > 0.0))
    throw std::invalid_argument("min_lambda: selection requires a positive bound");
  return (1.0 + margin) * worst;
}

/// One space-time quadrature sample of the gap functional.
struct GapSample {
  Vec3 w;      // v + grad Psi
  double rho;  // R + Q
  double e;    // kinetic-energy bound at the point
  double weight = 1.0;
};

/// The functional I = integral of (|w|^2 / (2 rho) - e). Non-positive for
/// subsolution fields; zero exactly when the pointwise kinetic equality
/// holds.
inline double gap_functional_I(std::span<const GapSample> samples) {
  std::vector<double> terms(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const GapSample& s = samples[i];
    terms[i] = s.weight * (0.5 * dot3(s.w, s.w) / s.rho - s.e);
  }
  return pairwise_sum(terms);
}

struct ChiResult {
  double m0_norm;    // |m0| realizing the constant-state kinetic equality
  double threshold;  // minimal admissible chi, (3/2) Z^{gamma_plus}
};

/// Momentum magnitude for the constant-state construction:
///   |m0|^2 / (2 (R+Q)) = chi - (3/2) Z^{gamma_plus}(R, Q).
/// chi below the threshold leaves no real momentum and is rejected.
inline ChiResult chi_and_m0(double R, double Q, const PhaseParams& pp, double chi) {
  if (!(R > 0.0 && Q > 0.0))
    throw std::invalid_argument("chi_and_m0: R and Q must be positive constants");
  const ClosureResult c = solve_Z({R, Q}, pp);
  const double threshold = 1.5 * c.p;
  if (chi < threshold)
    throw std::invalid_argument("chi_and_m0: chi = " + std::to_string(chi) +
                                " is below the admissible threshold (3/2) Z^gamma_plus = " +
                                std::to_string(threshold));
  return {std::sqrt(2.0 * (R + Q) * (chi - threshold)), threshold};
}

/// A single chi that works for every patch of a piecewise-constant state:
/// (1 + margin) times the largest per-patch threshold.
inline double uniform_chi_for_patches(std::span<const MixtureState> patches,
                                      const PhaseParams& pp, double margin) {
  if (patches.empty()) throw std::invalid_argument("uniform chi: no patches");
  double worst = 0.0;
  for (const MixtureState& st : patches) {
    if (!(st.R > 0.0 && st.Q > 0.0))
      throw std::invalid_argument("uniform chi: patch densities must be positive");
    worst = std::max(worst, 1.5 * solve_Z(st, pp).p);
  }
  return (1.0 + margin) * worst;
}

}  // namespace twofluid
