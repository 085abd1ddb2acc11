#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace twofluid {

/// Adiabatic exponents of the two phases. gamma is the ratio
/// gamma_plus/gamma_minus that appears in the pressure closure; it is
/// stored once so every consumer sees exactly the same value.
struct PhaseParams {
  double gamma_plus;
  double gamma_minus;
  double gamma;  // gamma_plus / gamma_minus

  static PhaseParams make(double gamma_plus, double gamma_minus) {
    if (!(gamma_plus > 1.0) || !std::isfinite(gamma_plus))
      throw std::invalid_argument("gamma_plus must exceed 1");
    if (!(gamma_minus > 1.0) || !std::isfinite(gamma_minus))
      throw std::invalid_argument("gamma_minus must exceed 1");
    return PhaseParams{gamma_plus, gamma_minus, gamma_plus / gamma_minus};
  }
};

/// Partial densities of the two phases: R for fluid "+", Q for fluid "-".
struct MixtureState {
  double R;
  double Q;
};

struct LiquidGasParams {
  double C_const;
  double k0;
  double a0;

  static LiquidGasParams make(double C_const, double k0, double a0) {
    if (!(C_const > 0.0) || !(k0 > 0.0) || !(a0 > 0.0))
      throw std::invalid_argument("liquid-gas constants must be strictly positive");
    return LiquidGasParams{C_const, k0, a0};
  }
};

struct FluidParticleParams {
  double gamma;
  double beta;

  static FluidParticleParams make(double gamma, double beta) {
    if (!(gamma >= 1.0) || !(beta >= 1.0))
      throw std::invalid_argument("fluid-particle exponents must be >= 1");
    return FluidParticleParams{gamma, beta};
  }
};

/// Output of the implicit pressure closure at one state.
///
/// Z is the phase-"+" density solving (1 - R/Z) Z^gamma = Q with R <= Z.
/// `excess` holds Z - R to full relative precision; when Q is many orders
/// of magnitude below Z^gamma the difference Z - R recomputed from the
/// rounded Z underflows, so the solver keeps the resolved value. All
/// residual and volume-fraction arithmetic downstream should use it.
struct ClosureResult {
  double Z;
  double excess;  // Z - R, kept separately (see above)
  double p;       // Z^{gamma_plus}
  double dZ_dR;
  double dZ_dQ;
  double dp_drho_at_fixed_s;  // sound speed squared
  double alpha;               // volume fraction R/Z
};

/// Residual of the closure relation at a solved state, evaluated in the
/// cancellation-free form (Z - R) Z^{gamma-1} - Q.
inline double closure_residual(const ClosureResult& c, const MixtureState& st,
                               const PhaseParams& pp) {
  return c.excess * std::pow(c.Z, pp.gamma - 1.0) - st.Q;
}

/// Upper end of the root bracket: Z <= max{2R, (2Q)^{1/gamma}}. Pointwise
/// form of the a-priori bound; if Z exceeded it, (1 - R/Z) Z^gamma would
/// already exceed Q.
inline double closure_upper_bound(const MixtureState& st, const PhaseParams& pp) {
  return std::max(2.0 * st.R, std::pow(2.0 * st.Q, 1.0 / pp.gamma));
}

namespace detail {

inline void check_state(const MixtureState& st) {
  if (!std::isfinite(st.R) || !std::isfinite(st.Q))
    throw std::invalid_argument("closure: non-finite partial density");
  if (st.R < 0.0 || st.Q < 0.0)
    throw std::invalid_argument("closure: negative partial density");
}

}  // namespace detail

/// Solve the implicit pressure closure at (R, Q).
///
/// The root of F(Z) = (Z - R) Z^{gamma-1} - Q is located in the bracket
/// [R, max{2R, (2Q)^{1/gamma}}], where F is strictly increasing. The
/// iteration runs in the excess variable D = Z - R (Newton with bisection
/// safeguard), which keeps the residual meaningful even when D is far
/// below the rounding unit of Z. Degenerate states are resolved exactly:
/// Q = 0 gives Z = R, R = 0 gives Z = Q^{1/gamma}. Total vacuum is an
/// error. Derivatives come from implicit differentiation of F.
inline ClosureResult solve_Z(const MixtureState& st, const PhaseParams& pp) {
  detail::check_state(st);
  const double R = st.R, Q = st.Q, g = pp.gamma;
  if (R == 0.0 && Q == 0.0)
    throw std::invalid_argument("closure undefined at total vacuum (R = Q = 0)");

  double Z, D;
  if (Q == 0.0) {
    Z = R;
    D = 0.0;
  } else if (R == 0.0) {
    Z = std::pow(Q, 1.0 / g);
    D = Z;
  } else {
    const double z_hi = closure_upper_bound(st, pp);
    double d_lo = 0.0;
    double d_hi = z_hi - R;
    auto f = [&](double d) { return d * std::pow(R + d, g - 1.0) - Q; };
    // The bracket endpoints satisfy f(0) = -Q < 0 <= f(d_hi) exactly; allow
    // one rounding-level expansion in case the root sits on the boundary.
    for (int k = 0; k < 4 && f(d_hi) < 0.0; ++k) d_hi *= 1.0 + 1e-12;

    const double tol = 0.5e-12 * std::max(1.0, Q);
    // Start from the linearizations of f at the two bracket ends.
    double d = std::min(Q * std::pow(R, 1.0 - g), std::pow(Q, 1.0 / g));
    if (!(d >= d_lo && d <= d_hi)) d = 0.5 * d_hi;

    // Iterate to stagnation, not just to tolerance: downstream finite-
    // difference checks need the residual at rounding level.
    double val = f(d);
    for (int iter = 0; iter < 200 && val != 0.0; ++iter) {
      (val < 0.0 ? d_lo : d_hi) = d;
      const double zg2 = std::pow(R + d, g - 2.0);
      const double slope = zg2 * ((R + d) + (g - 1.0) * d);
      double next = d - val / slope;
      if (!(next > d_lo && next < d_hi)) next = 0.5 * (d_lo + d_hi);
      if (next == d) break;
      d = next;
      val = f(d);
    }
    if (!(std::abs(val) <= tol))
      throw std::runtime_error("closure: root iteration failed to converge, residual " +
                               std::to_string(val));
    D = d;
    Z = R + d;
    if (Z > z_hi) Z = z_hi;  // clip rounding excursions past the proven bound
    if (Z < R) Z = R;
  }

  ClosureResult out{};
  out.Z = Z;
  out.excess = D;
  out.p = std::pow(Z, pp.gamma_plus);
  // Implicit differentiation of F(Z;R,Q) = Z^g - R Z^{g-1} - Q = 0.
  // F'(Z) = Z^{g-2} (g (Z-R) + R), kept in the cancellation-free form.
  const double fprime = std::pow(Z, g - 2.0) * (g * D + R);
  out.dZ_dR = std::pow(Z, g - 1.0) / fprime;
  out.dZ_dQ = 1.0 / fprime;
  const double rho = R + Q;
  out.dp_drho_at_fixed_s =
      pp.gamma_plus * std::pow(Z, pp.gamma_plus - 1.0) * (std::pow(Z, g - 1.0) * R + Q) /
      (fprime * rho);
  out.alpha = (R == 0.0) ? 0.0 : R / Z;
  if (R > 0.0 && Q > 0.0 && !(out.dp_drho_at_fixed_s > 0.0))
    throw std::logic_error("closure: dp/drho at fixed s is not positive");
  return out;
}

/// Liquid-gas pressure law with its partial derivatives.
struct LiquidGasEval {
  double p;
  double dp_dR;
  double dp_dQ;
};

inline LiquidGasEval eval_liquid_gas(const MixtureState& st, const LiquidGasParams& lg) {
  detail::check_state(st);
  const double b = lg.k0 - st.R - lg.a0 * st.Q;
  const double c = 4.0 * lg.k0 * lg.a0 * st.Q;
  const double root = std::sqrt(b * b + c);
  LiquidGasEval out{};
  out.p = lg.C_const * (-b + root);
  if (root > 0.0) {
    out.dp_dR = lg.C_const * (1.0 - b / root);
    out.dp_dQ = lg.C_const * lg.a0 * (1.0 + (2.0 * lg.k0 - b) / root);
  } else {
    // b = 0 and Q = 0: the law is not differentiable; report one-sided zero.
    out.dp_dR = 0.0;
    out.dp_dQ = 0.0;
  }
  return out;
}

inline double pressure_liquid_gas(const MixtureState& st, const LiquidGasParams& lg) {
  return eval_liquid_gas(st, lg).p;
}

struct FluidParticleEval {
  double p;
  double dp_dR;
  double dp_dQ;
};

inline FluidParticleEval eval_fluid_particle(const MixtureState& st,
                                             const FluidParticleParams& fp) {
  detail::check_state(st);
  FluidParticleEval out{};
  out.p = std::pow(st.R, fp.gamma) + std::pow(st.Q, fp.beta);
  out.dp_dR = fp.gamma * std::pow(st.R, fp.gamma - 1.0);
  out.dp_dQ = fp.beta * std::pow(st.Q, fp.beta - 1.0);
  return out;
}

inline double pressure_fluid_particle(const MixtureState& st, const FluidParticleParams& fp) {
  return eval_fluid_particle(st, fp).p;
}

/// Validation harness for the implicit differentiation: compares dZ/dR,
/// dZ/dQ and dp/drho|_s against centered finite differences computed
/// through full closure solves. Returns the largest relative deviation.
inline double closure_derivatives_fd_check(const MixtureState& st, const PhaseParams& pp,
                                           double h) {
  if (!(st.R > 0.0 && st.Q > 0.0))
    throw std::invalid_argument("fd check requires strictly positive R, Q");
  if (!(h > 0.0 && h < 0.5 * std::min(st.R, st.Q)))
    throw std::invalid_argument("fd check: step too large for the state");
  const ClosureResult base = solve_Z(st, pp);

  const double fd_dZ_dR =
      (solve_Z({st.R + h, st.Q}, pp).Z - solve_Z({st.R - h, st.Q}, pp).Z) / (2.0 * h);
  const double fd_dZ_dQ =
      (solve_Z({st.R, st.Q + h}, pp).Z - solve_Z({st.R, st.Q - h}, pp).Z) / (2.0 * h);
  // Scale both densities by (rho +- h)/rho: the ratio s = R/Q is preserved
  // exactly, so this is a derivative along the fixed-s ray.
  const double rho = st.R + st.Q;
  const double up = (rho + h) / rho, dn = (rho - h) / rho;
  const double fd_dp_drho =
      (solve_Z({st.R * up, st.Q * up}, pp).p - solve_Z({st.R * dn, st.Q * dn}, pp).p) /
      (2.0 * h);

  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
  };
  double err = rel(base.dZ_dR, fd_dZ_dR);
  err = std::max(err, rel(base.dZ_dQ, fd_dZ_dQ));
  err = std::max(err, rel(base.dp_drho_at_fixed_s, fd_dp_drho));
  return err;
}

}  // namespace twofluid
