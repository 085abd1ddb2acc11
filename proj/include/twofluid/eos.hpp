#pragma once

#include <stdexcept>

#include "twofluid/closure.hpp"

namespace twofluid {

enum class EosKind { two_fluid, liquid_gas, fluid_particle };

struct EosSpec {
  EosKind kind = EosKind::two_fluid;
  PhaseParams phase = PhaseParams::make(2.0, 2.0);
  LiquidGasParams lg = LiquidGasParams::make(1.0, 1.0, 1.0);
  FluidParticleParams fp = FluidParticleParams::make(1.4, 2.0);
};

/// Pointwise pressure data used by the finite-volume scheme: pressure,
/// acoustic speed squared dp/drho at fixed mass ratio, and the closure
/// variable Z (zero for the laws that do not define one).
struct PressurePoint {
  double p;
  double c2;
  double Z;
};

inline PressurePoint eos_evaluate(const EosSpec& eos, const MixtureState& st) {
  switch (eos.kind) {
    case EosKind::two_fluid: {
      const ClosureResult c = solve_Z(st, eos.phase);
      return {c.p, c.dp_drho_at_fixed_s, c.Z};
    }
    case EosKind::liquid_gas: {
      const LiquidGasEval e = eval_liquid_gas(st, eos.lg);
      const double rho = st.R + st.Q;
      return {e.p, (st.R * e.dp_dR + st.Q * e.dp_dQ) / rho, 0.0};
    }
    case EosKind::fluid_particle: {
      const FluidParticleEval e = eval_fluid_particle(st, eos.fp);
      const double rho = st.R + st.Q;
      return {e.p, (st.R * e.dp_dR + st.Q * e.dp_dQ) / rho, 0.0};
    }
  }
  throw std::logic_error("eos_evaluate: unknown kind");
}

}  // namespace twofluid
