#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "twofluid/eos.hpp"
#include "twofluid/grid.hpp"

namespace twofluid {

/// Field snapshot at one output time.
struct Snapshot {
  double t;
  ConservedField field;
};

struct EnergyBreakdown {
  double kinetic;
  double internal_plus;
  double internal_minus;
  double total;
};

namespace detail {

struct EnergyCell {
  double kinetic;
  double internal_plus;
  double internal_minus;
  double minus_base_direct;  // (Q/(1-alpha))^{gamma_minus}
  double minus_base_alt;     // Z^{gamma_plus}, equal to the above through the closure
};

inline EnergyCell energy_cell(const CellState& c, const PhaseParams& pp) {
  if (!(c.R > 0.0 && c.Q > 0.0))
    throw std::invalid_argument("energy: requires strictly positive R and Q");
  const ClosureResult cl = solve_Z({c.R, c.Q}, pp);
  if (!(cl.excess > 0.0))
    throw std::logic_error("energy: volume fraction reached 1 with Q > 0");
  EnergyCell out{};
  const double rho = c.R + c.Q;
  out.kinetic = 0.5 * dot3(c.m, c.m) / rho;
  // R/alpha = Z and 1 - alpha = (Z - R)/Z; the excess form keeps the
  // complement accurate when alpha is close to 1.
  const double one_minus_alpha = cl.excess / cl.Z;
  out.internal_plus = cl.p * cl.alpha / (pp.gamma_plus - 1.0);
  out.minus_base_direct = std::pow(c.Q * cl.Z / cl.excess, pp.gamma_minus);
  out.minus_base_alt = cl.p;
  out.internal_minus = out.minus_base_direct * one_minus_alpha / (pp.gamma_minus - 1.0);
  return out;
}

}  // namespace detail

/// Total energy of a field: midpoint quadrature of the kinetic and the two
/// internal-energy integrands, with the volume fraction alpha = R/Z taken
/// from the pressure closure cell by cell.
inline EnergyBreakdown total_energy(const ConservedField& f, const PhaseParams& pp) {
  const int n = f.grid.cells();
  std::vector<double> kin(n), ip(n), im(n);
  for (int i = 0; i < n; ++i) {
    const detail::EnergyCell c = detail::energy_cell(f.cell(i), pp);
    kin[i] = c.kinetic;
    ip[i] = c.internal_plus;
    im[i] = c.internal_minus;
  }
  const double vol = f.grid.cell_volume();
  EnergyBreakdown e{};
  e.kinetic = vol * pairwise_sum(kin);
  e.internal_plus = vol * pairwise_sum(ip);
  e.internal_minus = vol * pairwise_sum(im);
  e.total = e.kinetic + e.internal_plus + e.internal_minus;
  return e;
}

/// Largest relative disagreement, over the field, between the two
/// algebraically equal forms of the "-" internal-energy base:
/// (Q/(1-alpha))^{gamma_minus} versus Z^{gamma_plus}. A direct numerical
/// check of the closure identity.
inline double internal_minus_forms_max_dev(const ConservedField& f, const PhaseParams& pp) {
  double worst = 0.0;
  for (int i = 0; i < f.grid.cells(); ++i) {
    const detail::EnergyCell c = detail::energy_cell(f.cell(i), pp);
    worst = std::max(worst,
                     std::abs(c.minus_base_direct - c.minus_base_alt) / c.minus_base_alt);
  }
  return worst;
}

/// Scalar energy used in solver trace rows: the full two-fluid energy when
/// the closure law is active, kinetic energy only for the alternative
/// pressure laws (whose internal energies are not part of this model).
inline double trace_energy(const ConservedField& f, const EosSpec& eos) {
  if (eos.kind == EosKind::two_fluid) return total_energy(f, eos.phase).total;
  const int n = f.grid.cells();
  std::vector<double> kin(n);
  for (int i = 0; i < n; ++i) {
    const CellState c = f.cell(i);
    kin[i] = 0.5 * dot3(c.m, c.m) / (c.R + c.Q);
  }
  return f.grid.cell_volume() * pairwise_sum(kin);
}

struct EnergyRow {
  double t;
  EnergyBreakdown e;
  bool increase_flagged;
};

/// Energy time series along a run. A step is flagged when the total grows
/// by more than `rel_increase_tol` relative to the running scale; the
/// dissipative scheme must not gain energy, so a flag indicates a defect.
inline std::vector<EnergyRow> energy_trace(std::span<const Snapshot> snaps,
                                           const PhaseParams& pp,
                                           double rel_increase_tol = 1e-10) {
  std::vector<EnergyRow> rows;
  rows.reserve(snaps.size());
  double prev = 0.0;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    EnergyRow row{snaps[k].t, total_energy(snaps[k].field, pp), false};
    if (k > 0) {
      const double scale = std::max({std::abs(prev), std::abs(row.e.total), 1e-300});
      row.increase_flagged = (row.e.total - prev) > rel_increase_tol * scale;
    }
    prev = row.e.total;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace twofluid
