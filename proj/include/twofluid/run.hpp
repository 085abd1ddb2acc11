#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "twofluid/config.hpp"
#include "twofluid/csv.hpp"
#include "twofluid/energy.hpp"
#include "twofluid/solver.hpp"

namespace twofluid {

inline RunResult run_from_config(const RunConfig& cfg) {
  cfg.require_run_ready();
  const ConservedField ic = make_piecewise_ic(cfg.ic, *cfg.grid);
  return run_simulation(ic, cfg.solver);
}

/// Snapshot table: t,x[,y],R,Q,mx[,my],p,Z with one row per cell per
/// snapshot. Z is 0 for pressure laws without a closure variable.
inline void write_snapshots_csv(const std::string& path, const RunResult& run,
                                const EosSpec& eos) {
  if (run.snapshots.empty()) throw std::invalid_argument("no snapshots to write");
  const Grid& g = run.snapshots.front().field.grid;
  std::vector<std::string> cols;
  if (g.dim == 2)
    cols = {"t", "x", "y", "R", "Q", "mx", "my", "p", "Z"};
  else
    cols = {"t", "x", "R", "Q", "mx", "p", "Z"};
  CsvWriter w(path, cols);
  for (const Snapshot& s : run.snapshots) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int idx = g.index(i, j);
        const PressurePoint pt = eos_evaluate(eos, {s.field.R[idx], s.field.Q[idx]});
        if (g.dim == 2)
          w.row({s.t, g.cx(i), g.cy(j), s.field.R[idx], s.field.Q[idx], s.field.mx[idx],
                 s.field.my[idx], pt.p, pt.Z});
        else
          w.row({s.t, g.cx(i), s.field.R[idx], s.field.Q[idx], s.field.mx[idx], pt.p, pt.Z});
      }
  }
}

/// Rebuild snapshots from the CSV schema above onto the given grid.
inline std::vector<Snapshot> read_snapshots_csv(const std::string& path, const Grid& g) {
  const CsvTable table = read_csv(path);
  const bool two_d = table.column_index("y") >= 0;
  if ((g.dim == 2) != two_d)
    throw std::runtime_error(path + ": snapshot dimensionality does not match the grid");
  for (const char* col : {"t", "x", "R", "Q", "mx"})
    if (table.column_index(col) < 0)
      throw std::runtime_error(path + ": missing column '" + std::string(col) + "'");
  const int ct = table.column_index("t"), cx = table.column_index("x"),
            cy = table.column_index("y"), cR = table.column_index("R"),
            cQ = table.column_index("Q"), cmx = table.column_index("mx"),
            cmy = table.column_index("my");
  if (two_d && cmy < 0) throw std::runtime_error(path + ": missing column 'my'");

  const int n = g.cells();
  if (table.rows.empty() || table.rows.size() % n != 0)
    throw std::runtime_error(path + ": row count is not a multiple of the cell count");
  std::vector<Snapshot> out;
  for (std::size_t base = 0; base < table.rows.size(); base += n) {
    Snapshot s{table.rows[base][ct], ConservedField::zeros(g)};
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const auto& row = table.rows[base + static_cast<std::size_t>(g.index(i, j))];
        if (std::abs(row[ct] - s.t) > 1e-12 * std::max(1.0, std::abs(s.t)))
          throw std::runtime_error(path + ": snapshot block mixes times");
        if (std::abs(row[cx] - g.cx(i)) > 1e-9 * g.dx ||
            (two_d && std::abs(row[cy] - g.cy(j)) > 1e-9 * g.dy))
          throw std::runtime_error(path + ": cell coordinates do not match the grid");
        const int idx = g.index(i, j);
        s.field.R[idx] = row[cR];
        s.field.Q[idx] = row[cQ];
        s.field.mx[idx] = row[cmx];
        if (two_d) s.field.my[idx] = row[cmy];
      }
    out.push_back(std::move(s));
  }
  return out;
}

inline void write_trace_csv(const std::string& path, const RunResult& run) {
  CsvWriter w(path, {"step", "t", "dt", "mass_R", "mass_Q", "energy"});
  for (const TraceRow& r : run.trace)
    w.row({static_cast<double>(r.step), r.t, r.dt, r.mass_R, r.mass_Q, r.energy});
}

inline void write_energy_csv(const std::string& path, const std::vector<EnergyRow>& rows) {
  CsvWriter w(path, {"t", "kinetic", "internal_plus", "internal_minus", "total"});
  for (const EnergyRow& r : rows)
    w.row({r.t, r.e.kinetic, r.e.internal_plus, r.e.internal_minus, r.e.total});
}

}  // namespace twofluid
