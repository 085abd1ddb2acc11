// End-to-end: a smooth run feeds the potential solves, whose outputs feed
// the Lambda selection, and the resulting pointwise inequality is strict
// everywhere.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "twofluid/helmholtz.hpp"
#include "twofluid/solver.hpp"
#include "twofluid/subsolution.hpp"

using namespace twofluid;

TEST_CASE("run -> potentials -> Lambda selection -> strict gaps") {
  const int n = 64;
  const Grid g = Grid::make_1d(n, 0.0, 1.0);
  ConservedField f = ConservedField::zeros(g);
  for (int i = 0; i < n; ++i) {
    const double rho = 1.0 + 0.15 * std::sin(2.0 * M_PI * g.cx(i));
    f.R[i] = 0.6 * rho;
    f.Q[i] = 0.4 * rho;
    f.mx[i] = 0.1 * rho * std::sin(2.0 * M_PI * g.cx(i));
  }
  SolverConfig cfg;
  cfg.t_end = 0.05;
  cfg.bc = Bc::periodic;
  cfg.output_stride = 1;
  cfg.fixed_dt = 5e-4;
  const RunResult rr = run_simulation(f, cfg);
  REQUIRE(rr.snapshots.size() >= 3);

  std::vector<double> times;
  std::vector<std::vector<double>> r_snaps;
  for (const Snapshot& s : rr.snapshots) {
    times.push_back(s.t);
    r_snaps.push_back(s.field.R);
  }
  // Mass conservation keeps the Neumann data compatible; this must not throw.
  const PotentialSeries ps = potential_from_run(g, times, r_snaps, cfg.bc, 1e-10);

  // Assemble pointwise fields at a mid-trace time.
  const std::size_t mid = rr.snapshots.size() / 2;
  const ConservedField& fm = rr.snapshots[mid].field;
  const VectorField grad_cell =
      faces_to_cell(face_gradient(ps.psi[mid], cfg.bc));
  SubsolutionFields fields;
  for (int i = 0; i < n; ++i) {
    fields.v0.push_back({fm.mx[i] - grad_cell.x[i], 0.0, 0.0});
    fields.gradPsi.push_back({grad_cell.x[i], 0.0, 0.0});
    fields.dtPsi.push_back(ps.dpsi_dt[mid].v[i]);
    fields.R.push_back(fm.R[i]);
    fields.Q.push_back(fm.Q[i]);
  }
  const PhaseParams pp = PhaseParams::make(2.0, 2.0);
  const double lambda = min_lambda(fields, pp, 1e-6);
  for (int i = 0; i < n; ++i) {
    SubsolutionSample s;
    s.v = fields.v0[i];
    s.gradPsi = fields.gradPsi[i];
    s.dtPsi = fields.dtPsi[i];
    s.R = fields.R[i];
    s.Q = fields.Q[i];
    s.Lambda = lambda;
    CHECK(subsolution_gap(s, pp) > 0.0);
    CHECK(kinetic_energy_bound(s, pp) > 0.0);
  }
}
