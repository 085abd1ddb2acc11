#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "twofluid/solver.hpp"

using namespace twofluid;

namespace {

ConservedField sod_field(int n) {
  const Grid g = Grid::make_1d(n, 0.0, 1.0);
  PiecewiseConstantIC ic{{Patch{"left", 0.0, 0.5, 0.0, 1.0, 0.5, 0.5},
                          Patch{"right", 0.5, 1.0, 0.0, 1.0, 0.0625, 0.0625}}};
  return make_piecewise_ic(ic, g);
}

ConservedField constant_field_2d(int n) {
  const Grid g = Grid::make_2d(n, n, 0.0, 1.0, 0.0, 1.0);
  PiecewiseConstantIC ic{{Patch{"all", 0.0, 1.0, 0.0, 1.0, 1.0, 2.0, {0.3, -0.1, 0.0}}}};
  return make_piecewise_ic(ic, g);
}

double max_field_diff(const ConservedField& a, const ConservedField& b) {
  double m = 0.0;
  for (int i = 0; i < a.grid.cells(); ++i) {
    m = std::max(m, std::abs(a.R[i] - b.R[i]));
    m = std::max(m, std::abs(a.Q[i] - b.Q[i]));
    m = std::max(m, std::abs(a.mx[i] - b.mx[i]));
    if (a.grid.dim == 2) m = std::max(m, std::abs(a.my[i] - b.my[i]));
  }
  return m;
}

}  // namespace

TEST_CASE("physical flux: closed case and independent re-evaluation") {
  EosSpec eos;  // two_fluid, gamma 2/2
  const auto f = physical_flux({1.0, 1.0, {0.0, 0.0, 0.0}}, {1.0, 0.0, 0.0}, eos);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == 0.0);
  CHECK(f[2] == 4.0);  // p = (R+Q)^2
  CHECK(f[3] == 0.0);

  oracles::Rng rng(301);
  for (int k = 0; k < 300; ++k) {
    const double R = rng.log_uniform(0.1, 10.0), Q = rng.log_uniform(0.1, 10.0);
    const Vec3 m{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Vec3 n = rng.unit_vector();
    const double p = eos_evaluate(eos, {R, Q}).p;
    const auto mine = physical_flux({R, Q, m}, n, eos);
    const auto oracle = oracles::flux_by_hand(R, Q, m, n, p);
    for (int i = 0; i < 5; ++i)
      CHECK(mine[i] == Catch::Approx(oracle[i]).margin(1e-13).epsilon(1e-13));
  }
  CHECK_THROWS_AS(physical_flux({0.0, 1.0, {0, 0, 0}}, {1, 0, 0}, eos),
                  std::invalid_argument);
}

TEST_CASE("galilean identity of the convective part") {
  EosSpec eos;
  oracles::Rng rng(302);
  for (int k = 0; k < 200; ++k) {
    const double R = rng.log_uniform(0.1, 10.0), Q = rng.log_uniform(0.1, 10.0);
    const double rho = R + Q;
    const Vec3 m{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vec3 n = rng.unit_vector();
    const Vec3 w{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vec3 mb = add3(m, scale3(w, rho));
    const auto base = physical_flux({R, Q, m}, n, eos);
    const auto boosted = physical_flux({R, Q, mb}, n, eos);
    const double wn = dot3(w, n), un = dot3(m, n) / rho;
    // Mass rows gain exactly density * (w.n); the pressure part is unchanged.
    CHECK(boosted[0] - base[0] == Catch::Approx(R * wn).margin(1e-12));
    CHECK(boosted[1] - base[1] == Catch::Approx(Q * wn).margin(1e-12));
    for (int a = 0; a < 3; ++a) {
      const double expect = m[a] * wn + rho * w[a] * un + rho * w[a] * wn;
      CHECK(boosted[2 + a] - base[2 + a] == Catch::Approx(expect).margin(1e-11));
    }
  }
}

TEST_CASE("reflecting ghost mirrors the normal momentum") {
  const CellState interior{1.0, 1.0, {3.0, 0.5, 0.0}};
  const CellState ghost = reflect_ghost(interior, 0);
  CHECK(ghost.R == 1.0);
  CHECK(ghost.Q == 1.0);
  CHECK(ghost.m[0] == -3.0);
  CHECK(ghost.m[1] == 0.5);
  // Mirrored pair carries no mass flux through the wall.
  EosSpec eos;
  const auto fl = physical_flux(interior, {1, 0, 0}, eos);
  const auto fg = physical_flux(ghost, {1, 0, 0}, eos);
  CHECK(0.5 * (fl[0] + fg[0]) == 0.0);
  CHECK(0.5 * (fl[1] + fg[1]) == 0.0);
}

TEST_CASE("constant states are preserved exactly") {
  SolverConfig cfg;
  cfg.t_end = 1.0;
  for (Bc bc : {Bc::reflecting, Bc::periodic}) {
    cfg.bc = bc;
    SECTION(bc == Bc::reflecting ? "1D reflecting" : "1D periodic") {
      const Grid g = Grid::make_1d(64, 0.0, 1.0);
      PiecewiseConstantIC ic{{Patch{"all", 0.0, 1.0, 0.0, 1.0, 1.0, 2.0}}};
      const ConservedField f0 = make_piecewise_ic(ic, g);
      ConservedField f = f0;
      for (int s = 0; s < 100; ++s) f = rusanov_step(f, cfg).first;
      CHECK(max_field_diff(f, f0) == 0.0);
    }
  }
  SECTION("2D periodic with a uniform drift") {
    cfg.bc = Bc::periodic;
    const ConservedField f0 = constant_field_2d(16);
    ConservedField f = f0;
    for (int s = 0; s < 100; ++s) f = rusanov_step(f, cfg).first;
    CHECK(max_field_diff(f, f0) == 0.0);
  }
}

TEST_CASE("exact mass conservation under both boundary types") {
  SolverConfig cfg;
  cfg.t_end = 1.0;
  for (Bc bc : {Bc::reflecting, Bc::periodic}) {
    cfg.bc = bc;
    ConservedField f = sod_field(128);
    const double mR0 = field_mass(f, f.R), mQ0 = field_mass(f, f.Q);
    for (int s = 0; s < 100; ++s) f = rusanov_step(f, cfg).first;
    CHECK(std::abs(field_mass(f, f.R) - mR0) <= 1e-14 * mR0);
    CHECK(std::abs(field_mass(f, f.Q) - mQ0) <= 1e-14 * mQ0);
  }
  SECTION("2D") {
    cfg.bc = Bc::reflecting;
    const Grid g = Grid::make_2d(24, 24, 0.0, 1.0, 0.0, 1.0);
    PiecewiseConstantIC ic{{Patch{"a", 0.0, 0.5, 0.0, 1.0, 0.8, 0.4, {0.2, 0.1, 0}},
                            Patch{"b", 0.5, 1.0, 0.0, 1.0, 0.3, 0.6, {-0.1, 0.3, 0}}}};
    ConservedField f = make_piecewise_ic(ic, g);
    const double mR0 = field_mass(f, f.R), mQ0 = field_mass(f, f.Q);
    for (int s = 0; s < 100; ++s) f = rusanov_step(f, cfg).first;
    CHECK(std::abs(field_mass(f, f.R) - mR0) <= 1e-14 * mR0);
    CHECK(std::abs(field_mass(f, f.Q) - mQ0) <= 1e-14 * mQ0);
  }
}

TEST_CASE("CFL bound is honored every step") {
  SolverConfig cfg;
  cfg.t_end = 0.1;
  cfg.cfl = 0.7;
  ConservedField f = sod_field(64);
  double t = 0.0;
  for (int s = 0; s < 50 && t < cfg.t_end; ++s) {
    auto [next, sr] = rusanov_step(f, cfg, cfg.t_end - t, t);
    CHECK(sr.max_courant <= cfg.cfl * (1.0 + 1e-12));
    f = std::move(next);
    t += sr.dt;
  }
}

TEST_CASE("mass-ratio transport is exact when the ratio starts uniform") {
  // With equal adiabatic exponents both continuity equations share one
  // advection operator, so s = R/Q stays constant cell by cell.
  const Grid g = Grid::make_1d(64, 0.0, 1.0);
  ConservedField f = ConservedField::zeros(g);
  const double s0 = 2.5;
  for (int i = 0; i < g.nx; ++i) {
    const double rho = 1.0 + 0.3 * std::sin(2.0 * M_PI * g.cx(i));
    f.Q[i] = rho / (1.0 + s0);
    f.R[i] = s0 * f.Q[i];
    f.mx[i] = 0.2 * rho;
  }
  SolverConfig cfg;
  cfg.t_end = 0.1;
  cfg.bc = Bc::periodic;
  const RunResult rr = run_simulation(f, cfg);
  const ConservedField& fin = rr.snapshots.back().field;
  for (int i = 0; i < g.nx; ++i)
    CHECK(std::abs(fin.R[i] / fin.Q[i] - s0) <= 1e-10 * s0);
}

TEST_CASE("emergent vacuum and non-finite states abort the run") {
  SolverConfig cfg;
  cfg.t_end = 1.0;
  SECTION("vacuum floor") {
    cfg.vacuum_floor = 0.4;  // the rarefied side of the tube sits below it
    ConservedField f = sod_field(32);
    CHECK_THROWS_AS(rusanov_step(f, cfg), SolverAbort);
  }
  SECTION("NaN contamination") {
    ConservedField f = sod_field(32);
    f.mx[5] = std::nan("");
    CHECK_THROWS_AS(rusanov_step(f, cfg), SolverAbort);
  }
  SECTION("fixed dt violating the CFL bound") {
    ConservedField f = sod_field(32);
    cfg.fixed_dt = 1.0;
    CHECK_THROWS_AS(rusanov_step(f, cfg), SolverAbort);
  }
}

TEST_CASE("piecewise-constant initial data") {
  const Grid g = Grid::make_1d(8, 0.0, 1.0);
  SECTION("single patch gives a constant field") {
    PiecewiseConstantIC ic{{Patch{"all", 0.0, 1.0, 0.0, 1.0, 1.5, 0.5, {1.0, 0, 0}}}};
    const ConservedField f = make_piecewise_ic(ic, g);
    for (int i = 0; i < g.nx; ++i) {
      CHECK(f.R[i] == 1.5);
      CHECK(f.Q[i] == 0.5);
      CHECK(f.mx[i] == 2.0);
    }
  }
  SECTION("two half-domain patches step at the interface") {
    PiecewiseConstantIC ic{{Patch{"l", 0.0, 0.5, 0.0, 1.0, 1.0, 1.0},
                            Patch{"r", 0.5, 1.0, 0.0, 1.0, 2.0, 2.0}}};
    const ConservedField f = make_piecewise_ic(ic, g);
    for (int i = 0; i < 4; ++i) CHECK(f.R[i] == 1.0);
    for (int i = 4; i < 8; ++i) CHECK(f.R[i] == 2.0);
  }
  SECTION("random 2D tiling matches a point-location oracle") {
    const Grid g2 = Grid::make_2d(16, 16, 0.0, 1.0, 0.0, 1.0);
    PiecewiseConstantIC ic{{Patch{"sw", 0.0, 0.4, 0.0, 0.7, 1.0, 1.0},
                            Patch{"se", 0.4, 1.0, 0.0, 0.7, 2.0, 1.0},
                            Patch{"nw", 0.0, 0.6, 0.7, 1.0, 3.0, 1.0},
                            Patch{"ne", 0.6, 1.0, 0.7, 1.0, 4.0, 1.0}}};
    const ConservedField f = make_piecewise_ic(ic, g2);
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i) {
        const double x = g2.cx(i), y = g2.cy(j);
        double expect = 0.0;
        for (const Patch& p : ic.patches)
          if (p.contains(x, y, 2)) expect = p.R0;
        CHECK(f.R[g2.index(i, j)] == expect);
      }
  }
  SECTION("uncovered centers are rejected") {
    PiecewiseConstantIC ic{{Patch{"half", 0.0, 0.5, 0.0, 1.0, 1.0, 1.0}}};
    CHECK_THROWS_AS(make_piecewise_ic(ic, g), std::invalid_argument);
  }
  SECTION("ambiguous (overlapping) coverage is rejected") {
    PiecewiseConstantIC ic{{Patch{"a", 0.0, 1.0, 0.0, 1.0, 1.0, 1.0},
                            Patch{"b", 0.5, 1.0, 0.0, 1.0, 2.0, 2.0}}};
    CHECK_THROWS_AS(make_piecewise_ic(ic, g), std::invalid_argument);
  }
}

TEST_CASE("run bookkeeping: snapshots and trace") {
  ConservedField f = sod_field(64);
  SolverConfig cfg;
  cfg.t_end = 0.05;
  cfg.output_stride = 5;
  const RunResult rr = run_simulation(f, cfg);
  REQUIRE(rr.trace.size() == static_cast<std::size_t>(rr.steps) + 1);
  CHECK(rr.snapshots.front().t == 0.0);
  CHECK(std::abs(rr.snapshots.back().t - cfg.t_end) <= 1e-12);
  for (std::size_t k = 1; k < rr.trace.size(); ++k) CHECK(rr.trace[k].dt > 0.0);
}
