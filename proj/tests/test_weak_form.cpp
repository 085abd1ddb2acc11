#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "twofluid/solver.hpp"
#include "twofluid/weak_form.hpp"

using namespace twofluid;

namespace {

// Smooth periodic acoustic pulse, uniform mass ratio, fixed dt so the
// snapshot times come out exactly uniform.
RunResult smooth_run(int n, double t_end = 0.1) {
  const Grid g = Grid::make_1d(n, 0.0, 1.0);
  ConservedField f = ConservedField::zeros(g);
  for (int i = 0; i < n; ++i) {
    const double rho = 1.0 + 0.2 * std::sin(2.0 * M_PI * g.cx(i));
    f.R[i] = 0.5 * rho;
    f.Q[i] = 0.5 * rho;
  }
  SolverConfig cfg;
  cfg.t_end = t_end;
  cfg.bc = Bc::periodic;
  cfg.output_stride = 1;
  double smax = 0.0;
  for (int i = 0; i < n; ++i)
    smax = std::max(smax, std::sqrt(eos_evaluate(cfg.eos, {f.R[i], f.Q[i]}).c2));
  const long steps = static_cast<long>(std::ceil(t_end * smax * n / 0.45));
  cfg.fixed_dt = t_end / steps;
  return run_simulation(f, cfg);
}

RunResult constant_run(Bc bc) {
  const Grid g = Grid::make_1d(64, 0.0, 1.0);
  PiecewiseConstantIC ic{{Patch{"all", 0.0, 1.0, 0.0, 1.0, 1.0, 2.0}}};
  SolverConfig cfg;
  cfg.t_end = 0.05;
  cfg.bc = bc;
  cfg.output_stride = 1;
  cfg.fixed_dt = 1e-3;
  return run_simulation(make_piecewise_ic(ic, g), cfg);
}

}  // namespace

TEST_CASE("constant-state traces have identically vanishing residuals") {
  for (Bc bc : {Bc::periodic, Bc::reflecting}) {
    const RunResult rr = constant_run(bc);
    const WeakFormReport rep = weak_residual(rr.snapshots, EosSpec{}, bc);
    CHECK(rep.max_abs() <= 1e-10);
  }
}

TEST_CASE("residuals of smooth traces decay at first order") {
  const double r64 = weak_residual(smooth_run(64).snapshots, EosSpec{}, Bc::periodic).max_abs();
  const double r128 =
      weak_residual(smooth_run(128).snapshots, EosSpec{}, Bc::periodic).max_abs();
  CHECK(std::log2(r64 / r128) >= 0.8);
}

TEST_CASE("a perturbed trace triggers the diagnostic") {
  const RunResult rr = constant_run(Bc::periodic);
  const double clean = weak_residual(rr.snapshots, EosSpec{}, Bc::periodic).max_abs();

  RunResult bad = rr;
  for (std::size_t k = 1; k < bad.snapshots.size(); ++k)
    for (double& v : bad.snapshots[k].field.R) v += 1e-2;
  const double perturbed =
      weak_residual(bad.snapshots, EosSpec{}, Bc::periodic).max_continuity_R;
  CHECK(perturbed > 1e3 * std::max(clean, 1e-13));
  CHECK(perturbed > 1e-4);
}

TEST_CASE("invalid traces are rejected") {
  const RunResult rr = constant_run(Bc::periodic);
  SECTION("mismatched shapes") {
    std::vector<Snapshot> mixed = rr.snapshots;
    mixed[1].field = ConservedField::zeros(Grid::make_1d(32, 0.0, 1.0));
    CHECK_THROWS_AS(weak_residual(mixed, EosSpec{}, Bc::periodic), std::invalid_argument);
  }
  SECTION("non-uniform times") {
    std::vector<Snapshot> skew = rr.snapshots;
    skew[2].t += 0.3 * (skew[1].t - skew[0].t);
    CHECK_THROWS_AS(weak_residual(skew, EosSpec{}, Bc::periodic), std::invalid_argument);
  }
  SECTION("too short") {
    std::vector<Snapshot> one(rr.snapshots.begin(), rr.snapshots.begin() + 1);
    CHECK_THROWS_AS(weak_residual(one, EosSpec{}, Bc::periodic), std::invalid_argument);
  }
}
