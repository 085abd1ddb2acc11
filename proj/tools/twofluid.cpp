// Command-line front end: configuration-driven simulation runs and the
// numerical verification subcommands, all emitting CSV.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "twofluid/config.hpp"
#include "twofluid/csv.hpp"
#include "twofluid/energy.hpp"
#include "twofluid/helmholtz.hpp"
#include "twofluid/run.hpp"
#include "twofluid/solver.hpp"
#include "twofluid/subsolution.hpp"
#include "twofluid/symmetric_form.hpp"
#include "twofluid/weak_form.hpp"

namespace fs = std::filesystem;
using namespace twofluid;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  unsigned long seed = 12345;
  bool quiet = false;
};

void add_common(CLI::App* sub, CommonArgs& args, bool config_required) {
  auto* opt = sub->add_option("--config", args.config_path, "configuration file");
  if (config_required) opt->required();
  sub->add_option("--out", args.out_dir, "output directory (overrides [output])");
  sub->add_option("--seed", args.seed, "seed for random-sample audits");
  sub->add_flag("--quiet", args.quiet, "suppress informational output");
}

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw ConfigError("cannot open config file: " + args.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = parse_config(ss.str());
  }
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  return cfg;
}

std::string ensure_outdir(const RunConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  return cfg.output_dir;
}

std::ostream& info(const CommonArgs& args) {
  static std::ofstream null_sink;
  if (args.quiet) {
    null_sink.setstate(std::ios::badbit);
    return null_sink;
  }
  return std::cout;
}

// ---------------------------------------------------------------------------
// closure-table
// ---------------------------------------------------------------------------

int cmd_closure_table(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const std::string dir = ensure_outdir(cfg);
  const TableSpec& t = cfg.table;
  CsvWriter w(dir + "/closure_table.csv", {"R", "Q", "Z", "p", "c"});
  auto geom = [](double lo, double hi, int n, int k) {
    return lo * std::pow(hi / lo, double(k) / double(n - 1));
  };
  for (int a = 0; a < t.n; ++a) {
    for (int b = 0; b < t.n; ++b) {
      const MixtureState st{geom(t.r_min, t.r_max, t.n, a), geom(t.q_min, t.q_max, t.n, b)};
      const PressurePoint pt = eos_evaluate(cfg.eos, st);
      w.row({st.R, st.Q, pt.Z, pt.p, std::sqrt(pt.c2)});
    }
  }
  info(args) << "wrote " << dir << "/closure_table.csv (" << t.n * t.n << " states)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// riemann
// ---------------------------------------------------------------------------

int cmd_riemann(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const std::string dir = ensure_outdir(cfg);
  const RunResult run = run_from_config(cfg);
  write_snapshots_csv(dir + "/snapshots.csv", run, cfg.eos);
  write_trace_csv(dir + "/trace.csv", run);
  const TraceRow& last = run.trace.back();
  info(args) << "scenario '" << cfg.scenario << "': " << run.steps << " steps to t = "
             << last.t << ", mass_R = " << last.mass_R << ", mass_Q = " << last.mass_Q
             << "\n"
             << "wrote " << dir << "/snapshots.csv, " << dir << "/trace.csv\n";
  return 0;
}

// ---------------------------------------------------------------------------
// energy-trace
// ---------------------------------------------------------------------------

int cmd_energy_trace(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  if (cfg.eos.kind != EosKind::two_fluid)
    throw ConfigError("energy-trace: the energy functional needs eos.kind = two_fluid");
  const std::string dir = ensure_outdir(cfg);
  const RunResult run = run_from_config(cfg);
  const std::vector<EnergyRow> rows = energy_trace(run.snapshots, cfg.eos.phase);
  write_energy_csv(dir + "/energy.csv", rows);
  int flagged = 0;
  for (const EnergyRow& r : rows)
    if (r.increase_flagged) {
      ++flagged;
      std::cerr << "warning: total energy increased at t = " << r.t << "\n";
    }
  info(args) << "wrote " << dir << "/energy.csv (" << rows.size() << " rows, " << flagged
             << " increase flags)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// helmholtz-test
// ---------------------------------------------------------------------------

int cmd_helmholtz_test(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const std::string dir = ensure_outdir(cfg);
  std::ofstream csv(dir + "/helmholtz.csv");
  csv << "case,n,value\n";
  bool ok = true;
  auto record = [&](const std::string& name, int n, double v) {
    csv << name << ',' << n << ',' << csv_number(v) << '\n';
  };

  // Manufactured Neumann solutions, expected second-order convergence.
  auto study = [&](const std::string& name, int dim) {
    std::vector<double> errs;
    const std::vector<int> sizes = dim == 1 ? std::vector<int>{32, 64, 128}
                                            : std::vector<int>{16, 32, 64};
    for (int n : sizes) {
      const Grid g = dim == 1 ? Grid::make_1d(n, 0.0, 1.0)
                              : Grid::make_2d(n, n, 0.0, 1.0, 0.0, 1.0);
      ScalarField f = ScalarField::zeros(g);
      ScalarField exact = ScalarField::zeros(g);
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const double x = g.cx(i), y = g.cy(j);
          const int idx = g.index(i, j);
          if (dim == 1) {
            f.v[idx] = std::cos(M_PI * x);
            exact.v[idx] = std::cos(M_PI * x) / (M_PI * M_PI);
          } else {
            f.v[idx] = 2.0 * M_PI * M_PI * std::cos(M_PI * x) * std::cos(M_PI * y);
            exact.v[idx] = std::cos(M_PI * x) * std::cos(M_PI * y);
          }
        }
      const NeumannSolution sol = solve_neumann({f, Bc::reflecting, 1e-12});
      ScalarField diff = sol.psi;
      for (int i = 0; i < g.cells(); ++i) diff.v[i] -= exact.v[i];
      const double err = l2_grid_norm(diff);
      errs.push_back(err);
      record(name, n, err);
    }
    for (std::size_t k = 1; k < errs.size(); ++k) {
      const double order = std::log2(errs[k - 1] / errs[k]);
      record(name + "_order", sizes[k], order);
      if (!(order > 1.9)) ok = false;
    }
  };
  study("neumann_1d", 1);
  study("neumann_2d", 2);

  // Gradient input: the splitting must return a vanishing solenoidal part.
  {
    const Grid g = Grid::make_1d(64, 0.0, 1.0);
    ScalarField phi = ScalarField::zeros(g);
    for (int i = 0; i < g.nx; ++i) phi.v[i] = std::cos(M_PI * g.cx(i));
    const VectorField w = faces_to_cell(face_gradient(phi, Bc::reflecting));
    const DecompResult d = decompose(w, Bc::reflecting, 1e-12);
    double wnorm = 0.0, vnorm = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
      wnorm += w.x[i] * w.x[i];
      vnorm += d.v_face.fx[i] * d.v_face.fx[i];
    }
    const double rel = std::sqrt(vnorm / wnorm);
    record("gradient_input_vrel", 64, rel);
    record("gradient_input_div", 64, d.div_v_norm);
    if (!(rel <= 1e-8 && d.div_v_norm <= 1e-8)) ok = false;
  }

  // Generic mixed field: both parts present, so the orthogonality ratio is
  // meaningful and must sit at solver tolerance.
  {
    const Grid g = Grid::make_2d(32, 32, 0.0, 1.0, 0.0, 1.0);
    VectorField w = VectorField::zeros(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double x = g.cx(i), y = g.cy(j);
        const int idx = g.index(i, j);
        w.x[idx] = std::sin(M_PI * x) * (std::cos(M_PI * y) + 0.4);
        w.y[idx] = std::sin(M_PI * y) * (0.6 - std::cos(2.0 * M_PI * x));
      }
    const DecompResult d = decompose(w, Bc::reflecting, 1e-11);
    record("generic_div", 32, d.div_v_norm);
    record("generic_ortho", 32, d.ortho_defect);
    if (!(d.div_v_norm <= 1e-8 && d.ortho_defect <= 1e-8)) ok = false;
  }

  info(args) << (ok ? "helmholtz battery passed" : "helmholtz battery FAILED")
             << "; wrote " << dir << "/helmholtz.csv\n";
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// subsolution-check
// ---------------------------------------------------------------------------

int cmd_subsolution_check(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  if (cfg.eos.kind != EosKind::two_fluid)
    throw ConfigError("subsolution-check needs eos.kind = two_fluid");
  if (!cfg.grid) throw ConfigError("subsolution-check needs a [grid] section");
  if (cfg.ic.patches.empty())
    throw ConfigError("subsolution-check needs at least one [ic.patch.N] section");
  const std::string dir = ensure_outdir(cfg);
  const Grid& g = *cfg.grid;
  const ConservedField f0 = make_piecewise_ic(cfg.ic, g);

  SubsolutionFields fields;
  const int n = g.cells();
  fields.v0.resize(n);
  fields.gradPsi.assign(n, Vec3{0.0, 0.0, 0.0});
  fields.dtPsi.assign(n, 0.0);
  fields.R.resize(n);
  fields.Q.resize(n);
  for (int i = 0; i < n; ++i) {
    const CellState c = f0.cell(i);
    fields.v0[i] = c.m;
    fields.R[i] = c.R;
    fields.Q[i] = c.Q;
  }
  const double lambda = min_lambda(fields, cfg.eos.phase, cfg.subsolution_margin);

  std::vector<std::string> cols =
      g.dim == 2 ? std::vector<std::string>{"x", "y", "gap", "lambda_needed", "e"}
                 : std::vector<std::string>{"x", "gap", "lambda_needed", "e"};
  CsvWriter w(dir + "/subsolution.csv", cols);
  int negative = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int idx = g.index(i, j);
      SubsolutionSample s;
      s.v = fields.v0[idx];
      s.gradPsi = fields.gradPsi[idx];
      s.dtPsi = fields.dtPsi[idx];
      s.R = fields.R[idx];
      s.Q = fields.Q[idx];
      s.Lambda = lambda;
      const double gap = subsolution_gap(s, cfg.eos.phase);
      const double needed = lambda_needed_at(fields, idx, cfg.eos.phase);
      const double e = kinetic_energy_bound(s, cfg.eos.phase);
      if (!(gap > 0.0)) ++negative;
      if (g.dim == 2)
        w.row({g.cx(i), g.cy(j), gap, needed, e});
      else
        w.row({g.cx(i), gap, needed, e});
    }
  info(args) << "Lambda = " << csv_number(lambda) << " (margin " << cfg.subsolution_margin
             << "), " << negative << " non-positive gaps\n"
             << "wrote " << dir << "/subsolution.csv\n";
  return negative == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// symmetry-check
// ---------------------------------------------------------------------------

int cmd_symmetry_check(const CommonArgs& args, int count) {
  const RunConfig cfg = load_config(args);
  if (cfg.eos.kind != EosKind::two_fluid)
    throw ConfigError("symmetry-check needs eos.kind = two_fluid");
  const std::string dir = ensure_outdir(cfg);
  std::mt19937_64 rng(args.seed);
  std::uniform_real_distribution<double> logd(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> vel(-2.0, 2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  CsvWriter w(dir + "/symmetry.csv",
              {"sample", "max_asymmetry", "min_a0_eig", "speed_defect"});
  double worst_speed = 0.0, worst_asym = 0.0;
  bool spd_ok = true;
  for (int k = 0; k < count; ++k) {
    const MixtureState st{std::exp(logd(rng)), std::exp(logd(rng))};
    const ClosureResult cl = solve_Z(st, cfg.eos.phase);
    const auto [rho, s] = to_rho_s(st);
    const Vec3 u{vel(rng), vel(rng), vel(rng)};
    const SymmetricSystem sys = assemble({cl.p, u, s, rho}, cl.dp_drho_at_fixed_s);

    double asym = std::max({max_asymmetry(sys.A0), max_asymmetry(sys.A1),
                            max_asymmetry(sys.A2), max_asymmetry(sys.A3)});
    double min_eig = sys.A0[0][0];
    for (int i = 1; i < 5; ++i) min_eig = std::min(min_eig, sys.A0[i][i]);

    Vec3 dir_n{gauss(rng), gauss(rng), gauss(rng)};
    const double nn = norm3(dir_n);
    dir_n = scale3(dir_n, 1.0 / nn);
    const std::array<double, 5> speeds = char_speeds(sys, dir_n);
    const double un = dot3(u, dir_n);
    const double c = std::sqrt(cl.dp_drho_at_fixed_s);
    std::array<double, 5> expect{un - c, un, un, un, un + c};
    std::sort(expect.begin(), expect.end());
    double defect = 0.0;
    for (int i = 0; i < 5; ++i)
      defect = std::max(defect, std::abs(speeds[i] - expect[i]) / std::max(1.0, std::abs(expect[i])));

    w.row({double(k), asym, min_eig, defect});
    worst_speed = std::max(worst_speed, defect);
    worst_asym = std::max(worst_asym, asym);
    if (!(min_eig > 0.0)) spd_ok = false;
  }
  const bool ok = worst_asym == 0.0 && spd_ok && worst_speed <= 1e-10;
  info(args) << count << " states audited: max asymmetry = " << worst_asym
             << ", A0 positive definite = " << (spd_ok ? "yes" : "NO")
             << ", worst speed defect = " << worst_speed << "\n"
             << "wrote " << dir << "/symmetry.csv\n";
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// weak-residual
// ---------------------------------------------------------------------------

int cmd_weak_residual(const CommonArgs& args, std::string snapshots_path) {
  const RunConfig cfg = load_config(args);
  if (!cfg.grid) throw ConfigError("weak-residual needs a [grid] section");
  const std::string dir = ensure_outdir(cfg);
  if (snapshots_path.empty()) snapshots_path = dir + "/snapshots.csv";
  const std::vector<Snapshot> snaps = read_snapshots_csv(snapshots_path, *cfg.grid);
  const WeakFormReport rep = weak_residual(snaps, cfg.eos, cfg.solver.bc);

  std::ofstream csv(dir + "/weak_residual.csv");
  csv << "identity,test_fn,residual\n";
  for (const WeakFormRow& r : rep.rows)
    csv << r.identity << ',' << r.test_fn << ',' << csv_number(r.residual) << '\n';
  info(args) << "max residuals: continuity_R = " << rep.max_continuity_R
             << ", continuity_Q = " << rep.max_continuity_Q
             << ", momentum = " << rep.max_momentum << "\n"
             << "wrote " << dir << "/weak_residual.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-fluid flow toolkit: closure solves, finite-volume runs, and "
               "structure verification"};
  app.require_subcommand(1);

  CommonArgs a_table, a_riemann, a_energy, a_helm, a_subsol, a_sym, a_weak;
  int sym_count = 1000;
  std::string snapshots_path;

  add_common(app.add_subcommand("closure-table", "tabulate Z, p, c over a (R,Q) grid"),
             a_table, false);
  add_common(app.add_subcommand("riemann", "run the finite-volume solver from a config"),
             a_riemann, true);
  add_common(app.add_subcommand("energy-trace", "run and record the energy breakdown"),
             a_energy, true);
  add_common(app.add_subcommand("helmholtz-test", "manufactured-solution battery"),
             a_helm, false);
  add_common(app.add_subcommand("subsolution-check",
                                "select Lambda and report pointwise gaps"),
             a_subsol, true);
  auto* sym = app.add_subcommand("symmetry-check", "random-state audit of the symmetric system");
  add_common(sym, a_sym, false);
  sym->add_option("--count", sym_count, "number of random states");
  auto* weak = app.add_subcommand("weak-residual", "weak-form residuals of a saved trace");
  add_common(weak, a_weak, true);
  weak->add_option("--snapshots", snapshots_path, "snapshot CSV (default <out>/snapshots.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // validation failure, including bad flags
  }

  try {
    if (app.got_subcommand("closure-table")) return cmd_closure_table(a_table);
    if (app.got_subcommand("riemann")) return cmd_riemann(a_riemann);
    if (app.got_subcommand("energy-trace")) return cmd_energy_trace(a_energy);
    if (app.got_subcommand("helmholtz-test")) return cmd_helmholtz_test(a_helm);
    if (app.got_subcommand("subsolution-check")) return cmd_subsolution_check(a_subsol);
    if (app.got_subcommand("symmetry-check")) return cmd_symmetry_check(a_sym, sym_count);
    if (app.got_subcommand("weak-residual")) return cmd_weak_residual(a_weak, snapshots_path);
  } catch (const SolverAbort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
