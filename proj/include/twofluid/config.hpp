#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "twofluid/eos.hpp"
#include "twofluid/grid.hpp"
#include "twofluid/solver.hpp"

namespace twofluid {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TableSpec {
  double r_min = 0.1, r_max = 10.0;
  double q_min = 0.1, q_max = 10.0;
  int n = 32;
};

struct RunConfig {
  std::string scenario = "run";
  EosSpec eos;
  std::optional<Grid> grid;
  PiecewiseConstantIC ic;
  SolverConfig solver;  // eos copied in after parsing
  std::string output_dir = "out";
  double subsolution_margin = 1e-6;
  TableSpec table;

  /// Grid and at least one patch are required before a simulation can run.
  void require_run_ready() const {
    if (!grid) throw ConfigError("config: [grid] section is required for this command");
    if (ic.patches.empty())
      throw ConfigError("config: at least one [ic.patch.N] section is required");
    if (!(solver.t_end > 0.0)) throw ConfigError("config: solver.t_end must be positive");
  }
};

namespace config_detail {

struct Entry {
  std::string value;
  long line;
  bool used = false;
};

struct Section {
  long line = 0;
  std::map<std::string, Entry> entries;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Parser {
  std::map<std::string, Section> sections;
  std::vector<std::string> errors;

  void fail(long line, const std::string& msg) {
    errors.push_back("line " + std::to_string(line) + ": " + msg);
  }
  void fail(const std::string& msg) { errors.push_back(msg); }

  void tokenize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    std::string current;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']') {
          fail(lineno, "malformed section header '" + t + "'");
          continue;
        }
        current = trim(t.substr(1, t.size() - 2));
        if (current.empty()) {
          fail(lineno, "empty section name");
          continue;
        }
        if (sections.count(current)) {
          fail(lineno, "duplicate section [" + current + "]");
          continue;
        }
        sections[current].line = lineno;
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        fail(lineno, "expected 'key = value', got '" + t + "'");
        continue;
      }
      if (current.empty()) {
        fail(lineno, "key outside of any section");
        continue;
      }
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty()) {
        fail(lineno, "empty key");
        continue;
      }
      auto& sec = sections[current];
      if (sec.entries.count(key)) {
        fail(lineno, "duplicate key '" + key + "' in [" + current + "]");
        continue;
      }
      sec.entries[key] = {value, lineno, false};
    }
  }

  bool has(const std::string& sec) const { return sections.count(sec) != 0; }

  Entry* find(const std::string& sec, const std::string& key) {
    auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    auto e = s->second.entries.find(key);
    if (e == s->second.entries.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  std::optional<double> number(const std::string& sec, const std::string& key) {
    Entry* e = find(sec, key);
    if (!e) return std::nullopt;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(e->value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != e->value.size() || e->value.empty()) {
      fail(e->line, "value of '" + key + "' is not a number: '" + e->value + "'");
      return std::nullopt;
    }
    return v;
  }

  std::optional<long> integer(const std::string& sec, const std::string& key) {
    auto v = number(sec, key);
    if (!v) return std::nullopt;
    if (*v != static_cast<long>(*v)) {
      fail(find(sec, key)->line, "value of '" + key + "' must be an integer");
      return std::nullopt;
    }
    return static_cast<long>(*v);
  }

  std::optional<std::string> text(const std::string& sec, const std::string& key) {
    Entry* e = find(sec, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  void check_no_unknown(const std::string& sec, const std::set<std::string>& allowed) {
    auto s = sections.find(sec);
    if (s == sections.end()) return;
    for (const auto& [key, entry] : s->second.entries)
      if (!allowed.count(key))
        fail(entry.line, "unknown key '" + key + "' in [" + sec + "]");
  }
};

}  // namespace config_detail

/// Parse and validate the sectioned key=value configuration format.
/// Unknown sections and keys are errors; all collected problems are
/// reported together with their line numbers.
inline RunConfig parse_config(const std::string& text) {
  using config_detail::Parser;
  Parser p;
  p.tokenize(text);
  RunConfig cfg;

  // ---- [scenario] ----
  p.check_no_unknown("scenario", {"name"});
  if (auto v = p.text("scenario", "name")) cfg.scenario = *v;

  // ---- [eos] ----
  p.check_no_unknown("eos", {"kind", "gamma_plus", "gamma_minus", "c_const", "k0", "a0",
                             "gamma", "beta"});
  std::string kind = "two_fluid";
  if (auto v = p.text("eos", "kind")) kind = *v;
  auto forbid = [&](const char* key, const char* why) {
    if (auto* e = p.find("eos", key))
      p.fail(e->line, std::string("key '") + key + "' is not valid for eos.kind = " + why);
  };
  if (kind == "two_fluid") {
    cfg.eos.kind = EosKind::two_fluid;
    const double gp = p.number("eos", "gamma_plus").value_or(2.0);
    const double gm = p.number("eos", "gamma_minus").value_or(2.0);
    try {
      cfg.eos.phase = PhaseParams::make(gp, gm);
    } catch (const std::exception& e) {
      p.fail(e.what());
    }
    forbid("c_const", "two_fluid");
    forbid("k0", "two_fluid");
    forbid("a0", "two_fluid");
    forbid("gamma", "two_fluid");
    forbid("beta", "two_fluid");
  } else if (kind == "liquid_gas") {
    cfg.eos.kind = EosKind::liquid_gas;
    try {
      cfg.eos.lg = LiquidGasParams::make(p.number("eos", "c_const").value_or(1.0),
                                         p.number("eos", "k0").value_or(1.0),
                                         p.number("eos", "a0").value_or(1.0));
    } catch (const std::exception& e) {
      p.fail(e.what());
    }
    forbid("gamma_plus", "liquid_gas");
    forbid("gamma_minus", "liquid_gas");
    forbid("gamma", "liquid_gas");
    forbid("beta", "liquid_gas");
  } else if (kind == "fluid_particle") {
    cfg.eos.kind = EosKind::fluid_particle;
    try {
      cfg.eos.fp = FluidParticleParams::make(p.number("eos", "gamma").value_or(1.4),
                                             p.number("eos", "beta").value_or(2.0));
    } catch (const std::exception& e) {
      p.fail(e.what());
    }
    forbid("gamma_plus", "fluid_particle");
    forbid("gamma_minus", "fluid_particle");
    forbid("c_const", "fluid_particle");
    forbid("k0", "fluid_particle");
    forbid("a0", "fluid_particle");
  } else {
    p.fail(p.sections["eos"].line,
           "eos.kind must be one of two_fluid, liquid_gas, fluid_particle");
  }

  // ---- [grid] ----
  p.check_no_unknown("grid", {"dim", "nx", "ny", "x0", "x1", "y0", "y1"});
  if (p.has("grid")) {
    const long dim = p.integer("grid", "dim").value_or(1);
    const long nx = p.integer("grid", "nx").value_or(0);
    const double x0 = p.number("grid", "x0").value_or(0.0);
    const double x1 = p.number("grid", "x1").value_or(1.0);
    const long gridline = p.sections["grid"].line;
    if (dim != 1 && dim != 2) p.fail(gridline, "grid.dim must be 1 or 2");
    if (nx < 1) p.fail(gridline, "grid.nx must be a positive integer");
    if (!(x1 > x0)) p.fail(gridline, "grid extents need x1 > x0");
    if (dim == 2) {
      const long ny = p.integer("grid", "ny").value_or(0);
      const double y0 = p.number("grid", "y0").value_or(0.0);
      const double y1 = p.number("grid", "y1").value_or(1.0);
      if (ny < 1) p.fail(gridline, "grid.ny must be a positive integer for dim = 2");
      if (!(y1 > y0)) p.fail(gridline, "grid extents need y1 > y0");
      if (p.errors.empty())
        cfg.grid = Grid::make_2d(static_cast<int>(nx), static_cast<int>(ny), x0, x1, y0, y1);
    } else {
      for (const char* key : {"ny", "y0", "y1"})
        if (auto* e = p.find("grid", key))
          p.fail(e->line, std::string("key '") + key + "' is not valid for dim = 1");
      if (p.errors.empty()) cfg.grid = Grid::make_1d(static_cast<int>(nx), x0, x1);
    }
  }

  // ---- [ic.patch.N] ----
  std::vector<std::pair<long, std::string>> patch_sections;
  for (const auto& [name, sec] : p.sections) {
    if (name.rfind("ic.patch.", 0) != 0) continue;
    const std::string suffix = name.substr(9);
    long pn = -1;
    try {
      std::size_t used = 0;
      pn = std::stol(suffix, &used);
      if (used != suffix.size()) pn = -1;
    } catch (const std::exception&) {
      pn = -1;
    }
    if (pn < 0) {
      p.fail(sec.line, "patch sections must be named [ic.patch.<integer>]");
      continue;
    }
    patch_sections.emplace_back(pn, name);
  }
  std::sort(patch_sections.begin(), patch_sections.end());
  const bool two_d = cfg.grid && cfg.grid->dim == 2;
  for (const auto& [pn, name] : patch_sections) {
    p.check_no_unknown(name, {"x0", "x1", "y0", "y1", "r", "q", "ux", "uy"});
    Patch patch;
    patch.name = name;
    const long line = p.sections[name].line;
    auto need = [&](const char* key) {
      auto v = p.number(name, key);
      if (!v) p.fail(line, std::string("[") + name + "] is missing key '" + key + "'");
      return v.value_or(0.0);
    };
    patch.xlo = need("x0");
    patch.xhi = need("x1");
    patch.R0 = need("r");
    patch.Q0 = need("q");
    patch.u0[0] = p.number(name, "ux").value_or(0.0);
    if (two_d) {
      patch.ylo = need("y0");
      patch.yhi = need("y1");
      patch.u0[1] = p.number(name, "uy").value_or(0.0);
    } else {
      for (const char* key : {"y0", "y1", "uy"})
        if (auto* e = p.find(name, key))
          p.fail(e->line, std::string("key '") + key + "' is not valid on a 1D grid");
    }
    if (!(patch.xhi > patch.xlo)) p.fail(line, "[" + name + "] needs x1 > x0");
    if (two_d && !(patch.yhi > patch.ylo)) p.fail(line, "[" + name + "] needs y1 > y0");
    if (!(patch.R0 > 0.0)) p.fail(line, "[" + name + "] r must be strictly positive");
    if (!(patch.Q0 > 0.0)) p.fail(line, "[" + name + "] q must be strictly positive");
    cfg.ic.patches.push_back(patch);
  }
  // Pairwise disjointness of half-open boxes.
  for (std::size_t a = 0; a < cfg.ic.patches.size(); ++a)
    for (std::size_t b = a + 1; b < cfg.ic.patches.size(); ++b) {
      const Patch& pa = cfg.ic.patches[a];
      const Patch& pb = cfg.ic.patches[b];
      const bool x_overlap = pa.xlo < pb.xhi && pb.xlo < pa.xhi;
      const bool y_overlap = !two_d || (pa.ylo < pb.yhi && pb.ylo < pa.yhi);
      if (x_overlap && y_overlap) p.fail(pa.name + " overlaps " + pb.name);
    }

  // ---- [solver] ----
  p.check_no_unknown("solver",
                     {"cfl", "t_end", "flux", "bc", "output_stride", "fixed_dt"});
  cfg.solver.cfl = p.number("solver", "cfl").value_or(0.9);
  cfg.solver.t_end = p.number("solver", "t_end").value_or(0.0);
  cfg.solver.fixed_dt = p.number("solver", "fixed_dt").value_or(0.0);
  cfg.solver.output_stride =
      static_cast<int>(p.integer("solver", "output_stride").value_or(0));
  if (auto v = p.text("solver", "flux")) {
    if (*v != "rusanov")
      p.fail(p.find("solver", "flux")->line, "solver.flux must be 'rusanov'");
  }
  if (auto v = p.text("solver", "bc")) {
    if (*v == "reflecting")
      cfg.solver.bc = Bc::reflecting;
    else if (*v == "periodic")
      cfg.solver.bc = Bc::periodic;
    else
      p.fail(p.find("solver", "bc")->line, "solver.bc must be 'reflecting' or 'periodic'");
  }
  if (p.has("solver")) {
    const long line = p.sections["solver"].line;
    if (!(cfg.solver.cfl > 0.0 && cfg.solver.cfl <= 1.0))
      p.fail(line, "solver.cfl must lie in (0, 1]");
    if (p.find("solver", "t_end") && !(cfg.solver.t_end > 0.0))
      p.fail(line, "solver.t_end must be positive");
    if (cfg.solver.fixed_dt < 0.0) p.fail(line, "solver.fixed_dt must be non-negative");
    if (cfg.solver.output_stride < 0) p.fail(line, "solver.output_stride must be >= 0");
  }

  // ---- [output] ----
  p.check_no_unknown("output", {"directory"});
  if (auto v = p.text("output", "directory")) cfg.output_dir = *v;

  // ---- [subsolution] ----
  p.check_no_unknown("subsolution", {"margin"});
  cfg.subsolution_margin = p.number("subsolution", "margin").value_or(1e-6);
  if (!(cfg.subsolution_margin >= 0.0))
    p.fail("subsolution.margin must be non-negative");

  // ---- [table] ----
  p.check_no_unknown("table", {"r_min", "r_max", "q_min", "q_max", "n"});
  cfg.table.r_min = p.number("table", "r_min").value_or(cfg.table.r_min);
  cfg.table.r_max = p.number("table", "r_max").value_or(cfg.table.r_max);
  cfg.table.q_min = p.number("table", "q_min").value_or(cfg.table.q_min);
  cfg.table.q_max = p.number("table", "q_max").value_or(cfg.table.q_max);
  cfg.table.n = static_cast<int>(p.integer("table", "n").value_or(cfg.table.n));
  if (p.has("table")) {
    const long line = p.sections["table"].line;
    if (!(cfg.table.r_min > 0.0 && cfg.table.r_max > cfg.table.r_min))
      p.fail(line, "table r range must satisfy 0 < r_min < r_max");
    if (!(cfg.table.q_min > 0.0 && cfg.table.q_max > cfg.table.q_min))
      p.fail(line, "table q range must satisfy 0 < q_min < q_max");
    if (cfg.table.n < 2) p.fail(line, "table.n must be at least 2");
  }

  // Unknown sections.
  static const std::set<std::string> known = {"scenario", "eos",    "grid",
                                              "solver",   "output", "subsolution", "table"};
  for (const auto& [name, sec] : p.sections)
    if (!known.count(name) && name.rfind("ic.patch.", 0) != 0)
      p.fail(sec.line, "unknown section [" + name + "]");

  if (!p.errors.empty()) {
    std::string all = "configuration invalid:";
    for (const std::string& e : p.errors) all += "\n  " + e;
    throw ConfigError(all);
  }
  cfg.solver.eos = cfg.eos;
  return cfg;
}

}  // namespace twofluid
