#include <catch2/catch_amalgamated.hpp>

#include "twofluid/config.hpp"

using namespace twofluid;
using Catch::Matchers::ContainsSubstring;

namespace {

const char* kMinimal = R"(
[eos]
kind = two_fluid
gamma_plus = 2.0
gamma_minus = 2.0

[grid]
dim = 1
nx = 64
x0 = 0.0
x1 = 1.0

[ic.patch.1]
x0 = 0.0
x1 = 1.0
r = 1.0
q = 1.0
)";

}  // namespace

TEST_CASE("minimal config parses and defaults are filled") {
  const RunConfig cfg = parse_config(kMinimal);
  CHECK(cfg.solver.cfl == 0.9);
  CHECK(cfg.solver.flux == FluxScheme::rusanov);
  CHECK(cfg.solver.bc == Bc::reflecting);
  CHECK(cfg.eos.kind == EosKind::two_fluid);
  CHECK(cfg.eos.phase.gamma == 1.0);
  REQUIRE(cfg.grid.has_value());
  CHECK(cfg.grid->nx == 64);
  REQUIRE(cfg.ic.patches.size() == 1);
  CHECK(cfg.ic.patches[0].R0 == 1.0);
  CHECK(cfg.output_dir == "out");
  CHECK_THROWS_AS(cfg.require_run_ready(), ConfigError);  // no t_end given
}

TEST_CASE("named invariants surface in the error messages") {
  SECTION("gamma_plus") {
    CHECK_THROWS_WITH(parse_config("[eos]\nkind = two_fluid\ngamma_plus = 0.9\n"),
                      ContainsSubstring("gamma_plus must exceed 1"));
  }
  SECTION("overlapping patches name both") {
    const std::string text = std::string(kMinimal) +
                             "\n[ic.patch.2]\nx0 = 0.5\nx1 = 1.5\nr = 1.0\nq = 1.0\n";
    CHECK_THROWS_WITH(parse_config(text),
                      ContainsSubstring("ic.patch.1 overlaps ic.patch.2"));
  }
  SECTION("cfl range") {
    const std::string text = std::string(kMinimal) + "\n[solver]\ncfl = 1.5\nt_end = 1\n";
    CHECK_THROWS_WITH(parse_config(text), ContainsSubstring("cfl must lie in (0, 1]"));
  }
  SECTION("positive patch densities") {
    CHECK_THROWS_WITH(
        parse_config("[grid]\ndim = 1\nnx = 4\nx0 = 0\nx1 = 1\n"
                     "[ic.patch.1]\nx0 = 0\nx1 = 1\nr = 0.0\nq = 1.0\n"),
        ContainsSubstring("r must be strictly positive"));
  }
}

TEST_CASE("unknown keys are errors with line numbers") {
  const std::string text = "[solver]\ncfl = 0.5\ncf1 = 0.5\n";
  CHECK_THROWS_WITH(parse_config(text), ContainsSubstring("line 3: unknown key 'cf1'"));
  CHECK_THROWS_WITH(parse_config("[nonsense]\nx = 1\n"),
                    ContainsSubstring("unknown section [nonsense]"));
  CHECK_THROWS_WITH(parse_config("[eos]\nkind = two_fluid\nbeta = 2\n"),
                    ContainsSubstring("not valid for eos.kind"));
}

TEST_CASE("syntax problems carry line numbers") {
  CHECK_THROWS_WITH(parse_config("[eos\nkind = two_fluid\n"),
                    ContainsSubstring("line 1: malformed section header"));
  CHECK_THROWS_WITH(parse_config("[eos]\nkind two_fluid\n"),
                    ContainsSubstring("line 2: expected 'key = value'"));
  CHECK_THROWS_WITH(parse_config("[solver]\ncfl = fast\n"),
                    ContainsSubstring("line 2: value of 'cfl' is not a number"));
  CHECK_THROWS_WITH(parse_config("[solver]\ncfl = 0.5\ncfl = 0.6\n"),
                    ContainsSubstring("line 3: duplicate key 'cfl'"));
}

TEST_CASE("dimension-dependent keys are validated") {
  CHECK_THROWS_WITH(parse_config("[grid]\ndim = 1\nnx = 8\nx0 = 0\nx1 = 1\nny = 4\n"),
                    ContainsSubstring("not valid for dim = 1"));
  const RunConfig cfg = parse_config(
      "[grid]\ndim = 2\nnx = 8\nny = 4\nx0 = 0\nx1 = 1\ny0 = 0\ny1 = 2\n"
      "[ic.patch.1]\nx0 = 0\nx1 = 1\ny0 = 0\ny1 = 2\nr = 1\nq = 1\nux = 0.5\nuy = -0.25\n");
  REQUIRE(cfg.grid.has_value());
  CHECK(cfg.grid->dim == 2);
  CHECK(cfg.ic.patches[0].u0[1] == -0.25);
}

TEST_CASE("alternative pressure laws parse") {
  const RunConfig lg = parse_config("[eos]\nkind = liquid_gas\nc_const = 2\nk0 = 1\na0 = 3\n");
  CHECK(lg.eos.kind == EosKind::liquid_gas);
  CHECK(lg.eos.lg.a0 == 3.0);
  const RunConfig fp = parse_config("[eos]\nkind = fluid_particle\ngamma = 1.4\nbeta = 2\n");
  CHECK(fp.eos.kind == EosKind::fluid_particle);
  CHECK_THROWS_WITH(parse_config("[eos]\nkind = magic\n"),
                    ContainsSubstring("eos.kind must be one of"));
}
