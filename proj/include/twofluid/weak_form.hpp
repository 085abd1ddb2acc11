#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "twofluid/energy.hpp"
#include "twofluid/eos.hpp"
#include "twofluid/grid.hpp"

namespace twofluid {

/// Smooth space-time test function with analytic derivatives.
struct TestFunction {
  std::string name;
  std::function<double(double t, double x, double y)> val;
  std::function<double(double t, double x, double y)> ddt;
  std::function<double(double t, double x, double y)> ddx;
  std::function<double(double t, double x, double y)> ddy;
};

struct VectorTestFunction {
  std::string name;
  TestFunction x;
  TestFunction y;  // zero function in 1D
};

namespace weak_detail {

inline TestFunction zero_fn() {
  auto z = [](double, double, double) { return 0.0; };
  return {"zero", z, z, z, z};
}

// Time cut-off: 1 at t = 0 and 0 at t = T with a flat tangent, so the
// telescoped time quadrature closes the identity with the initial term.
struct TimeCut {
  double T;
  double eta(double t) const {
    const double c = std::cos(0.5 * M_PI * t / T);
    return c * c;
  }
  double deta(double t) const { return -(0.5 * M_PI / T) * std::sin(M_PI * t / T); }
};

inline TestFunction product(const std::string& name, TimeCut cut,
                            std::function<double(double, double)> s,
                            std::function<double(double, double)> sx,
                            std::function<double(double, double)> sy) {
  TestFunction f;
  f.name = name;
  f.val = [cut, s](double t, double x, double y) { return cut.eta(t) * s(x, y); };
  f.ddt = [cut, s](double t, double x, double y) { return cut.deta(t) * s(x, y); };
  f.ddx = [cut, sx](double t, double x, double y) { return cut.eta(t) * sx(x, y); };
  f.ddy = [cut, sy](double t, double x, double y) { return cut.eta(t) * sy(x, y); };
  return f;
}

}  // namespace weak_detail

/// Scalar test battery for the continuity identities. Low-order
/// trigonometric profiles: their cell-midpoint quadrature is exact to
/// rounding on a uniform grid, so constant-state traces telescope to zero.
inline std::vector<TestFunction> scalar_test_battery(const Grid& g, Bc bc, double T) {
  using weak_detail::product;
  const weak_detail::TimeCut cut{T};
  const double lx = g.x1 - g.x0, x0 = g.x0;
  const double ly = g.y1 - g.y0, y0 = g.y0;
  std::vector<TestFunction> fns;
  auto one = [](double, double) { return 1.0; };
  auto zero = [](double, double) { return 0.0; };
  fns.push_back(product("eta", cut, one, zero, zero));
  if (bc == Bc::periodic) {
    const double kx = 2.0 * M_PI / lx;
    fns.push_back(product("eta*sin_x", cut,
                          [=](double x, double) { return std::sin(kx * (x - x0)); },
                          [=](double x, double) { return kx * std::cos(kx * (x - x0)); },
                          zero));
    fns.push_back(product("eta*cos_x", cut,
                          [=](double x, double) { return std::cos(kx * (x - x0)); },
                          [=](double x, double) { return -kx * std::sin(kx * (x - x0)); },
                          zero));
    if (g.dim == 2) {
      const double ky = 2.0 * M_PI / ly;
      fns.push_back(product("eta*sin_y", cut,
                            [=](double, double y) { return std::sin(ky * (y - y0)); },
                            zero,
                            [=](double, double y) { return ky * std::cos(ky * (y - y0)); }));
    }
  } else {
    const double kx = M_PI / lx;
    fns.push_back(product("eta*cos_x", cut,
                          [=](double x, double) { return std::cos(kx * (x - x0)); },
                          [=](double x, double) { return -kx * std::sin(kx * (x - x0)); },
                          zero));
    if (g.dim == 2) {
      const double ky = M_PI / ly;
      fns.push_back(product("eta*cos_y", cut,
                            [=](double, double y) { return std::cos(ky * (y - y0)); },
                            zero,
                            [=](double, double y) { return -ky * std::sin(ky * (y - y0)); }));
    }
  }
  return fns;
}

/// Vector test battery for the momentum identity. Under walls the normal
/// component vanishes on the boundary, as the identity requires.
inline std::vector<VectorTestFunction> momentum_test_battery(const Grid& g, Bc bc, double T) {
  using weak_detail::product;
  using weak_detail::zero_fn;
  const weak_detail::TimeCut cut{T};
  const double lx = g.x1 - g.x0, x0 = g.x0;
  const double ly = g.y1 - g.y0, y0 = g.y0;
  auto zero = [](double, double) { return 0.0; };
  std::vector<VectorTestFunction> fns;
  if (bc == Bc::periodic) {
    const double kx = 2.0 * M_PI / lx;
    fns.push_back({"x:eta*sin_x",
                   product("eta*sin_x", cut,
                           [=](double x, double) { return std::sin(kx * (x - x0)); },
                           [=](double x, double) { return kx * std::cos(kx * (x - x0)); },
                           zero),
                   zero_fn()});
    fns.push_back({"x:eta*cos_x",
                   product("eta*cos_x", cut,
                           [=](double x, double) { return std::cos(kx * (x - x0)); },
                           [=](double x, double) { return -kx * std::sin(kx * (x - x0)); },
                           zero),
                   zero_fn()});
    if (g.dim == 2) {
      const double ky = 2.0 * M_PI / ly;
      fns.push_back({"y:eta*sin_y", zero_fn(),
                     product("eta*sin_y", cut,
                             [=](double, double y) { return std::sin(ky * (y - y0)); }, zero,
                             [=](double, double y) { return ky * std::cos(ky * (y - y0)); })});
    }
  } else {
    const double kx = M_PI / lx;
    fns.push_back({"x:eta*sin_x",
                   product("eta*sin_x", cut,
                           [=](double x, double) { return std::sin(kx * (x - x0)); },
                           [=](double x, double) { return kx * std::cos(kx * (x - x0)); },
                           zero),
                   zero_fn()});
    if (g.dim == 2) {
      const double ky = M_PI / ly;
      fns.push_back({"y:eta*sin_y", zero_fn(),
                     product("eta*sin_y", cut,
                             [=](double, double y) { return std::sin(ky * (y - y0)); }, zero,
                             [=](double, double y) { return ky * std::cos(ky * (y - y0)); })});
    }
  }
  return fns;
}

struct WeakFormRow {
  std::string identity;  // continuity_R | continuity_Q | momentum
  std::string test_fn;
  double residual;
};

struct WeakFormReport {
  std::vector<WeakFormRow> rows;
  double max_continuity_R = 0.0;
  double max_continuity_Q = 0.0;
  double max_momentum = 0.0;
  double max_abs() const {
    return std::max({max_continuity_R, max_continuity_Q, max_momentum});
  }
};

/// Space-time residuals of the three weak-form identities on a trace of
/// uniformly spaced snapshots covering [0, T], against the supplied test
/// functions.
///
/// The time pairing sums U^k (phi^{k+1} - phi^k) over steps, which
/// telescopes against the initial-data term; the flux terms use cell
/// midpoint quadrature at the left time endpoints. For exact constant
/// states every term cancels to rounding; for smooth computed traces the
/// residual decays at first order under simultaneous space-time
/// refinement.
inline WeakFormReport weak_residual(std::span<const Snapshot> snaps, const EosSpec& eos,
                                    std::span<const TestFunction> scalar_fns,
                                    std::span<const VectorTestFunction> momentum_fns) {
  if (snaps.size() < 2) throw std::invalid_argument("weak_residual: need >= 2 snapshots");
  const Grid& g = snaps[0].field.grid;
  for (const Snapshot& s : snaps)
    if (!s.field.grid.same_shape(g))
      throw std::invalid_argument("weak_residual: snapshot grids mismatch");
  const std::size_t K = snaps.size() - 1;  // number of intervals
  const double dt = snaps[1].t - snaps[0].t;
  for (std::size_t k = 1; k <= K; ++k)
    if (std::abs(snaps[k].t - snaps[k - 1].t - dt) > 1e-9 * std::max(dt, 1.0))
      throw std::invalid_argument("weak_residual: snapshots not uniformly spaced");
  if (std::abs(snaps[0].t) > 1e-14)
    throw std::invalid_argument("weak_residual: trace must start at t = 0");
  const int n = g.cells();
  const double vol = g.cell_volume();

  // Pressure per snapshot (the momentum identity needs it).
  std::vector<std::vector<double>> pres(K + 1, std::vector<double>(n));
  for (std::size_t k = 0; k <= K; ++k)
    for (int i = 0; i < n; ++i)
      pres[k][i] = eos_evaluate(eos, {snaps[k].field.R[i], snaps[k].field.Q[i]}).p;

  WeakFormReport rep;

  auto continuity = [&](const char* ident, auto&& density_at) {
    double worst = 0.0;
    for (const TestFunction& fn : scalar_fns) {
      std::vector<double> terms;
      terms.reserve((K + 1) * n);
      for (std::size_t k = 0; k < K; ++k) {
        const double tk = snaps[k].t, tk1 = snaps[k + 1].t;
        const ConservedField& f = snaps[k].field;
        for (int j = 0; j < g.ny; ++j)
          for (int i = 0; i < g.nx; ++i) {
            const int idx = g.index(i, j);
            const double x = g.cx(i), y = g.cy(j);
            const double dens = density_at(f, idx);
            const double rho = f.R[idx] + f.Q[idx];
            const double ux = f.mx[idx] / rho;
            const double uy = g.dim == 2 ? f.my[idx] / rho : 0.0;
            double term = dens * (fn.val(tk1, x, y) - fn.val(tk, x, y));
            term += dt * dens * (ux * fn.ddx(tk, x, y) + uy * fn.ddy(tk, x, y));
            terms.push_back(term);
          }
      }
      // Initial-data pairing.
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const int idx = g.index(i, j);
          terms.push_back(density_at(snaps[0].field, idx) * fn.val(0.0, g.cx(i), g.cy(j)));
        }
      const double res = vol * pairwise_sum(terms);
      rep.rows.push_back({ident, fn.name, res});
      worst = std::max(worst, std::abs(res));
    }
    return worst;
  };

  rep.max_continuity_R =
      continuity("continuity_R", [](const ConservedField& f, int i) { return f.R[i]; });
  rep.max_continuity_Q =
      continuity("continuity_Q", [](const ConservedField& f, int i) { return f.Q[i]; });

  for (const VectorTestFunction& fn : momentum_fns) {
    std::vector<double> terms;
    terms.reserve((K + 1) * n);
    for (std::size_t k = 0; k < K; ++k) {
      const double tk = snaps[k].t, tk1 = snaps[k + 1].t;
      const ConservedField& f = snaps[k].field;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const int idx = g.index(i, j);
          const double x = g.cx(i), y = g.cy(j);
          const double mx = f.mx[idx];
          const double my = g.dim == 2 ? f.my[idx] : 0.0;
          const double rho = f.R[idx] + f.Q[idx];
          const double ux = mx / rho, uy = my / rho;
          double term = mx * (fn.x.val(tk1, x, y) - fn.x.val(tk, x, y)) +
                        my * (fn.y.val(tk1, x, y) - fn.y.val(tk, x, y));
          double flux = mx * ux * fn.x.ddx(tk, x, y) + mx * uy * fn.x.ddy(tk, x, y) +
                        my * ux * fn.y.ddx(tk, x, y) + my * uy * fn.y.ddy(tk, x, y);
          flux += pres[k][idx] * (fn.x.ddx(tk, x, y) + fn.y.ddy(tk, x, y));
          terms.push_back(term + dt * flux);
        }
    }
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int idx = g.index(i, j);
        const double x = g.cx(i), y = g.cy(j);
        const double my0 = g.dim == 2 ? snaps[0].field.my[idx] : 0.0;
        terms.push_back(snaps[0].field.mx[idx] * fn.x.val(0.0, x, y) +
                        my0 * fn.y.val(0.0, x, y));
      }
    const double res = vol * pairwise_sum(terms);
    rep.rows.push_back({"momentum", fn.name, res});
    rep.max_momentum = std::max(rep.max_momentum, std::abs(res));
  }
  return rep;
}

/// Same diagnostic with the default boundary-adapted trigonometric
/// battery.
inline WeakFormReport weak_residual(std::span<const Snapshot> snaps, const EosSpec& eos,
                                    Bc bc) {
  if (snaps.size() < 2) throw std::invalid_argument("weak_residual: need >= 2 snapshots");
  const Grid& g = snaps[0].field.grid;
  const double T = snaps.back().t;
  const auto scalar_fns = scalar_test_battery(g, bc, T);
  const auto momentum_fns = momentum_test_battery(g, bc, T);
  return weak_residual(snaps, eos, scalar_fns, momentum_fns);
}

}  // namespace twofluid
