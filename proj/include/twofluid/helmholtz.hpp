#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "twofluid/grid.hpp"
#include "twofluid/linalg.hpp"

namespace twofluid {

struct ScalarField {
  Grid grid;
  std::vector<double> v;

  static ScalarField zeros(const Grid& g) { return {g, std::vector<double>(g.cells(), 0.0)}; }
};

/// Cell-centered vector field (x and, in 2D, y components).
struct VectorField {
  Grid grid;
  std::vector<double> x;
  std::vector<double> y;  // empty in 1D

  static VectorField zeros(const Grid& g) {
    VectorField f{g, std::vector<double>(g.cells(), 0.0), {}};
    if (g.dim == 2) f.y.assign(g.cells(), 0.0);
    return f;
  }
};

/// Face-normal components on the staggered grid. Under wall boundaries
/// there are nx+1 x-faces per row (indices 0 and nx are the walls); under
/// periodic boundaries there are nx, with face i sitting between cells
/// i-1 (mod nx) and i. The divergence and gradient below are exact
/// adjoints on this layout, which is what makes the decomposition exact
/// at solver tolerance.
struct FaceField {
  Grid grid;
  Bc bc;
  std::vector<double> fx;
  std::vector<double> fy;  // empty in 1D

  int nfx() const { return bc == Bc::reflecting ? grid.nx + 1 : grid.nx; }
  int nfy() const { return bc == Bc::reflecting ? grid.ny + 1 : grid.ny; }
  int xface(int i, int j) const { return j * nfx() + i; }
  int yface(int i, int j) const { return j * grid.nx + i; }

  static FaceField zeros(const Grid& g, Bc bc) {
    FaceField f{g, bc, {}, {}};
    f.fx.assign(f.nfx() * g.ny, 0.0);
    if (g.dim == 2) f.fy.assign(g.nx * f.nfy(), 0.0);
    return f;
  }
};

namespace helmholtz_detail {

inline int wrap(int i, int n) { return (i % n + n) % n; }

}  // namespace helmholtz_detail

/// Average a cell-centered vector field onto faces. Wall faces are set to
/// zero (the impermeable-boundary value); periodic faces wrap.
inline FaceField cell_to_faces(const VectorField& w, Bc bc) {
  const Grid& g = w.grid;
  FaceField f = FaceField::zeros(g, bc);
  for (int j = 0; j < g.ny; ++j) {
    if (bc == Bc::reflecting) {
      for (int i = 1; i < g.nx; ++i)
        f.fx[f.xface(i, j)] = 0.5 * (w.x[g.index(i - 1, j)] + w.x[g.index(i, j)]);
    } else {
      for (int i = 0; i < g.nx; ++i)
        f.fx[f.xface(i, j)] =
            0.5 * (w.x[g.index(helmholtz_detail::wrap(i - 1, g.nx), j)] + w.x[g.index(i, j)]);
    }
  }
  if (g.dim == 2) {
    for (int i = 0; i < g.nx; ++i) {
      if (bc == Bc::reflecting) {
        for (int j = 1; j < g.ny; ++j)
          f.fy[f.yface(i, j)] = 0.5 * (w.y[g.index(i, j - 1)] + w.y[g.index(i, j)]);
      } else {
        for (int j = 0; j < g.ny; ++j)
          f.fy[f.yface(i, j)] =
              0.5 * (w.y[g.index(i, helmholtz_detail::wrap(j - 1, g.ny))] + w.y[g.index(i, j)]);
      }
    }
  }
  return f;
}

/// Average face-normal components back to cell centers.
inline VectorField faces_to_cell(const FaceField& f) {
  const Grid& g = f.grid;
  VectorField w = VectorField::zeros(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int right = f.bc == Bc::reflecting ? i + 1 : helmholtz_detail::wrap(i + 1, g.nx);
      w.x[g.index(i, j)] = 0.5 * (f.fx[f.xface(i, j)] + f.fx[f.xface(right, j)]);
    }
  if (g.dim == 2) {
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int up = f.bc == Bc::reflecting ? j + 1 : helmholtz_detail::wrap(j + 1, g.ny);
        w.y[g.index(i, j)] = 0.5 * (f.fy[f.yface(i, j)] + f.fy[f.yface(i, up)]);
      }
  }
  return w;
}

inline ScalarField face_divergence(const FaceField& f) {
  const Grid& g = f.grid;
  ScalarField d = ScalarField::zeros(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int right = f.bc == Bc::reflecting ? i + 1 : helmholtz_detail::wrap(i + 1, g.nx);
      double val = (f.fx[f.xface(right, j)] - f.fx[f.xface(i, j)]) / g.dx;
      if (g.dim == 2) {
        const int up = f.bc == Bc::reflecting ? j + 1 : helmholtz_detail::wrap(j + 1, g.ny);
        val += (f.fy[f.yface(i, up)] - f.fy[f.yface(i, j)]) / g.dy;
      }
      d.v[g.index(i, j)] = val;
    }
  return d;
}

/// Discrete gradient of a cell scalar onto faces; wall faces carry zero
/// (homogeneous Neumann), periodic faces wrap.
inline FaceField face_gradient(const ScalarField& psi, Bc bc) {
  const Grid& g = psi.grid;
  FaceField f = FaceField::zeros(g, bc);
  for (int j = 0; j < g.ny; ++j) {
    if (bc == Bc::reflecting) {
      for (int i = 1; i < g.nx; ++i)
        f.fx[f.xface(i, j)] = (psi.v[g.index(i, j)] - psi.v[g.index(i - 1, j)]) / g.dx;
    } else {
      for (int i = 0; i < g.nx; ++i)
        f.fx[f.xface(i, j)] =
            (psi.v[g.index(i, j)] - psi.v[g.index(helmholtz_detail::wrap(i - 1, g.nx), j)]) /
            g.dx;
    }
  }
  if (g.dim == 2) {
    for (int i = 0; i < g.nx; ++i) {
      if (bc == Bc::reflecting) {
        for (int j = 1; j < g.ny; ++j)
          f.fy[f.yface(i, j)] = (psi.v[g.index(i, j)] - psi.v[g.index(i, j - 1)]) / g.dy;
      } else {
        for (int j = 0; j < g.ny; ++j)
          f.fy[f.yface(i, j)] =
              (psi.v[g.index(i, j)] - psi.v[g.index(i, helmholtz_detail::wrap(j - 1, g.ny))]) /
              g.dy;
      }
    }
  }
  return f;
}

inline double l2_grid_norm(const ScalarField& s) {
  std::vector<double> sq(s.v.size());
  for (std::size_t i = 0; i < s.v.size(); ++i) sq[i] = s.v[i] * s.v[i];
  return std::sqrt(s.grid.cell_volume() * pairwise_sum(sq));
}

struct NeumannProblem {
  ScalarField f;
  Bc bc = Bc::reflecting;
  double tol = 1e-10;
  int max_iter = 20000;
};

struct NeumannSolution {
  ScalarField psi;
  double residual;  // relative l2 residual of -lap(psi) = f
  int iterations;
};

/// Solve -lap(psi) = f with homogeneous Neumann (or periodic) boundary
/// conditions, zero-mean normalization, by conjugate gradients on the
/// compact 3/5-point Laplacian. The right-hand side must be compatible:
/// |integral of f| <= tol * ||f||.
inline NeumannSolution solve_neumann(const NeumannProblem& prob) {
  const Grid& g = prob.f.grid;
  const int n = g.cells();
  if (static_cast<int>(prob.f.v.size()) != n)
    throw std::invalid_argument("solve_neumann: rhs size does not match grid");

  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    ScalarField s{g, x};
    const ScalarField lap = face_divergence(face_gradient(s, prob.bc));
    for (int i = 0; i < n; ++i) out[i] = -lap.v[i];
  };
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> prod(n);
    for (int i = 0; i < n; ++i) prod[i] = a[i] * b[i];
    return pairwise_sum(prod);
  };

  std::vector<double> b = prob.f.v;
  const double norm_b = std::sqrt(dot(b, b));
  NeumannSolution out{ScalarField::zeros(g), 0.0, 0};
  if (norm_b == 0.0) return out;

  const double mean_b = pairwise_sum(b) / n;
  const double rms_b = norm_b / std::sqrt(double(n));
  if (std::abs(mean_b) > prob.tol * rms_b)
    throw std::invalid_argument(
        "solve_neumann: incompatible right-hand side (mean " + std::to_string(mean_b) +
        " vs rms " + std::to_string(rms_b) + ")");
  for (double& v : b) v -= mean_b;

  std::vector<double> x(n, 0.0), r = b, p = r, ap(n);
  double rr = dot(r, r);
  const double stop = prob.tol * norm_b;
  int iter = 0;
  while (iter < prob.max_iter && std::sqrt(rr) > stop) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    ++iter;
    if (iter % 64 == 0) {
      // Shave off rounding drift along the constant null direction.
      const double mx = pairwise_sum(x) / n;
      for (double& v : x) v -= mx;
    }
  }
  const double mx = pairwise_sum(x) / n;
  for (double& v : x) v -= mx;

  apply(x, ap);
  std::vector<double> res(n);
  for (int i = 0; i < n; ++i) res[i] = b[i] - ap[i];
  const double rel = std::sqrt(dot(res, res)) / norm_b;
  if (rel > 10.0 * prob.tol)
    throw std::runtime_error("solve_neumann: no convergence after " + std::to_string(iter) +
                             " iterations, relative residual " + std::to_string(rel));
  out.psi.v = std::move(x);
  out.residual = rel;
  out.iterations = iter;
  return out;
}

struct DecompResult {
  VectorField v;       // solenoidal part, cell-centered
  ScalarField psi;     // potential, zero mean
  FaceField v_face;    // face-native solenoidal part (exactly divergence-free)
  double div_v_norm;   // l2 grid norm of the face divergence of v_face
  double ortho_defect; // |<v, grad psi>| / (||v|| ||grad psi||), face inner product
  double cg_residual;
};

/// Helmholtz splitting w = v + grad(psi): psi solves the Neumann problem
/// with right-hand side -div(w), and v is the remainder. The splitting is
/// computed on the staggered representation, where div(grad) equals the
/// Laplacian being solved, so div(v) vanishes to solver tolerance and the
/// two parts are discretely orthogonal; the returned cell field is the
/// face average. Requires w.n = 0 on walls.
inline DecompResult decompose(const VectorField& w, Bc bc, double tol = 1e-10,
                              int max_iter = 20000) {
  const Grid& g = w.grid;
  if (bc == Bc::reflecting) {
    // Structurally incompatible inputs (bulk flow through a wall) are
    // rejected; smooth compatible fields carry only O(dx) traces next to
    // the wall and pass.
    double wmax = 0.0;
    for (double v : w.x) wmax = std::max(wmax, std::abs(v));
    for (double v : w.y) wmax = std::max(wmax, std::abs(v));
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j) {
      worst = std::max({worst, std::abs(w.x[g.index(0, j)]), std::abs(w.x[g.index(g.nx - 1, j)])});
    }
    if (g.dim == 2)
      for (int i = 0; i < g.nx; ++i)
        worst = std::max({worst, std::abs(w.y[g.index(i, 0)]), std::abs(w.y[g.index(i, g.ny - 1)])});
    if (worst > 0.25 * wmax && wmax > 0.0)
      throw std::invalid_argument(
          "decompose: field does not satisfy w.n = 0 on the boundary");
  }

  const FaceField wf = cell_to_faces(w, bc);
  ScalarField rhs = face_divergence(wf);
  for (double& v : rhs.v) v = -v;
  const NeumannSolution sol = solve_neumann({rhs, bc, tol, max_iter});

  const FaceField grad = face_gradient(sol.psi, bc);
  FaceField vf = wf;
  for (std::size_t i = 0; i < vf.fx.size(); ++i) vf.fx[i] -= grad.fx[i];
  for (std::size_t i = 0; i < vf.fy.size(); ++i) vf.fy[i] -= grad.fy[i];

  DecompResult out{VectorField::zeros(g), sol.psi, vf, 0.0, 0.0, sol.residual};
  const VectorField grad_cell = faces_to_cell(grad);
  out.v.x.resize(g.cells());
  for (int i = 0; i < g.cells(); ++i) out.v.x[i] = w.x[i] - grad_cell.x[i];
  if (g.dim == 2) {
    out.v.y.resize(g.cells());
    for (int i = 0; i < g.cells(); ++i) out.v.y[i] = w.y[i] - grad_cell.y[i];
  }

  out.div_v_norm = l2_grid_norm(face_divergence(vf));
  double vg = 0.0, vv = 0.0, gg = 0.0;
  for (std::size_t i = 0; i < vf.fx.size(); ++i) {
    vg += vf.fx[i] * grad.fx[i];
    vv += vf.fx[i] * vf.fx[i];
    gg += grad.fx[i] * grad.fx[i];
  }
  for (std::size_t i = 0; i < vf.fy.size(); ++i) {
    vg += vf.fy[i] * grad.fy[i];
    vv += vf.fy[i] * vf.fy[i];
    gg += grad.fy[i] * grad.fy[i];
  }
  out.ortho_defect =
      (vv > 0.0 && gg > 0.0) ? std::abs(vg) / (std::sqrt(vv) * std::sqrt(gg)) : 0.0;
  return out;
}

struct PotentialSeries {
  std::vector<double> times;
  std::vector<ScalarField> psi;
  std::vector<ScalarField> dpsi_dt;
};

/// Potentials along a run: for each snapshot time, solves the Neumann
/// problem whose right-hand side is the time derivative of R (second-order
/// differences, one-sided at the ends). Mass conservation makes the data
/// compatible automatically; that is checked, not assumed.
inline PotentialSeries potential_from_run(const Grid& g, const std::vector<double>& times,
                                          const std::vector<std::vector<double>>& r_snaps,
                                          Bc bc, double tol = 1e-10) {
  const std::size_t K = times.size();
  if (K < 3) throw std::invalid_argument("potential_from_run: need at least 3 snapshots");
  if (r_snaps.size() != K)
    throw std::invalid_argument("potential_from_run: times/snapshots size mismatch");
  const double dt = times[1] - times[0];
  for (std::size_t k = 1; k < K; ++k)
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * std::max(dt, 1.0))
      throw std::invalid_argument("potential_from_run: snapshots not uniformly spaced");

  const int n = g.cells();
  PotentialSeries out;
  out.times = times;
  for (std::size_t k = 0; k < K; ++k) {
    ScalarField f = ScalarField::zeros(g);
    for (int i = 0; i < n; ++i) {
      double d;
      if (k == 0)
        d = (-3.0 * r_snaps[0][i] + 4.0 * r_snaps[1][i] - r_snaps[2][i]) / (2.0 * dt);
      else if (k == K - 1)
        d = (3.0 * r_snaps[K - 1][i] - 4.0 * r_snaps[K - 2][i] + r_snaps[K - 3][i]) /
            (2.0 * dt);
      else
        d = (r_snaps[k + 1][i] - r_snaps[k - 1][i]) / (2.0 * dt);
      f.v[i] = d;
    }
    out.psi.push_back(solve_neumann({f, bc, tol}).psi);
  }
  for (std::size_t k = 0; k < K; ++k) {
    ScalarField d = ScalarField::zeros(g);
    for (int i = 0; i < n; ++i) {
      if (k == 0)
        d.v[i] = (-3.0 * out.psi[0].v[i] + 4.0 * out.psi[1].v[i] - out.psi[2].v[i]) /
                 (2.0 * dt);
      else if (k == K - 1)
        d.v[i] = (3.0 * out.psi[K - 1].v[i] - 4.0 * out.psi[K - 2].v[i] +
                  out.psi[K - 3].v[i]) /
                 (2.0 * dt);
      else
        d.v[i] = (out.psi[k + 1].v[i] - out.psi[k - 1].v[i]) / (2.0 * dt);
    }
    out.dpsi_dt.push_back(std::move(d));
  }
  return out;
}

}  // namespace twofluid
