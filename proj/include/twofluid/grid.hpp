#pragma once

#include <stdexcept>
#include <vector>

#include "twofluid/linalg.hpp"

namespace twofluid {

enum class Bc { reflecting, periodic };

/// Uniform cell-centered box grid, 1D or 2D. In 1D ny = 1 and the y
/// extent is a unit dummy so cell volumes stay meaningful.
struct Grid {
  int dim = 1;
  int nx = 0, ny = 1;
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
  double dx = 0.0, dy = 1.0;

  static Grid make_1d(int nx, double x0, double x1) {
    if (nx < 1 || !(x1 > x0)) throw std::invalid_argument("grid: bad 1D extents");
    Grid g;
    g.dim = 1;
    g.nx = nx;
    g.ny = 1;
    g.x0 = x0;
    g.x1 = x1;
    g.dx = (x1 - x0) / nx;
    g.y0 = 0.0;
    g.y1 = 1.0;
    g.dy = 1.0;
    return g;
  }

  static Grid make_2d(int nx, int ny, double x0, double x1, double y0, double y1) {
    if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0))
      throw std::invalid_argument("grid: bad 2D extents");
    Grid g;
    g.dim = 2;
    g.nx = nx;
    g.ny = ny;
    g.x0 = x0;
    g.x1 = x1;
    g.y0 = y0;
    g.y1 = y1;
    g.dx = (x1 - x0) / nx;
    g.dy = (y1 - y0) / ny;
    return g;
  }

  int cells() const { return nx * ny; }
  int index(int i, int j) const { return j * nx + i; }
  double cx(int i) const { return x0 + (i + 0.5) * dx; }
  double cy(int j) const { return dim == 2 ? y0 + (j + 0.5) * dy : 0.0; }
  double cell_volume() const { return dim == 2 ? dx * dy : dx; }
  double domain_volume() const { return cells() * cell_volume(); }

  bool same_shape(const Grid& o) const {
    return dim == o.dim && nx == o.nx && ny == o.ny && x0 == o.x0 && x1 == o.x1 &&
           y0 == o.y0 && y1 == o.y1;
  }
};

/// Pointwise conserved state. The momentum is kept as a 3-vector even on
/// 1D/2D grids; unused components stay zero.
struct CellState {
  double R;
  double Q;
  Vec3 m;
};

/// Conserved fields of the two-fluid system on a grid: partial densities
/// and the mixture momentum (R+Q)u.
struct ConservedField {
  Grid grid;
  std::vector<double> R;
  std::vector<double> Q;
  std::vector<double> mx;
  std::vector<double> my;  // empty in 1D

  static ConservedField zeros(const Grid& g) {
    ConservedField f;
    f.grid = g;
    f.R.assign(g.cells(), 0.0);
    f.Q.assign(g.cells(), 0.0);
    f.mx.assign(g.cells(), 0.0);
    if (g.dim == 2) f.my.assign(g.cells(), 0.0);
    return f;
  }

  CellState cell(int idx) const {
    return {R[idx], Q[idx], {mx[idx], grid.dim == 2 ? my[idx] : 0.0, 0.0}};
  }
};

/// Mirror state across a wall with outward normal along `axis`: densities
/// and tangential momentum copied, normal momentum negated. This is the
/// ghost cell that enforces u.n = 0.
inline CellState reflect_ghost(const CellState& interior, int axis) {
  CellState g = interior;
  g.m[axis] = -g.m[axis];
  return g;
}

}  // namespace twofluid
