#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "thinfb/error.hpp"

namespace thinfb {

using Index = std::int64_t;

/// A point of R^{n+1}; never heap allocated (at most three components).
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

/// Row-major node × component storage used for nodal vector quantities.
using NodalArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform grid on the cube [-1,1]^{n+1}.
///
/// Nodes are numbered row-major with the normal coordinate x_{n+1} varying
/// fastest. The node count per axis is odd, so the origin and the thin plane
/// {x_{n+1} = 0} are exact node sets.
class Grid {
 public:
  Grid(int n, double h);

  /// h = 2^{-level}.
  static Grid dyadic(int n, int level);

  int n() const { return n_; }
  int dim() const { return n_ + 1; }
  double h() const { return h_; }
  int nodes_per_axis() const { return per_axis_; }
  Index node_count() const { return node_count_; }
  /// Per-axis index of the coordinate 0.
  int mid() const { return per_axis_ / 2; }
  Index stride(int axis) const { return strides_[axis]; }
  double coord(int i) const { return -1.0 + i * h_; }

  Index index(const std::array<int, 3>& ijk) const {
    Index idx = 0;
    for (int k = 0; k < dim(); ++k) idx += ijk[k] * strides_[k];
    return idx;
  }
  std::array<int, 3> multi_index(Index node) const {
    std::array<int, 3> ijk{0, 0, 0};
    for (int k = 0; k < dim(); ++k) {
      ijk[k] = static_cast<int>(node / strides_[k]);
      node -= ijk[k] * strides_[k];
    }
    return ijk;
  }
  Point position(Index node) const {
    const auto ijk = multi_index(node);
    Point x(dim());
    for (int k = 0; k < dim(); ++k) x[k] = coord(ijk[k]);
    return x;
  }

  bool on_boundary(Index node) const {
    const auto ijk = multi_index(node);
    for (int k = 0; k < dim(); ++k)
      if (ijk[k] == 0 || ijk[k] == per_axis_ - 1) return true;
    return false;
  }
  bool on_plane(Index node) const { return node % per_axis_ == mid(); }

  /// Thin-plane nodes are numbered row-major over the n tangential indices.
  Index plane_count() const { return node_count_ / per_axis_; }
  Index plane_node(Index p) const { return p * per_axis_ + mid(); }
  Index plane_index(Index node) const { return on_plane(node) ? node / per_axis_ : -1; }

  bool contains(const Point& x, double slack = 1e-12) const {
    for (int k = 0; k < dim(); ++k)
      if (std::abs(x[k]) > 1.0 + slack) return false;
    return true;
  }

  /// Mid-level grids for nested iteration: spacing 2h, still odd per axis.
  bool can_coarsen() const { return (per_axis_ - 1) % 4 == 0 && (per_axis_ - 1) / 2 >= 16; }
  Grid coarsened() const { return Grid(n_, 2.0 * h_); }

  bool operator==(const Grid& other) const { return n_ == other.n_ && per_axis_ == other.per_axis_; }

 private:
  int n_;
  double h_;
  int per_axis_;
  Index node_count_;
  std::array<Index, 3> strides_{};
};

enum class Parity { none, even, odd };

const char* to_string(Parity p);
Parity parity_from_string(const std::string& s);

/// Sampled scalar field on a Grid. Immutable once built.
class GridField {
 public:
  GridField(Grid grid, Eigen::ArrayXd values, Parity parity = Parity::none);

  static GridField zeros(const Grid& grid) { return GridField(grid, Eigen::ArrayXd::Zero(grid.node_count())); }

  template <typename F>
  static GridField sample(const Grid& grid, F&& f, Parity parity = Parity::none) {
    Eigen::ArrayXd v(grid.node_count());
    for (Index i = 0; i < grid.node_count(); ++i) v[i] = f(grid.position(i));
    return GridField(grid, std::move(v), parity);
  }

  const Grid& grid() const { return grid_; }
  const Eigen::ArrayXd& values() const { return values_; }
  double operator[](Index node) const { return values_[node]; }
  Parity parity() const { return parity_; }

  /// Max deviation from the tagged reflection symmetry x_{n+1} -> -x_{n+1}.
  double parity_defect() const;

  GridField with_parity(Parity p) const { return GridField(grid_, values_, p); }

 private:
  Grid grid_;
  Eigen::ArrayXd values_;
  Parity parity_;
};

GridField operator+(const GridField& a, const GridField& b);
GridField operator-(const GridField& a, const GridField& b);
GridField operator*(double s, const GridField& f);

namespace detail {

struct Cell {
  Index base;
  std::array<double, 3> t;
  int last;  // per-axis index of the base corner along x_{n+1}
};

inline Cell locate(const Grid& g, const Point& x) {
  Cell c{0, {0.0, 0.0, 0.0}, 0};
  const int top = g.nodes_per_axis() - 2;
  for (int k = 0; k < g.dim(); ++k) {
    const double s = (x[k] + 1.0) / g.h();
    int i = static_cast<int>(std::floor(s));
    i = i < 0 ? 0 : (i > top ? top : i);
    c.t[k] = s - i;
    c.base += i * g.stride(k);
    if (k == g.dim() - 1) c.last = i;
  }
  return c;
}

[[noreturn]] void throw_outside(const Point& x);

}  // namespace detail

/// Multilinear interpolation of nodal values; exact on multilinear functions.
inline double interpolate(const GridField& f, const Point& x) {
  const Grid& g = f.grid();
  if (!g.contains(x)) detail::throw_outside(x);
  const auto c = detail::locate(g, x);
  const int d = g.dim();
  const double* v = f.values().data();
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    Index idx = c.base;
    for (int k = 0; k < d; ++k) {
      const bool up = (corner >> k) & 1;
      w *= up ? c.t[k] : 1.0 - c.t[k];
      if (up) idx += g.stride(k);
    }
    acc += w * v[idx];
  }
  return acc;
}

/// Nodal gradient by centered differences. Across x_{n+1}=0 the normal
/// derivative is one-sided, so plane nodes carry an upper and a lower value.
struct GradientField {
  Grid grid;
  NodalArray nodal;        // node x dim; upper one-sided value on the plane
  NodalArray plane_lower;  // plane node x dim
};

GradientField gradient(const GridField& f);

/// Interpolated gradient; points strictly below the plane use the lower
/// one-sided plane values.
inline void interpolate_gradient(const GradientField& gf, const Point& x, double* out) {
  const Grid& g = gf.grid;
  if (!g.contains(x)) detail::throw_outside(x);
  const auto c = detail::locate(g, x);
  const int d = g.dim();
  const bool below = x[d - 1] < 0.0 && c.last == g.mid() - 1;
  for (int k = 0; k < d; ++k) out[k] = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    Index idx = c.base;
    for (int k = 0; k < d; ++k) {
      const bool up = (corner >> k) & 1;
      w *= up ? c.t[k] : 1.0 - c.t[k];
      if (up) idx += g.stride(k);
    }
    const double* row;
    if (below && ((corner >> (d - 1)) & 1))
      row = gf.plane_lower.row(g.plane_index(idx)).data();
    else
      row = gf.nodal.row(idx).data();
    for (int k = 0; k < d; ++k) out[k] += w * row[k];
  }
}

}  // namespace thinfb
