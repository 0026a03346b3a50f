#include "thinfb/grid.hpp"

#include <sstream>

namespace thinfb {

Grid::Grid(int n, double h) : n_(n), h_(h) {
  if (n != 1 && n != 2) throw Error(ErrorKind::precondition, "grid: tangential dimension must be 1 or 2");
  if (!(h > 0.0) || h > 1.0) throw Error(ErrorKind::precondition, "grid: spacing must lie in (0, 1]");
  const double cells = 2.0 / h;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * cells)
    throw Error(ErrorKind::precondition, "grid: 2/h must be an integer");
  const long cells_i = static_cast<long>(rounded);
  if (cells_i % 2 != 0) throw Error(ErrorKind::precondition, "grid: 2/h must be even so that x=0 is a node");
  h_ = 2.0 / static_cast<double>(cells_i);
  per_axis_ = static_cast<int>(cells_i + 1);
  node_count_ = 1;
  for (int k = 0; k < dim(); ++k) node_count_ *= per_axis_;
  Index s = 1;
  for (int k = dim() - 1; k >= 0; --k) {
    strides_[k] = s;
    s *= per_axis_;
  }
}

Grid Grid::dyadic(int n, int level) {
  if (level < 1 || level > 14) throw Error(ErrorKind::precondition, "grid: dyadic level out of range");
  return Grid(n, std::ldexp(1.0, -level));
}

const char* to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    default: return "none";
  }
}

Parity parity_from_string(const std::string& s) {
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  if (s == "none" || s.empty()) return Parity::none;
  throw Error(ErrorKind::io, "unknown parity tag '" + s + "'");
}

GridField::GridField(Grid grid, Eigen::ArrayXd values, Parity parity)
    : grid_(grid), values_(std::move(values)), parity_(parity) {
  if (values_.size() != grid_.node_count())
    throw Error(ErrorKind::precondition, "grid field: value count does not match the grid");
  if (!values_.allFinite()) throw Error(ErrorKind::precondition, "grid field: non-finite values");
}

double GridField::parity_defect() const {
  if (parity_ == Parity::none) return 0.0;
  const int N = grid_.nodes_per_axis();
  const double sign = parity_ == Parity::even ? 1.0 : -1.0;
  double worst = 0.0;
  for (Index line = 0; line < grid_.plane_count(); ++line) {
    const Index base = line * N;
    for (int j = 0; j < N / 2; ++j)
      worst = std::max(worst, std::abs(values_[base + j] - sign * values_[base + N - 1 - j]));
  }
  return worst;
}

namespace {

Parity combined_parity(Parity a, Parity b) { return a == b ? a : Parity::none; }

void require_same_grid(const GridField& a, const GridField& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorKind::precondition, "grid field arithmetic on different grids");
}

}  // namespace

GridField operator+(const GridField& a, const GridField& b) {
  require_same_grid(a, b);
  return GridField(a.grid(), a.values() + b.values(), combined_parity(a.parity(), b.parity()));
}

GridField operator-(const GridField& a, const GridField& b) {
  require_same_grid(a, b);
  return GridField(a.grid(), a.values() - b.values(), combined_parity(a.parity(), b.parity()));
}

GridField operator*(double s, const GridField& f) { return GridField(f.grid(), s * f.values(), f.parity()); }

namespace detail {

void throw_outside(const Point& x) {
  std::ostringstream os;
  os << "point (" << x.transpose() << ") lies outside the cube [-1,1]^" << x.size();
  throw Error(ErrorKind::domain, os.str());
}

}  // namespace detail

GradientField gradient(const GridField& f) {
  const Grid& g = f.grid();
  const int d = g.dim();
  const int N = g.nodes_per_axis();
  const double h = g.h();
  const double* v = f.values().data();
  GradientField out{g, NodalArray(g.node_count(), d), NodalArray(g.plane_count(), d)};

  for (Index node = 0; node < g.node_count(); ++node) {
    const auto ijk = g.multi_index(node);
    for (int k = 0; k < d; ++k) {
      const Index s = g.stride(k);
      const int i = ijk[k];
      const bool normal_axis = k == d - 1;
      double value;
      if (i == 0 || (normal_axis && i == g.mid()))
        value = (-3.0 * v[node] + 4.0 * v[node + s] - v[node + 2 * s]) / (2.0 * h);
      else if (i == N - 1)
        value = (3.0 * v[node] - 4.0 * v[node - s] + v[node - 2 * s]) / (2.0 * h);
      else
        value = (v[node + s] - v[node - s]) / (2.0 * h);
      out.nodal(node, k) = value;
    }
  }
  for (Index p = 0; p < g.plane_count(); ++p) {
    const Index node = g.plane_node(p);
    for (int k = 0; k < d - 1; ++k) out.plane_lower(p, k) = out.nodal(node, k);
    const Index s = g.stride(d - 1);
    out.plane_lower(p, d - 1) = (3.0 * v[node] - 4.0 * v[node - s] + v[node - 2 * s]) / (2.0 * h);
  }
  return out;
}

}  // namespace thinfb
