#include "thinfb/solver.hpp"

namespace thinfb {

namespace {

void reduced_row(const double* a_packed, const double* g, const double* grad, double a0, int d, double* out) {
  for (int i = 0; i < d; ++i) {
    double v = g[i];
    for (int j = 0; j < d; ++j) {
      const double delta_minus_a = (i == j ? 1.0 : 0.0) - a_packed[packed_index(d, i, j)];
      const double dw = grad[j] - (j == d - 1 ? a0 : 0.0);
      v += delta_minus_a * dw;
    }
    v += a0 * ((i == d - 1 ? 1.0 : 0.0) - a_packed[packed_index(d, i, d - 1)]);
    out[i] = v;
  }
}

}  // namespace

VectorGridField derive_G(const GridField& w, const CoefficientField& c, double a0) {
  const Grid& grid = w.grid();
  if (!(c.grid() == grid)) throw Error(ErrorKind::precondition, "derive_G: solution and coefficients live on different grids");
  const int d = grid.dim();
  const GradientField grad = gradient(w);
  VectorGridField out{grid, NodalArray(grid.node_count(), d), NodalArray(grid.plane_count(), d)};
  for (Index node = 0; node < grid.node_count(); ++node)
    reduced_row(c.a().row(node).data(), c.g().row(node).data(), grad.nodal.row(node).data(), a0, d,
                out.values.row(node).data());
  for (Index p = 0; p < grid.plane_count(); ++p) {
    const Index node = grid.plane_node(p);
    reduced_row(c.a().row(node).data(), c.g().row(node).data(), grad.plane_lower.row(p).data(), a0, d,
                out.plane_lower.row(p).data());
  }
  return out;
}

}  // namespace thinfb
