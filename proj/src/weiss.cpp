#include <cmath>
#include <sstream>

#include <Eigen/Geometry>

#include "thinfb/analysis.hpp"

namespace thinfb {

void require_analysis_radius(const Grid& grid, const Point& x0, double r) { require_resolvable_ball(grid, x0, r); }

WeissTerms weiss_terms(const FieldWithGradient& w, const Point& x0, double r, double kappa) {
  const int n = w.grid().n();
  const auto q = make_ball_quadrature(w.grid(), x0, r);
  WeissTerms t;
  t.dirichlet = std::pow(r, -(n - 1 + 2.0 * kappa)) * integrate_gradient_squared(w.grad, q.interior);
  t.boundary = kappa * std::pow(r, -(n + 2.0 * kappa)) * integrate_squared(w.field, q.surface);
  return t;
}

double weiss(const FieldWithGradient& w, const Point& x0, double r, double kappa) {
  return weiss_terms(w, x0, r, kappa).value();
}

double weiss(const GridField& w, const Point& x0, double r, double kappa) {
  return weiss(FieldWithGradient(w), x0, r, kappa);
}

WeissProfile weiss_profile(const FieldWithGradient& w, const Point& x0, double kappa, std::vector<double> radii) {
  if (radii.empty()) {
    for (double r : radius_ladder(w.grid().h())) {
      bool inside = true;
      for (int k = 0; k < w.grid().dim(); ++k) inside &= std::abs(x0[k]) + r <= 1.0 + 1e-12;
      if (inside && r <= 0.5 + 1e-12) radii.push_back(r);
    }
  }
  WeissProfile prof{x0, kappa, {}};
  for (double r : radii) prof.samples.emplace_back(r, weiss(w, x0, r, kappa));
  return prof;
}

double frequency(const FieldWithGradient& w, const Point& x0, double r) {
  const auto q = make_ball_quadrature(w.grid(), x0, r);
  const double boundary = integrate_squared(w.field, q.surface);
  if (!(boundary > 0.0)) throw Error(ErrorKind::degenerate, "frequency: w vanishes on the sphere");
  return r * integrate_gradient_squared(w.grad, q.interior) / boundary;
}

Grid blowup_grid(const Grid& grid, const Point& x0, double r) {
  for (int k = 0; k < grid.dim(); ++k) {
    const double s = (x0[k] + 1.0) / grid.h();
    if (std::abs(s - std::round(s)) > 1e-9) return grid;
  }
  const double h = grid.h() / r;
  const double cells = 2.0 / h;
  if (h <= 0.125 + 1e-12 && std::abs(cells - std::round(cells)) < 1e-9 * cells &&
      static_cast<long>(std::round(cells)) % 2 == 0)
    return Grid(grid.n(), h);
  return grid;
}

GridField blowup(const GridField& w, const Point& x0, double r, BlowupMode mode) {
  const Grid& grid = w.grid();
  require_analysis_radius(grid, x0, r);
  const int d = grid.dim();
  const Grid target = blowup_grid(grid, x0, r);
  double a0 = 0.0;
  double scale = std::pow(r, -1.5);
  if (mode == BlowupMode::normalized) {
    a0 = project_linear(w, x0, 8.0 * grid.h()).a0;
    Eigen::ArrayXd v = w.values();
    for (Index i = 0; i < grid.node_count(); ++i) v[i] -= a0 * (grid.position(i)[d - 1] - x0[d - 1]);
    const double norm = norm_l2_mean(GridField(grid, std::move(v)), Region::make_ball(x0, r));
    // relative to w itself, so round-off left by removing ℓ counts as zero
    const double size = norm_l2_mean(w, Region::make_ball(x0, r));
    if (!(norm > 1e-10 * size) || !(norm > 1e-300)) throw Error(ErrorKind::degenerate, "blowup: w - ℓ vanishes on the ball");
    scale = 1.0 / norm;
  }
  Eigen::ArrayXd out(target.node_count());
  for (Index i = 0; i < target.node_count(); ++i) {
    const Point y = target.position(i);
    Point x = x0 + r * y;
    for (int k = 0; k < d; ++k) x[k] = std::clamp(x[k], -1.0, 1.0);
    out[i] = scale * (interpolate(w, x) - a0 * r * y[d - 1]);
  }
  const Parity parity = x0[d - 1] == 0.0 ? w.parity() : Parity::none;
  return GridField(target, std::move(out), mode == BlowupMode::normalized ? Parity::none : parity);
}

double weiss_rescaling_check(const GridField& w, const Point& x0, double r) {
  const double lhs = weiss(w, x0, r);
  const GridField wr = blowup(w, x0, r, BlowupMode::homogeneous);
  const double rhs = weiss(wr, origin(w.grid().dim()), 1.0);
  return std::abs(lhs - rhs);
}

double homogeneous_extension_energy(const SphereTrace& c, int n, int nodes_per_half_circle) {
  const auto rule = unit_sphere_rule(n, nodes_per_half_circle);
  const double delta = 1e-6;
  double grad_sq = 0.0, mass = 0.0;
  for (Eigen::Index q = 0; q < rule.size(); ++q) {
    const Point x = rule.points.col(q);
    const double v = c(x);
    mass += rule.weights[q] * v * v;
    std::vector<Point> tangents;
    if (n == 1) {
      Point t(2);
      t << -x[1], x[0];
      tangents.push_back(t);
    } else {
      const Eigen::Vector3d x3 = x;
      Eigen::Index axis;
      x3.cwiseAbs().minCoeff(&axis);
      const Eigen::Vector3d t1 = Eigen::Vector3d::Unit(axis).cross(x3).normalized();
      const Eigen::Vector3d t2 = x3.cross(t1);
      tangents.emplace_back(Point(t1));
      tangents.emplace_back(Point(t2));
    }
    for (const Point& t : tangents) {
      const Point plus = std::cos(delta) * x + std::sin(delta) * t;
      const Point minus = std::cos(delta) * x - std::sin(delta) * t;
      const double dc = (c(plus) - c(minus)) / (2.0 * delta);
      grad_sq += rule.weights[q] * dc * dc;
    }
  }
  return (grad_sq - (6.0 * n + 3.0) / 4.0 * mass) / (n + 2.0);
}

}  // namespace thinfb
