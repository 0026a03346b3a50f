#include "thinfb/norms.hpp"

#include <cmath>

namespace thinfb {

double integrate(const GridField& f, const QuadratureSet& q) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < q.size(); ++j) acc += q.weights[j] * interpolate(f, q.points.col(j));
  return acc;
}

double integrate_squared(const GridField& f, const QuadratureSet& q) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    const double v = interpolate(f, q.points.col(j));
    acc += q.weights[j] * v * v;
  }
  return acc;
}

double integrate_gradient_squared(const GradientField& g, const QuadratureSet& q) {
  const int d = g.grid.dim();
  double acc = 0.0;
  double buf[3];
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    interpolate_gradient(g, q.points.col(j), buf);
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += buf[k] * buf[k];
    acc += q.weights[j] * s;
  }
  return acc;
}

namespace {

double region_l2_squared(const GridField& f, const Region& region) {
  const auto q = make_ball_quadrature(f.grid(), region.center, region.r);
  return integrate_squared(f, region.kind == Region::ball ? q.interior : q.surface);
}

}  // namespace

double norm_l2_tilde(const GridField& f, const Region& region) {
  return std::sqrt(region_l2_squared(f, region)) / region.measure(f.grid().n());
}

double norm_l2_mean(const GridField& f, const Region& region) {
  return std::sqrt(region_l2_squared(f, region) / region.measure(f.grid().n()));
}

double dirichlet_energy(const FieldWithGradient& f, const Point& center, double r) {
  const auto q = make_ball_quadrature(f.grid(), center, r);
  return integrate_gradient_squared(f.grad, q.interior);
}

double dirichlet_energy(const GridField& f, const Point& center, double r) {
  return dirichlet_energy(FieldWithGradient(f), center, r);
}

Point make_point(std::initializer_list<double> xs, int dim) {
  Point p = Point::Zero(dim);
  int k = 0;
  for (double x : xs) {
    if (k >= dim) break;
    p[k++] = x;
  }
  return p;
}

Point origin(int dim) { return Point::Zero(dim); }

}  // namespace thinfb
