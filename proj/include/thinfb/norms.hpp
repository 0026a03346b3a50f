#pragma once

#include "thinfb/grid.hpp"
#include "thinfb/quadrature.hpp"

namespace thinfb {

/// A ball B_r(x0) or its boundary sphere.
struct Region {
  enum Kind { ball, sphere };
  Kind kind = ball;
  Point center;
  double r = 0.0;

  static Region make_ball(Point center, double r) { return {ball, std::move(center), r}; }
  static Region make_sphere(Point center, double r) { return {sphere, std::move(center), r}; }
  double measure(int n) const { return kind == ball ? ball_volume(n, r) : sphere_area(n, r); }
};

/// A field together with its one-sided nodal gradient; build once, analyse
/// at many radii.
struct FieldWithGradient {
  GridField field;
  GradientField grad;

  explicit FieldWithGradient(GridField f) : field(std::move(f)), grad(gradient(field)) {}
  const Grid& grid() const { return field.grid(); }
};

/// Σ_q w_q f(x_q) and Σ_q w_q f(x_q)^2 over a quadrature set.
double integrate(const GridField& f, const QuadratureSet& q);
double integrate_squared(const GridField& f, const QuadratureSet& q);
/// Σ_q w_q |∇f(x_q)|^2.
double integrate_gradient_squared(const GradientField& g, const QuadratureSet& q);

/// (1/|Ω|) (∫_Ω f^2)^{1/2}, the literal normalized norm.
double norm_l2_tilde(const GridField& f, const Region& region);

/// |Ω|^{-1/2} (∫_Ω f^2)^{1/2}, the root-mean-square norm. Power laws
/// r^κ in this norm have log-log slope exactly κ.
double norm_l2_mean(const GridField& f, const Region& region);

/// ∫_{B_r(x0)} |∇f|^2.
double dirichlet_energy(const FieldWithGradient& f, const Point& center, double r);
double dirichlet_energy(const GridField& f, const Point& center, double r);

/// Point of the grid dimension from a coordinate list (missing entries 0).
Point make_point(std::initializer_list<double> xs, int dim);
Point origin(int dim);

}  // namespace thinfb
