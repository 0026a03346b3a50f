#pragma once

#include <Eigen/Core>

#include "thinfb/grid.hpp"

namespace thinfb {

/// Gauss-Legendre rule on [-1,1].
struct GaussLegendre {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Cached, thread-safe.
const GaussLegendre& gauss_legendre(int m);

/// Points (dim x m) and weights.
struct QuadratureSet {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return weights.size(); }
};

/// Rule on the unit sphere S^n split at the equator {x_{n+1} = 0}, so no
/// node lies on the thin plane and each half is integrated by its own
/// Gauss rule. n = 1: Gauss-Legendre in the angle on [0,pi] and [pi,2pi].
/// n = 2: latitude-longitude product, Gauss-Legendre in cos(polar angle) per
/// hemisphere times the trapezoid rule in longitude. `m` is the number of
/// nodes per half great circle.
QuadratureSet unit_sphere_rule(int n, int m);

double ball_volume(int n, double r);
double sphere_area(int n, double r);

/// Quadrature for B_r(x0) and ∂B_r(x0) resolving the grid: roughly
/// `density` nodes per grid cell along radii and arcs.
struct BallQuadrature {
  Point center;
  double radius = 0.0;
  QuadratureSet interior;
  QuadratureSet surface;
};

/// Throws ResolutionError when r < 8h and DomainError when the ball leaves
/// the cube.
BallQuadrature make_ball_quadrature(const Grid& grid, const Point& center, double r, double density = 2.0);

/// Pre-checks shared by every ball-based operation.
void require_resolvable_ball(const Grid& grid, const Point& center, double r);

}  // namespace thinfb
