#include <cmath>
#include <numbers>

#include "thinfb/analysis.hpp"

namespace thinfb {

LinearProfile project_linear(const GridField& w, const Point& x0, double r) {
  const Grid& grid = w.grid();
  require_analysis_radius(grid, x0, r);
  const int d = grid.dim();
  const auto q = make_ball_quadrature(grid, x0, r).interior;
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    const double t = q.points(d - 1, j) - x0[d - 1];
    num += q.weights[j] * interpolate(w, q.points.col(j)) * t;
    den += q.weights[j] * t * t;
  }
  return LinearProfile{num / den};
}

double evaluate_centered(const ConeProfile& p, const Point& x0, const Point& x) {
  const int n = static_cast<int>(x.size()) - 1;
  return p.c * kernels::h32((x - x0).head(n).dot(p.xi), x[n] - x0[n]);
}

namespace {

struct SphereSamples {
  Eigen::MatrixXd y;  // points relative to x0
  Eigen::VectorXd weights;
  Eigen::VectorXd w;
};

struct Score {
  double inner = 0.0;
  double profile_sq = 0.0;
  double value() const { return inner > 0.0 ? inner * inner / profile_sq : 0.0; }
};

Score score(const SphereSamples& s, const Point& xi) {
  const int n = static_cast<int>(xi.size());
  Score sc;
  for (Eigen::Index j = 0; j < s.weights.size(); ++j) {
    const double p = kernels::h32(s.y.col(j).head(n).dot(xi), s.y(n, j));
    sc.inner += s.weights[j] * s.w[j] * p;
    sc.profile_sq += s.weights[j] * p * p;
  }
  return sc;
}

Point direction(double psi) {
  Point xi(2);
  xi << std::sin(psi), std::cos(psi);
  return xi;
}

}  // namespace

ConeProjection project_cone(const GridField& w, const Point& x0, double r) {
  const Grid& grid = w.grid();
  require_analysis_radius(grid, x0, r);
  const int n = grid.n();
  const auto q = make_ball_quadrature(grid, x0, r).surface;
  SphereSamples s{q.points.colwise() - Eigen::VectorXd(x0), q.weights, Eigen::VectorXd(q.size())};
  double w_sq = 0.0;
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    s.w[j] = interpolate(w, q.points.col(j));
    w_sq += q.weights[j] * s.w[j] * s.w[j];
  }

  Point best_xi;
  Score best;
  if (n == 1) {
    // ξ = e_n first so that ties keep the smaller angle
    for (double sign : {1.0, -1.0}) {
      Point xi(1);
      xi << sign;
      const Score sc = score(s, xi);
      if (best_xi.size() == 0 || sc.value() > best.value()) {
        best = sc;
        best_xi = xi;
      }
    }
  } else {
    const int samples = 720;
    const double step = 2.0 * std::numbers::pi / samples;
    double best_psi = 0.0;
    for (int k = 0; k < samples; ++k) {
      const Score sc = score(s, direction(k * step));
      if (k == 0 || sc.value() > best.value()) {
        best = sc;
        best_psi = k * step;
      }
    }
    if (best.value() > 0.0) {
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      double a = best_psi - step, b = best_psi + step;
      double c = b - g * (b - a), d = a + g * (b - a);
      double fc = score(s, direction(c)).value(), fd = score(s, direction(d)).value();
      while (b - a > 1e-4) {
        if (fc >= fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - g * (b - a);
          fc = score(s, direction(c)).value();
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + g * (b - a);
          fd = score(s, direction(d)).value();
        }
      }
      const double psi = 0.5 * (a + b);
      const Score refined = score(s, direction(psi));
      if (refined.value() >= best.value()) {
        best = refined;
        best_psi = psi;
      }
      best_psi = std::fmod(best_psi + 2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
    }
    best_xi = direction(best_psi);
  }

  ConeProjection out;
  out.profile.xi = best_xi;
  out.profile.c = best.inner > 0.0 ? best.inner / best.profile_sq : 0.0;
  out.inner = best.inner;
  out.profile_sq = best.profile_sq;
  out.w_sq = w_sq;
  const double c = out.profile.c;
  out.distance_sq = std::max(0.0, w_sq - 2.0 * c * best.inner + c * c * best.profile_sq);
  out.cross = c * best.inner - c * c * best.profile_sq;
  return out;
}

}  // namespace thinfb
