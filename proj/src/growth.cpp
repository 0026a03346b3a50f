#include <algorithm>
#include <cmath>

#include "thinfb/analysis.hpp"

namespace thinfb {

namespace {

bool ball_inside(const Grid& grid, const Point& x0, double r) {
  for (int k = 0; k < grid.dim(); ++k)
    if (std::abs(x0[k]) + r > 1.0 + 1e-12) return false;
  return r >= 8.0 * grid.h() * (1.0 - 1e-12);
}

GridField remove_linear(const GridField& w, const Point& x0, double a0) {
  const Grid& grid = w.grid();
  const int d = grid.dim();
  Eigen::ArrayXd v = w.values();
  for (Index i = 0; i < grid.node_count(); ++i) v[i] -= a0 * (grid.coord(static_cast<int>(i % grid.nodes_per_axis())) - x0[d - 1]);
  return GridField(grid, std::move(v));
}

}  // namespace

DecayFit fit_growth_exponent(const GridField& w, const Point& x0, double r_lo, double r_hi) {
  const Grid& grid = w.grid();
  std::vector<double> radii;
  for (double r : radius_ladder(grid.h(), r_lo, r_hi))
    if (ball_inside(grid, x0, r)) radii.push_back(r);
  if (radii.size() < 2) {
    DecayFit fit;
    fit.reason = "fewer than two resolvable radii";
    return fit;
  }
  const double a0 = project_linear(w, x0, radii.front()).a0;
  const GridField v = remove_linear(w, x0, a0);
  std::vector<std::pair<double, double>> samples;
  for (double r : radii) samples.emplace_back(r, norm_l2_mean(v, Region::make_ball(x0, r)));
  return fit_power_law(samples);
}

ConeLadder cone_decay_ladder(const GridField& w, const Point& x0, std::vector<double> radii) {
  const Grid& grid = w.grid();
  const int n = grid.n();
  if (radii.empty())
    for (double r : radius_ladder(grid.h(), 0.0, 0.25))
      if (ball_inside(grid, x0, r)) radii.push_back(r);
  ConeLadder out;
  if (radii.empty()) {
    out.fit.reason = out.solid.reason = "no resolvable radii";
    return out;
  }
  out.radii = radii;
  out.a0 = project_linear(w, x0, radii.front()).a0;
  const GridField v = remove_linear(w, x0, out.a0);
  std::vector<std::pair<double, double>> dsamples, ssamples;
  for (double r : radii) {
    const ConeProjection p = project_cone(v, x0, r);
    const double area = sphere_area(n, r);
    const double dist = std::sqrt(p.distance_sq / area);
    const double wn = std::sqrt(p.w_sq / area);
    const double d = dist / std::max(wn, std::pow(r, 1.5));
    out.d.push_back(d);
    dsamples.emplace_back(r, d);

    const auto q = make_ball_quadrature(grid, x0, r).interior;
    double acc = 0.0;
    for (Eigen::Index j = 0; j < q.size(); ++j) {
      const Point x = q.points.col(j);
      const double e = interpolate(v, x) - evaluate_centered(p.profile, x0, x);
      acc += q.weights[j] * e * e;
    }
    const double solid = std::sqrt(acc / ball_volume(n, r));
    out.solid_values.push_back(solid);
    ssamples.emplace_back(r, solid);
  }
  out.fit = fit_power_law(dsamples);
  out.solid = fit_power_law(ssamples);
  return out;
}

NondegeneracyCheck blowup_nondegeneracy(const GridField& w, const Point& x0, double r) {
  const GridField wt = blowup(w, x0, r, BlowupMode::normalized);
  const Grid& g = wt.grid();
  const Point o = origin(g.dim());
  const ConeProjection p = project_cone(wt, o, 1.0);
  const GridField pf = GridField::sample(g, [&](const Point& x) { return evaluate_centered(p.profile, o, x); });
  const Region b1 = Region::make_ball(o, 1.0);
  NondegeneracyCheck c;
  c.radius = r;
  c.distance = norm_l2_mean(wt - pf, b1);
  c.projection = norm_l2_mean(pf, b1);
  c.holds = c.distance < 0.1 * c.projection;
  return c;
}

}  // namespace thinfb
