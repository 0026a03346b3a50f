#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "thinfb/analysis.hpp"
#include "thinfb/solver.hpp"

namespace thinfb {

EpiReport epiperimetric_check(const SphereTrace& c, const Grid& grid, const std::string& descriptor) {
  const int n = grid.n();
  auto extension = [&](const Point& x) {
    const double rho = x.norm();
    if (rho == 0.0) return 0.0;
    return std::pow(rho, 1.5) * c(x / rho);
  };
  const GridField ext = GridField::sample(grid, extension);
  const auto coeffs = std::make_shared<const CoefficientField>(CoefficientField::identity(grid));
  AssemblyOptions opt;
  opt.fixed = cube_boundary_mask(grid);
  for (Index i = 0; i < grid.node_count(); ++i)
    if (grid.position(i).norm() >= 1.0 - 1e-12) opt.fixed[i] = 1;
  const DiscreteProblem p(coeffs, ext, zero_obstacle(grid), opt);
  PsorOptions popt;
  popt.initial = &ext.values();
  const SolutionField sol = solve_psor(p, popt);

  EpiReport rep;
  rep.descriptor = descriptor;
  rep.W_extension = homogeneous_extension_energy(c, n);
  const Point o = origin(grid.dim());
  rep.W_extension_sampled = weiss(ext, o, 1.0);
  rep.W_minimized = weiss(sol.w, o, 1.0);
  rep.sweeps = sol.stats.total_sweeps;
  if (rep.W_extension > 0.0) rep.kappa_hat = 1.0 - rep.W_minimized / rep.W_extension;
  return rep;
}

SphereTrace perturbed_cone_trace(int n, int member, int count, std::string* descriptor) {
  if (n != 1 && n != 2) throw Error(ErrorKind::precondition, "perturbed_cone_trace: n must be 1 or 2");
  if (count < 1 || member < 0 || member >= count)
    throw Error(ErrorKind::precondition, "perturbed_cone_trace: member out of range");
  const double pi = std::numbers::pi;
  const double amplitude = 0.2;
  const double width = pi / 4.0;  // geodesic half-width of the bump
  Point center(n + 1);
  if (n == 1) {
    // centres in (-2π/3, 2π/3); the support stays π/12 away from the slit at θ = π
    const double theta = count == 1 ? 0.0 : -2.0 * pi / 3.0 + 4.0 * pi / 3.0 * member / (count - 1);
    center << std::cos(theta), std::sin(theta);
  } else {
    // 50° above or below the equator, so the support misses the plane
    const double lat = (member % 2 == 0 ? 1.0 : -1.0) * 50.0 * pi / 180.0;
    const double lon = 2.0 * pi * member / count;
    center << std::cos(lat) * std::sin(lon), std::cos(lat) * std::cos(lon), std::sin(lat);
  }
  if (descriptor) {
    std::string coords;
    for (int k = 0; k <= n; ++k) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%s%.4f", k ? "," : "", center[k]);
      coords += buf;
    }
    *descriptor = "h32+0.2*bump(center=[" + coords + "],width=pi/4)#" + std::to_string(member);
  }
  return [n, center, amplitude, width, pi](const Point& x) {
    const double base = kernels::h32(x[n - 1], x[n]);
    const double dist = std::acos(std::clamp(x.dot(center), -1.0, 1.0));
    double bump = 0.0;
    if (dist < width) {
      const double cs = std::cos(0.5 * pi * dist / width);
      bump = cs * cs;
    }
    return base + amplitude * bump;
  };
}

}  // namespace thinfb
