#include "thinfb/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

namespace thinfb {

namespace {

GaussLegendre compute_gauss_legendre(int m) {
  GaussLegendre gl{Eigen::VectorXd(m), Eigen::VectorXd(m)};
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0, p1 = x;
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = -x;
    gl.nodes[m - 1 - i] = x;
    gl.weights[i] = w;
    gl.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) gl.nodes[m / 2] = 0.0;
  return gl;
}

template <typename Key, typename Value, typename Make>
const Value& cached(std::map<Key, std::unique_ptr<Value>>& cache, std::mutex& mu, const Key& key, Make make) {
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Value>(make())).first;
  return *it->second;
}

QuadratureSet compute_sphere_rule(int n, int m) {
  const auto& gl = gauss_legendre(m);
  QuadratureSet q;
  if (n == 1) {
    q.points.resize(2, 2 * m);
    q.weights.resize(2 * m);
    for (int half = 0; half < 2; ++half)
      for (int i = 0; i < m; ++i) {
        const double theta = std::numbers::pi * (half + 0.5 * (gl.nodes[i] + 1.0));
        const int j = half * m + i;
        q.points(0, j) = std::cos(theta);
        q.points(1, j) = std::sin(theta);
        q.weights[j] = 0.5 * std::numbers::pi * gl.weights[i];
      }
    return q;
  }
  const int azimuths = 2 * m;
  q.points.resize(3, 2 * m * azimuths);
  q.weights.resize(2 * m * azimuths);
  int j = 0;
  for (int hemi = 0; hemi < 2; ++hemi)
    for (int i = 0; i < m; ++i) {
      // u = cos(polar angle) in [-1,0] or [0,1]
      const double u = 0.5 * (gl.nodes[i] + 1.0) - (hemi == 0 ? 1.0 : 0.0);
      const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
      for (int a = 0; a < azimuths; ++a, ++j) {
        const double psi = 2.0 * std::numbers::pi * a / azimuths;
        q.points(0, j) = s * std::cos(psi);
        q.points(1, j) = s * std::sin(psi);
        q.points(2, j) = u;
        q.weights[j] = 0.5 * gl.weights[i] * 2.0 * std::numbers::pi / azimuths;
      }
    }
  return q;
}

}  // namespace

const GaussLegendre& gauss_legendre(int m) {
  if (m < 1) throw Error(ErrorKind::precondition, "gauss_legendre: need at least one node");
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  static std::mutex mu;
  return cached(cache, mu, m, [m] { return compute_gauss_legendre(m); });
}

QuadratureSet unit_sphere_rule(int n, int m) {
  static std::map<std::pair<int, int>, std::unique_ptr<QuadratureSet>> cache;
  static std::mutex mu;
  return cached(cache, mu, std::make_pair(n, m), [n, m] { return compute_sphere_rule(n, m); });
}

double ball_volume(int n, double r) {
  return n == 1 ? std::numbers::pi * r * r : 4.0 / 3.0 * std::numbers::pi * r * r * r;
}

double sphere_area(int n, double r) {
  return n == 1 ? 2.0 * std::numbers::pi * r : 4.0 * std::numbers::pi * r * r;
}

void require_resolvable_ball(const Grid& grid, const Point& center, double r) {
  if (center.size() != grid.dim()) throw Error(ErrorKind::precondition, "ball center has the wrong dimension");
  if (r < 8.0 * grid.h() * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "radius " << r << " is below the resolution floor 8h = " << 8.0 * grid.h();
    throw Error(ErrorKind::resolution, os.str());
  }
  for (int k = 0; k < grid.dim(); ++k)
    if (std::abs(center[k]) + r > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "ball B_" << r << "(" << center.transpose() << ") leaves the cube";
      throw Error(ErrorKind::domain, os.str());
    }
}

BallQuadrature make_ball_quadrature(const Grid& grid, const Point& center, double r, double density) {
  require_resolvable_ball(grid, center, r);
  const int n = grid.n();
  const int d = grid.dim();
  const double h = grid.h();
  // rounded up to eight steps per octave so that few distinct sphere rules are built
  auto arc_nodes = [&](double rho) {
    const int m = std::max(8, static_cast<int>(std::ceil(density * std::numbers::pi * rho / h)));
    int k = static_cast<int>(std::ceil(8.0 * std::log2(m / 8.0) - 1e-9));
    int q = static_cast<int>(std::ceil(8.0 * std::exp2(k / 8.0) - 1e-9));
    while (q < m) q = static_cast<int>(std::ceil(8.0 * std::exp2(++k / 8.0) - 1e-9));
    return q;
  };

  BallQuadrature q;
  q.center = center;
  q.radius = r;

  const auto surf = unit_sphere_rule(n, arc_nodes(r));
  q.surface.points = (r * surf.points).colwise() + Eigen::VectorXd(center);
  q.surface.weights = std::pow(r, n) * surf.weights;

  const int radial = std::max(8, static_cast<int>(std::ceil(density * r / h)));
  const auto& gl = gauss_legendre(radial);
  Eigen::Index total = 0;
  std::vector<int> shell_m(radial);
  for (int i = 0; i < radial; ++i) {
    const double rho = 0.5 * r * (gl.nodes[i] + 1.0);
    shell_m[i] = arc_nodes(rho);
    total += n == 1 ? 2 * shell_m[i] : 4 * shell_m[i] * shell_m[i];
  }
  q.interior.points.resize(d, total);
  q.interior.weights.resize(total);
  Eigen::Index j = 0;
  for (int i = 0; i < radial; ++i) {
    const double rho = 0.5 * r * (gl.nodes[i] + 1.0);
    const double wr = 0.5 * r * gl.weights[i] * std::pow(rho, n);
    const auto shell = unit_sphere_rule(n, shell_m[i]);
    const Eigen::Index m = shell.size();
    q.interior.points.middleCols(j, m) = (rho * shell.points).colwise() + Eigen::VectorXd(center);
    q.interior.weights.segment(j, m) = wr * shell.weights;
    j += m;
  }
  return q;
}

}  // namespace thinfb
