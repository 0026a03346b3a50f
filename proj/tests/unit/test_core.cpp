#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>

#include "thinfb/norms.hpp"
#include "thinfb/profiles.hpp"
#include "thinfb/snapshot.hpp"

using namespace thinfb;

namespace {

GridField h32_field(const Grid& g) {
  return GridField::sample(g, [](const Point& x) { return kernels::h32(x[0], x[1]); }, Parity::even);
}

}  // namespace

TEST_CASE("grid layout") {
  Grid g = Grid::dyadic(1, 4);
  CHECK(g.nodes_per_axis() == 33);
  CHECK(g.node_count() == 33 * 33);
  CHECK(g.coord(g.mid()) == 0.0);
  CHECK(g.plane_count() == 33);
  for (Index p = 0; p < g.plane_count(); ++p) {
    CHECK(g.on_plane(g.plane_node(p)));
    CHECK(g.plane_index(g.plane_node(p)) == p);
    CHECK(g.position(g.plane_node(p))[1] == 0.0);
  }
  CHECK(g.on_boundary(0));
  CHECK_FALSE(g.on_boundary(g.index({16, 16, 0})));
  CHECK_THROWS_AS(Grid(1, 0.3), Error);
}

TEST_CASE("interpolation reproduces constants and linear functions") {
  Grid g = Grid::dyadic(1, 5);
  auto one = GridField::sample(g, [](const Point&) { return 1.0; });
  auto lin = GridField::sample(g, [](const Point& x) { return x[1]; }, Parity::odd);
  CHECK(interpolate(one, make_point({0.123, -0.77}, 2)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(interpolate(lin, make_point({0.3, 0.25}, 2)) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(interpolate(one, make_point({1.5, 0.0}, 2)), Error);
}

TEST_CASE("interpolated h32 matches the closed form") {
  Grid g = Grid::dyadic(1, 8);
  auto f = h32_field(g);
  const double exact = std::pow(std::complex<double>(0.5, 0.5), 1.5).real();
  CHECK(std::abs(interpolate(f, make_point({0.5, 0.5}, 2)) - exact) <= 5e-4);
}

TEST_CASE("ball quadrature integrates quadratics") {
  for (int n : {1, 2}) {
    Grid g = Grid::dyadic(n, 5);
    const double r = 0.5;
    Point c = origin(n + 1);
    c[0] = 0.125;
    auto q = make_ball_quadrature(g, c, r);
    double vol = 0.0, second = 0.0, area = 0.0;
    for (Eigen::Index k = 0; k < q.interior.size(); ++k) {
      const double y = q.interior.points(0, k) - c[0];
      vol += q.interior.weights[k];
      second += q.interior.weights[k] * y * y;
    }
    for (Eigen::Index k = 0; k < q.surface.size(); ++k) area += q.surface.weights[k];
    CHECK(vol == doctest::Approx(ball_volume(n, r)).epsilon(1e-6));
    CHECK(area == doctest::Approx(sphere_area(n, r)).epsilon(1e-6));
    // ∫_{B_r} y_1^2 = |B_r| r^2 / (d + 2)
    CHECK(second == doctest::Approx(ball_volume(n, r) * r * r / (n + 3)).epsilon(1e-6));
  }
}

TEST_CASE("quadrature rejects unresolved and escaping balls") {
  Grid g = Grid::dyadic(1, 5);
  CHECK_THROWS_WITH_AS(make_ball_quadrature(g, origin(2), 4.0 * g.h()), doctest::Contains("8h"), Error);
  try {
    make_ball_quadrature(g, make_point({0.8, 0.0}, 2), 0.5);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}

TEST_CASE("literal normalized norm") {
  Grid g = Grid::dyadic(1, 7);
  auto zero = GridField::zeros(g);
  auto one = GridField::sample(g, [](const Point&) { return 1.0; });
  const auto sphere = Region::make_sphere(origin(2), 1.0);
  CHECK(norm_l2_tilde(zero, sphere) == 0.0);
  CHECK(norm_l2_tilde(one, sphere) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-8));
  CHECK(norm_l2_tilde(h32_field(g), sphere) == doctest::Approx(std::sqrt(M_PI) / (2.0 * M_PI)).epsilon(1e-3));
  CHECK(norm_l2_mean(one, sphere) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("norms scale with homogeneity") {
  Grid g = Grid::dyadic(1, 8);
  auto f = h32_field(g);
  const double n1 = norm_l2_tilde(f, Region::make_sphere(origin(2), 1.0));
  for (double r : {8.0 * g.h(), 0.125, 0.25, 0.5}) {
    const double nr = norm_l2_tilde(f, Region::make_sphere(origin(2), r));
    // the literal norm carries an extra |∂B_r|^{-1/2} = (2πr)^{-1/2} factor
    CHECK(nr * std::sqrt(r) == doctest::Approx(std::pow(r, 1.5) * n1).epsilon(1e-2));
  }
}

TEST_CASE("norms are reflection invariant") {
  Grid g = Grid::dyadic(1, 6);
  auto f = GridField::sample(g, [](const Point& x) { return std::sin(3 * x[0]) + x[1] * x[1] * x[1] + 0.4 * x[1]; });
  auto fr = GridField::sample(g, [](const Point& x) { return std::sin(3 * x[0]) - x[1] * x[1] * x[1] - 0.4 * x[1]; });
  const Point c = make_point({0.1, 0.2}, 2), cr = make_point({0.1, -0.2}, 2);
  CHECK(norm_l2_tilde(f, Region::make_ball(c, 0.5)) ==
        doctest::Approx(norm_l2_tilde(fr, Region::make_ball(cr, 0.5))).epsilon(1e-10));
  CHECK(dirichlet_energy(f, c, 0.5) == doctest::Approx(dirichlet_energy(fr, cr, 0.5)).epsilon(1e-10));
}

TEST_CASE("dirichlet energy") {
  Grid g = Grid::dyadic(1, 8);
  auto lin = GridField::sample(g, [](const Point& x) { return 2.0 * x[0] - x[1]; });
  CHECK(dirichlet_energy(lin, origin(2), 0.5) == doctest::Approx(5.0 * ball_volume(1, 0.5)).epsilon(1e-3));
  CHECK(dirichlet_energy(h32_field(g), origin(2), 1.0) == doctest::Approx(1.5 * M_PI).epsilon(2e-2));
  auto abs_t = GridField::sample(g, [](const Point& x) { return std::abs(x[1]); }, Parity::even);
  CHECK(dirichlet_energy(abs_t, origin(2), 1.0) == doctest::Approx(M_PI).epsilon(2e-2));
}

TEST_CASE("one-sided gradient across the plane") {
  Grid g = Grid::dyadic(1, 5);
  auto abs_t = GridField::sample(g, [](const Point& x) { return std::abs(x[1]); }, Parity::even);
  auto gf = gradient(abs_t);
  double up[3], down[3];
  interpolate_gradient(gf, make_point({0.1, 0.25 * g.h()}, 2), up);
  interpolate_gradient(gf, make_point({0.1, -0.25 * g.h()}, 2), down);
  CHECK(up[1] == doctest::Approx(1.0));
  CHECK(down[1] == doctest::Approx(-1.0));
}

TEST_CASE("parity defect") {
  Grid g = Grid::dyadic(1, 4);
  CHECK(h32_field(g).parity_defect() == 0.0);
  auto lin = GridField::sample(g, [](const Point& x) { return x[1]; }, Parity::odd);
  CHECK(lin.parity_defect() == 0.0);
  CHECK(lin.with_parity(Parity::even).parity_defect() > 0.5);
}

TEST_CASE("snapshot round trip") {
  Grid g = Grid::dyadic(2, 3);
  auto f = GridField::sample(g, [](const Point& x) { return x[0] - 2 * x[1] + x[2] / 3.0; });
  const auto path = std::filesystem::temp_directory_path() / "thinfb_core_snapshot.f64";
  write_snapshot(path, f, "test field");
  auto back = read_snapshot(path);
  CHECK(back.grid() == g);
  CHECK((back.values() == f.values()).all());
  CHECK(back.parity() == f.parity());
  std::filesystem::remove(path);
  std::filesystem::remove(sidecar_path(path));
  CHECK_THROWS_AS(read_snapshot(path), Error);
}
