#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "thinfb/norms.hpp"
#include "thinfb/profiles.hpp"

using namespace thinfb;

namespace {

Point polar(double r, double theta) { return make_point({r * std::cos(theta), r * std::sin(theta)}, 2); }

}  // namespace

TEST_CASE("model cone values") {
  const Profile h = ConeProfile::model(1);
  CHECK(evaluate(h, make_point({1.0, 0.0}, 2)) == doctest::Approx(1.0));
  CHECK(evaluate(h, make_point({-1.0, 0.0}, 2)) == 0.0);
  CHECK(evaluate(h, make_point({0.0, 1.0}, 2)) == doctest::Approx(-std::sqrt(2.0) / 2.0));
  CHECK(evaluate(h, make_point({0.0, -1.0}, 2)) == doctest::Approx(-std::sqrt(2.0) / 2.0));
  CHECK(evaluate(h, make_point({0.0, 0.0}, 2)) == 0.0);
}

TEST_CASE("cone is homogeneous, even and nonnegative on the plane") {
  ConeProfile c = ConeProfile::model(2, 1.7);
  c.xi = make_point({std::sin(0.4), std::cos(0.4)}, 2);
  const Profile p = c;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int k = 0; k < 200; ++k) {
    Point x = make_point({u(rng), u(rng), u(rng)}, 3);
    const double v = evaluate(p, x);
    CHECK(evaluate(p, 2.0 * x) == doctest::Approx(std::pow(2.0, 1.5) * v).epsilon(1e-12));
    Point y = x;
    y[2] = -y[2];
    CHECK(evaluate(p, y) == v);
    y[2] = 0.0;
    CHECK(evaluate(p, y) >= 0.0);
  }
}

TEST_CASE("Euler identity for the cone") {
  const Profile p = ConeProfile::model(1);
  const double r = 0.4, step = 1e-5;
  for (double theta : {0.3, 1.0, 2.0, -2.5}) {
    const double v = evaluate(p, polar(r, theta));
    const double dr = (evaluate(p, polar(r + step, theta)) - evaluate(p, polar(r - step, theta))) / (2 * step);
    CHECK(dr == doctest::Approx(1.5 / r * v).epsilon(1e-3));
  }
}

TEST_CASE("sampling") {
  Grid g = Grid::dyadic(1, 5);
  auto lin = sample(LinearProfile{1.0}, g);
  CHECK(lin.parity() == Parity::odd);
  for (Index i = 0; i < g.node_count(); ++i) CHECK(lin[i] == g.position(i)[1]);

  const Profile cone = ConeProfile::model(1, 2.0);
  auto cs = sample(cone, g);
  CHECK(cs.parity() == Parity::even);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Index> pick(0, g.node_count() - 1);
  for (int k = 0; k < 100; ++k) {
    const Index i = pick(rng);
    CHECK(cs[i] == evaluate(cone, g.position(i)));
  }

  auto q3 = sample(EigenProfile{3, 0}, g);
  auto h = sample(ConeProfile::model(1), g);
  CHECK((q3.values() - h.values()).abs().maxCoeff() <= 1e-14);

  auto q3n2 = sample(EigenProfile{3, 0}, Grid::dyadic(2, 3));
  auto hn2 = sample(ConeProfile::model(2), Grid::dyadic(2, 3));
  CHECK((q3n2.values() - hn2.values()).abs().maxCoeff() <= 1e-14);

  auto logs = sample(LogProfile{}, g);
  CHECK(logs[g.index({g.mid(), g.mid(), 0})] == 0.0);
  CHECK(sample(EigenProfile{4, 0}, g).parity() == Parity::odd);
}

TEST_CASE("eigen profiles are homogeneous and vanish on the Dirichlet half") {
  for (int k = 1; k <= 6; ++k) {
    const Profile q = EigenProfile{k, 0};
    CHECK(std::get<EigenProfile>(q).homogeneity() == 0.5 * k);
    for (double theta : {0.4, 1.7, 2.9}) {
      const double v = evaluate(q, polar(0.3, theta));
      CHECK(evaluate(q, polar(0.6, theta)) == doctest::Approx(std::pow(2.0, 0.5 * k) * v).epsilon(1e-12));
    }
    CHECK(std::abs(evaluate(q, make_point({-0.5, 0.0}, 2))) <= 1e-15);
  }
  CHECK(EigenProfile{3, 1}.homogeneity() == 2.5);
}

TEST_CASE("logarithmic profile") {
  const Profile p = LogProfile{};
  CHECK_THROWS_AS(evaluate(p, make_point({0.0, 0.0}, 2)), Error);
  CHECK(evaluate(p, make_point({1.0, 0.0}, 2)) == 0.0);
  CHECK(evaluate(p, polar(0.25, 0.0)) == doctest::Approx(std::log(4.0) * 0.125));
  CHECK(evaluate(p, polar(0.5, 1.0)) == doctest::Approx(evaluate(p, polar(0.5, -1.0))));
}

TEST_CASE("laplacian of the logarithmic profile") {
  CHECK(laplacian_log_example(polar(1.0, 0.0)) == doctest::Approx(-3.0));
  CHECK(laplacian_log_example(polar(0.25, 0.0)) == doctest::Approx(-6.0));
  CHECK_THROWS_AS(laplacian_log_example(make_point({0.0, 0.0}, 2)), Error);
  CHECK_THROWS_AS(laplacian_log_example(make_point({-0.3, 0.0}, 2)), Error);

  const Profile p = LogProfile{};
  const double h = std::pow(2.0, -10);
  const Point x = make_point({0.5, 0.3}, 2);
  auto at = [&](double dx, double dy) { return evaluate(p, make_point({x[0] + dx, x[1] + dy}, 2)); };
  const double fd = (at(h, 0) + at(-h, 0) + at(0, h) + at(0, -h) - 4 * at(0, 0)) / (h * h);
  CHECK(std::abs(fd - laplacian_log_example(x)) <= 1e-3);
}

TEST_CASE("slit spectrum") {
  auto kappa = eigen_slit_spectrum(6);
  REQUIRE(kappa.size() == 6);
  for (int k = 0; k < 6; ++k) CHECK(std::abs(kappa[k] - 0.5 * (k + 1)) <= 1e-3);
}

TEST_CASE("kink profile") {
  const Profile p = KinkProfile{2.0, 3.0};
  CHECK(evaluate(p, make_point({0.1, 0.5}, 2)) == doctest::Approx(1.0));
  CHECK(evaluate(p, make_point({0.1, -0.5}, 2)) == doctest::Approx(1.5));
  CHECK(parity_of(KinkProfile{1.0, 1.0}) == Parity::even);
  CHECK(parity_of(KinkProfile{1.0, -1.0}) == Parity::odd);
  CHECK(parity_of(KinkProfile{2.0, 3.0}) == Parity::none);
}

TEST_CASE("json round trip") {
  ConeProfile c = ConeProfile::model(2, 0.5);
  c.xi = make_point({0.6, 0.8}, 2);
  const std::vector<Profile> all = {LinearProfile{-0.3}, Profile(c), EigenProfile{5, 0}, KinkProfile{1.0, -2.0}};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (const Profile& p : all) {
    const auto j = to_json(p);
    CHECK(j.contains("type"));
    const Profile back = profile_from_json(j, 2);
    CHECK(type_name(back) == type_name(p));
    for (int k = 0; k < 20; ++k) {
      Point x = make_point({u(rng), u(rng), u(rng)}, 3);
      CHECK(evaluate(back, x) == doctest::Approx(evaluate(p, x)).epsilon(1e-14));
    }
  }
  CHECK(std::holds_alternative<LogProfile>(profile_from_json("log", 1)));
  CHECK(std::holds_alternative<EigenProfile>(profile_from_name("q5", 1)));
  CHECK_THROWS_AS(profile_from_name("nope", 1), Error);
  CHECK_THROWS_AS(profile_from_name("log", 2), Error);
}
