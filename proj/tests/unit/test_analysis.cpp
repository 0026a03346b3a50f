#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "thinfb/analysis.hpp"
#include "thinfb/solver.hpp"

using namespace thinfb;

namespace {

const Grid& fine() {
  static const Grid g = Grid::dyadic(1, 8);
  return g;
}

GridField h32(const Grid& g) { return sample(ConeProfile::model(1), g); }
GridField q5(const Grid& g) { return sample(EigenProfile{5, 0}, g); }
GridField x2(const Grid& g) { return sample(LinearProfile{1.0}, g); }

double rms_ball(const GridField& f) { return norm_l2_mean(f, Region::make_ball(origin(f.grid().dim()), 1.0)); }

}  // namespace

TEST_CASE("power law fit") {
  std::vector<std::pair<double, double>> s;
  for (double r : radius_ladder(fine().h())) s.push_back({r, 3.0 * std::pow(r, 0.3)});
  auto f = fit_power_law(s);
  CHECK(f.applicable);
  CHECK(f.rate == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.residual <= 1e-12);
  CHECK_FALSE(fit_power_law({{0.1, 1.0}}).applicable);
  CHECK_FALSE(fit_power_law({{0.1, 1.0}, {0.2, -1.0}}).applicable);
}

TEST_CASE("radius ladder") {
  auto r = radius_ladder(std::pow(2.0, -8));
  REQUIRE(r.size() >= 6);
  CHECK(r.front() >= 8 * std::pow(2.0, -8));
  CHECK(r.back() == doctest::Approx(0.5));
  for (std::size_t k = 1; k < r.size(); ++k) CHECK(r[k] / r[k - 1] == doctest::Approx(std::sqrt(2.0)));
  for (double x : radius_ladder(std::pow(2.0, -8), 0.05, 0.3)) {
    CHECK(x >= 0.05);
    CHECK(x <= 0.3);
  }
}

TEST_CASE("Weiss energy of the cone vanishes") {
  FieldWithGradient w(h32(fine()));
  for (double r : {0.0625, 0.125, 0.25, 0.5}) {
    auto t = weiss_terms(w, origin(2), r);
    CHECK(std::abs(t.value()) <= 1e-3 * t.dirichlet);
  }
  auto t1 = weiss_terms(w, origin(2), 1.0);
  CHECK(t1.dirichlet == doctest::Approx(1.5 * M_PI).epsilon(1e-2));
  CHECK(t1.boundary == doctest::Approx(1.5 * M_PI).epsilon(1e-2));
  CHECK(std::abs(t1.value()) <= 1e-3 * t1.dirichlet);
}

TEST_CASE("Weiss energy of a quadratic harmonic scales linearly") {
  FieldWithGradient w(GridField::sample(fine(), [](const Point& x) { return x[0] * x[1]; }));
  const double w1 = weiss(w, origin(2), 1.0);
  CHECK(w1 > 0.0);
  for (double r : {0.125, 0.25, 0.5}) CHECK(weiss(w, origin(2), r) == doctest::Approx(r * w1).epsilon(1e-3));
}

TEST_CASE("rescaling identity") {
  CHECK(weiss_rescaling_check(h32(fine()), origin(2), 0.25) <= 1e-6);
  CHECK(weiss_rescaling_check(x2(fine()), origin(2), 0.25) <= 1e-6);
  Grid g = Grid::dyadic(1, 7);
  auto s = solve_psor(assemble(CoefficientField::identity(g), h32(g)));
  CHECK(weiss_rescaling_check(s.w, origin(2), 0.25) <= 1e-3);
}

TEST_CASE("frequency") {
  CHECK(frequency(FieldWithGradient(h32(fine())), origin(2), 0.5) == doctest::Approx(1.5).epsilon(1e-2));
  CHECK(frequency(FieldWithGradient(x2(fine())), origin(2), 0.5) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(frequency(FieldWithGradient(q5(fine())), origin(2), 0.5) == doctest::Approx(2.5).epsilon(1e-2));
  CHECK_THROWS_AS(frequency(FieldWithGradient(GridField::zeros(fine())), origin(2), 0.5), Error);
}

TEST_CASE("homogeneous extension energy") {
  auto cone = [](const Point& x) { return kernels::h32(x[0], x[1]); };
  auto one = [](const Point&) { return 1.0; };
  auto q5t = [](const Point& x) { return kernels::re_power(x[0], x[1], 2.5); };
  CHECK(std::abs(homogeneous_extension_energy(cone, 1)) <= 1e-4);
  CHECK(homogeneous_extension_energy(one, 1) == doctest::Approx(-1.5 * M_PI).epsilon(1e-8));
  CHECK(homogeneous_extension_energy(q5t, 1) > 0.0);
}

TEST_CASE("epiperimetric check") {
  Grid g = Grid::dyadic(1, 6);
  auto cone = [](const Point& x) { return kernels::h32(x[0], x[1]); };
  auto rc = epiperimetric_check(cone, g, "h32");
  CHECK(std::abs(rc.W_extension) <= 1e-4);
  CHECK_FALSE(rc.kappa_hat.has_value());
  CHECK(rc.W_minimized <= 1e-3);

  std::string name;
  auto trace = perturbed_cone_trace(1, 3, 10, &name);
  CHECK(name.find("#3") != std::string::npos);
  auto rp = epiperimetric_check(trace, g, name);
  CHECK(rp.W_extension > 0.0);
  REQUIRE(rp.kappa_hat.has_value());
  CHECK(*rp.kappa_hat > 0.0);
  CHECK(rp.W_minimized <= rp.W_extension);
  CHECK_THROWS_AS(perturbed_cone_trace(1, 10, 10), Error);
}

TEST_CASE("linear projection") {
  CHECK(project_linear(x2(fine()), origin(2), 0.25).a0 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(project_linear(sample(LinearProfile{-2.5}, fine()), make_point({0.1, 0.0}, 2), 0.5).a0 ==
        doctest::Approx(-2.5).epsilon(1e-10));
  CHECK(std::abs(project_linear(sample(KinkProfile{1.0, 1.0}, fine()), origin(2), 0.25).a0) <= 1e-12);
  // a (t)_+ - b (t)_- with (t)_- = max(-t, 0)
  const double a = 1.3, b = 0.4;
  CHECK(project_linear(sample(KinkProfile{a, -b}, fine()), origin(2), 0.25).a0 ==
        doctest::Approx((a + b) / 2).epsilon(1e-10));
}

TEST_CASE("cone projection") {
  auto two = project_cone(2.0 * h32(fine()), origin(2), 0.5);
  CHECK(two.profile.c == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(two.profile.xi[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(two.distance_sq <= 1e-6 * two.w_sq);

  // -h32 correlates with the reflected cone: ⟨-h32, p_{-1}⟩ = 2/3 and ⟨p, p⟩ = π on the unit circle
  auto neg = project_cone(-1.0 * h32(fine()), origin(2), 1.0);
  CHECK(neg.profile.xi[0] == -1.0);
  CHECK(neg.profile.c == doctest::Approx(2.0 / (3.0 * M_PI)).epsilon(1e-3));

  auto one = project_cone(GridField::sample(fine(), [](const Point&) { return 1.0; }), origin(2), 0.5);
  CHECK(one.profile.c == 0.0);
  CHECK(one.distance_sq == doctest::Approx(one.w_sq));

  auto mix = project_cone(h32(fine()) + 0.05 * q5(fine()), origin(2), 0.5);
  CHECK(std::abs(mix.profile.c - 1.0) <= 5e-2);
  CHECK(mix.profile.xi[0] == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(mix.cross <= 1e-6);

  Grid g2 = Grid::dyadic(2, 5);
  ConeProfile tilted = ConeProfile::model(2, 1.0);
  tilted.xi = make_point({std::sin(0.7), std::cos(0.7)}, 2);
  auto p2 = project_cone(sample(tilted, g2), origin(3), 0.5);
  CHECK(p2.profile.c == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(std::abs(p2.profile.xi[0] - tilted.xi[0]) <= 1e-3);
  CHECK(std::abs(p2.profile.xi[1] - tilted.xi[1]) <= 1e-3);
}

TEST_CASE("Pythagoras on the sphere") {
  auto w = h32(fine()) + 0.2 * q5(fine()) + 0.1 * GridField::sample(fine(), [](const Point& x) { return x[0]; });
  auto p = project_cone(w, origin(2), 0.5);
  REQUIRE(p.profile.c > 0.0);
  const double pc2 = p.profile.c * p.profile.c * p.profile_sq;
  CHECK(p.w_sq == doctest::Approx(p.distance_sq + pc2 + 2 * p.cross).epsilon(1e-10));
  CHECK(p.cross <= 1e-6);
}

TEST_CASE("blow-ups") {
  const Grid& g = fine();
  auto b = blowup(h32(g), origin(2), 0.25, BlowupMode::homogeneous);
  CHECK(b.grid().h() == doctest::Approx(4 * g.h()));
  CHECK((b.values() - h32(b.grid()).values()).abs().maxCoeff() <= 1e-12);

  auto bl = blowup(x2(g), origin(2), 0.25, BlowupMode::homogeneous);
  CHECK((bl.values() - 2.0 * x2(bl.grid()).values()).abs().maxCoeff() <= 1e-12);

  auto h = h32(g);
  for (double r : {0.5, 0.25, 0.125}) {
    auto bn = blowup(h + x2(g), origin(2), r, BlowupMode::normalized);
    auto target = h32(bn.grid());
    CHECK(rms_ball(bn - (1.0 / rms_ball(target)) * target) <= 5e-2);
  }
  CHECK_THROWS_AS(blowup(x2(g), origin(2), 0.25, BlowupMode::normalized), Error);
}

TEST_CASE("Weiss decay fit") {
  WeissProfile p;
  p.center = origin(2);
  for (double r : radius_ladder(fine().h())) p.samples.push_back({r, 0.7 * std::pow(r, 0.3)});
  auto f = fit_weiss_decay(p);
  CHECK(f.applicable);
  CHECK(f.rate == doctest::Approx(0.3).epsilon(1e-6));
  for (auto& s : p.samples) s.second = 0.0;
  CHECK_FALSE(fit_weiss_decay(p).applicable);
  p.samples.resize(4, {0.1, 1.0});
  CHECK_FALSE(fit_weiss_decay(p).applicable);
}

TEST_CASE("growth exponent") {
  auto h = h32(fine());
  auto f = fit_growth_exponent(h, origin(2), 0.03, 0.25);
  CHECK(f.applicable);
  CHECK(f.rate == doctest::Approx(1.5).epsilon(0.05 / 1.5));
  auto fl = fit_growth_exponent(h + 0.3 * x2(fine()), origin(2), 0.03, 0.25);
  CHECK(fl.rate == doctest::Approx(1.5).epsilon(0.05 / 1.5));
  auto fq = fit_growth_exponent(q5(fine()), origin(2), 0.03, 0.25);
  CHECK(fq.rate == doctest::Approx(2.5).epsilon(0.1 / 2.5));
}

TEST_CASE("cone decay ladder") {
  auto exact = cone_decay_ladder(2.0 * h32(fine()), origin(2));
  REQUIRE_FALSE(exact.d.empty());
  for (double d : exact.d) CHECK(d <= 1e-3);

  auto mixed = cone_decay_ladder(h32(fine()) + 0.05 * q5(fine()), origin(2));
  CHECK(mixed.fit.applicable);
  CHECK(mixed.fit.rate == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("nondegeneracy of blow-ups") {
  auto ok = blowup_nondegeneracy(h32(fine()) + 0.2 * x2(fine()), origin(2), 0.125);
  CHECK(ok.holds);
  auto bad = blowup_nondegeneracy(q5(fine()), origin(2), 0.125);
  CHECK_FALSE(bad.holds);
}

TEST_CASE("analysis radius preconditions") {
  const Grid& g = fine();
  CHECK_THROWS_AS(weiss(h32(g), origin(2), 4 * g.h()), Error);
  CHECK_THROWS_AS(weiss(h32(g), make_point({0.8, 0.0}, 2), 0.5), Error);
}
