#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "thinfb/freeboundary.hpp"

using namespace thinfb;

namespace {

SolutionField solve_identity(const Profile& p, const Grid& g) {
  return solve_psor(assemble(CoefficientField::identity(g), sample(p, g)));
}

const SolutionField& model_n1() {
  static const SolutionField s = solve_identity(ConeProfile::model(1), Grid::dyadic(1, 7));
  return s;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::io;
}

std::vector<Point> graph(double h, const std::function<double(double)>& f) {
  std::vector<Point> pts;
  for (double t = -0.5; t <= 0.5 + 1e-12; t += h) pts.push_back(make_point({t, f(t)}, 3));
  return pts;
}

}  // namespace

TEST_CASE("model free boundary in one tangential dimension") {
  const auto& s = model_n1();
  auto fb = extract(s);
  const double h = s.w.grid().h();
  REQUIRE(fb.points.size() == 1);
  CHECK(std::abs(fb.points[0].x[0]) <= h);
  CHECK(fb.points[0].x[1] == 0.0);
  CHECK(fb.tol_w > 0.0);
  CHECK(fb.tol_flux > 0.0);

  // half-lines without islands; the band is where 3|x1|^{1/2} < 10 h^{1/2}
  // resp. x1^{3/2} < 10 h^{3/2}
  const Grid& g = s.w.grid();
  for (Index q = 0; q < g.plane_count(); ++q) {
    const Index i = g.plane_node(q);
    if (g.on_boundary(i)) continue;
    const double x1 = g.position(i)[0];
    if (x1 < -12 * h) CHECK(fb.contact[q]);
    if (x1 > 5 * h) CHECK(fb.noncontact[q]);
    if (x1 > 0.0) CHECK_FALSE(fb.contact[q]);
    if (x1 < 0.0) CHECK_FALSE(fb.noncontact[q]);
  }
}

TEST_CASE("halving the thresholds barely moves the free boundary") {
  const auto& s = model_n1();
  auto fb = extract(s);
  ExtractOptions half;
  half.tol_w = 0.5 * fb.tol_w;
  half.tol_flux = 0.5 * fb.tol_flux;
  auto fb2 = extract(s, half);
  REQUIRE(fb2.points.size() == fb.points.size());
  CHECK(std::abs(fb2.points[0].x[0] - fb.points[0].x[0]) <= 2 * s.w.grid().h());
}

TEST_CASE("full contact has no free boundary") {
  Grid g = Grid::dyadic(1, 5);
  auto s = solve_identity(KinkProfile{-1.0, -1.0}, g);
  auto fb = extract(s);
  CHECK(fb.points.empty());
  for (Index q = 0; q < g.plane_count(); ++q)
    if (!g.on_boundary(g.plane_node(q))) CHECK(fb.contact[q]);
}

TEST_CASE("vanishing solution is degenerate") {
  Grid g = Grid::dyadic(1, 4);
  auto s = solve_identity(LinearProfile{0.0}, g);
  CHECK(kind_of([&] { extract(s); }) == ErrorKind::degenerate);
}

TEST_CASE("straight free boundary in two tangential dimensions") {
  Grid g = Grid::dyadic(2, 5);
  auto s = solve_identity(ConeProfile::model(2), g);
  auto fb = extract(s);
  REQUIRE(fb.chains.size() == 1);
  REQUIRE(fb.points.size() >= 20);
  for (const auto& p : fb.points) {
    CHECK(std::abs(p.x[1]) <= g.h());
    CHECK(p.normal.norm() == doctest::Approx(1.0));
  }
  // normals point into the noncontact set {x_2 > 0}
  for (std::size_t k : fb.chains[0]) {
    const auto& p = fb.points[k];
    if (std::abs(p.x[0]) < 0.75) CHECK(p.normal[1] >= 1.0 - 1e-6);
  }
  auto nr = normal_regularity(fb);
  CHECK(nr.flat);
  CHECK(nr.max_variation <= 1e-2);
}

TEST_CASE("regular points") {
  const auto& s = model_n1();
  auto fb = extract(s);
  auto rep = classify_regular(s.w, fb, 0.75);
  REQUIRE(rep.points.size() == 1);
  CHECK_FALSE(rep.points[0].skipped);
  CHECK(rep.points[0].fit.rate == doctest::Approx(1.5).epsilon(0.05 / 1.5));
  CHECK(rep.points[0].regular);

  Grid g = Grid::dyadic(1, 8);
  auto q5 = sample(EigenProfile{5, 0}, g);
  auto fq = free_boundary_from_points(g, {make_point({0.0}, 1)});
  auto rq = classify_regular(q5, fq, 0.75);
  REQUIRE(rq.points.size() == 1);
  CHECK_FALSE(rq.points[0].skipped);
  CHECK(rq.points[0].fit.rate > 1.75);
  CHECK_FALSE(rq.points[0].regular);

  CHECK(kind_of([&] { classify_regular(s.w, fb, 0.4); }) == ErrorKind::precondition);
  CHECK(kind_of([&] { classify_regular(s.w, fb, 1.0); }) == ErrorKind::precondition);
}

TEST_CASE("points too close to the cube are skipped") {
  const auto& s = model_n1();
  auto fb = free_boundary_from_points(s.w.grid(), {make_point({0.97}, 1)});
  auto rep = classify_regular(s.w, fb, 0.75);
  REQUIRE(rep.points.size() == 1);
  CHECK(rep.points[0].skipped);
  CHECK_FALSE(rep.points[0].reason.empty());
}

TEST_CASE("normal regularity of synthetic curves") {
  Grid g = Grid::dyadic(2, 6);
  const double h = std::pow(2.0, -8);
  auto line = free_boundary_from_points(g, graph(h, [](double t) { return 0.2 * t; }));
  auto nl = normal_regularity(line);
  CHECK(nl.flat);

  auto kink = free_boundary_from_points(g, graph(h, [](double t) { return 0.1 * std::pow(std::abs(t), 1.5); }));
  auto nk = normal_regularity(kink);
  CHECK_FALSE(nk.flat);
  REQUIRE(nk.fit.applicable);
  CHECK(std::abs(nk.fit.rate - 0.5) <= 0.1);

  auto few = free_boundary_from_points(g, {make_point({0.0, 0.0}, 3), make_point({0.1, 0.0}, 3)});
  CHECK_FALSE(normal_regularity(few).fit.applicable);
  CHECK(kind_of([&] { normal_regularity(extract(model_n1())); }) == ErrorKind::precondition);
}

TEST_CASE("csv export") {
  const auto& s = model_n1();
  auto fb = extract(s);
  auto rep = classify_regular(s.w, fb, 0.75);
  std::ostringstream os;
  write_csv(os, fb, &rep);
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(header == "x1,x2,kappa_hat,regular");
  CHECK(row.substr(row.size() - 2) == ",1");
}
