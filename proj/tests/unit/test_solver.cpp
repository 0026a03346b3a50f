#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "thinfb/profiles.hpp"
#include "thinfb/solver.hpp"

using namespace thinfb;

namespace {

double interior_residual(const DiscreteProblem& p, const Eigen::ArrayXd& u, bool skip_plane) {
  double worst = 0.0;
  for (Index i = 0; i < p.grid().node_count(); ++i) {
    if (p.fixed()[i] || (skip_plane && p.grid().on_plane(i))) continue;
    worst = std::max(worst, std::abs(p.apply_row(u, i) - p.load()[i]));
  }
  return worst;
}

SolutionField solve_profile(const Profile& prof, int level, double tol = 1e-10) {
  Grid g = Grid::dyadic(1, level);
  auto p = assemble(CoefficientField::identity(g), sample(prof, g));
  PsorOptions o;
  o.tol = tol;
  return solve_psor(p, o);
}

}  // namespace

TEST_CASE("stiffness annihilates harmonic linear data") {
  Grid g = Grid::dyadic(1, 5);
  auto lin = sample(LinearProfile{1.0}, g);
  AssemblyOptions free;
  free.constrained = false;
  auto p = assemble(CoefficientField::identity(g), lin, free);
  CHECK(p.uniform());
  CHECK(interior_residual(p, lin.values(), false) <= 1e-12);

  Matrix a(2, 2);
  a << 2.0, 0.0, 0.0, 1.0;
  free.waive_condition_N = true;  // a(0) is not the identity
  auto pc = assemble(CoefficientField::constant(g, a, Eigen::VectorXd::Zero(2)),
                     GridField::sample(g, [](const Point& x) { return x[0]; }), free);
  CHECK(interior_residual(pc, GridField::sample(g, [](const Point& x) { return x[0]; }).values(), false) <= 1e-12);
}

TEST_CASE("stiffness on h32 concentrates at the slit") {
  Grid g = Grid::dyadic(1, 6);
  auto h = sample(ConeProfile::model(1), g);
  AssemblyOptions free;
  free.constrained = false;
  auto p = assemble(CoefficientField::identity(g), h, free);
  double far = 0.0;
  for (Index i = 0; i < g.node_count(); ++i) {
    if (p.fixed()[i]) continue;
    const Point x = g.position(i);
    if (x.norm() > 4 * g.h() && std::abs(x[1]) > 1.5 * g.h())
      far = std::max(far, std::abs(p.apply_row(h.values(), i)));
  }
  double slit = 0.0;
  for (Index q = 0; q < g.plane_count(); ++q) {
    const Index i = g.plane_node(q);
    if (!p.fixed()[i]) slit = std::max(slit, std::abs(p.apply_row(h.values(), i)));
  }
  CHECK(far <= 1e-3 * slit);
}

TEST_CASE("(N) is checked at assembly unless waived") {
  Grid g = Grid::dyadic(1, 4);
  Matrix a(2, 2);
  a << 1.0, 0.1, 0.1, 1.0;
  auto c = CoefficientField::constant(g, a, Eigen::VectorXd::Zero(2));
  auto data = GridField::zeros(g);
  CHECK_THROWS_AS(assemble(c, data), Error);
  AssemblyOptions waive;
  waive.waive_condition_N = true;
  CHECK_NOTHROW(assemble(c, data, waive));
}

TEST_CASE("odd linear data is already feasible") {
  auto s = solve_profile(LinearProfile{1.0}, 5);
  const Grid& g = s.w.grid();
  for (Index i = 0; i < g.node_count(); ++i) CHECK(std::abs(s.w[i] - g.position(i)[1]) <= 1e-8);
}

TEST_CASE("negative kink data gives full contact") {
  auto s = solve_profile(KinkProfile{-1.0, -1.0}, 5);
  const Grid& g = s.w.grid();
  for (Index i = 0; i < g.node_count(); ++i) CHECK(std::abs(s.w[i] + std::abs(g.position(i)[1])) <= 1e-8);
  for (Index q = 0; q < g.plane_count(); ++q) {
    CHECK(s.contact[q]);
    if (!g.on_boundary(g.plane_node(q))) CHECK(s.complementarity[q] == doctest::Approx(2.0).epsilon(1e-8));
  }
}

TEST_CASE("positive kink data separates from the plane") {
  auto s = solve_profile(KinkProfile{1.0, 1.0}, 5);
  const Grid& g = s.w.grid();
  for (Index q = 0; q < g.plane_count(); ++q) {
    if (g.on_boundary(g.plane_node(q))) continue;
    CHECK(s.noncontact[q]);
    CHECK(s.w[g.plane_node(q)] > 0.0);
    CHECK(std::abs(s.complementarity[q]) <= 1e-6);
  }
}

TEST_CASE("h32 data reproduces the model solution") {
  auto s = solve_profile(ConeProfile::model(1), 6);
  const Grid& g = s.w.grid();
  auto exact = sample(ConeProfile::model(1), g);
  const double scale = exact.values().abs().maxCoeff();
  CHECK((s.w.values() - exact.values()).abs().maxCoeff() <= 0.02 * scale);
  CHECK(s.stats.converged);
  for (Index q = 0; q < g.plane_count(); ++q) {
    const double x1 = g.position(g.plane_node(q))[0];
    if (x1 < -g.h()) CHECK(s.contact[q]);
    if (x1 > g.h()) CHECK(s.noncontact[q]);
  }
  CHECK(s.w.parity_defect() <= 1e-10);
}

TEST_CASE("discrete complementarity and energy decrease") {
  Grid g = Grid::dyadic(1, 5);
  auto c = generate_field(0.75, 0.05, 7, g);
  auto p = assemble(c, sample(ConeProfile::model(1), g));
  PsorOptions o;
  o.tol = 1e-10;
  o.nested = false;
  o.check_every = 1;
  auto s = solve_psor(p, o);
  for (Index q = 0; q < g.plane_count(); ++q) {
    const Index i = g.plane_node(q);
    if (p.fixed()[i]) continue;
    CHECK(s.w[i] >= -1e-10);
    const double r = std::min(s.w[i], s.complementarity[q] * std::pow(g.h(), g.n()) / p.diagonal(i));
    CHECK(std::abs(r) <= 1e-8);
  }
  for (std::size_t k = 1; k < s.stats.energy_history.size(); ++k)
    CHECK(s.stats.energy_history[k] <= s.stats.energy_history[k - 1] + 1e-12);
  CHECK(natural_residual(p, s.w.values()) <= 1e-9 * natural_residual(p, p.trivial_iterate()) * 10);
}

TEST_CASE("iteration cap reports nonconvergence") {
  Grid g = Grid::dyadic(1, 5);
  auto p = assemble(CoefficientField::identity(g), sample(ConeProfile::model(1), g));
  PsorOptions o;
  o.max_iters = 3;
  o.nested = false;
  try {
    solve_psor(p, o);
    FAIL("expected nonconvergence");
  } catch (const NonconvergenceError& e) {
    CHECK(e.kind() == ErrorKind::nonconvergence);
    CHECK(e.last_iterate().grid() == g);
  }
}

TEST_CASE("penalty function") {
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    CHECK(penalty_beta(-2 * eps * eps, eps) == doctest::Approx(-eps).epsilon(1e-14));
    CHECK(penalty_beta(0.0, eps) == 0.0);
    CHECK(penalty_beta(1.0, eps) == 0.0);
    CHECK(penalty_beta(-1.0, eps) == doctest::Approx(eps - 1.0 / eps));
    double last = -1e300;
    for (int k = 0; k <= 400; ++k) {
      const double t = -4 * eps * eps + k * 5 * eps * eps / 400;
      const double b = penalty_beta(t, eps);
      CHECK(b >= last);
      CHECK(b <= 0.0);
      CHECK(penalty_beta_prime(t, eps) >= 0.0);
      last = b;
    }
    // primitive against a midpoint rule
    const double t = -3 * eps * eps;
    double sum = 0.0;
    const int m = 20000;
    for (int k = 0; k < m; ++k) sum += penalty_beta(t * (k + 0.5) / m, eps) * t / m;
    CHECK(penalty_primitive(t, eps) == doctest::Approx(sum).epsilon(1e-6));
  }
}

TEST_CASE("penalized solutions approach the constrained one") {
  Grid g = Grid::dyadic(1, 5);
  auto p = assemble(CoefficientField::identity(g), sample(ConeProfile::model(1), g));
  PsorOptions o;
  o.tol = 1e-12;
  auto ref = solve_psor(p, o);
  double last = 1e300;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    PenaltyConfig cfg;
    cfg.epsilon = eps;
    auto s = solve_penalized(p, cfg);
    const double d = std::sqrt((s.w.values() - ref.w.values()).square().mean());
    CHECK(d < last);
    last = d;
  }

  auto q = assemble(CoefficientField::identity(g), sample(KinkProfile{1.0, 1.0}, g));
  AssemblyOptions free;
  free.constrained = false;
  auto q_free = assemble(CoefficientField::identity(g), sample(KinkProfile{1.0, 1.0}, g), free);
  PsorOptions tight;
  tight.tol = 1e-12;
  auto unconstrained = solve_psor(q_free, tight);
  auto pen = solve_penalized(q, PenaltyConfig{});
  CHECK((pen.w.values() - unconstrained.w.values()).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("reduced inhomogeneity") {
  Grid g = Grid::dyadic(1, 4);
  auto w = sample(ConeProfile::model(1), g);
  auto G = derive_G(w, CoefficientField::identity(g), 0.3);
  CHECK(G.values.abs().maxCoeff() == 0.0);
  CHECK(G.plane_lower.abs().maxCoeff() == 0.0);

  Eigen::VectorXd gv(2);
  gv << 0.2, -0.1;
  auto Gg = derive_G(w, CoefficientField::constant(g, Matrix::Identity(2, 2), gv), 0.3);
  for (Index i = 0; i < g.node_count(); ++i) {
    CHECK(Gg.values(i, 0) == doctest::Approx(0.2));
    CHECK(Gg.values(i, 1) == doctest::Approx(-0.1));
  }
}

TEST_CASE("reduced inhomogeneity is Hoelder small at the origin") {
  Grid g = Grid::dyadic(1, 6);
  const double alpha = 0.75, delta0 = 0.05;
  auto c = generate_field(alpha, delta0, 7, g);
  auto s = solve_psor(assemble(c, sample(ConeProfile::model(1), g)));
  auto G = derive_G(s.w, c, 0.0);
  double worst = 0.0;
  for (Index i = 0; i < g.node_count(); ++i) {
    const Point x = g.position(i);
    const double r = x.norm();
    if (r < 8 * g.h() || r > 0.5) continue;
    worst = std::max(worst, G.values.row(i).matrix().norm() / std::pow(r, alpha));
  }
  const double wmax = s.w.values().abs().maxCoeff();
  CHECK(worst <= 10.0 * (delta0 + delta0 * wmax));
}
