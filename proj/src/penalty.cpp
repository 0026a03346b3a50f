#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "thinfb/solver.hpp"

namespace thinfb {

// On [-2ε², 0] the cubic Hermite interpolant with end values (-ε, 0) and end
// slopes (1/ε, 0) collapses to -t²/(4ε³). Its secant slope is 1/(2ε), so the
// Fritsch-Carlson ratios are (2, 0), inside the monotone region.
double penalty_beta(double t, double eps) {
  if (t >= 0.0) return 0.0;
  if (t <= -2.0 * eps * eps) return eps + t / eps;
  return -t * t / (4.0 * eps * eps * eps);
}

double penalty_beta_prime(double t, double eps) {
  if (t >= 0.0) return 0.0;
  if (t <= -2.0 * eps * eps) return 1.0 / eps;
  return -t / (2.0 * eps * eps * eps);
}

double penalty_primitive(double t, double eps) {
  if (t >= 0.0) return 0.0;
  const double knot = -2.0 * eps * eps;
  if (t >= knot) return -t * t * t / (12.0 * eps * eps * eps);
  const double at_knot = 2.0 * eps * eps * eps / 3.0;
  return at_knot + eps * (t - knot) + (t * t - knot * knot) / (2.0 * eps);
}

namespace {

struct FreeSystem {
  std::vector<Index> nodes;        // free node of each unknown
  std::vector<Index> unknown;      // unknown of each node, -1 if fixed
  std::vector<Index> plane_nodes;  // unknowns on the plane
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd rhs;  // b - A_fb u_b
};

FreeSystem build(const DiscreteProblem& p) {
  const Grid& g = p.grid();
  FreeSystem s;
  s.unknown.assign(static_cast<std::size_t>(g.node_count()), -1);
  for (Index i = 0; i < g.node_count(); ++i)
    if (!p.fixed()[i]) {
      s.unknown[i] = static_cast<Index>(s.nodes.size());
      s.nodes.push_back(i);
    }
  const Index n = static_cast<Index>(s.nodes.size());
  for (Index k = 0; k < n; ++k)
    if (g.on_plane(s.nodes[k])) s.plane_nodes.push_back(k);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n * p.stencil_size()));
  s.rhs.resize(n);
  for (Index k = 0; k < n; ++k) {
    const Index node = s.nodes[k];
    const double* st = p.stencil(node);
    double rhs = p.load()[node];
    for (int m = 0; m < p.stencil_size(); ++m) {
      if (st[m] == 0.0) continue;
      const Index j = node + p.offsets()[m];
      if (s.unknown[j] >= 0)
        trip.emplace_back(k, s.unknown[j], st[m]);
      else
        rhs -= st[m] * p.dirichlet()[j];
    }
    s.rhs[k] = rhs;
  }
  s.A.resize(n, n);
  s.A.setFromTriplets(trip.begin(), trip.end());
  return s;
}

struct Merit {
  const FreeSystem& sys;
  double weight;
  double eps;

  double operator()(const Eigen::VectorXd& x) const {
    double v = 0.5 * x.dot(sys.A * x) - sys.rhs.dot(x);
    for (Index k : sys.plane_nodes) v += weight * penalty_primitive(x[k], eps);
    return v;
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd r = sys.A * x - sys.rhs;
    for (Index k : sys.plane_nodes) r[k] += weight * penalty_beta(x[k], eps);
    return r;
  }
};

/// Damped Newton for one ε; returns the iteration count.
int newton(const FreeSystem& sys, Eigen::VectorXd& x, double weight, double eps, double tol, int max_iters,
           const Eigen::VectorXd& diag) {
  Merit merit{sys, weight, eps};
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::SparseMatrix<double> J = sys.A;
  ldlt.analyzePattern(J);
  for (int it = 1; it <= max_iters; ++it) {
    const Eigen::VectorXd F = merit.gradient(x);
    const double scaled = (F.array().abs() / diag.array()).maxCoeff();
    if (scaled <= tol) return it - 1;
    J = sys.A;
    for (Index k : sys.plane_nodes) J.coeffRef(k, k) += weight * penalty_beta_prime(x[k], eps);
    ldlt.factorize(J);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::nonconvergence, "solve_penalized: factorization failed");
    const Eigen::VectorXd dx = ldlt.solve(-F);
    const double slope = F.dot(dx);
    const double phi0 = merit(x);
    double t = 1.0;
    Eigen::VectorXd trial;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      trial = x + t * dx;
      if (merit(trial) <= phi0 + 1e-4 * t * slope) break;
    }
    if ((t * dx).cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + x.cwiseAbs().maxCoeff())) {
      x = trial;
      return it;
    }
    x = trial;
  }
  std::ostringstream os;
  os << "solve_penalized: Newton stagnated at ε = " << eps;
  throw Error(ErrorKind::nonconvergence, os.str());
}

}  // namespace

SolutionField solve_penalized(const DiscreteProblem& p, const PenaltyConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (!(cfg.epsilon >= 1e-6 && cfg.epsilon <= 1e-1))
    throw Error(ErrorKind::precondition, "solve_penalized: ε must lie in [1e-6, 1e-1]");
  if ((p.obstacle() != 0.0).any()) throw Error(ErrorKind::precondition, "solve_penalized: the penalized form needs φ = 0");
  const Grid& g = p.grid();
  const FreeSystem sys = build(p);
  const double weight = std::pow(g.h(), g.n());
  Eigen::VectorXd diag = sys.A.diagonal();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Index>(sys.nodes.size()));
  if (cfg.initial) {
    if (cfg.initial->size() != g.node_count()) throw Error(ErrorKind::precondition, "solve_penalized: initial iterate has the wrong size");
    for (std::size_t k = 0; k < sys.nodes.size(); ++k) x[static_cast<Index>(k)] = (*cfg.initial)[sys.nodes[k]];
  }
  SolverStats stats;
  // continuation in ε keeps every Newton solve in its quadratic regime
  std::vector<double> ladder;
  for (double e = 1e-1; e > cfg.epsilon * 1.0001; e *= 0.1) ladder.push_back(e);
  ladder.push_back(cfg.epsilon);
  for (double e : ladder) stats.iterations += newton(sys, x, weight, e, cfg.newton_tol, cfg.max_newton, diag);
  stats.total_sweeps = stats.iterations;
  stats.converged = true;

  Eigen::ArrayXd u = p.trivial_iterate();
  for (std::size_t k = 0; k < sys.nodes.size(); ++k) u[sys.nodes[k]] = x[static_cast<Index>(k)];
  stats.energy = p.energy(u);
  stats.residual = (Merit{sys, weight, cfg.epsilon}.gradient(x).array().abs() / diag.array()).maxCoeff();
  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return make_solution(p, std::move(u), std::move(stats));
}

}  // namespace thinfb
