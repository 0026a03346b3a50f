#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "thinfb/solver.hpp"

namespace thinfb {

namespace {

/// Visit free nodes of one colour; colour bit l is the parity of index l.
template <typename F>
void for_colour(const Grid& g, int colour, F&& f) {
  const int d = g.dim();
  const int N = g.nodes_per_axis();
  auto first = [](int parity) { return parity ? 1 : 2; };
  if (d == 2) {
    const int s0 = first(colour & 1), s1 = first((colour >> 1) & 1);
#pragma omp parallel for schedule(static)
    for (int i = s0; i < N - 1; i += 2)
      for (int j = s1; j < N - 1; j += 2) f(Index(i) * N + j, j);
    return;
  }
  const int s0 = first(colour & 1), s1 = first((colour >> 1) & 1), s2 = first((colour >> 2) & 1);
  const Index NN = Index(N) * N;
#pragma omp parallel for schedule(static)
  for (int i = s0; i < N - 1; i += 2)
    for (int j = s1; j < N - 1; j += 2)
      for (int k = s2; k < N - 1; k += 2) f(i * NN + Index(j) * N + k, k);
}

template <bool Uniform>
void sweep_impl(const DiscreteProblem& p, Eigen::ArrayXd& u, double omega) {
  const Grid& g = p.grid();
  const int d = g.dim();
  const int N = g.nodes_per_axis();
  const int mid = g.mid();
  const int S = p.stencil_size();
  const Index* off = p.offsets().data();
  const double* b = p.load().data();
  const auto& fixed = p.fixed();
  const double* obstacle = p.obstacle().data();
  const bool constrained = p.constrained();
  double* v = u.data();
  const double* shared = p.stencil(0);
  for (int colour = 0; colour < (1 << d); ++colour) {
    for_colour(g, colour, [&](Index node, int last) {
      if (fixed[node]) return;
      const double* s = Uniform ? shared : p.stencil(node);
      double au = 0.0;
      for (int k = 0; k < S; ++k) au += s[k] * v[node + off[k]];
      double next = v[node] + omega * (b[node] - au) / s[S / 2];
      if (constrained && last == mid) next = std::max(next, obstacle[node / N]);
      v[node] = next;
    });
  }
}

Eigen::ArrayXd prolong(const DiscreteProblem& fine, const DiscreteProblem& coarse, const Eigen::ArrayXd& uc) {
  const Grid& gf = fine.grid();
  const Grid& gc = coarse.grid();
  const int d = gf.dim();
  Eigen::ArrayXd u(gf.node_count());
  for (Index node = 0; node < gf.node_count(); ++node) {
    const auto ijk = gf.multi_index(node);
    double acc = 0.0;
    const int terms = 1 << d;
    int weight_count = 0;
    for (int c = 0; c < terms; ++c) {
      std::array<int, 3> cijk{0, 0, 0};
      bool skip = false;
      for (int l = 0; l < d; ++l) {
        const int bit = (c >> l) & 1;
        if (ijk[l] % 2 == 0) {
          if (bit) skip = true;
          cijk[l] = ijk[l] / 2;
        } else {
          cijk[l] = (ijk[l] - 1) / 2 + bit;
        }
      }
      if (skip) continue;
      acc += uc[gc.index(cijk)];
      ++weight_count;
    }
    u[node] = acc / weight_count;
  }
  for (Index i = 0; i < gf.node_count(); ++i)
    if (fine.fixed()[i]) u[i] = fine.dirichlet()[i];
  if (fine.constrained())
    for (Index q = 0; q < gf.plane_count(); ++q) {
      const Index node = gf.plane_node(q);
      if (!fine.fixed()[node]) u[node] = std::max(u[node], fine.obstacle()[q]);
    }
  return u;
}

struct LevelResult {
  int sweeps = 0;
  double residual = 0.0;
  double energy = 0.0;
  bool converged = false;
};

LevelResult relax(const DiscreteProblem& p, Eigen::ArrayXd& u, double omega, double target, double tol, int max_iters,
                  int check_every, SolverStats* record) {
  LevelResult res;
  double previous = p.energy(u);
  res.energy = previous;
  res.residual = natural_residual(p, u);
  if (res.residual <= target) {
    res.converged = true;
    return res;
  }
  for (int it = 1; it <= max_iters; ++it) {
    psor_sweep(p, u, omega);
    res.sweeps = it;
    if (it % check_every != 0 && it != max_iters) continue;
    res.residual = natural_residual(p, u);
    res.energy = p.energy(u);
    if (record) {
      record->residual_history.push_back(res.residual);
      record->energy_history.push_back(res.energy);
    }
    const double decrement = previous - res.energy;
    previous = res.energy;
    if (res.residual <= target && decrement <= tol * std::max(std::abs(res.energy), 1e-300)) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace

double default_omega(const Grid& grid) {
  // near the optimal SOR factor for the Q1 Laplacian on [-1,1]^{n+1}
  const double c = grid.n() == 1 ? 0.62 : 0.75;
  return 2.0 / (1.0 + c * std::numbers::pi * grid.h());
}

void psor_sweep(const DiscreteProblem& p, Eigen::ArrayXd& u, double omega) {
  if (p.uniform())
    sweep_impl<true>(p, u, omega);
  else
    sweep_impl<false>(p, u, omega);
}

double natural_residual(const DiscreteProblem& p, const Eigen::ArrayXd& u) {
  const Grid& g = p.grid();
  const int N = g.nodes_per_axis();
  const int mid = g.mid();
  const auto& fixed = p.fixed();
  double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(static)
  for (Index node = 0; node < g.node_count(); ++node) {
    if (fixed[node]) continue;
    const double r = (p.load()[node] - p.apply_row(u, node)) / p.diagonal(node);
    double val = std::abs(r);
    if (p.constrained() && node % N == mid) val = std::abs(std::min(u[node] - p.obstacle()[node / N], -r));
    worst = std::max(worst, val);
  }
  return worst;
}

SolutionField make_solution(const DiscreteProblem& p, Eigen::ArrayXd u, SolverStats stats) {
  const Grid& g = p.grid();
  const Index P = g.plane_count();
  SolutionField s{GridField(g, std::move(u)), p.obstacle(), NodeMask(P, 0), NodeMask(P, 0), Eigen::ArrayXd::Zero(P),
                  std::move(stats)};
  const double hn = std::pow(g.h(), g.n());
  const auto& w = s.w.values();
  for (Index q = 0; q < P; ++q) {
    const Index node = g.plane_node(q);
    const bool contact = p.constrained() && w[node] - p.obstacle()[q] <= 0.0;
    s.contact[q] = contact;
    s.noncontact[q] = !contact;
    if (!p.fixed()[node]) s.complementarity[q] = (p.apply_row(w, node) - p.load()[node]) / hn;
  }
  return s;
}

SolutionField solve_psor(const DiscreteProblem& p, const PsorOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Grid& g = p.grid();
  const int max_iters = options.max_iters > 0 ? options.max_iters : (g.n() == 1 ? 100000 : 10000);
  const double omega = options.omega > 0.0 ? options.omega : default_omega(g);
  if (!(omega > 0.0 && omega < 2.0)) throw Error(ErrorKind::precondition, "solve_psor: omega must lie in (0,2)");
  if (!(options.tol > 0.0)) throw Error(ErrorKind::precondition, "solve_psor: tolerance must be positive");

  SolverStats stats;
  stats.omega = omega;
  const Eigen::ArrayXd trivial = p.trivial_iterate();
  stats.residual0 = natural_residual(p, trivial);

  Eigen::ArrayXd u;
  if (options.initial) {
    if (options.initial->size() != g.node_count()) throw Error(ErrorKind::precondition, "solve_psor: initial iterate has the wrong size");
    u = *options.initial;
    for (Index i = 0; i < g.node_count(); ++i)
      if (p.fixed()[i]) u[i] = trivial[i];
    if (p.constrained())
      for (Index q = 0; q < g.plane_count(); ++q) {
        const Index node = g.plane_node(q);
        if (!p.fixed()[node]) u[node] = std::max(u[node], p.obstacle()[q]);
      }
  } else if (options.nested && g.can_coarsen()) {
    std::vector<DiscreteProblem> levels;
    levels.push_back(p.coarsened());
    while (levels.back().grid().can_coarsen()) levels.push_back(levels.back().coarsened());
    stats.levels = static_cast<int>(levels.size()) + 1;
    Eigen::ArrayXd uc = levels.back().trivial_iterate();
    for (std::size_t k = levels.size(); k-- > 0;) {
      const DiscreteProblem& level = levels[k];
      const double r0 = natural_residual(level, level.trivial_iterate());
      const double level_tol = std::max(options.tol, 1e-6);
      const auto lr = relax(level, uc, options.omega > 0.0 ? options.omega : default_omega(level.grid()), level_tol * r0,
                            level_tol, max_iters, options.check_every, nullptr);
      stats.total_sweeps += lr.sweeps;
      uc = k > 0 ? prolong(levels[k - 1], level, uc) : prolong(p, level, uc);
    }
    u = std::move(uc);
  } else {
    u = trivial;
  }

  const auto lr = relax(p, u, omega, options.tol * stats.residual0, options.tol, max_iters, options.check_every, &stats);
  stats.iterations = lr.sweeps;
  stats.total_sweeps += lr.sweeps;
  stats.residual = lr.residual;
  stats.energy = lr.energy;
  stats.converged = lr.converged;
  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!lr.converged) {
    std::ostringstream os;
    os << "solve_psor: no convergence after " << lr.sweeps << " sweeps (residual " << lr.residual << ", target "
       << options.tol * stats.residual0 << ")";
    throw NonconvergenceError(os.str(), GridField(g, std::move(u)), std::move(stats));
  }
  return make_solution(p, std::move(u), std::move(stats));
}

}  // namespace thinfb
