#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "thinfb/coefficients.hpp"
#include "thinfb/grid.hpp"

namespace thinfb {

using NodeMask = std::vector<std::uint8_t>;

/// Nodes on the faces of the cube.
NodeMask cube_boundary_mask(const Grid& grid);

struct AssemblyOptions {
  /// Skip the condition-(N) check.
  bool waive_condition_N = false;
  /// Nodes held at the Dirichlet data; defaults to the cube faces. Must
  /// contain the cube faces.
  NodeMask fixed;
  /// Plane constraint active (false gives the unconstrained problem).
  bool constrained = true;
};

/// Q1 finite elements on the grid with coefficients sampled at element
/// midpoints. Rows are stored as full 3^d stencils; a single shared stencil
/// when the coefficients are the identity.
class DiscreteProblem {
 public:
  DiscreteProblem(std::shared_ptr<const CoefficientField> coefficients, const GridField& dirichlet,
                  Eigen::ArrayXd obstacle, AssemblyOptions options = {});

  const Grid& grid() const { return grid_; }
  const CoefficientField& coefficients() const { return *coefficients_; }
  const GridField& dirichlet() const { return dirichlet_; }
  const Eigen::ArrayXd& obstacle() const { return obstacle_; }
  const NodeMask& fixed() const { return fixed_; }
  bool constrained() const { return constrained_; }
  const AssemblyOptions& options() const { return options_; }

  int stencil_size() const { return stencil_size_; }
  const std::vector<Index>& offsets() const { return offsets_; }
  bool uniform() const { return uniform_; }
  const double* stencil(Index node) const { return uniform_ ? stencil_.data() : stencil_.data() + node * stencil_size_; }
  double diagonal(Index node) const { return stencil(node)[stencil_size_ / 2]; }
  /// b_i = -∫ g·∇φ_i.
  const Eigen::ArrayXd& load() const { return load_; }

  /// (A u)_i at a free node.
  double apply_row(const Eigen::ArrayXd& u, Index node) const {
    const double* s = stencil(node);
    const double* v = u.data() + node;
    double acc = 0.0;
    for (int k = 0; k < stencil_size_; ++k) acc += s[k] * v[offsets_[k]];
    return acc;
  }

  /// u with fixed nodes set to the data and everything else to 0, clipped
  /// at the obstacle.
  Eigen::ArrayXd trivial_iterate() const;

  /// ½ u·A u - b·u over the free nodes (fixed-fixed couplings excluded).
  double energy(const Eigen::ArrayXd& u) const;

  /// Same problem on the grid with spacing 2h (nodal injection of all data).
  DiscreteProblem coarsened() const;

 private:
  std::shared_ptr<const CoefficientField> coefficients_;
  Grid grid_;
  GridField dirichlet_;
  Eigen::ArrayXd obstacle_;
  NodeMask fixed_;
  bool constrained_;
  AssemblyOptions options_;
  int stencil_size_;
  std::vector<Index> offsets_;
  bool uniform_;
  Eigen::ArrayXd stencil_;
  Eigen::ArrayXd load_;
};

/// Zero obstacle on every plane node.
Eigen::ArrayXd zero_obstacle(const Grid& grid);

DiscreteProblem assemble(const CoefficientField& coefficients, const GridField& dirichlet,
                         AssemblyOptions options = {});
DiscreteProblem assemble(const CoefficientField& coefficients, const GridField& dirichlet,
                         const Eigen::ArrayXd& obstacle, AssemblyOptions options = {});

struct SolverStats {
  int iterations = 0;  // sweeps on the finest level
  int total_sweeps = 0;
  int levels = 1;
  double omega = 0.0;
  double residual0 = 0.0;
  double residual = 0.0;
  double energy = 0.0;
  bool converged = false;
  double seconds = 0.0;
  std::vector<double> residual_history;  // finest level, one entry per check
  std::vector<double> energy_history;
};

struct SolutionField {
  GridField w;
  Eigen::ArrayXd obstacle;          // per plane node
  NodeMask contact;                 // per plane node: w = φ
  NodeMask noncontact;              // per plane node: w > φ
  Eigen::ArrayXd complementarity;  // per plane node: (A w - b)_i / h^n, the discrete flux jump
  SolverStats stats;
};

class NonconvergenceError : public Error {
 public:
  NonconvergenceError(const std::string& what, GridField last, SolverStats stats)
      : Error(ErrorKind::nonconvergence, what), last_(std::move(last)), stats_(std::move(stats)) {}
  const GridField& last_iterate() const { return last_; }
  const SolverStats& stats() const { return stats_; }

 private:
  GridField last_;
  SolverStats stats_;
};

struct PsorOptions {
  double tol = 1e-9;   // relative to the residual of the trivial iterate
  int max_iters = 0;   // 0: 1e5 for n = 1, 1e4 for n = 2
  double omega = 0.0;  // 0: grid-dependent default
  bool nested = true;  // coarse-to-fine initial guess
  int check_every = 10;
  const Eigen::ArrayXd* initial = nullptr;
};

/// Relaxation factor used when PsorOptions::omega is 0.
double default_omega(const Grid& grid);

/// max over free nodes of |r_i|/A_ii, with min(u-φ, (Au-b)_i/A_ii) on the
/// constrained plane nodes.
double natural_residual(const DiscreteProblem& p, const Eigen::ArrayXd& u);

SolutionField solve_psor(const DiscreteProblem& p, const PsorOptions& options = {});

/// Projected SOR sweeps in 2^d-colour order (nodes whose indices share
/// parity never couple through a Q1 stencil).
void psor_sweep(const DiscreteProblem& p, Eigen::ArrayXd& u, double omega);

/// Masks and flux jump for a given nodal vector.
SolutionField make_solution(const DiscreteProblem& p, Eigen::ArrayXd u, SolverStats stats);

/// β_ε: 0 on [0,∞), ε + t/ε on (-∞,-2ε²], monotone cubic Hermite between.
struct PenaltyConfig {
  double epsilon = 1e-3;
  double newton_tol = 1e-10;  // on the scaled residual
  int max_newton = 200;
  const Eigen::ArrayXd* initial = nullptr;
};

double penalty_beta(double t, double eps);
double penalty_beta_prime(double t, double eps);
/// ∫_0^t β_ε.
double penalty_primitive(double t, double eps);

SolutionField solve_penalized(const DiscreteProblem& p, const PenaltyConfig& cfg);

/// Vector field on the grid (node x dim), with the lower one-sided values on
/// the plane kept separately.
struct VectorGridField {
  Grid grid;
  NodalArray values;
  NodalArray plane_lower;
};

/// G^i = Σ_j (δ^{ij} - a^{ij}) ∂_j w̃ + g^i + a0 (δ^{i,n+1} - a^{i,n+1}), w̃ = w - a0 x_{n+1}.
VectorGridField derive_G(const GridField& w, const CoefficientField& c, double a0);

}  // namespace thinfb
