#include <Eigen/Eigenvalues>

#include <numbers>

#include "thinfb/profiles.hpp"

namespace thinfb {

// -u'' = λu on the circle cut at θ = π: Dirichlet at both sides of the cut,
// smooth matching across θ = 0. Second-order differences on (-π, π).
std::vector<double> eigen_slit_spectrum(int m, int n, int nodes) {
  if (m < 1 || m > 20) throw Error(ErrorKind::precondition, "eigen_slit_spectrum: mode count must lie in [1, 20]");
  if (n != 1) throw Error(ErrorKind::precondition, "eigen_slit_spectrum: only the circle (n = 1) is discretized");
  if (nodes < 4 * m) throw Error(ErrorKind::precondition, "eigen_slit_spectrum: too few angular nodes");
  const double dt = 2.0 * std::numbers::pi / (nodes + 1);
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(nodes, 2.0 / (dt * dt));
  Eigen::VectorXd off = Eigen::VectorXd::Constant(nodes - 1, -1.0 / (dt * dt));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::nonconvergence, "eigen_slit_spectrum: eigensolver failed");
  std::vector<double> kappa(m);
  for (int i = 0; i < m; ++i) {
    // κ(κ + n - 1) = λ
    const double lambda = es.eigenvalues()[i];
    const double b = n - 1.0;
    kappa[i] = 0.5 * (-b + std::sqrt(b * b + 4.0 * lambda));
  }
  return kappa;
}

}  // namespace thinfb
