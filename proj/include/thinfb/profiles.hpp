#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "thinfb/grid.hpp"

namespace thinfb {

namespace kernels {

/// ρ^κ cos(κφ) with (ρ, φ) the polar coordinates of (s, |t|), φ ∈ [0, π]:
/// Re(s + i|t|)^κ on the branch that is even in t.
template <typename T>
T re_power(T s, T t, T kappa) {
  using std::abs, std::atan2, std::cos, std::hypot, std::pow;
  const T rho = hypot(s, t);
  if (rho == T(0)) return T(0);
  if (t == T(0) && s < T(0)) {
    // cos(κπ) is exactly 0 for half-odd κ; the rounded product is not
    const T twice = T(2) * kappa;
    if (twice == std::round(twice) && static_cast<long>(twice) % 2 != 0) return T(0);
  }
  return pow(rho, kappa) * cos(kappa * atan2(abs(t), s));
}

/// Im(s + i t)^m for integer m ≥ 1; odd in t.
template <typename T>
T im_power(T s, T t, int m) {
  using std::atan2, std::hypot, std::pow, std::sin;
  const T rho = hypot(s, t);
  if (rho == T(0) || t == T(0)) return T(0);
  return pow(rho, T(m)) * sin(T(m) * atan2(t, s));
}

/// h_{3/2}(s, t) = Re(s + i|t|)^{3/2}.
template <typename T>
T h32(T s, T t) {
  return re_power(s, t, T(1.5));
}

}  // namespace kernels

/// a0 x_{n+1}.
struct LinearProfile {
  double a0 = 1.0;
};

/// c Re(x'·ξ + i|x_{n+1}|)^{3/2}, c ≥ 0, |ξ| = 1.
struct ConeProfile {
  double c = 1.0;
  Point xi;  // unit vector of R^n

  /// c h_{3/2} with ξ = e_n.
  static ConeProfile model(int n, double c = 1.0);
};

/// Homogeneous solution q_k of the slit problem (Dirichlet on {x_n ≤ 0} of
/// the plane, flux matching on {x_n > 0}) of degree k/2. Odd k: the
/// even-in-x_{n+1} member Re(x_n + i|x_{n+1}|)^{k/2}; even k: the odd member
/// Im(x_n + i x_{n+1})^{k/2}. For n = 2 the tangential factor x_1 may be
/// attached (degree k/2 + 1).
struct EigenProfile {
  int k = 3;
  int tangential_degree = 0;

  double homogeneity() const { return 0.5 * k + tangential_degree; }
  bool even_type() const { return k % 2 == 1; }
};

/// -(ln ρ) Re(x_1 + i|x_2|)^{3/2}, n = 1 only.
struct LogProfile {};

/// p (x_{n+1})_+ + m (x_{n+1})_-, with (t)_- = max(-t, 0).
struct KinkProfile {
  double plus = 1.0;
  double minus = 1.0;
};

using Profile = std::variant<LinearProfile, ConeProfile, EigenProfile, LogProfile, KinkProfile>;

/// Throws DomainError for LogProfile at the origin.
double evaluate(const Profile& p, const Point& x);

Parity parity_of(const Profile& p);
std::string type_name(const Profile& p);

/// Nodal samples tagged with the profile parity. LogProfile is set to 0 at
/// the origin node.
GridField sample(const Profile& p, const Grid& grid);

/// Homogeneities κ of the slit eigenproblem on the circle, from the
/// eigenvalues κ(κ+n-1) of the angular operator.
std::vector<double> eigen_slit_spectrum(int m, int n = 1, int nodes = 4096);

/// Δ of LogProfile: -3 ρ^{-1/2} cos(3φ/2). Throws DomainError at the origin
/// and on the slit {x_1 ≤ 0, x_2 = 0}.
double laplacian_log_example(const Point& x);

nlohmann::json to_json(const Profile& p);
/// {type, parameters}; also accepts the short names "h32", "q<k>", "log",
/// "abs", "neg-abs", "linear".
Profile profile_from_json(const nlohmann::json& j, int n);
Profile profile_from_name(const std::string& name, int n);

}  // namespace thinfb
