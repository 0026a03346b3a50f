#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "thinfb/grid.hpp"

namespace thinfb {

/// Number of packed entries of a symmetric d x d matrix.
constexpr int packed_size(int d) { return d * (d + 1) / 2; }

/// Packed position of (i,j), upper triangle, row by row.
constexpr int packed_index(int d, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * d - i * (i - 1) / 2 + (j - i);
}

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

/// Nodal coefficients before any validation.
struct RawCoefficients {
  Grid grid;
  NodalArray a;  // node x packed_size(d)
  NodalArray g;  // node x d
  double alpha = 0.5;
};

/// Symmetric uniformly elliptic a^{ij} and drift g^i on the grid nodes.
class CoefficientField {
 public:
  /// Checks ellipticity at every node; λ, Λ are the extreme eigenvalues.
  CoefficientField(RawCoefficients raw, double delta0 = 0.0, std::uint64_t seed = 0);

  static CoefficientField identity(const Grid& grid);
  /// Rejects asymmetric matrices.
  static CoefficientField constant(const Grid& grid, const Matrix& a, const Eigen::VectorXd& g);
  /// Sample a(x), g(x) at the nodes; asymmetric samples are rejected.
  static CoefficientField from_functions(const Grid& grid, const std::function<Matrix(const Point&)>& a,
                                         const std::function<Eigen::VectorXd(const Point&)>& g, double alpha);

  const Grid& grid() const { return grid_; }
  const NodalArray& a() const { return a_; }
  const NodalArray& g() const { return g_; }
  double alpha() const { return alpha_; }
  double delta0() const { return delta0_; }
  std::uint64_t seed() const { return seed_; }
  double lambda() const { return lambda_; }
  double Lambda() const { return Lambda_; }
  /// a ≡ I and g ≡ 0 exactly.
  bool is_identity() const { return identity_; }
  bool g_is_zero() const { return g_zero_; }

  Matrix a_at(Index node) const;
  Eigen::VectorXd g_at(Index node) const;
  /// Multilinear interpolation of every packed a entry and g component.
  void interpolate(const Point& x, double* a_packed, double* g_out) const;

  RawCoefficients raw() const { return {grid_, a_, g_, alpha_}; }

 private:
  Grid grid_;
  NodalArray a_;
  NodalArray g_;
  double alpha_;
  double delta0_;
  std::uint64_t seed_;
  double lambda_ = 1.0;
  double Lambda_ = 1.0;
  bool identity_ = false;
  bool g_zero_ = false;
};

struct ConditionNViolation {
  std::string clause;  // "a(0)=I", "g(0)=0", "off-diagonal on plane"
  double magnitude;
};

struct ConditionNReport {
  bool pass = true;
  double a_origin = 0.0;
  double g_origin = 0.0;
  double plane_off_diagonal = 0.0;
  std::vector<ConditionNViolation> violations;
};

inline constexpr double kConditionNTolerance = 1e-12;

ConditionNReport check_condition_N(const CoefficientField& c);

/// x -> A(0)^{1/2} x followed by subtracting g(0). The plane clause of (N)
/// is not enforced.
CoefficientField normalize_at_origin(const RawCoefficients& raw);
CoefficientField normalize_at_origin(const CoefficientField& c);

struct HoelderEstimate {
  double alpha = 0.0;
  double seminorm = 0.0;
  std::int64_t pairs = 0;
};

inline constexpr std::int64_t kDefaultSeminormPairs = 100000;

/// max |f(x)-f(y)|/|x-y|^α over a deterministic stream of node pairs. Each
/// prefix of the stream is the stream for a smaller count, so the estimate is
/// nondecreasing in `pairs`.
HoelderEstimate estimate_seminorm(const GridField& f, double alpha, std::int64_t pairs = kDefaultSeminormPairs);

/// Same pair stream; [a] in the Frobenius norm plus [g] in the Euclidean
/// norm.
HoelderEstimate estimate_coefficient_seminorm(const CoefficientField& c, std::int64_t pairs = kDefaultSeminormPairs);

/// Seeded spectral synthesis satisfying (N) exactly with
/// [a]_{C^{0,α}} + [g]_{C^{0,α}} measured equal to δ0.
CoefficientField generate_field(double alpha, double delta0, std::uint64_t seed, const Grid& grid);

/// Snapshot-style bundle: <path>.a.f64, <path>.g.f64 and a JSON manifest
/// {n, h, alpha, delta0, seed, lambda, Lambda}.
void write_coefficients(const std::filesystem::path& path, const CoefficientField& c);
CoefficientField read_coefficients(const std::filesystem::path& path);

}  // namespace thinfb
