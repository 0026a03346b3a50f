#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "thinfb/analysis.hpp"
#include "thinfb/solver.hpp"

namespace thinfb {

struct BoundaryPoint {
  Point x;       // on the plane, x_{n+1} = 0
  Point normal;  // unit vector of R^n pointing into Ω (n = 2 only)
  int chain = 0;
};

/// Λ, Ω and Γ of a solution. Masks are per plane node; a node in neither
/// mask lies in the ambiguous band.
struct FreeBoundary {
  Grid grid;
  NodeMask contact;
  NodeMask noncontact;
  std::vector<BoundaryPoint> points;
  /// n = 2: polylines as index lists into `points`, ordered along the curve.
  std::vector<std::vector<std::size_t>> chains;
  double tol_w = 0.0;
  double tol_flux = 0.0;

  Index ambiguous_count() const;
};

/// tol = 0 selects the defaults 10 h^{3/2} ‖w‖ and 10 h^{1/2} ‖w‖, ‖w‖ the
/// max of |w| on the plane (on the grid when w vanishes on the plane).
struct ExtractOptions {
  double tol_w = 0.0;
  double tol_flux = 0.0;
  int normal_window = 9;
};

/// Contact: w - φ ≤ tol_w and flux jump ≥ tol_flux. Noncontact: w - φ ≥
/// tol_w. Γ: along every grid line of the plane where a contact node is
/// followed (possibly across the band) by a noncontact node, the zero of
/// the linear extrapolation of (w - φ)^{2/3} from the noncontact side,
/// kept inside that interval. Throws DegenerateError when no node is
/// classified or w ≡ 0 leaves the default thresholds undefined.
FreeBoundary extract(const SolutionField& s, const ExtractOptions& options = {});

/// Recomputes unit normals for n = 2 from least-squares lines over
/// `window` consecutive chain points (5 to 15), oriented like the existing
/// normals when present.
void compute_normals(FreeBoundary& fb, int window);

struct PointRegularity {
  Point x;
  DecayFit fit;  // κ̂ = fit.rate
  bool regular = false;
  bool skipped = false;
  std::string reason;
};

struct RegularityReport {
  double alpha = 0.0;
  std::vector<PointRegularity> points;
  std::optional<DecayFit> normals;  // γ̂ (n = 2)
  bool flat = false;
};

/// κ̂ at every Γ point over the ladder [8h, 1/4]; regular iff
/// κ̂ + 2 stderr < 1 + α. Requires α ∈ (1/2, 1).
RegularityReport classify_regular(const GridField& w, const FreeBoundary& fb, double alpha);

struct NormalRegularity {
  DecayFit fit;  // log M(s) against log s, M(s) = sup_{|x-y| ≤ s} |ν(x) - ν(y)|
  double max_variation = 0.0;
  bool flat = false;  // max variation ≤ 1e-2
};

/// γ̂ from the normals of the longest chain. Needs n = 2 and ≥ 20 points.
NormalRegularity normal_regularity(const FreeBoundary& fb, int window = 9);

/// Free boundary from an explicit point list (one chain, in order).
FreeBoundary free_boundary_from_points(const Grid& grid, const std::vector<Point>& points);

/// Columns x_1..x_{n+1}, kappa_hat, regular, nu_1..nu_n.
void write_csv(std::ostream& os, const FreeBoundary& fb, const RegularityReport* report = nullptr);

}  // namespace thinfb
