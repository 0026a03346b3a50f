#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thinfb/grid.hpp"
#include "thinfb/norms.hpp"
#include "thinfb/profiles.hpp"

namespace thinfb {

// ---------------------------------------------------------------- fits

/// Least-squares fit log value = intercept + rate log r.
struct DecayFit {
  double rate = 0.0;
  double intercept = 0.0;
  double residual = 0.0;     // RMS of the log residuals
  double rate_stderr = 0.0;  // standard error of the slope
  double r_min = 0.0;
  double r_max = 0.0;
  bool applicable = false;
  std::string reason;
  std::vector<std::pair<double, double>> samples;  // (r, value)
};

/// Needs at least two samples with positive values; otherwise not applicable.
DecayFit fit_power_law(const std::vector<std::pair<double, double>>& samples);

// -------------------------------------------------------- radius ladder

/// r_j = 2^{-j/2} for j from floor(2 log2(1/(8h))) down to 2, increasing.
std::vector<double> radius_ladder(double h);
/// Ladder radii inside [r_lo, r_hi].
std::vector<double> radius_ladder(double h, double r_lo, double r_hi);

/// Rejects r < 8h and balls leaving the cube; the upper end is the cube.
void require_analysis_radius(const Grid& grid, const Point& x0, double r);

// ---------------------------------------------------------------- Weiss

struct WeissTerms {
  double dirichlet = 0.0;  // r^{-(n-1+2κ)} ∫_{B_r} |∇w|^2
  double boundary = 0.0;   // κ r^{-(n+2κ)} ∫_{∂B_r} w^2
  double value() const { return dirichlet - boundary; }
};

WeissTerms weiss_terms(const FieldWithGradient& w, const Point& x0, double r, double kappa = 1.5);
double weiss(const FieldWithGradient& w, const Point& x0, double r, double kappa = 1.5);
double weiss(const GridField& w, const Point& x0, double r, double kappa = 1.5);

struct WeissProfile {
  Point center;
  double kappa = 1.5;
  std::vector<std::pair<double, double>> samples;  // (r_j, W_κ(r_j)), r increasing
};

WeissProfile weiss_profile(const FieldWithGradient& w, const Point& x0, double kappa = 1.5,
                           std::vector<double> radii = {});

/// Slope of log W against log r; not applicable when W ≤ 0 somewhere or
/// fewer than six radii.
DecayFit fit_weiss_decay(const WeissProfile& profile);

/// N(r) = r ∫_{B_r}|∇w|^2 / ∫_{∂B_r} w^2.
double frequency(const FieldWithGradient& w, const Point& x0, double r);

// -------------------------------------------------------------- blow-up

enum class BlowupMode { homogeneous, normalized };

/// Unit-cube grid used for blow-ups at scale r: spacing h/r when x0 is a
/// node and h/r gives a valid grid (nodes then map onto nodes), otherwise h.
Grid blowup_grid(const Grid& grid, const Point& x0, double r);

/// homogeneous: w(x0 + r y)/r^{3/2}. normalized: (w - ℓ)(x0 + r y)/‖w - ℓ‖
/// with ℓ the linear projection at the finest radius 8h and the norm the
/// root-mean-square norm over B_r(x0).
GridField blowup(const GridField& w, const Point& x0, double r, BlowupMode mode);

/// |W(r,w) - W(1,w_r)|.
double weiss_rescaling_check(const GridField& w, const Point& x0, double r);

// ---------------------------------------------------------- projections

/// a0 = ∫ w (x-x0)_{n+1} / ∫ (x-x0)_{n+1}^2 over B_r(x0), same quadrature
/// for both.
LinearProfile project_linear(const GridField& w, const Point& x0, double r);

struct ConeProjection {
  ConeProfile profile;
  double inner = 0.0;       // ⟨w, p_ξ⟩ on ∂B_r(x0)
  double profile_sq = 0.0;  // ⟨p_ξ, p_ξ⟩
  double w_sq = 0.0;        // ⟨w, w⟩
  double distance_sq = 0.0; // ‖w - c p_ξ‖^2
  double cross = 0.0;       // ⟨w - c p_ξ, c p_ξ⟩
};

/// Projection onto ℰ in L²(∂B_r(x0)); ξ by scan (two signs for n = 1, 720
/// angles plus golden-section refinement to 1e-4 for n = 2).
ConeProjection project_cone(const GridField& w, const Point& x0, double r);

/// Cone profile p centred at x0: p(x - x0).
double evaluate_centered(const ConeProfile& p, const Point& x0, const Point& x);

// --------------------------------------------------- growth and ladders

/// κ̂: subtract ℓ from project_linear at the smallest window radius, then
/// the log-log slope of the root-mean-square L² norm over B_r(x0).
DecayFit fit_growth_exponent(const GridField& w, const Point& x0, double r_lo, double r_hi);

struct ConeLadder {
  DecayFit fit;    // d(r) ≈ C r^{ε0}
  DecayFit solid;  // ‖w - P̄r‖ over B_r ≈ C r^{3/2 + ε0/2}
  std::vector<double> radii;
  std::vector<double> d;
  std::vector<double> solid_values;
  double a0 = 0.0;  // removed linear part
};

/// d(r) = ‖w - P̄r(w,r,x0)‖_{∂B_r} / max{‖w‖_{∂B_r}, r^{3/2}} in the
/// root-mean-square norm, after removing the linear part.
ConeLadder cone_decay_ladder(const GridField& w, const Point& x0, std::vector<double> radii = {});

struct NondegeneracyCheck {
  double radius = 0.0;
  double distance = 0.0;  // ‖w̃ - P̄r(w̃)‖ over B_1
  double projection = 0.0;  // ‖P̄r(w̃)‖ over B_1
  bool holds = false;       // distance < projection / 10
};

/// Normalized blow-up at r compared with its cone projection.
NondegeneracyCheck blowup_nondegeneracy(const GridField& w, const Point& x0, double r);

// --------------------------------------------------------- epiperimetric

using SphereTrace = std::function<double(const Point&)>;

/// (1/(n+2)) (∫_{∂B_1} |∇_θ c|^2 - (6n+3)/4 ∫_{∂B_1} c^2); tangential
/// gradient by central differences along great circles.
double homogeneous_extension_energy(const SphereTrace& c, int n, int nodes_per_half_circle = 512);

struct EpiReport {
  std::string descriptor;
  double W_extension = 0.0;            // formula value for c̃
  double W_extension_sampled = 0.0;    // quadrature on the sampled c̃
  double W_minimized = 0.0;            // quadrature on u*
  std::optional<double> kappa_hat;     // 1 - W(u*)/W(c̃) when W(c̃) > 0
  int sweeps = 0;
};

/// Minimizes W(1,·) over fields with trace c on ∂B_1 and u ≥ 0 on B'_1: one
/// constrained solve on the cube, nodes with |x| ≥ 1 held at the
/// 3/2-homogeneous extension c̃.
EpiReport epiperimetric_check(const SphereTrace& c, const Grid& grid, const std::string& descriptor = "");

/// h_{3/2} trace plus 0.2 times a nonnegative cos² bump kept away from the
/// slit; member i of `count`.
SphereTrace perturbed_cone_trace(int n, int member, int count, std::string* descriptor = nullptr);

}  // namespace thinfb
