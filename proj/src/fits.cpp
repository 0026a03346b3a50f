#include <cmath>

#include <Eigen/Dense>

#include "thinfb/analysis.hpp"

namespace thinfb {

DecayFit fit_power_law(const std::vector<std::pair<double, double>>& samples) {
  DecayFit fit;
  fit.samples = samples;
  if (samples.size() < 2) {
    fit.reason = "fewer than two samples";
    return fit;
  }
  for (const auto& [r, v] : samples)
    if (!(r > 0.0) || !(v > 0.0) || !std::isfinite(v)) {
      fit.reason = "nonpositive value in the window";
      return fit;
    }
  const Eigen::Index m = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd X(m, 2);
  Eigen::VectorXd y(m);
  fit.r_min = samples.front().first;
  fit.r_max = samples.front().first;
  for (Eigen::Index i = 0; i < m; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::log(samples[i].first);
    y[i] = std::log(samples[i].second);
    fit.r_min = std::min(fit.r_min, samples[i].first);
    fit.r_max = std::max(fit.r_max, samples[i].first);
  }
  const Eigen::Vector2d beta = X.colPivHouseholderQr().solve(y);
  fit.intercept = beta[0];
  fit.rate = beta[1];
  const Eigen::VectorXd res = y - X * beta;
  fit.residual = std::sqrt(res.squaredNorm() / m);
  if (m > 2) {
    const double sigma2 = res.squaredNorm() / (m - 2);
    const double mean = X.col(1).mean();
    const double sxx = (X.col(1).array() - mean).square().sum();
    fit.rate_stderr = sxx > 0.0 ? std::sqrt(sigma2 / sxx) : 0.0;
  }
  fit.applicable = true;
  return fit;
}

std::vector<double> radius_ladder(double h) {
  const int j_max = static_cast<int>(std::floor(2.0 * std::log2(1.0 / (8.0 * h)) + 1e-9));
  std::vector<double> radii;
  for (int j = j_max; j >= 2; --j) radii.push_back(std::exp2(-0.5 * j));
  return radii;
}

std::vector<double> radius_ladder(double h, double r_lo, double r_hi) {
  std::vector<double> out;
  for (double r : radius_ladder(h))
    if (r >= r_lo * (1.0 - 1e-12) && r <= r_hi * (1.0 + 1e-12)) out.push_back(r);
  return out;
}

DecayFit fit_weiss_decay(const WeissProfile& profile) {
  if (profile.samples.size() < 6) {
    DecayFit fit;
    fit.samples = profile.samples;
    fit.reason = "fewer than six radii";
    return fit;
  }
  for (const auto& s : profile.samples)
    if (!(s.second > 0.0)) {
      DecayFit fit;
      fit.samples = profile.samples;
      fit.reason = "W is not positive on the window";
      return fit;
    }
  return fit_power_law(profile.samples);
}

}  // namespace thinfb
