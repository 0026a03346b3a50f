#include "thinfb/freeboundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <Eigen/Dense>

namespace thinfb {

Index FreeBoundary::ambiguous_count() const {
  Index k = 0;
  for (std::size_t p = 0; p < contact.size(); ++p) k += !contact[p] && !noncontact[p];
  return k;
}

namespace {

enum State : int { kContact, kNoncontact, kAmbiguous };

// Plane node index from tangential indices (i_1, ..., i_n).
Index plane_id(const Grid& g, int i, int j) { return g.n() == 1 ? i : static_cast<Index>(i) * g.nodes_per_axis() + j; }

struct PlaneGap {
  const Grid& g;
  const Eigen::ArrayXd& gap;  // per plane node

  double at(const Point& x) const {
    const int m = g.nodes_per_axis();
    auto cell = [&](double c, int& i, double& t) {
      const double s = std::clamp((c + 1.0) / g.h(), 0.0, m - 1.0);
      i = std::min(static_cast<int>(std::floor(s)), m - 2);
      t = s - i;
    };
    int i, j = 0;
    double t, u = 0.0;
    cell(x[0], i, t);
    if (g.n() == 1) return (1 - t) * gap[i] + t * gap[i + 1];
    cell(x[1], j, u);
    return (1 - t) * (1 - u) * gap[plane_id(g, i, j)] + t * (1 - u) * gap[plane_id(g, i + 1, j)] +
           (1 - t) * u * gap[plane_id(g, i, j + 1)] + t * u * gap[plane_id(g, i + 1, j + 1)];
  }
};

// Orders a connected point set along its principal axis.
std::vector<std::size_t> order_chain(const std::vector<Point>& pts, std::vector<std::size_t> idx) {
  if (idx.size() < 2) return idx;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (auto k : idx) mean += pts[k].head<2>();
  mean /= static_cast<double>(idx.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (auto k : idx) {
    const Eigen::Vector2d d = pts[k].head<2>() - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  const Eigen::Vector2d axis = es.eigenvectors().col(1);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return (pts[a].head<2>() - mean).dot(axis) < (pts[b].head<2>() - mean).dot(axis);
  });
  return idx;
}

}  // namespace

FreeBoundary extract(const SolutionField& s, const ExtractOptions& options) {
  const Grid& g = s.w.grid();
  const int n = g.n();
  const int m = g.nodes_per_axis();
  const Index P = g.plane_count();

  Eigen::ArrayXd gap(P);
  double wmax = 0.0;
  for (Index p = 0; p < P; ++p) {
    const Index node = g.plane_node(p);
    gap[p] = s.w[node] - s.obstacle[p];
    wmax = std::max(wmax, std::abs(s.w[node]));
  }
  if (wmax == 0.0) wmax = s.w.values().abs().maxCoeff();  // full contact
  if (!(wmax > 0.0) && (options.tol_w <= 0.0 || options.tol_flux <= 0.0))
    throw Error(ErrorKind::degenerate, "extract: w vanishes identically");
  FreeBoundary fb{g, NodeMask(P, 0), NodeMask(P, 0), {}, {}, options.tol_w, options.tol_flux};
  if (fb.tol_w <= 0.0) fb.tol_w = 10.0 * std::pow(g.h(), 1.5) * wmax;
  if (fb.tol_flux <= 0.0) fb.tol_flux = 10.0 * std::sqrt(g.h()) * wmax;

  std::vector<int> state(P, kAmbiguous);
  Index classified = 0;
  for (Index p = 0; p < P; ++p) {
    const bool face = g.on_boundary(g.plane_node(p));
    if (gap[p] >= fb.tol_w) {
      state[p] = kNoncontact;
      fb.noncontact[p] = 1;
    } else if (!face && s.complementarity[p] >= fb.tol_flux) {
      state[p] = kContact;
      fb.contact[p] = 1;
    }
    classified += state[p] != kAmbiguous;
  }
  if (classified == 0) throw Error(ErrorKind::degenerate, "extract: every plane node is in the ambiguous band");

  auto psi = [&](Index p) { return std::pow(std::max(gap[p], 0.0), 2.0 / 3.0); };
  std::vector<Point> raw;
  const int lines = n == 1 ? 1 : m;
  for (int axis = 0; axis < n; ++axis) {
    for (int line = 0; line < lines; ++line) {
      auto id = [&](int k) { return axis == 0 ? plane_id(g, k, line) : plane_id(g, line, k); };
      int last = -1;
      for (int k = 0; k < m; ++k) {
        const int st = state[id(k)];
        if (st == kAmbiguous) continue;
        if (last >= 0 && state[id(last)] != st) {
          const int kc = st == kContact ? k : last;
          const int ko = st == kContact ? last : k;
          const int dir = ko > kc ? 1 : -1;
          double pos = 0.5 * (kc + ko);
          const int next = ko + dir;
          if (next >= 0 && next < m && state[id(next)] == kNoncontact) {
            const double slope = psi(id(next)) - psi(id(ko));
            if (slope > 0.0) pos = ko - dir * psi(id(ko)) / slope;
          }
          pos = std::clamp(pos, static_cast<double>(std::min(kc, ko)), static_cast<double>(std::max(kc, ko)));
          Point x = Point::Zero(n + 1);
          x[axis] = -1.0 + pos * g.h();
          if (n == 2) x[1 - axis] = g.coord(line);
          raw.push_back(x);
        }
        last = k;
      }
    }
  }

  // merge crossings found from both directions
  std::vector<Point> pts;
  for (const Point& x : raw) {
    bool merged = false;
    for (Point& y : pts)
      if ((x - y).norm() < 0.5 * g.h()) {
        y = 0.5 * (x + y);
        merged = true;
        break;
      }
    if (!merged) pts.push_back(x);
  }

  if (n == 1) {
    for (const Point& x : pts) fb.points.push_back({x, Point(), 0});
    return fb;
  }

  // chains: connected components at linking distance 2h
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      if ((pts[a] - pts[b]).norm() <= 2.0 * g.h() + 1e-12) parent[find(a)] = find(b);
  std::vector<std::vector<std::size_t>> comps;
  std::vector<long> comp_of(pts.size(), -1);
  for (std::size_t a = 0; a < pts.size(); ++a) {
    const std::size_t r = find(a);
    if (comp_of[r] < 0) {
      comp_of[r] = static_cast<long>(comps.size());
      comps.emplace_back();
    }
    comps[comp_of[r]].push_back(a);
  }
  std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  for (std::size_t c = 0; c < comps.size(); ++c) {
    std::vector<std::size_t> chain;
    for (std::size_t k : order_chain(pts, comps[c])) {
      chain.push_back(fb.points.size());
      fb.points.push_back({pts[k], Point(), static_cast<int>(c)});
    }
    fb.chains.push_back(std::move(chain));
  }
  compute_normals(fb, options.normal_window);

  // orient every chain into Ω
  const PlaneGap pg{g, gap};
  for (const auto& chain : fb.chains) {
    double vote = 0.0;
    for (std::size_t k : chain) {
      const BoundaryPoint& b = fb.points[k];
      Point plus = b.x.head(2) + 2.0 * g.h() * b.normal, minus = b.x.head(2) - 2.0 * g.h() * b.normal;
      vote += pg.at(plus) - pg.at(minus);
    }
    if (vote < 0.0)
      for (std::size_t k : chain) fb.points[k].normal = -fb.points[k].normal;
  }
  return fb;
}

void compute_normals(FreeBoundary& fb, int window) {
  if (fb.grid.n() != 2) return;
  window = std::clamp(window, 5, 15);
  for (const auto& chain : fb.chains) {
    const int len = static_cast<int>(chain.size());
    if (len < 2) continue;
    double orient = 0.0;
    std::vector<Point> normals(len);
    for (int k = 0; k < len; ++k) {
      const int w = std::min(window, len);
      int lo = std::clamp(k - w / 2, 0, len - w);
      Eigen::Vector2d mean = Eigen::Vector2d::Zero();
      for (int j = lo; j < lo + w; ++j) mean += fb.points[chain[j]].x.head<2>();
      mean /= w;
      Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
      for (int j = lo; j < lo + w; ++j) {
        const Eigen::Vector2d d = fb.points[chain[j]].x.head<2>() - mean;
        cov += d * d.transpose();
      }
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
      Eigen::Vector2d t = es.eigenvectors().col(1);
      const Eigen::Vector2d span = fb.points[chain[lo + w - 1]].x.head<2>() - fb.points[chain[lo]].x.head<2>();
      if (t.dot(span) < 0.0) t = -t;
      Point nu(2);
      nu << -t[1], t[0];
      normals[k] = nu;
      const Point& old = fb.points[chain[k]].normal;
      if (old.size() == 2) orient += old.dot(nu);
    }
    const double sign = orient < 0.0 ? -1.0 : 1.0;
    for (int k = 0; k < len; ++k) fb.points[chain[k]].normal = sign * normals[k];
  }
}

RegularityReport classify_regular(const GridField& w, const FreeBoundary& fb, double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0))
    throw Error(ErrorKind::precondition, "classify_regular: the regularity theory needs alpha in (1/2, 1)");
  const Grid& g = w.grid();
  RegularityReport rep;
  rep.alpha = alpha;
  for (const BoundaryPoint& b : fb.points) {
    PointRegularity pr;
    pr.x = b.x;
    pr.fit = fit_growth_exponent(w, b.x, 8.0 * g.h(), 0.25);
    if (!pr.fit.applicable || pr.fit.samples.size() < 3) {
      pr.skipped = true;
      pr.reason = pr.fit.applicable ? "fewer than three resolvable radii" : pr.fit.reason;
    } else {
      pr.regular = pr.fit.rate + 2.0 * pr.fit.rate_stderr < 1.0 + alpha;
    }
    rep.points.push_back(std::move(pr));
  }
  if (g.n() == 2 && !fb.chains.empty() && fb.chains.front().size() >= 20) {
    const NormalRegularity nr = normal_regularity(fb);
    rep.normals = nr.fit;
    rep.flat = nr.flat;
  }
  return rep;
}

NormalRegularity normal_regularity(const FreeBoundary& fb_in, int window) {
  if (fb_in.grid.n() != 2) throw Error(ErrorKind::precondition, "normal_regularity: needs n = 2");
  NormalRegularity out;
  if (fb_in.chains.empty() || fb_in.chains.front().size() < 20) {
    out.fit.reason = "fewer than 20 free boundary points";
    return out;
  }
  FreeBoundary fb = fb_in;
  compute_normals(fb, window);
  const auto& chain = fb.chains.front();
  const std::size_t len = chain.size();
  std::vector<Eigen::Vector2d> x(len), nu(len);
  for (std::size_t k = 0; k < len; ++k) {
    x[k] = fb.points[chain[k]].x.head<2>();
    nu[k] = fb.points[chain[k]].normal;
  }
  double arc = 0.0;
  for (std::size_t k = 1; k < len; ++k) arc += (x[k] - x[k - 1]).norm();
  const double spacing = arc / (len - 1);
  const double s_lo = std::clamp(window, 5, 15) * spacing;
  const double s_hi = 0.5 * (x.back() - x.front()).norm();

  std::vector<std::pair<double, double>> pairs;  // (distance, normal difference)
  pairs.reserve(len * (len - 1) / 2);
  for (std::size_t a = 0; a < len; ++a)
    for (std::size_t b = a + 1; b < len; ++b) {
      const double dn = (nu[a] - nu[b]).norm();
      out.max_variation = std::max(out.max_variation, dn);
      pairs.emplace_back((x[a] - x[b]).norm(), dn);
    }
  std::sort(pairs.begin(), pairs.end());
  out.flat = out.max_variation <= 1e-2;

  std::vector<std::pair<double, double>> samples;
  std::size_t k = 0;
  double running = 0.0;
  for (double s = s_lo; s <= s_hi * (1.0 + 1e-12); s *= std::sqrt(2.0)) {
    while (k < pairs.size() && pairs[k].first <= s) running = std::max(running, pairs[k++].second);
    samples.emplace_back(s, running);
  }
  out.fit = fit_power_law(samples);
  if (out.flat && !out.fit.applicable) out.fit.reason = "flat: normal variation below 1e-2";
  return out;
}

FreeBoundary free_boundary_from_points(const Grid& grid, const std::vector<Point>& points) {
  const Index P = grid.plane_count();
  FreeBoundary fb{grid, NodeMask(P, 0), NodeMask(P, 0), {}, {}, 0.0, 0.0};
  std::vector<std::size_t> chain;
  for (const Point& x : points) {
    Point y = Point::Zero(grid.dim());
    y.head(std::min<Eigen::Index>(x.size(), grid.dim())) = x.head(std::min<Eigen::Index>(x.size(), grid.dim()));
    chain.push_back(fb.points.size());
    fb.points.push_back({y, Point(), 0});
  }
  fb.chains.push_back(std::move(chain));
  compute_normals(fb, 9);
  return fb;
}

void write_csv(std::ostream& os, const FreeBoundary& fb, const RegularityReport* report) {
  const int n = fb.grid.n();
  for (int k = 1; k <= n + 1; ++k) os << "x" << k << ",";
  os << "kappa_hat,regular";
  if (n == 2) os << ",nu1,nu2";
  os << "\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < fb.points.size(); ++i) {
    const BoundaryPoint& b = fb.points[i];
    for (int k = 0; k <= n; ++k) os << num(b.x[k]) << ",";
    if (report && i < report->points.size() && !report->points[i].skipped)
      os << num(report->points[i].fit.rate) << "," << (report->points[i].regular ? 1 : 0);
    else
      os << ",";
    if (n == 2) {
      if (b.normal.size() == 2)
        os << "," << num(b.normal[0]) << "," << num(b.normal[1]);
      else
        os << ",,";
    }
    os << "\n";
  }
}

}  // namespace thinfb
