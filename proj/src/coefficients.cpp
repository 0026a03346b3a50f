#include "thinfb/coefficients.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "thinfb/snapshot.hpp"

namespace thinfb {

namespace {

void interpolate_rows(const Grid& g, const NodalArray& arr, const Point& x, double* out) {
  const auto c = detail::locate(g, x);
  const int d = g.dim();
  const Eigen::Index cols = arr.cols();
  for (Eigen::Index k = 0; k < cols; ++k) out[k] = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    Index idx = c.base;
    for (int k = 0; k < d; ++k) {
      const bool up = (corner >> k) & 1;
      w *= up ? c.t[k] : 1.0 - c.t[k];
      if (up) idx += g.stride(k);
    }
    if (w == 0.0) continue;
    for (Eigen::Index k = 0; k < cols; ++k) out[k] += w * arr(idx, k);
  }
}

Matrix unpack(const double* packed, int d) {
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) m(i, j) = m(j, i) = packed[packed_index(d, i, j)];
  return m;
}

void pack(const Matrix& m, double* out) {
  const int d = static_cast<int>(m.rows());
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out[packed_index(d, i, j)] = m(i, j);
}

Eigen::VectorXd eigenvalues_of(const Matrix& m) {
  if (m.rows() == 2) {
    const double tr = 0.5 * (m(0, 0) + m(1, 1));
    const double dif = 0.5 * (m(0, 0) - m(1, 1));
    const double r = std::hypot(dif, m(0, 1));
    return Eigen::Vector2d(tr - r, tr + r);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  es.computeDirect(Eigen::Matrix3d(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Index origin_node(const Grid& g) {
  return g.index({g.mid(), g.mid(), g.mid()});
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Deterministic pair stream; pair j depends on j only.
struct PairStream {
  const Grid& grid;

  /// Returns false when the pair degenerates to a single node.
  bool pair(std::int64_t j, Index& x, Index& y, double& dist) const {
    const int d = grid.dim();
    const int N = grid.nodes_per_axis();
    const std::uint64_t base = static_cast<std::uint64_t>(j) * 8;
    const std::uint64_t r0 = splitmix64(base);
    const std::uint64_t r1 = splitmix64(base + 1);
    x = static_cast<Index>(r0 % static_cast<std::uint64_t>(grid.node_count()));
    const auto ijk = grid.multi_index(x);
    std::array<int, 3> other = ijk;
    // log-uniform step count in [1, max span]
    const double max_steps = std::sqrt(static_cast<double>(d)) * (N - 1);
    const double steps = std::exp(unit_from_bits(splitmix64(base + 2)) * std::log(max_steps));
    if (r1 & 1) {
      const int axis = static_cast<int>((r1 >> 1) % static_cast<std::uint64_t>(d));
      const int sign = (r1 >> 8) & 1 ? 1 : -1;
      other[axis] = std::clamp(ijk[axis] + sign * std::max(1, static_cast<int>(std::lround(steps))), 0, N - 1);
    } else {
      double dir[3], norm = 0.0;
      for (int k = 0; k < d; ++k) {
        dir[k] = 2.0 * unit_from_bits(splitmix64(base + 3 + k)) - 1.0;
        norm += dir[k] * dir[k];
      }
      norm = std::sqrt(norm);
      if (norm < 1e-12) return false;
      for (int k = 0; k < d; ++k)
        other[k] = std::clamp(ijk[k] + static_cast<int>(std::lround(steps * dir[k] / norm)), 0, N - 1);
    }
    y = grid.index(other);
    if (y == x) return false;
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      const double dx = (other[k] - ijk[k]) * grid.h();
      s += dx * dx;
    }
    dist = std::sqrt(s);
    return true;
  }
};

/// Both seminorms over the same pairs: [rows of p] (Frobenius-weighted when
/// `packed_matrix`) and [rows of q].
std::pair<double, double> seminorm_pair(const Grid& grid, const NodalArray& p, bool packed_matrix,
                                        const NodalArray* q, double alpha, std::int64_t pairs) {
  const int d = grid.dim();
  PairStream stream{grid};
  double best_p = 0.0, best_q = 0.0;
  for (std::int64_t j = 0; j < pairs; ++j) {
    Index x, y;
    double dist;
    if (!stream.pair(j, x, y, dist)) continue;
    const double scale = std::pow(dist, alpha);
    double s = 0.0;
    for (Eigen::Index k = 0; k < p.cols(); ++k) {
      const double diff = p(x, k) - p(y, k);
      double weight = 1.0;
      if (packed_matrix) {
        // off-diagonal packed entries appear twice in the Frobenius norm
        int i = 0, rem = static_cast<int>(k);
        while (rem >= d - i) rem -= d - i++;
        weight = rem == 0 ? 1.0 : 2.0;
      }
      s += weight * diff * diff;
    }
    best_p = std::max(best_p, std::sqrt(s) / scale);
    if (q) {
      double t = 0.0;
      for (Eigen::Index k = 0; k < q->cols(); ++k) {
        const double diff = (*q)(x, k) - (*q)(y, k);
        t += diff * diff;
      }
      best_q = std::max(best_q, std::sqrt(t) / scale);
    }
  }
  return {best_p, best_q};
}

}  // namespace

CoefficientField::CoefficientField(RawCoefficients raw, double delta0, std::uint64_t seed)
    : grid_(raw.grid), a_(std::move(raw.a)), g_(std::move(raw.g)), alpha_(raw.alpha), delta0_(delta0), seed_(seed) {
  const int d = grid_.dim();
  if (a_.rows() != grid_.node_count() || a_.cols() != packed_size(d))
    throw Error(ErrorKind::precondition, "coefficients: a has the wrong shape");
  if (g_.rows() != grid_.node_count() || g_.cols() != d)
    throw Error(ErrorKind::precondition, "coefficients: g has the wrong shape");
  if (!a_.allFinite() || !g_.allFinite()) throw Error(ErrorKind::precondition, "coefficients: non-finite entries");
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw Error(ErrorKind::precondition, "coefficients: alpha must lie in (0,1)");

  g_zero_ = (g_ == 0.0).all();
  identity_ = g_zero_;
  if (identity_) {
    for (int i = 0; i < d && identity_; ++i)
      for (int j = i; j < d && identity_; ++j)
        identity_ = (a_.col(packed_index(d, i, j)) == (i == j ? 1.0 : 0.0)).all();
  }
  if (identity_) return;

  lambda_ = std::numeric_limits<double>::infinity();
  Lambda_ = 0.0;
  for (Index node = 0; node < grid_.node_count(); ++node) {
    const auto ev = eigenvalues_of(unpack(a_.row(node).data(), d));
    lambda_ = std::min(lambda_, ev.minCoeff());
    Lambda_ = std::max(Lambda_, ev.maxCoeff());
  }
  if (!(lambda_ > 0.0)) {
    std::ostringstream os;
    os << "coefficients: a is not positive definite (smallest eigenvalue " << lambda_ << ")";
    throw Error(ErrorKind::ellipticity, os.str());
  }
}

CoefficientField CoefficientField::identity(const Grid& grid) {
  return constant(grid, Matrix::Identity(grid.dim(), grid.dim()), Eigen::VectorXd::Zero(grid.dim()));
}

CoefficientField CoefficientField::constant(const Grid& grid, const Matrix& a, const Eigen::VectorXd& g) {
  const int d = grid.dim();
  if (a.rows() != d || a.cols() != d || g.size() != d)
    throw Error(ErrorKind::precondition, "coefficients: constant data has the wrong dimension");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw Error(ErrorKind::precondition, "coefficients: a must be symmetric");
  RawCoefficients raw{grid, NodalArray(grid.node_count(), packed_size(d)), NodalArray(grid.node_count(), d), 0.5};
  double packed[6];
  pack(a, packed);
  for (int k = 0; k < packed_size(d); ++k) raw.a.col(k).setConstant(packed[k]);
  for (int k = 0; k < d; ++k) raw.g.col(k).setConstant(g[k]);
  return CoefficientField(std::move(raw));
}

CoefficientField CoefficientField::from_functions(const Grid& grid, const std::function<Matrix(const Point&)>& a,
                                                  const std::function<Eigen::VectorXd(const Point&)>& g,
                                                  double alpha) {
  const int d = grid.dim();
  RawCoefficients raw{grid, NodalArray(grid.node_count(), packed_size(d)), NodalArray(grid.node_count(), d), alpha};
  for (Index node = 0; node < grid.node_count(); ++node) {
    const Point x = grid.position(node);
    const Matrix m = a(x);
    if (m.rows() != d || m.cols() != d) throw Error(ErrorKind::precondition, "coefficients: a(x) has the wrong size");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-14 * (1.0 + m.cwiseAbs().maxCoeff()))
      throw Error(ErrorKind::precondition, "coefficients: a must be symmetric");
    pack(m, raw.a.row(node).data());
    const Eigen::VectorXd gv = g(x);
    if (gv.size() != d) throw Error(ErrorKind::precondition, "coefficients: g(x) has the wrong size");
    raw.g.row(node) = gv.transpose().array();
  }
  return CoefficientField(std::move(raw));
}

Matrix CoefficientField::a_at(Index node) const { return unpack(a_.row(node).data(), grid_.dim()); }

Eigen::VectorXd CoefficientField::g_at(Index node) const { return g_.row(node).transpose().matrix(); }

void CoefficientField::interpolate(const Point& x, double* a_packed, double* g_out) const {
  if (!grid_.contains(x)) detail::throw_outside(x);
  interpolate_rows(grid_, a_, x, a_packed);
  interpolate_rows(grid_, g_, x, g_out);
}

ConditionNReport check_condition_N(const CoefficientField& c) {
  const Grid& grid = c.grid();
  const int d = grid.dim();
  ConditionNReport rep;
  const Index o = origin_node(grid);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j)
      rep.a_origin = std::max(rep.a_origin, std::abs(c.a()(o, packed_index(d, i, j)) - (i == j ? 1.0 : 0.0)));
    rep.g_origin = std::max(rep.g_origin, std::abs(c.g()(o, i)));
  }
  for (Index p = 0; p < grid.plane_count(); ++p) {
    const Index node = grid.plane_node(p);
    for (int i = 0; i < d - 1; ++i)
      rep.plane_off_diagonal = std::max(rep.plane_off_diagonal, std::abs(c.a()(node, packed_index(d, i, d - 1))));
  }
  auto add = [&](const char* clause, double m) {
    if (m > kConditionNTolerance) rep.violations.push_back({clause, m});
  };
  add("a(0)=I", rep.a_origin);
  add("g(0)=0", rep.g_origin);
  add("off-diagonal on plane", rep.plane_off_diagonal);
  rep.pass = rep.violations.empty();
  return rep;
}

CoefficientField normalize_at_origin(const RawCoefficients& raw) {
  const Grid& grid = raw.grid;
  const int d = grid.dim();
  const Index o = origin_node(grid);
  const Matrix a0 = unpack(raw.a.row(o).data(), d);
  if ((a0 - a0.transpose()).cwiseAbs().maxCoeff() > 0.0 || eigenvalues_of(a0).minCoeff() <= 0.0)
    throw Error(ErrorKind::ellipticity, "normalize_at_origin: a(0) is not symmetric positive definite");

  Matrix root(d, d), inv_root(d, d);
  const bool diagonal = (a0 - Matrix(a0.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  if (diagonal) {
    root = a0.diagonal().cwiseSqrt().asDiagonal();
    inv_root = a0.diagonal().cwiseSqrt().cwiseInverse().asDiagonal();
  } else {
    const Eigen::MatrixXd a0_full = a0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a0_full);
    root = es.operatorSqrt();
    inv_root = es.operatorInverseSqrt();
  }
  const bool identity_map = (root - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() == 0.0;

  RawCoefficients out{grid, NodalArray(grid.node_count(), packed_size(d)), NodalArray(grid.node_count(), d), raw.alpha};
  if (identity_map) {
    out.a = raw.a;
    out.g = raw.g;
  } else {
    double ap[6], gp[3];
    for (Index node = 0; node < grid.node_count(); ++node) {
      Point x = root * grid.position(node);
      for (int k = 0; k < d; ++k) x[k] = std::clamp(x[k], -1.0, 1.0);
      interpolate_rows(grid, raw.a, x, ap);
      interpolate_rows(grid, raw.g, x, gp);
      const Matrix at = inv_root * unpack(ap, d) * inv_root;
      pack(at, out.a.row(node).data());
      const Eigen::VectorXd gt = inv_root * Eigen::Map<const Eigen::VectorXd>(gp, d);
      out.g.row(node) = gt.transpose().array();
    }
    // the transformed matrix at the origin is the identity up to round-off
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) out.a(o, packed_index(d, i, j)) = i == j ? 1.0 : 0.0;
  }
  const Eigen::RowVectorXd g0 = out.g.row(o).matrix();
  for (Index node = 0; node < grid.node_count(); ++node) out.g.row(node) -= g0.array();
  return CoefficientField(std::move(out));
}

CoefficientField normalize_at_origin(const CoefficientField& c) { return normalize_at_origin(c.raw()); }

HoelderEstimate estimate_seminorm(const GridField& f, double alpha, std::int64_t pairs) {
  NodalArray col = Eigen::Map<const NodalArray>(f.values().data(), f.values().size(), 1);
  const auto [s, unused] = seminorm_pair(f.grid(), col, false, nullptr, alpha, pairs);
  (void)unused;
  return {alpha, s, pairs};
}

HoelderEstimate estimate_coefficient_seminorm(const CoefficientField& c, std::int64_t pairs) {
  const auto [sa, sg] = seminorm_pair(c.grid(), c.a(), true, &c.g(), c.alpha(), pairs);
  return {c.alpha(), sa + sg, pairs};
}

namespace {

/// Gaussian random Fourier series, evaluated separably on the grid.
Eigen::ArrayXd fourier_component(const Grid& grid, int K, double exponent, std::mt19937_64& rng) {
  using cd = std::complex<double>;
  const int d = grid.dim();
  const int N = grid.nodes_per_axis();
  const int M = 2 * K + 1;
  auto uniform = [&rng] { return unit_from_bits(rng()); };
  auto gaussian = [&] {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };

  // E(m, i) = exp(i * pi/2 * (m - K) * x_i)
  Eigen::MatrixXcd E(M, N);
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < N; ++i) E(m, i) = std::polar(1.0, 0.5 * std::numbers::pi * (m - K) * grid.coord(i));

  // coefficients on the half space: first nonzero frequency component positive
  auto in_half_space = [&](const int* k) {
    for (int a = 0; a < d; ++a) {
      if (k[a] > 0) return true;
      if (k[a] < 0) return false;
    }
    return false;
  };
  auto coefficient = [&](const int* k) -> cd {
    if (!in_half_space(k)) return 0.0;
    double norm2 = 0.0;
    for (int a = 0; a < d; ++a) norm2 += double(k[a]) * k[a];
    const double amp = gaussian() * std::pow(norm2, -0.5 * exponent);
    return std::polar(amp, 2.0 * std::numbers::pi * uniform());
  };

  Eigen::ArrayXd out(grid.node_count());
  if (d == 2) {
    Eigen::MatrixXcd C(M, M);
    int k[2];
    for (k[0] = -K; k[0] <= K; ++k[0])
      for (k[1] = -K; k[1] <= K; ++k[1]) C(k[0] + K, k[1] + K) = coefficient(k);
    const Eigen::MatrixXcd F = E.transpose() * C * E;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) out[Index(i) * N + j] = F(i, j).real();
    return out;
  }
  std::vector<Eigen::MatrixXcd> slabs(M, Eigen::MatrixXcd(M, M));
  int k[3];
  for (k[0] = -K; k[0] <= K; ++k[0])
    for (k[1] = -K; k[1] <= K; ++k[1])
      for (k[2] = -K; k[2] <= K; ++k[2]) slabs[k[0] + K](k[1] + K, k[2] + K) = coefficient(k);
  // T(m1, i2*N + i3) = sum_{m2,m3} E(m2,i2) C(m1,m2,m3) E(m3,i3)
  Eigen::MatrixXcd T(M, Index(N) * N);
  for (int m1 = 0; m1 < M; ++m1) {
    const Eigen::MatrixXcd S = E.transpose() * slabs[m1] * E;
    for (int i2 = 0; i2 < N; ++i2)
      for (int i3 = 0; i3 < N; ++i3) T(m1, Index(i2) * N + i3) = S(i2, i3);
  }
  const Eigen::MatrixXcd F = E.transpose() * T;
  for (int i1 = 0; i1 < N; ++i1)
    for (Index r = 0; r < Index(N) * N; ++r) out[Index(i1) * N * N + r] = F(i1, r).real();
  return out;
}

}  // namespace

CoefficientField generate_field(double alpha, double delta0, std::uint64_t seed, const Grid& grid) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::precondition, "generate_field: alpha must lie in (0,1)");
  if (!(delta0 >= 0.0)) throw Error(ErrorKind::precondition, "generate_field: delta0 must be nonnegative");
  if (delta0 >= 0.25) throw Error(ErrorKind::precondition, "generate_field: delta0 must be below 1/4");
  const int d = grid.dim();
  const Index nodes = grid.node_count();
  RawCoefficients raw{grid, NodalArray::Zero(nodes, packed_size(d)), NodalArray::Zero(nodes, d), alpha};
  if (delta0 == 0.0) {
    for (int i = 0; i < d; ++i) raw.a.col(packed_index(d, i, i)).setConstant(1.0);
    return CoefficientField(std::move(raw), 0.0, seed);
  }

  const int K = std::min(32, (grid.nodes_per_axis() - 1) / 4);
  const double exponent = alpha + 0.5 * d + 0.01;
  std::mt19937_64 rng(seed);
  const Index o = origin_node(grid);
  NodalArray pert(nodes, packed_size(d));
  for (int c = 0; c < packed_size(d) + d; ++c) {
    Eigen::ArrayXd f = fourier_component(grid, K, exponent, rng);
    f -= f[o];
    if (c < packed_size(d))
      pert.col(c) = f;
    else
      raw.g.col(c - packed_size(d)) = f;
  }
  // (i, n+1) entries vanish on the plane like |x_{n+1}|^alpha
  const int N = grid.nodes_per_axis();
  Eigen::ArrayXd envelope(N);
  for (int i = 0; i < N; ++i) envelope[i] = std::pow(std::abs(grid.coord(i)), alpha);
  for (int i = 0; i < d - 1; ++i) {
    const int col = packed_index(d, i, d - 1);
    for (Index node = 0; node < nodes; ++node) pert(node, col) *= envelope[node % N];
  }

  const auto [sa, sg] = seminorm_pair(grid, pert, true, &raw.g, alpha, kDefaultSeminormPairs);
  if (!(sa + sg > 0.0)) throw Error(ErrorKind::degenerate, "generate_field: synthesized perturbation vanishes");
  const double scale = delta0 / (sa + sg);
  raw.a = scale * pert;
  raw.g *= scale;
  for (int i = 0; i < d; ++i) raw.a.col(packed_index(d, i, i)) += 1.0;
  return CoefficientField(std::move(raw), delta0, seed);
}

void write_coefficients(const std::filesystem::path& path, const CoefficientField& c) {
  auto with = [&](const char* ext) {
    auto p = path;
    p += ext;
    return p;
  };
  write_f64(with(".a.f64"), c.a().data(), static_cast<std::size_t>(c.a().size()));
  write_f64(with(".g.f64"), c.g().data(), static_cast<std::size_t>(c.g().size()));
  nlohmann::json meta = {{"n", c.grid().n()},       {"h", c.grid().h()},           {"alpha", c.alpha()},
                         {"delta0", c.delta0()},    {"seed", c.seed()},            {"lambda", c.lambda()},
                         {"Lambda", c.Lambda()}};
  std::ofstream out(with(".json"));
  if (!out) throw Error(ErrorKind::io, "cannot write " + with(".json").string());
  out << meta.dump(2) << "\n";
}

CoefficientField read_coefficients(const std::filesystem::path& path) {
  auto with = [&](const char* ext) {
    auto p = path;
    p += ext;
    return p;
  };
  std::ifstream in(with(".json"));
  if (!in) throw Error(ErrorKind::io, "missing coefficient manifest " + with(".json").string());
  try {
    nlohmann::json meta;
    in >> meta;
    const Grid grid(meta.at("n").get<int>(), meta.at("h").get<double>());
    const int d = grid.dim();
    const Eigen::ArrayXd a = read_f64(with(".a.f64"));
    const Eigen::ArrayXd g = read_f64(with(".g.f64"));
    if (a.size() != grid.node_count() * packed_size(d) || g.size() != grid.node_count() * d)
      throw Error(ErrorKind::io, "coefficient bundle size does not match its grid");
    RawCoefficients raw{grid, Eigen::Map<const NodalArray>(a.data(), grid.node_count(), packed_size(d)),
                        Eigen::Map<const NodalArray>(g.data(), grid.node_count(), d), meta.at("alpha").get<double>()};
    return CoefficientField(std::move(raw), meta.value("delta0", 0.0), meta.value("seed", std::uint64_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::io, with(".json").string() + ": " + e.what());
  }
}

}  // namespace thinfb
