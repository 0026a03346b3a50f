#include <array>
#include <sstream>

#include "thinfb/solver.hpp"

namespace thinfb {

namespace {

/// Unit-cube Q1 integrals ∫ ∂_iφ_a ∂_jφ_b for corners a, b (bit k = axis k).
struct ReferenceElement {
  int d;
  int corners;
  // k[(i*d + j) * corners*corners + a*corners + b]
  std::vector<double> k;
  // ∫ ∂_kφ_a on the unit cube: ±1/2^{d-1}
  std::vector<double> grad_integral;  // a*d + k

  explicit ReferenceElement(int dim) : d(dim), corners(1 << dim) {
    k.assign(static_cast<std::size_t>(d * d * corners * corners), 0.0);
    grad_integral.assign(static_cast<std::size_t>(corners * d), 0.0);
    auto sgn = [](int bit) { return bit ? 1.0 : -1.0; };
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int a = 0; a < corners; ++a)
          for (int b = 0; b < corners; ++b) {
            double v = 1.0;
            for (int l = 0; l < d; ++l) {
              const int al = (a >> l) & 1, bl = (b >> l) & 1;
              if (l == i && l == j)
                v *= sgn(al) * sgn(bl);
              else if (l == i)
                v *= 0.5 * sgn(al);
              else if (l == j)
                v *= 0.5 * sgn(bl);
              else
                v *= al == bl ? 1.0 / 3.0 : 1.0 / 6.0;
            }
            k[((i * d + j) * corners + a) * corners + b] = v;
          }
    for (int a = 0; a < corners; ++a)
      for (int l = 0; l < d; ++l) grad_integral[a * d + l] = sgn((a >> l) & 1) / static_cast<double>(1 << (d - 1));
  }

  double entry(int i, int j, int a, int b) const { return k[((i * d + j) * corners + a) * corners + b]; }
};

/// Stencil slot of the corner difference b - a.
int stencil_slot(int d, int a, int b) {
  int s = 0;
  for (int l = 0; l < d; ++l) {
    const int delta = ((b >> l) & 1) - ((a >> l) & 1);
    s = 3 * s + (delta + 1);
  }
  return s;
}

}  // namespace

NodeMask cube_boundary_mask(const Grid& grid) {
  NodeMask m(static_cast<std::size_t>(grid.node_count()), 0);
  for (Index i = 0; i < grid.node_count(); ++i) m[i] = grid.on_boundary(i) ? 1 : 0;
  return m;
}

Eigen::ArrayXd zero_obstacle(const Grid& grid) { return Eigen::ArrayXd::Zero(grid.plane_count()); }

DiscreteProblem::DiscreteProblem(std::shared_ptr<const CoefficientField> coefficients, const GridField& dirichlet,
                                 Eigen::ArrayXd obstacle, AssemblyOptions options)
    : coefficients_(std::move(coefficients)),
      grid_(coefficients_->grid()),
      dirichlet_(dirichlet),
      obstacle_(std::move(obstacle)),
      constrained_(options.constrained),
      options_(options) {
  const int d = grid_.dim();
  if (!(dirichlet_.grid() == grid_)) throw Error(ErrorKind::precondition, "assemble: data and coefficients live on different grids");
  if (obstacle_.size() != grid_.plane_count()) throw Error(ErrorKind::precondition, "assemble: obstacle needs one value per plane node");
  if (!options_.waive_condition_N) {
    const auto rep = check_condition_N(*coefficients_);
    if (!rep.pass) {
      std::ostringstream os;
      os << "assemble: coefficients violate condition (N):";
      for (const auto& v : rep.violations) os << " [" << v.clause << ": " << v.magnitude << "]";
      os << "; see check_condition_N, or waive the check explicitly";
      throw Error(ErrorKind::precondition, os.str());
    }
  }
  fixed_ = options_.fixed.empty() ? cube_boundary_mask(grid_) : options_.fixed;
  options_.fixed.clear();
  if (fixed_.size() != static_cast<std::size_t>(grid_.node_count()))
    throw Error(ErrorKind::precondition, "assemble: fixed-node mask has the wrong size");
  for (Index i = 0; i < grid_.node_count(); ++i)
    if (grid_.on_boundary(i) && !fixed_[i]) throw Error(ErrorKind::precondition, "assemble: the cube faces must be fixed");

  stencil_size_ = 1;
  for (int l = 0; l < d; ++l) stencil_size_ *= 3;
  offsets_.resize(stencil_size_);
  for (int s = 0; s < stencil_size_; ++s) {
    int rem = s;
    Index off = 0;
    for (int l = d - 1; l >= 0; --l) {
      off += (rem % 3 - 1) * grid_.stride(l);
      rem /= 3;
    }
    offsets_[s] = off;
  }

  const ReferenceElement ref(d);
  const int corners = ref.corners;
  const double h = grid_.h();
  const double scale = std::pow(h, d - 2);
  const int N = grid_.nodes_per_axis();
  std::vector<Index> corner_offset(corners);
  for (int c = 0; c < corners; ++c) {
    Index off = 0;
    for (int l = 0; l < d; ++l)
      if ((c >> l) & 1) off += grid_.stride(l);
    corner_offset[c] = off;
  }

  load_ = Eigen::ArrayXd::Zero(grid_.node_count());
  uniform_ = coefficients_->is_identity();
  if (uniform_) {
    stencil_ = Eigen::ArrayXd::Zero(stencil_size_);
    for (int a = 0; a < corners; ++a)
      for (int b = 0; b < corners; ++b) {
        double v = 0.0;
        for (int i = 0; i < d; ++i) v += ref.entry(i, i, a, b);
        stencil_[stencil_slot(d, a, b)] += scale * v;
      }
    return;
  }

  stencil_ = Eigen::ArrayXd::Zero(grid_.node_count() * stencil_size_);
  const auto& A = coefficients_->a();
  const auto& G = coefficients_->g();
  const bool with_load = !coefficients_->g_is_zero();
  const int packed = packed_size(d);
  const double load_scale = std::pow(h, d - 1);
  std::vector<double> Ke(static_cast<std::size_t>(corners * corners));
  double ae[6], ge[3];
  const Index elements_per_axis = N - 1;
  Index element_count = 1;
  for (int l = 0; l < d; ++l) element_count *= elements_per_axis;
  for (Index e = 0; e < element_count; ++e) {
    // base node of element e
    Index rem = e, base = 0;
    for (int l = d - 1; l >= 0; --l) {
      base += (rem % elements_per_axis) * grid_.stride(l);
      rem /= elements_per_axis;
    }
    bool any_free = false;
    for (int c = 0; c < corners; ++c) any_free |= !fixed_[base + corner_offset[c]];
    if (!any_free) continue;
    for (int k = 0; k < packed; ++k) ae[k] = 0.0;
    for (int k = 0; k < d; ++k) ge[k] = 0.0;
    for (int c = 0; c < corners; ++c) {
      const Index node = base + corner_offset[c];
      for (int k = 0; k < packed; ++k) ae[k] += A(node, k);
      if (with_load)
        for (int k = 0; k < d; ++k) ge[k] += G(node, k);
    }
    for (int k = 0; k < packed; ++k) ae[k] /= corners;
    for (int k = 0; k < d; ++k) ge[k] /= corners;
    for (int a = 0; a < corners; ++a)
      for (int b = 0; b < corners; ++b) {
        double v = 0.0;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) v += ae[packed_index(d, i, j)] * ref.entry(i, j, a, b);
        Ke[a * corners + b] = scale * v;
      }
    for (int a = 0; a < corners; ++a) {
      const Index node = base + corner_offset[a];
      if (fixed_[node]) continue;
      double* row = stencil_.data() + node * stencil_size_;
      for (int b = 0; b < corners; ++b) row[stencil_slot(d, a, b)] += Ke[a * corners + b];
      if (with_load) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += ge[k] * ref.grad_integral[a * d + k];
        load_[node] -= load_scale * s;
      }
    }
  }
}

Eigen::ArrayXd DiscreteProblem::trivial_iterate() const {
  Eigen::ArrayXd u = Eigen::ArrayXd::Zero(grid_.node_count());
  for (Index i = 0; i < grid_.node_count(); ++i)
    if (fixed_[i]) u[i] = dirichlet_[i];
  if (constrained_)
    for (Index p = 0; p < grid_.plane_count(); ++p) {
      const Index node = grid_.plane_node(p);
      if (!fixed_[node]) u[node] = std::max(u[node], obstacle_[p]);
    }
  return u;
}

double DiscreteProblem::energy(const Eigen::ArrayXd& u) const {
  double e = 0.0;
  for (Index i = 0; i < grid_.node_count(); ++i) {
    if (fixed_[i]) continue;
    const double* s = stencil(i);
    double free_part = 0.0, fixed_part = 0.0;
    for (int k = 0; k < stencil_size_; ++k) {
      const Index j = i + offsets_[k];
      (fixed_[j] ? fixed_part : free_part) += s[k] * u[j];
    }
    e += u[i] * (0.5 * free_part + fixed_part - load_[i]);
  }
  return e;
}

DiscreteProblem DiscreteProblem::coarsened() const {
  if (!grid_.can_coarsen()) throw Error(ErrorKind::precondition, "coarsened: grid is too small");
  const Grid coarse = grid_.coarsened();
  const int d = grid_.dim();
  auto fine_of = [&](Index node) {
    auto ijk = coarse.multi_index(node);
    for (int k = 0; k < d; ++k) ijk[k] *= 2;
    return grid_.index(ijk);
  };
  std::shared_ptr<const CoefficientField> cc;
  if (coefficients_->is_identity()) {
    cc = std::make_shared<CoefficientField>(CoefficientField::identity(coarse));
  } else {
    RawCoefficients raw{coarse, NodalArray(coarse.node_count(), packed_size(d)), NodalArray(coarse.node_count(), d),
                        coefficients_->alpha()};
    for (Index i = 0; i < coarse.node_count(); ++i) {
      const Index f = fine_of(i);
      raw.a.row(i) = coefficients_->a().row(f);
      raw.g.row(i) = coefficients_->g().row(f);
    }
    cc = std::make_shared<CoefficientField>(std::move(raw), coefficients_->delta0(), coefficients_->seed());
  }
  Eigen::ArrayXd data(coarse.node_count());
  NodeMask fixed(static_cast<std::size_t>(coarse.node_count()));
  for (Index i = 0; i < coarse.node_count(); ++i) {
    const Index f = fine_of(i);
    data[i] = dirichlet_[f];
    fixed[i] = fixed_[f];
  }
  Eigen::ArrayXd obstacle(coarse.plane_count());
  for (Index p = 0; p < coarse.plane_count(); ++p) obstacle[p] = obstacle_[grid_.plane_index(fine_of(coarse.plane_node(p)))];
  AssemblyOptions opt = options_;
  opt.fixed = std::move(fixed);
  opt.waive_condition_N = true;
  return DiscreteProblem(cc, GridField(coarse, std::move(data)), std::move(obstacle), std::move(opt));
}

DiscreteProblem assemble(const CoefficientField& coefficients, const GridField& dirichlet, AssemblyOptions options) {
  return assemble(coefficients, dirichlet, zero_obstacle(coefficients.grid()), std::move(options));
}

DiscreteProblem assemble(const CoefficientField& coefficients, const GridField& dirichlet,
                         const Eigen::ArrayXd& obstacle, AssemblyOptions options) {
  return DiscreteProblem(std::make_shared<CoefficientField>(coefficients), dirichlet, obstacle, std::move(options));
}

}  // namespace thinfb
