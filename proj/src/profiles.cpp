#include "thinfb/profiles.hpp"

#include <sstream>

namespace thinfb {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double cone_value(const ConeProfile& p, const Point& x) {
  const int n = static_cast<int>(x.size()) - 1;
  if (p.xi.size() != n) throw Error(ErrorKind::precondition, "cone profile: ξ has the wrong dimension");
  const double s = x.head(n).dot(p.xi);
  return p.c * kernels::h32(s, x[n]);
}

double eigen_value(const EigenProfile& p, const Point& x) {
  const int n = static_cast<int>(x.size()) - 1;
  const double s = x[n - 1];
  const double t = x[n];
  double v = p.even_type() ? kernels::re_power(s, t, 0.5 * p.k) : kernels::im_power(s, t, p.k / 2);
  if (p.tangential_degree == 1) v *= x[0];
  return v;
}

void validate(const Profile& p, int n) {
  std::visit(overloaded{
                 [](const LinearProfile&) {},
                 [n](const ConeProfile& c) {
                   if (c.xi.size() != n || std::abs(c.xi.norm() - 1.0) > 1e-12)
                     throw Error(ErrorKind::precondition, "cone profile: ξ must be a unit vector of R^n");
                   if (c.c < 0.0) throw Error(ErrorKind::precondition, "cone profile: c must be nonnegative");
                 },
                 [n](const EigenProfile& e) {
                   if (e.k < 1) throw Error(ErrorKind::precondition, "eigen profile: k must be positive");
                   if (e.tangential_degree < 0 || e.tangential_degree > 1 || (n == 1 && e.tangential_degree != 0))
                     throw Error(ErrorKind::precondition, "eigen profile: tangential degree must be 0 (or 1 when n = 2)");
                 },
                 [n](const LogProfile&) {
                   if (n != 1) throw Error(ErrorKind::precondition, "log profile is defined for n = 1 only");
                 },
                 [](const KinkProfile&) {},
             },
             p);
}

}  // namespace

ConeProfile ConeProfile::model(int n, double c) {
  ConeProfile p;
  p.c = c;
  p.xi = Point::Zero(n);
  p.xi[n - 1] = 1.0;
  return p;
}

double evaluate(const Profile& p, const Point& x) {
  const int n = static_cast<int>(x.size()) - 1;
  return std::visit(overloaded{
                        [&](const LinearProfile& l) { return l.a0 * x[n]; },
                        [&](const ConeProfile& c) { return cone_value(c, x); },
                        [&](const EigenProfile& e) { return eigen_value(e, x); },
                        [&](const LogProfile&) {
                          const double rho = x.norm();
                          if (rho == 0.0) throw Error(ErrorKind::domain, "log profile is singular at the origin");
                          return -std::log(rho) * kernels::h32(x[0], x[n]);
                        },
                        [&](const KinkProfile& k) {
                          const double t = x[n];
                          return k.plus * std::max(t, 0.0) + k.minus * std::max(-t, 0.0);
                        },
                    },
                    p);
}

Parity parity_of(const Profile& p) {
  return std::visit(overloaded{
                        [](const LinearProfile&) { return Parity::odd; },
                        [](const ConeProfile&) { return Parity::even; },
                        [](const EigenProfile& e) { return e.even_type() ? Parity::even : Parity::odd; },
                        [](const LogProfile&) { return Parity::even; },
                        [](const KinkProfile& k) {
                          if (k.plus == k.minus) return Parity::even;
                          if (k.plus == -k.minus) return Parity::odd;
                          return Parity::none;
                        },
                    },
                    p);
}

std::string type_name(const Profile& p) {
  static const char* names[] = {"linear", "cone", "eigen", "log", "kink"};
  return names[p.index()];
}

GridField sample(const Profile& p, const Grid& grid) {
  validate(p, grid.n());
  Eigen::ArrayXd v(grid.node_count());
  const bool log = std::holds_alternative<LogProfile>(p);
  for (Index i = 0; i < grid.node_count(); ++i) {
    const Point x = grid.position(i);
    v[i] = log && x.norm() == 0.0 ? 0.0 : evaluate(p, x);
  }
  return GridField(grid, std::move(v), parity_of(p));
}

double laplacian_log_example(const Point& x) {
  const int n = static_cast<int>(x.size()) - 1;
  if (n != 1) throw Error(ErrorKind::precondition, "log profile is defined for n = 1 only");
  const double rho = x.norm();
  if (rho == 0.0) throw Error(ErrorKind::domain, "laplacian of the log profile: singular at the origin");
  if (x[1] == 0.0 && x[0] <= 0.0) throw Error(ErrorKind::domain, "laplacian of the log profile: point on the slit");
  return -3.0 * std::pow(rho, -0.5) * std::cos(1.5 * std::atan2(std::abs(x[1]), x[0]));
}

nlohmann::json to_json(const Profile& p) {
  nlohmann::json params = std::visit(
      overloaded{
          [](const LinearProfile& l) { return nlohmann::json{{"a0", l.a0}}; },
          [](const ConeProfile& c) {
            return nlohmann::json{{"c", c.c}, {"xi", std::vector<double>(c.xi.data(), c.xi.data() + c.xi.size())}};
          },
          [](const EigenProfile& e) { return nlohmann::json{{"k", e.k}, {"tangential_degree", e.tangential_degree}}; },
          [](const LogProfile&) { return nlohmann::json::object(); },
          [](const KinkProfile& k) { return nlohmann::json{{"plus", k.plus}, {"minus", k.minus}}; },
      },
      p);
  return {{"type", type_name(p)}, {"parameters", params}};
}

Profile profile_from_name(const std::string& name, int n) {
  Profile p;
  if (name == "h32" || name == "cone")
    p = ConeProfile::model(n);
  else if (name == "linear")
    p = LinearProfile{1.0};
  else if (name == "log")
    p = LogProfile{};
  else if (name == "abs")
    p = KinkProfile{1.0, 1.0};
  else if (name == "neg-abs")
    p = KinkProfile{-1.0, -1.0};
  else if (name.size() > 1 && name[0] == 'q' && name.find_first_not_of("0123456789", 1) == std::string::npos)
    p = EigenProfile{std::stoi(name.substr(1)), 0};
  else
    throw Error(ErrorKind::usage, "unknown profile '" + name + "'");
  validate(p, n);
  return p;
}

Profile profile_from_json(const nlohmann::json& j, int n) {
  if (j.is_string()) return profile_from_name(j.get<std::string>(), n);
  try {
    const std::string type = j.at("type").get<std::string>();
    const nlohmann::json params = j.value("parameters", nlohmann::json::object());
    Profile p;
    if (type == "linear") {
      p = LinearProfile{params.value("a0", 1.0)};
    } else if (type == "cone") {
      ConeProfile c = ConeProfile::model(n, params.value("c", 1.0));
      if (params.contains("xi")) {
        const auto xi = params.at("xi").get<std::vector<double>>();
        if (static_cast<int>(xi.size()) != n) throw Error(ErrorKind::usage, "cone profile: ξ needs n components");
        for (int k = 0; k < n; ++k) c.xi[k] = xi[k];
        const double norm = c.xi.norm();
        if (!(norm > 0.0)) throw Error(ErrorKind::usage, "cone profile: ξ must be nonzero");
        c.xi /= norm;
      }
      p = c;
    } else if (type == "eigen") {
      p = EigenProfile{params.value("k", 3), params.value("tangential_degree", 0)};
    } else if (type == "log") {
      p = LogProfile{};
    } else if (type == "kink") {
      p = KinkProfile{params.value("plus", 1.0), params.value("minus", 1.0)};
    } else {
      return profile_from_name(type, n);
    }
    validate(p, n);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::usage, std::string("profile description: ") + e.what());
  }
}

}  // namespace thinfb
