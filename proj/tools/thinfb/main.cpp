#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>
#include <toml.hpp>

#include "thinfb/analysis.hpp"
#include "thinfb/coefficients.hpp"
#include "thinfb/freeboundary.hpp"
#include "thinfb/profiles.hpp"
#include "thinfb/snapshot.hpp"
#include "thinfb/solver.hpp"
#include "thinfb/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thinfb;

namespace {

constexpr const char* kVersion = "0.1.0";

// ------------------------------------------------------------ parsing

double parse_number(const std::string& s) {
  const auto caret = s.find('^');
  try {
    if (caret != std::string::npos) return std::pow(std::stod(s.substr(0, caret)), std::stod(s.substr(caret + 1)));
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::usage, "not a number: '" + s + "'");
  }
}

std::vector<double> parse_list(const std::string& s, char sep) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(parse_number(item));
  return out;
}

Point parse_point(const std::string& s, int dim) {
  const auto v = parse_list(s, ',');
  if (static_cast<int>(v.size()) > dim) throw Error(ErrorKind::usage, "point '" + s + "' has too many coordinates");
  Point x = Point::Zero(dim);
  for (std::size_t k = 0; k < v.size(); ++k) x[k] = v[k];
  return x;
}

std::pair<double, double> parse_window(const std::string& s) {
  const auto v = parse_list(s, ':');
  if (v.size() != 2 || !(v[0] > 0.0) || !(v[1] > v[0])) throw Error(ErrorKind::usage, "window must be lo:hi with 0 < lo < hi");
  return {v[0], v[1]};
}

// ------------------------------------------------------------ output

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json point_json(const Point& x) {
  json j = json::array();
  for (Eigen::Index k = 0; k < x.size(); ++k) j.push_back(x[k]);
  return j;
}

json fit_json(const DecayFit& f) {
  json samples = json::array();
  for (auto [r, v] : f.samples) samples.push_back({r, v});
  json j = {{"applicable", f.applicable}, {"rate", f.rate},   {"intercept", f.intercept}, {"residual", f.residual},
            {"rate_stderr", f.rate_stderr}, {"r_min", f.r_min}, {"r_max", f.r_max},        {"samples", samples}};
  if (!f.reason.empty()) j["reason"] = f.reason;
  return j;
}

json stats_json(const SolverStats& s) {
  return {{"iterations", s.iterations}, {"total_sweeps", s.total_sweeps}, {"levels", s.levels},
          {"omega", s.omega},           {"residual0", s.residual0},       {"residual", s.residual},
          {"energy", s.energy},         {"converged", s.converged},       {"seconds", s.seconds}};
}

json epi_json(const EpiReport& r) {
  json j = {{"descriptor", r.descriptor},
            {"W_extension", r.W_extension},
            {"W_extension_sampled", r.W_extension_sampled},
            {"W_minimized", r.W_minimized},
            {"sweeps", r.sweeps}};
  j["kappa_hat"] = r.kappa_hat ? json(*r.kappa_hat) : json(nullptr);
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::io, "cannot write " + path.string());
  os << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string ladder_csv(const std::vector<std::pair<double, double>>& rows) {
  std::string s = "r,value\n";
  for (auto [r, v] : rows) s += g17(r) + "," + g17(v) + "\n";
  return s;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ------------------------------------------------------------ configuration

/// Every subcommand flag has a key of the same name (dashes as
/// underscores) in the run configuration.
struct RunConfig {
  int n = 1;
  std::string h = "2^-8";
  std::string coeffs = "identity";  // identity | generated | <bundle path>
  double alpha = 0.75;
  double delta0 = 0.05;
  std::uint64_t seed = 7;
  std::string profile = "h32";
  std::string data;  // snapshot path; overrides profile
  std::string solver = "psor";
  double tol = 1e-9;
  int max_iters = 0;
  double omega = 0.0;
  double epsilon = 1e-3;
  std::string output = "thinfb-out";

  bool weiss = false;
  std::vector<std::string> growth_at;
  std::string window = "2^-6:2^-2";
  bool cone = false;
  std::string cone_at;  // default: the free boundary point nearest to the origin
  int epi_count = 0;
  std::string epi_h = "2^-8";
  bool fb = false;
  double fb_alpha = 0.75;

  json to_json() const {
    return {{"n", n},
            {"h", h},
            {"coeffs", coeffs},
            {"alpha", alpha},
            {"delta0", delta0},
            {"seed", seed},
            {"profile", profile},
            {"data", data},
            {"solver", solver},
            {"tol", tol},
            {"max_iters", max_iters},
            {"omega", omega},
            {"epsilon", epsilon},
            {"output", output},
            {"analysis",
             {{"weiss", weiss},
              {"growth_at", growth_at},
              {"window", window},
              {"cone", cone},
              {"cone_at", cone_at},
              {"epi_count", epi_count},
              {"epi_h", epi_h},
              {"fb", fb},
              {"fb_alpha", fb_alpha}}}};
  }
};

template <typename T>
void take(const toml::node_view<toml::node>& v, T& out) {
  if (!v) return;
  if constexpr (std::is_same_v<T, std::string>) {
    if (auto s = v.value<std::string>()) {
      out = *s;
    } else if (auto d = v.value<double>()) {
      out = g17(*d);
    } else {
      throw Error(ErrorKind::usage, "config: expected a string");
    }
  } else if constexpr (std::is_same_v<T, bool>) {
    auto b = v.value<bool>();
    if (!b) throw Error(ErrorKind::usage, "config: expected a boolean");
    out = *b;
  } else {
    auto x = v.value<double>();
    if (!x) throw Error(ErrorKind::usage, "config: expected a number");
    out = static_cast<T>(*x);
  }
}

RunConfig load_config(const fs::path& path) {
  toml::table t;
  try {
    t = toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    throw Error(ErrorKind::usage, std::string("config: ") + std::string(e.description()));
  }
  static const char* known[] = {"n",      "h",   "coeffs",    "alpha", "delta0",  "seed",   "profile", "data",
                                "solver", "tol", "max_iters", "omega", "epsilon", "output", "analysis"};
  for (auto&& [k, v] : t) {
    (void)v;
    if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return k.str() == s; }) == std::end(known))
      throw Error(ErrorKind::usage, "config: unknown key '" + std::string(k.str()) + "'");
  }
  RunConfig c;
  take(t["n"], c.n);
  take(t["h"], c.h);
  take(t["coeffs"], c.coeffs);
  take(t["alpha"], c.alpha);
  take(t["delta0"], c.delta0);
  take(t["seed"], c.seed);
  take(t["profile"], c.profile);
  take(t["data"], c.data);
  take(t["solver"], c.solver);
  take(t["tol"], c.tol);
  take(t["max_iters"], c.max_iters);
  take(t["omega"], c.omega);
  take(t["epsilon"], c.epsilon);
  take(t["output"], c.output);
  if (auto a = t["analysis"]) {
    take(a["weiss"], c.weiss);
    if (auto arr = a["growth_at"].as_array())
      for (auto&& e : *arr) {
        auto s = e.value<std::string>();
        if (!s) throw Error(ErrorKind::usage, "config: growth_at entries are strings like \"0,0\"");
        c.growth_at.push_back(*s);
      }
    take(a["window"], c.window);
    take(a["cone"], c.cone);
    take(a["cone_at"], c.cone_at);
    take(a["epi_count"], c.epi_count);
    take(a["epi_h"], c.epi_h);
    take(a["fb"], c.fb);
    take(a["fb_alpha"], c.fb_alpha);
  }
  return c;
}

void validate(const RunConfig& c) {
  if (c.n != 1 && c.n != 2) throw Error(ErrorKind::usage, "n must be 1 or 2");
  if (!(c.tol > 0.0) || !(c.epsilon > 0.0)) throw Error(ErrorKind::usage, "tolerances must be positive");
  if (c.solver != "psor" && c.solver != "penalty") throw Error(ErrorKind::usage, "solver must be psor or penalty");
}

// ------------------------------------------------------------ pipeline pieces

CoefficientField make_coefficients(const RunConfig& c, const Grid& g) {
  if (c.coeffs == "identity") return CoefficientField::identity(g);
  if (c.coeffs == "generated") return generate_field(c.alpha, c.delta0, c.seed, g);
  CoefficientField f = read_coefficients(c.coeffs);
  if (!(f.grid() == g)) throw Error(ErrorKind::precondition, "coefficient bundle grid does not match n and h");
  return f;
}

GridField make_data(const RunConfig& c, const Grid& g) {
  if (!c.data.empty()) {
    GridField f = read_snapshot(c.data);
    if (!(f.grid() == g)) throw Error(ErrorKind::precondition, "data snapshot grid does not match n and h");
    return f;
  }
  return sample(profile_from_name(c.profile, c.n), g);
}

SolutionField solve(const RunConfig& c) {
  const Grid g(c.n, parse_number(c.h));
  auto coeffs = std::make_shared<const CoefficientField>(make_coefficients(c, g));
  const DiscreteProblem p(coeffs, make_data(c, g), zero_obstacle(g));
  if (c.solver == "penalty") {
    PenaltyConfig cfg;
    cfg.epsilon = c.epsilon;
    return solve_penalized(p, cfg);
  }
  PsorOptions opt;
  opt.tol = c.tol;
  opt.max_iters = c.max_iters;
  opt.omega = c.omega;
  return solve_psor(p, opt);
}

void write_solution(const fs::path& dir, const SolutionField& s, const std::string& description) {
  fs::create_directories(dir);
  write_snapshot(dir / "w.f64", s.w, description);
  write_f64(dir / "obstacle.f64", s.obstacle.data(), s.obstacle.size());
  write_f64(dir / "complementarity.f64", s.complementarity.data(), s.complementarity.size());
  write_json(dir / "stats.json", stats_json(s.stats));
}

SolutionField read_solution(const fs::path& dir) {
  GridField w = read_snapshot(dir / "w.f64");
  const Grid& g = w.grid();
  const Index P = g.plane_count();
  Eigen::ArrayXd obstacle = read_f64(dir / "obstacle.f64");
  Eigen::ArrayXd comp = read_f64(dir / "complementarity.f64");
  if (obstacle.size() != P || comp.size() != P) throw Error(ErrorKind::io, "solution files do not match the grid");
  SolutionField s{w, obstacle, NodeMask(P, 0), NodeMask(P, 0), comp, {}};
  for (Index p = 0; p < P; ++p) {
    const bool contact = w[g.plane_node(p)] - obstacle[p] <= 0.0;
    s.contact[p] = contact;
    s.noncontact[p] = !contact;
  }
  return s;
}

/// A snapshot file, or a solution directory holding w.f64.
GridField read_field(const fs::path& p) { return fs::is_directory(p) ? read_snapshot(p / "w.f64") : read_snapshot(p); }

Point default_center(const SolutionField& s) {
  const FreeBoundary fb = extract(s);
  if (fb.points.empty()) return origin(s.w.grid().dim());
  Point best = fb.points.front().x;
  for (const auto& b : fb.points)
    if (b.x.norm() < best.norm()) best = b.x;
  return best;
}

json weiss_json(const GridField& w, const Point& x0, double kappa, const std::string& csv) {
  const WeissProfile prof = weiss_profile(FieldWithGradient(w), x0, kappa);
  if (!csv.empty()) write_text(csv, ladder_csv(prof.samples));
  return {{"center", point_json(x0)}, {"kappa", kappa}, {"fit", fit_json(fit_weiss_decay(prof))}};
}

json cone_json(const GridField& w, const Point& x0, const std::string& csv) {
  const ConeLadder l = cone_decay_ladder(w, x0);
  std::vector<std::pair<double, double>> rows;
  for (std::size_t k = 0; k < l.radii.size(); ++k) rows.emplace_back(l.radii[k], l.d[k]);
  if (!csv.empty()) write_text(csv, ladder_csv(rows));
  return {{"center", point_json(x0)}, {"a0", l.a0},      {"radii", l.radii},
          {"d", l.d},                 {"solid", l.solid_values}, {"fit", fit_json(l.fit)},
          {"solid_fit", fit_json(l.solid)}};
}

json epi_family_json(int n, double h, int count) {
  const Grid g(n, h);
  json list = json::array();
  double min_kappa = INFINITY;
  for (int i = 0; i < count; ++i) {
    std::string desc;
    const SphereTrace c = perturbed_cone_trace(n, i, count, &desc);
    const EpiReport r = epiperimetric_check(c, g, desc);
    if (r.kappa_hat) min_kappa = std::min(min_kappa, *r.kappa_hat);
    list.push_back(epi_json(r));
  }
  return {{"reports", list}, {"min_kappa_hat", std::isfinite(min_kappa) ? json(min_kappa) : json(nullptr)}};
}

std::string classify_csv(const SolutionField& s, double alpha, RegularityReport* out = nullptr) {
  const FreeBoundary fb = extract(s);
  const RegularityReport rep = classify_regular(s.w, fb, alpha);
  std::ostringstream os;
  write_csv(os, fb, &rep);
  if (out) *out = rep;
  return os.str();
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

int run_pipeline(const RunConfig& c, const fs::path& config_path) {
  validate(c);
  const fs::path out = c.output;
  fs::create_directories(out);
  const json cfg = c.to_json();
  json artifacts = json::array();
  auto note = [&](const std::string& name) { artifacts.push_back(name); };

  const Grid g(c.n, parse_number(c.h));
  if (c.coeffs == "generated") {
    write_coefficients(out / "coefficients", generate_field(c.alpha, c.delta0, c.seed, g));
    note("coefficients.json");
  }
  const SolutionField s = solve(c);
  write_solution(out / "solution", s, "solution of the " + c.profile + " problem");
  note("solution/w.f64");
  note("solution/stats.json");

  if (c.weiss) {
    const Point x0 = default_center(s);
    write_json(out / "weiss.json", weiss_json(s.w, x0, 1.5, (out / "weiss.csv").string()));
    note("weiss.json");
    note("weiss.csv");
  }
  if (!c.growth_at.empty()) {
    const auto [lo, hi] = parse_window(c.window);
    json list = json::array();
    for (const auto& at : c.growth_at) {
      const Point x0 = parse_point(at, g.dim());
      list.push_back({{"center", point_json(x0)}, {"fit", fit_json(fit_growth_exponent(s.w, x0, lo, hi))}});
    }
    write_json(out / "growth.json", list);
    note("growth.json");
  }
  if (c.cone) {
    const Point x0 = c.cone_at.empty() ? default_center(s) : parse_point(c.cone_at, g.dim());
    write_json(out / "cone.json", cone_json(s.w, x0, (out / "cone.csv").string()));
    note("cone.json");
    note("cone.csv");
  }
  if (c.epi_count > 0) {
    write_json(out / "epi.json", epi_family_json(c.n, parse_number(c.epi_h), c.epi_count));
    note("epi.json");
  }
  if (c.fb) {
    write_text(out / "free_boundary.csv", classify_csv(s, c.fb_alpha));
    note("free_boundary.csv");
  }

  const std::string canonical = cfg.dump();
  json manifest = {{"thinfb_version", kVersion},
                   {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                         "." + std::to_string(EIGEN_MINOR_VERSION)},
                   {"config_file", config_path.string()},
                   {"config_hash", hex(fnv1a(canonical))},
                   {"config", cfg},
                   {"artifacts", artifacts}};
  write_json(out / "manifest.json", manifest);
  std::cout << (out / "manifest.json").string() << "\n";
  return 0;
}

void apply_thread_limit() {
#ifdef _OPENMP
  if (const char* s = std::getenv("THINFB_THREADS")) {
    const int k = std::atoi(s);
    if (k > 0) omp_set_num_threads(k);
  }
#endif
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_limit();
  CLI::App app{"thinfb: thin obstacle problem laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.set_help_flag("--help", "print this help and exit");  // -h would clash with --h

  RunConfig c;
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--n", c.n, "tangential dimension (1 or 2)")->check(CLI::IsMember({1, 2}));
    sub->add_option("--h", c.h, "grid spacing, e.g. 2^-8");
  };
  auto add_coeffs = [&](CLI::App* sub) {
    sub->add_option("--alpha", c.alpha, "Hoelder exponent");
    sub->add_option("--delta0", c.delta0, "seminorm budget");
    sub->add_option("--seed", c.seed, "generator seed");
  };

  // gen-coeffs
  auto* gen = app.add_subcommand("gen-coeffs", "generate a coefficient bundle");
  add_grid(gen);
  add_coeffs(gen);
  std::string gen_out = "coefficients";
  gen->add_option("--out", gen_out, "bundle path prefix");

  // solve
  auto* sol = app.add_subcommand("solve", "solve the thin obstacle problem");
  add_grid(sol);
  add_coeffs(sol);
  sol->add_option("--coeffs", c.coeffs, "identity, generated or a bundle path");
  sol->add_option("--profile", c.profile, "boundary data profile (h32, linear, abs, neg-abs, log, q<k>)");
  sol->add_option("--data", c.data, "boundary data snapshot");
  sol->add_option("--solver", c.solver, "psor or penalty")->check(CLI::IsMember({"psor", "penalty"}));
  sol->add_option("--tol", c.tol, "relative residual tolerance");
  sol->add_option("--max-iters", c.max_iters, "sweep limit (0: default)");
  sol->add_option("--omega", c.omega, "relaxation factor (0: default)");
  sol->add_option("--epsilon", c.epsilon, "penalty parameter");
  sol->add_option("--out", c.output, "output directory");

  // analyze
  auto* ana = app.add_subcommand("analyze", "measure a solution");
  ana->require_subcommand(1);
  std::string field, at, window = "2^-6:2^-2", mode = "homogeneous", csv, out_path;
  double kappa = 1.5, radius = 0.0;
  auto add_field = [&](CLI::App* sub) {
    sub->add_option("--field", field, "snapshot file or solution directory")->required();
    sub->add_option("--at", at, "centre, e.g. 0,0 (default: origin)");
  };
  auto* a_weiss = ana->add_subcommand("weiss", "Weiss energy ladder and decay fit");
  add_field(a_weiss);
  a_weiss->add_option("--kappa", kappa, "homogeneity");
  a_weiss->add_option("--csv", csv, "ladder CSV path");
  auto* a_growth = ana->add_subcommand("growth", "growth exponent fit");
  add_field(a_growth);
  a_growth->add_option("--window", window, "radius window lo:hi");
  auto* a_cone = ana->add_subcommand("cone", "cone projection and decay ladder");
  add_field(a_cone);
  a_cone->add_option("--r", radius, "single projection radius (default: ladder)");
  a_cone->add_option("--csv", csv, "ladder CSV path");
  auto* a_blow = ana->add_subcommand("blowup", "rescaled field");
  add_field(a_blow);
  a_blow->add_option("--r", radius, "scale")->required();
  a_blow->add_option("--mode", mode, "homogeneous or normalized")->check(CLI::IsMember({"homogeneous", "normalized"}));
  a_blow->add_option("--out", out_path, "snapshot path")->required();
  auto* a_freq = ana->add_subcommand("frequency", "frequency function");
  add_field(a_freq);
  a_freq->add_option("--r", radius, "radius (default: ladder)");

  // epi
  auto* epi = app.add_subcommand("epi", "epiperimetric check over a trace family");
  std::string family = "perturbed-cone";
  int count = 10;
  std::string epi_h = "2^-8";
  epi->add_option("--family", family, "trace family")->check(CLI::IsMember({"perturbed-cone"}));
  epi->add_option("--count", count, "family size");
  epi->add_option("--n", c.n, "tangential dimension")->check(CLI::IsMember({1, 2}));
  epi->add_option("--h", epi_h, "grid spacing");

  // fb
  auto* fbc = app.add_subcommand("fb", "free boundary");
  fbc->require_subcommand(1);
  std::string solution_dir;
  double tol_w = 0.0, tol_flux = 0.0, fb_alpha = 0.75;
  int normal_window = 9;
  auto* f_ex = fbc->add_subcommand("extract", "contact set and free boundary");
  f_ex->add_option("--solution", solution_dir, "solution directory")->required();
  f_ex->add_option("--tol-w", tol_w, "gap threshold (0: default)");
  f_ex->add_option("--tol-flux", tol_flux, "flux threshold (0: default)");
  f_ex->add_option("--csv", csv, "free boundary CSV path");
  auto* f_cl = fbc->add_subcommand("classify", "regular point classification (CSV)");
  f_cl->add_option("--solution", solution_dir, "solution directory")->required();
  f_cl->add_option("--alpha", fb_alpha, "coefficient Hoelder exponent");
  auto* f_no = fbc->add_subcommand("normals", "normal regularity fit (n = 2)");
  f_no->add_option("--solution", solution_dir, "solution directory")->required();
  f_no->add_option("--window", normal_window, "points per normal fit (5 to 15)");

  // verify
  auto* ver = app.add_subcommand("verify", "run the acceptance suite");
  std::vector<int> only;
  ver->add_option("--only", only, "criterion numbers")->delimiter(',');

  // run
  auto* run = app.add_subcommand("run", "run a configured pipeline");
  std::string config_path;
  run->add_option("--config", config_path, "TOML configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }

  try {
    if (*gen) {
      const Grid g(c.n, parse_number(c.h));
      const CoefficientField f = generate_field(c.alpha, c.delta0, c.seed, g);
      write_coefficients(gen_out, f);
      const ConditionNReport nrep = check_condition_N(f);
      print({{"path", gen_out},
             {"lambda", f.lambda()},
             {"Lambda", f.Lambda()},
             {"seminorm", estimate_coefficient_seminorm(f).seminorm},
             {"condition_N", nrep.pass}});
      return 0;
    }
    if (*sol) {
      validate(c);
      const SolutionField s = solve(c);
      write_solution(c.output, s, "solution of the " + (c.data.empty() ? c.profile : c.data) + " problem");
      json j = stats_json(s.stats);
      j["output"] = c.output;
      print(j);
      return 0;
    }
    if (*ana) {
      const GridField w = read_field(field);
      const Point x0 = at.empty() ? origin(w.grid().dim()) : parse_point(at, w.grid().dim());
      if (*a_weiss) print(weiss_json(w, x0, kappa, csv));
      if (*a_growth) {
        const auto [lo, hi] = parse_window(window);
        print({{"center", point_json(x0)}, {"fit", fit_json(fit_growth_exponent(w, x0, lo, hi))}});
      }
      if (*a_cone) {
        if (radius > 0.0) {
          const ConeProjection p = project_cone(w, x0, radius);
          print({{"center", point_json(x0)},
                 {"r", radius},
                 {"c", p.profile.c},
                 {"xi", point_json(p.profile.xi)},
                 {"distance", std::sqrt(p.distance_sq)},
                 {"cross", p.cross}});
        } else {
          print(cone_json(w, x0, csv));
        }
      }
      if (*a_blow) {
        const GridField b = blowup(w, x0, radius, mode == "normalized" ? BlowupMode::normalized : BlowupMode::homogeneous);
        write_snapshot(out_path, b, mode + " blow-up at r = " + g17(radius));
        print({{"output", out_path}, {"h", b.grid().h()}});
      }
      if (*a_freq) {
        const FieldWithGradient fw(w);
        std::vector<double> radii;
        if (radius > 0.0)
          radii.push_back(radius);
        else
          for (double r : radius_ladder(w.grid().h(), 0.0, 0.5)) radii.push_back(r);
        json rows = json::array();
        for (double r : radii) rows.push_back({r, frequency(fw, x0, r)});
        print({{"center", point_json(x0)}, {"samples", rows}});
      }
      return 0;
    }
    if (*epi) {
      const json j = epi_family_json(c.n, parse_number(epi_h), count);
      print(j);
      std::cerr << "min kappa_hat: " << j["min_kappa_hat"].dump() << "\n";
      return 0;
    }
    if (*fbc) {
      const SolutionField s = read_solution(solution_dir);
      if (*f_ex) {
        ExtractOptions opt;
        opt.tol_w = tol_w;
        opt.tol_flux = tol_flux;
        const FreeBoundary fb = extract(s, opt);
        Index nc = 0, nn = 0;
        for (std::size_t p = 0; p < fb.contact.size(); ++p) nc += fb.contact[p], nn += fb.noncontact[p];
        json pts = json::array();
        for (const auto& b : fb.points) pts.push_back(point_json(b.x));
        if (!csv.empty()) {
          std::ostringstream os;
          write_csv(os, fb);
          write_text(csv, os.str());
        }
        print({{"tol_w", fb.tol_w},
               {"tol_flux", fb.tol_flux},
               {"contact_nodes", nc},
               {"noncontact_nodes", nn},
               {"ambiguous_nodes", fb.ambiguous_count()},
               {"chains", fb.chains.size()},
               {"points", pts}});
      }
      if (*f_cl) std::cout << classify_csv(s, fb_alpha);
      if (*f_no) {
        const NormalRegularity nr = normal_regularity(extract(s), normal_window);
        print({{"gamma", fit_json(nr.fit)}, {"max_variation", nr.max_variation}, {"flat", nr.flat}});
      }
      return 0;
    }
    if (*ver) {
      AcceptanceSuite suite;
      int failed = 0;
      suite.run_all(only, [&](const CriterionResult& r) {
        std::cout << format_result(r) << std::endl;
        failed += !r.passed;
      });
      std::cout << failed << " failed\n";
      return failed == 0 ? 0 : 1;
    }
    if (*run) return run_pipeline(load_config(config_path), config_path);
  } catch (const Error& e) {
    std::cerr << json{{"error", to_string(e.kind())}, {"message", e.what()}}.dump() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
