#include "scatshift/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"
#include "scatshift/density.hpp"
#include "scatshift/error.hpp"

namespace scatshift {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// Reads known keys from one JSON object and rejects everything else.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidArgument(where() + " must be an object");
  }
  ~Section() = default;

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw InvalidArgument(where() + "." + key + " has the wrong type");
    }
  }
  void get_real(const char* key, double& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    if (it->is_string() && (*it == "inf" || *it == "infinity")) {
      out = INFINITY;
      return;
    }
    if (!it->is_number()) throw InvalidArgument(where() + "." + key + " must be a number");
    out = it->get<double>();
  }
  template <class T>
  void get_opt(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw InvalidArgument(where() + "." + key + " has the wrong type");
    }
  }
  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw InvalidArgument("unknown config key " + where() + "." + it.key());
  }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ojson real_json(double v) { return std::isinf(v) ? ojson("inf") : ojson(v); }

Box box_from(const std::vector<double>& lo, const std::vector<double>& hi, const std::string& what) {
  if (lo.empty() || lo.size() != hi.size() || lo.size() > static_cast<std::size_t>(kMaxDim))
    throw InvalidArgument(what + ": lo and hi need the same length 1..3");
  Box b{Point(static_cast<int>(lo.size())), Point(static_cast<int>(lo.size()))};
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(hi[i] > lo[i])) throw InvalidArgument(what + ": hi must exceed lo on every axis");
    b.lo[static_cast<int>(i)] = lo[i];
    b.hi[static_cast<int>(i)] = hi[i];
  }
  return b;
}

}  // namespace

BasisFunction BasisConfig::make() const {
  if (kind == "surface_spline") return BasisFunction::surface_spline(dim, m, c);
  if (kind == "truncated_power") {
    if (dim != 1) throw InvalidArgument("truncated powers are univariate (basis.dim = 1)");
    return BasisFunction::truncated_power(kappa, c);
  }
  throw InvalidArgument("basis.kind must be surface_spline or truncated_power, got '" + kind + "'");
}

Box CenterConfig::box(const Box& fallback) const {
  return lo.empty() && hi.empty() ? fallback.padded(0.5) : box_from(lo, hi, "centers");
}

CenterSet CenterConfig::make(const Box& fallback) const {
  if (source == "csv") {
    if (path.empty()) throw InvalidArgument("centers.path is required for source csv");
    return read_centers_csv(path);
  }
  const Box b = box(fallback);
  if (source == "uniform") return uniform_centers(b, spacing);
  if (source == "two_density") {
    if (b.dim() != 1) throw InvalidArgument("two_density centers are univariate");
    return two_density_centers(b, spacing, ratio);
  }
  if (source == "random" || source == "jittered") {
    if (!seed) throw InvalidArgument("centers.seed is mandatory for source " + source);
    if (source == "random") return random_centers(b, count, *seed);
    return jittered_centers(b, spacing, jitter, *seed);
  }
  throw InvalidArgument("centers.source must be csv, uniform, two_density, random or jittered, got '" + source + "'");
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed config JSON: ") + e.what());
  }
  ExperimentConfig c;
  c.ladder.spacings = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  Section r(root, "");
  if (const json* j = r.child("basis")) {
    Section s(*j, "basis");
    s.get("kind", c.basis.kind);
    s.get("dim", c.basis.dim);
    s.get("m", c.basis.m);
    s.get("kappa", c.basis.kappa);
    s.get_real("c", c.basis.c);
    s.finish();
  }
  if (const json* j = r.child("centers")) {
    Section s(*j, "centers");
    s.get("source", c.centers.source);
    s.get("path", c.centers.path);
    s.get("lo", c.centers.lo);
    s.get("hi", c.centers.hi);
    s.get_real("spacing", c.centers.spacing);
    s.get("ratio", c.centers.ratio);
    s.get("count", c.centers.count);
    s.get_real("jitter", c.centers.jitter);
    s.get_opt("seed", c.centers.seed);
    s.finish();
  }
  if (const json* j = r.child("reproduction")) {
    Section s(*j, "reproduction");
    s.get_real("nu", c.nu);
    s.get("extra_points", c.extra_points);
    s.get_real("c_max", c.c_max);
    s.get("enlargement_cap", c.enlargement_cap);
    s.finish();
  }
  if (const json* j = r.child("majorant")) {
    Section s(*j, "majorant");
    s.get_opt("r", c.r);
    s.finish();
  }
  if (const json* j = r.child("grid")) {
    Section s(*j, "grid");
    s.get("lo", c.grid.lo);
    s.get("hi", c.grid.hi);
    s.get_real("spacing", c.grid.spacing);
    s.finish();
  }
  if (const json* j = r.child("quadrature")) {
    Section s(*j, "quadrature");
    s.get_real("panel", c.quadrature.panel);
    s.get("order", c.quadrature.order);
    s.get("singular_levels", c.quadrature.singular_levels);
    s.finish();
  }
  if (const json* j = r.child("wavelets")) {
    Section s(*j, "wavelets");
    s.get("vanishing_moments", c.wavelets.vanishing_moments);
    s.get("base_level", c.wavelets.base_level);
    s.get("fine_level", c.wavelets.fine_level);
    s.get("resolution", c.wavelets.resolution);
    s.finish();
  }
  r.get("target", c.target);
  if (const json* j = r.child("norm")) {
    Section s(*j, "norm");
    s.get_real("s", c.norm.s);
    s.get_real("p", c.norm.p);
    s.get_real("q", c.norm.q);
    s.finish();
  }
  if (const json* j = r.child("nterm")) {
    Section s(*j, "nterm");
    s.get("budget", c.nterm.budget);
    s.get("budgets", c.nterm.budgets);
    s.get_real("nu", c.nterm.nu);
    s.get("quad_level", c.nterm.quad_level);
    s.get("extra_points", c.nterm.extra_points);
    s.get("budget_tight", c.nterm.budget_tight);
    s.finish();
  }
  if (const json* j = r.child("ladder")) {
    Section s(*j, "ladder");
    s.get("spacings", c.ladder.spacings);
    s.get_real("pad", c.ladder.pad);
    s.get_real("panel_factor", c.ladder.panel_factor);
    s.get("order", c.ladder.order);
    s.get_real("eval_factor", c.ladder.eval_factor);
    s.get_real("p", c.ladder.p);
    s.finish();
  }
  if (const json* j = r.child("schur")) {
    Section s(*j, "schur");
    s.get_real("fine", c.schur.fine);
    s.get_real("coarse", c.schur.coarse);
    s.get("coarse_count", c.schur.coarse_count);
    s.get("extents", c.schur.extents);
    s.get("kernel", c.schur.kernel);
    s.get("probe_bound", c.schur.probe_bound);
    s.finish();
  }
  if (const json* j = r.child("verify")) {
    Section s(*j, "verify");
    s.get("scheme", c.verify.scheme);
    s.get_real("c_bound", c.verify.c_bound);
    s.get("anchors", c.verify.anchors);
    s.get("radii", c.verify.radii);
    s.get("directions", c.verify.directions);
    s.get_real("max_ratio", c.verify.max_ratio);
    s.get_opt("seed", c.verify.seed);
    s.get("representation_points", c.verify.representation_points);
    s.get("schur", c.verify.schur);
    s.finish();
  }
  r.get("output", c.output);
  r.finish();
  return c;
}

std::string ExperimentConfig::to_json() const {
  ojson j;
  j["basis"] = {{"kind", basis.kind}, {"dim", basis.dim}, {"m", basis.m}, {"kappa", basis.kappa}, {"c", basis.c}};
  ojson cs{{"source", centers.source}};
  if (centers.source == "csv") cs["path"] = centers.path;
  cs["lo"] = centers.lo;
  cs["hi"] = centers.hi;
  cs["spacing"] = centers.spacing;
  cs["ratio"] = centers.ratio;
  cs["count"] = centers.count;
  cs["jitter"] = centers.jitter;
  cs["seed"] = centers.seed ? ojson(*centers.seed) : ojson(nullptr);
  j["centers"] = cs;
  j["reproduction"] = {{"nu", nu}, {"extra_points", extra_points}, {"c_max", c_max}, {"enlargement_cap", enlargement_cap}};
  j["majorant"] = {{"r", majorant_exponent()}};
  j["grid"] = {{"lo", grid.lo}, {"hi", grid.hi}, {"spacing", grid.spacing}};
  j["quadrature"] = {{"panel", quadrature.panel}, {"order", quadrature.order},
                     {"singular_levels", quadrature.singular_levels}};
  j["wavelets"] = {{"vanishing_moments", wavelets.vanishing_moments}, {"base_level", wavelets.base_level},
                   {"fine_level", wavelets.fine_level}, {"resolution", wavelets.resolution}};
  j["target"] = target;
  j["norm"] = {{"s", norm.s}, {"p", real_json(norm.p)}, {"q", norm.q}};
  j["nterm"] = {{"budget", nterm.budget}, {"budgets", nterm.budgets},   {"nu", nterm.nu},
                {"quad_level", nterm.quad_level}, {"extra_points", nterm.extra_points},
                {"budget_tight", nterm.budget_tight}};
  j["ladder"] = {{"spacings", ladder.spacings}, {"pad", ladder.pad}, {"panel_factor", ladder.panel_factor},
                 {"order", ladder.order}, {"eval_factor", ladder.eval_factor}, {"p", real_json(ladder.p)}};
  j["schur"] = {{"fine", schur.fine}, {"coarse", schur.coarse}, {"coarse_count", schur.coarse_count},
                {"extents", schur.extents}, {"kernel", schur.kernel}, {"probe_bound", schur.probe_bound}};
  j["verify"] = {{"scheme", verify.scheme}, {"c_bound", verify.c_bound}, {"anchors", verify.anchors},
                 {"radii", verify.radii}, {"directions", verify.directions}, {"max_ratio", verify.max_ratio},
                 {"seed", verify.seed ? ojson(*verify.seed) : ojson(nullptr)},
                 {"representation_points", verify.representation_points}, {"schur", verify.schur}};
  j["output"] = output;
  return j.dump(2);
}

ReproductionConfig ExperimentConfig::reproduction(const BasisFunction& phi) const {
  ReproductionConfig rc = ReproductionConfig::for_basis(phi, nu, extra_points);
  rc.c_max = c_max;
  rc.enlargement_cap = enlargement_cap;
  return rc;
}

double ExperimentConfig::majorant_exponent() const {
  const int kappa = basis.kind == "truncated_power" ? basis.kappa : 2 * basis.m;
  return r ? *r : default_majorant_exponent(nu, basis.dim, kappa);
}

NTermConfig ExperimentConfig::nterm_config() const {
  NTermConfig n;
  n.nu = nterm.nu;
  n.s = norm.s;
  n.p = norm.p;
  n.base_level = wavelets.base_level;
  n.fine_level = wavelets.fine_level;
  n.quad_level = nterm.quad_level;
  n.extra_points = nterm.extra_points;
  n.budget_tight = nterm.budget_tight;
  return n;
}

GridSpec ExperimentConfig::density_grid(const Box& fallback) const {
  const Box b = grid.lo.empty() && grid.hi.empty() ? fallback : box_from(grid.lo, grid.hi, "grid");
  const double h = grid.spacing > 0.0 ? grid.spacing : centers.spacing / 4.0;
  if (!(h > 0.0)) throw InvalidArgument("grid.spacing must be positive");
  return GridSpec::covering(b, h);
}

void ExperimentConfig::validate(const std::string& command, const std::string& mode) const {
  static const std::set<std::string> commands{"density", "approximate", "low-smooth", "nterm", "rates", "verify"};
  if (!commands.count(command)) throw InvalidArgument("unknown command '" + command + "'");
  const BasisFunction phi = basis.make();
  const int d = phi.dim();
  const AnalyticTestFunction f = make_target(target, d);
  const bool uses_centers = command == "density" || command == "approximate" || command == "low-smooth" || command == "verify";
  if (uses_centers && centers.source != "csv") {
    if (centers.box(f.support()).dim() != d) throw InvalidArgument("centers box dimension differs from basis.dim");
  }
  if (!grid.lo.empty() || !grid.hi.empty())
    if (box_from(grid.lo, grid.hi, "grid").dim() != d) throw InvalidArgument("grid box dimension differs from basis.dim");
  if (!(nu > d)) throw InvalidArgument("reproduction.nu must exceed the dimension");
  reproduction(phi).validate(d);
  const double bound = majorant_exponent_bound(nu, d, phi.kappa());
  const double rr = majorant_exponent();
  if (!(rr > 0.0) || !(rr < bound))
    throw InvalidArgument("majorant.r must lie in (0, (nu - d)/kappa) = (0, " + std::to_string(bound) + ")");
  if (!(quadrature.panel > 0.0) || quadrature.order < 1 || quadrature.singular_levels < 0)
    throw InvalidArgument("quadrature needs panel > 0, order >= 1, singular_levels >= 0");
  if (!(norm.p >= 1.0)) throw InvalidArgument("norm.p must be >= 1");
  if (!(norm.s > 0.0) || norm.s > phi.kappa()) throw InvalidArgument("norm.s must lie in (0, kappa]");
  if (norm.q < 0.0) throw InvalidArgument("norm.q must be positive (0 for the default)");
  if (wavelets.vanishing_moments < 0 || wavelets.base_level < 0 || wavelets.fine_level <= wavelets.base_level)
    throw InvalidArgument("wavelets need vanishing_moments >= 0 and fine_level > base_level >= 0");
  const bool uses_nterm = command == "nterm" || (command == "rates" && (mode == "nterm" || mode == "lowsmooth"));
  if (uses_nterm) {
    if (!(nterm.nu > 2.0 * d)) throw InvalidArgument("nterm.nu must exceed 2d for N-term approximation");
    if (command == "nterm" && nterm.budget < 1) throw InvalidArgument("nterm.budget must be positive");
    for (long long n : nterm.budgets)
      if (n < 1) throw InvalidArgument("nterm.budgets must be positive");
  }
  if (command == "nterm" || command == "low-smooth") {
    if (std::isinf(norm.p)) throw InvalidArgument("norm.p must be finite for " + command);
  }
  if (command == "low-smooth" && !(norm.s < phi.kappa()))
    throw InvalidArgument("low-smooth needs norm.s < kappa");
  if (command == "rates")
    for (double h : ladder.spacings)
      if (!(h > 0.0)) throw InvalidArgument("ladder.spacings must be positive");
  if (command == "verify") {
    if (d != 1) throw InvalidArgument("verify runs the univariate certificates (basis.dim = 1)");
    if (!verify.seed) throw InvalidArgument("verify.seed is mandatory (random anchor sampling)");
    if (verify.scheme != "divided_difference" && verify.scheme != "least_norm")
      throw InvalidArgument("verify.scheme must be divided_difference or least_norm");
    if (schur.kernel != "decay_bound" && schur.kernel != "actual")
      throw InvalidArgument("schur.kernel must be decay_bound or actual");
    if (schur.extents.size() < 3) throw InvalidArgument("schur.extents needs at least three entries");
    if (!(schur.fine > 0.0) || !(schur.coarse >= schur.fine) || schur.coarse_count < 2)
      throw InvalidArgument("schur needs 0 < fine <= coarse and coarse_count >= 2");
  }
  if (uses_centers && (centers.source == "random" || centers.source == "jittered") && !centers.seed)
    throw InvalidArgument("centers.seed is mandatory for source " + centers.source);
}

std::string apply_override(const std::string& config_json, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidArgument("override must look like key.path=value: '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json root;
  try {
    root = config_json.empty() ? json::object() : json::parse(config_json);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed config JSON: ") + e.what());
  }
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw InvalidArgument("empty key in override '" + assignment + "'");
    if (!node->is_object()) throw InvalidArgument("override path '" + path + "' crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
  return root.dump();
}

}  // namespace scatshift
