#include "scatshift/registry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "scatshift/error.hpp"

namespace scatshift {

AnalyticTestFunction::AnalyticTestFunction(std::string name, int dim, Box support, int smoothness, ValueFn value,
                                           JetFn jet, std::optional<Point> singularity)
    : name_(std::move(name)),
      dim_(dim),
      support_(support),
      smoothness_(smoothness),
      value_(std::move(value)),
      jet_(std::move(jet)),
      singularity_(singularity) {}

double AnalyticTestFunction::operator()(const Point& x) const {
  if (x.dim() != dim_) throw InvalidArgument("target evaluated at a point of the wrong dimension");
  if (!support_.contains(x)) return 0.0;
  return value_(x);
}

Jet AnalyticTestFunction::jet(const Point& x, int order) const {
  if (x.dim() != dim_) throw InvalidArgument("target evaluated at a point of the wrong dimension");
  const auto& table = MultiIndexTable::get(dim_, order);
  if (!support_.contains(x)) return Jet(table, 0.0);
  std::vector<Jet> vars;
  vars.reserve(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) vars.push_back(Jet::variable(table, i, x[i]));
  return jet_(vars);
}

TargetSpec TargetSpec::parse(std::string_view text) {
  TargetSpec spec;
  const auto colon = text.find(':');
  spec.name = std::string(text.substr(0, colon));
  if (spec.name.empty()) throw InvalidArgument("empty target name");
  if (colon == std::string_view::npos) return spec;
  std::string rest(text.substr(colon + 1));
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("target parameter without value: '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(val, &used);
      if (used != val.size() || !std::isfinite(v)) throw std::invalid_argument(val);
      spec.params[key] = v;
    } catch (const std::exception&) {
      throw InvalidArgument("target parameter '" + key + "' is not a number: '" + val + "'");
    }
  }
  return spec;
}

namespace {

// Below this margin the bump and all its derivatives up to order ~10 are
// smaller than 1e-170.
constexpr double kBumpEdge = 2e-3;

template <class S>
S bump_profile(std::span<const S> u) {
  S s = u[0] * u[0];
  for (std::size_t i = 1; i < u.size(); ++i) s = s + u[i] * u[i];
  const S gap = 1.0 - s;
  if (value_of(gap) < kBumpEdge) return s * 0.0;
  using std::exp;
  return exp(1.0 - 1.0 / gap);
}

template <class S>
S cos_profile(std::span<const S> u, double power) {
  using std::cos;
  using std::pow;
  S r = u[0] * 0.0 + 1.0;
  for (const S& ui : u) {
    const S c = cos((std::numbers::pi / 2.0) * ui);
    if (value_of(c) <= 0.0) return u[0] * 0.0;
    r = r * pow(c, power);
  }
  return r;
}

struct Geometry {
  Point c;
  double radius;
};

Geometry read_geometry(const TargetSpec& spec, int dim, double default_c, double default_r) {
  Geometry g{Point::filled(dim, default_c), default_r};
  if (auto it = spec.params.find("c"); it != spec.params.end()) g.c = Point::filled(dim, it->second);
  for (int i = 0; i < dim; ++i)
    if (auto it = spec.params.find("c" + std::to_string(i)); it != spec.params.end()) g.c[i] = it->second;
  if (auto it = spec.params.find("R"); it != spec.params.end()) g.radius = it->second;
  if (!(g.radius > 0.0)) throw InvalidArgument("target radius R must be positive");
  return g;
}

double param(const TargetSpec& spec, const std::string& key, double fallback) {
  auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

void reject_unknown(const TargetSpec& spec, std::initializer_list<std::string_view> allowed, int dim) {
  for (const auto& [k, v] : spec.params) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    for (int i = 0; i < dim; ++i) ok = ok || k == "c" + std::to_string(i);
    if (!ok) throw InvalidArgument("unknown parameter '" + k + "' for target '" + spec.name + "'");
  }
}

template <class S>
std::vector<S> scaled(std::span<const S> x, const Geometry& g) {
  std::vector<S> u;
  u.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u.push_back((x[i] - g.c[static_cast<int>(i)]) * (1.0 / g.radius));
  return u;
}

std::vector<double> coords(const Point& x) { return std::vector<double>(x.data(), x.data() + x.dim()); }

}  // namespace

AnalyticTestFunction make_target(std::string_view text, int dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("target dimension out of range");
  const TargetSpec spec = TargetSpec::parse(text);
  if (spec.name == "zero") {
    reject_unknown(spec, {}, 0);
    return AnalyticTestFunction(
        "zero", dim, Box::unit(dim), kSmooth, [](const Point&) { return 0.0; },
        [](std::span<const Jet> x) { return x[0] * 0.0; });
  }
  if (spec.name == "bump") {
    reject_unknown(spec, {"c", "R"}, dim);
    const Geometry g = read_geometry(spec, dim, 0.5, 0.5);
    const Box box{g.c - Point::filled(dim, g.radius), g.c + Point::filled(dim, g.radius)};
    return AnalyticTestFunction(
        std::string(text), dim, box, kSmooth,
        [g](const Point& x) {
          const auto xs = coords(x);
          const auto u = scaled<double>(xs, g);
          return bump_profile<double>(u);
        },
        [g](std::span<const Jet> x) {
          const auto u = scaled<Jet>(x, g);
          return bump_profile<Jet>(u);
        });
  }
  if (spec.name == "cosbump") {
    reject_unknown(spec, {"c", "R", "power"}, dim);
    const Geometry g = read_geometry(spec, dim, 0.5, 0.5);
    const double power = param(spec, "power", 8.0);
    if (!(power >= 1.0)) throw InvalidArgument("cosbump power must be >= 1");
    const Box box{g.c - Point::filled(dim, g.radius), g.c + Point::filled(dim, g.radius)};
    const int smooth = static_cast<int>(std::floor(power)) - 1;
    return AnalyticTestFunction(
        std::string(text), dim, box, smooth,
        [g, power](const Point& x) {
          const auto xs = coords(x);
          const auto u = scaled<double>(xs, g);
          return cos_profile<double>(u, power);
        },
        [g, power](std::span<const Jet> x) {
          const auto u = scaled<Jet>(x, g);
          return cos_profile<Jet>(u, power);
        });
  }
  if (spec.name == "cusp") {
    reject_unknown(spec, {"c", "R", "alpha", "x0"}, dim);
    const Geometry g = read_geometry(spec, dim, 0.5, 0.5);
    const double alpha = param(spec, "alpha", 0.6);
    if (!(alpha > 0.0)) throw InvalidArgument("cusp exponent alpha must be positive");
    const Point x0 = spec.params.count("x0") ? Point::filled(dim, spec.params.at("x0")) : g.c;
    const Box box{g.c - Point::filled(dim, g.radius), g.c + Point::filled(dim, g.radius)};
    return AnalyticTestFunction(
        std::string(text), dim, box, 0,
        [g, alpha, x0](const Point& x) {
          const auto xs = coords(x);
          const auto u = scaled<double>(xs, g);
          return std::pow(distance2(x, x0), 0.5 * alpha) * bump_profile<double>(u);
        },
        [g, alpha, x0](std::span<const Jet> x) {
          const auto u = scaled<Jet>(x, g);
          Jet r2 = (x[0] - x0[0]) * (x[0] - x0[0]);
          for (std::size_t i = 1; i < x.size(); ++i) r2 += (x[i] - x0[static_cast<int>(i)]) * (x[i] - x0[static_cast<int>(i)]);
          return pow(r2, 0.5 * alpha) * bump_profile<Jet>(u);
        },
        x0);
  }
  throw InvalidArgument("unknown target '" + spec.name + "'");
}

std::vector<std::string> registered_targets() { return {"bump", "cosbump", "cusp", "zero"}; }

}  // namespace scatshift
