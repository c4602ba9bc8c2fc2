#include "scatshift/rates.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "scatshift/error.hpp"

namespace scatshift {

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("slope fit needs matching x and y");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  SlopeFit fit;
  if (lx.size() < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx > 0.0)) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.defined = true;
  return fit;
}

Box error_box(const AnalyticTestFunction& f, const ScatteredApproximant& S) {
  Box b = f.support();
  for (const auto& c : S.centers())
    for (int a = 0; a < b.dim(); ++a) {
      b.lo[a] = std::min(b.lo[a], c[a]);
      b.hi[a] = std::max(b.hi[a], c[a]);
    }
  return b;
}

double lp_error(const AnalyticTestFunction& f, const ScatteredApproximant& S, const Box& box, double p,
                const QuadratureSpec& quad) {
  if (!(p >= 1.0)) throw InvalidArgument("error exponent must be >= 1");
  const auto rule = composite_rule(box, quad, f.singularity());
  std::vector<Point> xs;
  xs.reserve(rule.size());
  for (const auto& n : rule) xs.push_back(n.t);
  const std::vector<double> s = S.evaluate(xs);
  double acc = 0.0;
  const bool sup = std::isinf(p);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double e = std::abs(f(xs[i]) - s[i]);
    if (sup) acc = std::max(acc, e);
    else acc += rule[i].weight * std::pow(e, p);
  }
  return sup ? acc : std::pow(acc, 1.0 / p);
}

std::string RateReport::to_csv() const {
  std::ostringstream os;
  os << x_label << ",error,centers,slope_to_date\n";
  std::vector<double> xs, es;
  char buf[256];
  for (const auto& pt : points) {
    xs.push_back(pt.x);
    es.push_back(pt.error);
    const SlopeFit f = fit_loglog(xs, es);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu,", pt.x, pt.error, pt.centers);
    os << buf;
    if (f.defined) {
      std::snprintf(buf, sizeof buf, "%.17g", f.slope);
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::string RateReport::to_json(const std::string& config_json) const {
  nlohmann::ordered_json j;
  j["mode"] = mode;
  j["x"] = x_label;
  j["p"] = std::isinf(p) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(p);
  if (fit.defined) j["slope"] = fit.slope;
  else j["slope"] = nullptr;
  j["reference_slope"] = reference_slope;
  auto& arr = j["points"] = nlohmann::ordered_json::array();
  for (const auto& pt : points) arr.push_back({{x_label, pt.x}, {"error", pt.error}, {"centers", pt.centers}});
  j["config"] = nlohmann::ordered_json::parse(config_json);
  return j.dump(2);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void finish(RateReport& r) {
  std::vector<double> xs, es;
  for (const auto& pt : r.points) {
    xs.push_back(pt.x);
    es.push_back(pt.error);
  }
  r.fit = fit_loglog(xs, es);
}

}  // namespace

RateReport sigma_study(const AnalyticTestFunction& f, std::span<const long long> budgets, const NTermConfig& cfg,
                       const WaveletSystem& sys, const BasisFunction& phi, const QuadratureSpec& measure) {
  cfg.validate(phi);
  RateReport r;
  r.mode = "nterm";
  r.x_label = "N";
  r.p = cfg.p;
  r.reference_slope = -cfg.s / phi.dim();
  const WaveletExpansion exp = expand_target(f, cfg, sys);
  ReferenceCache cache;
  for (long long N : budgets) {
    const auto t0 = std::chrono::steady_clock::now();
    RatePoint pt;
    pt.x = static_cast<double>(N);
    if (exp.nonzero() == 0) {
      r.points.push_back(pt);
      continue;
    }
    const NTermApproximant a = nterm_approximate(exp, N, cfg, sys, phi, &cache);
    pt.centers = a.distinct_centers;
    pt.error = lp_error(f, a.S, error_box(f, a.S), cfg.p, measure);
    pt.seconds = seconds_since(t0);
    r.points.push_back(pt);
  }
  finish(r);
  return r;
}

RateReport linear_study(const AnalyticTestFunction& f, const BasisFunction& phi, const ReproductionConfig& cfg,
                        const LinearLadder& ladder) {
  if (ladder.spacings.empty()) throw InvalidArgument("linear ladder needs spacings");
  RateReport r;
  r.mode = "linear";
  r.x_label = "h";
  r.p = ladder.p;
  r.reference_slope = phi.kappa();
  for (double h : ladder.spacings) {
    if (!(h > 0.0)) throw InvalidArgument("spacings must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    const CenterSet cs = uniform_centers(f.support().padded(ladder.pad), h);
    const ScatteredApproximant F =
        assemble(f, cs, phi, cfg, QuadratureSpec{h * ladder.panel_factor, ladder.order, 0});
    const GridSpec g = GridSpec::covering(f.support(), h * ladder.eval_factor);
    std::vector<Point> xs;
    xs.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) xs.push_back(g.node(i));
    const std::vector<double> v = F.evaluate(xs);
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = std::abs(f(xs[i]) - v[i]);
      acc = std::isinf(ladder.p) ? std::max(acc, e) : acc + std::pow(e, ladder.p) * g.cell_volume();
    }
    RatePoint pt;
    pt.x = h;
    pt.error = std::isinf(ladder.p) ? acc : std::pow(acc, 1.0 / ladder.p);
    pt.centers = F.size();
    pt.seconds = seconds_since(t0);
    r.points.push_back(pt);
  }
  finish(r);
  return r;
}

RateReport lowsmooth_budget_study(const AnalyticTestFunction& f, std::span<const long long> budgets,
                                  const NTermConfig& cfg, const WaveletSystem& sys, const BasisFunction& phi,
                                  const QuadratureSpec& measure) {
  cfg.validate(phi);
  const int d = phi.dim();
  RateReport r;
  r.mode = "lowsmooth";
  r.x_label = "N";
  r.p = cfg.p;
  r.reference_slope = -cfg.s / d;
  const WaveletExpansion exp = expand_target(f, cfg, sys);
  const auto terms = exp.terms();
  if (terms.empty()) throw InvalidArgument("zero target in low-smoothness study");
  Box box = sys.support(terms.front().v);
  for (const auto& t : terms) {
    const Box b = sys.support(t.v);
    for (int a = 0; a < d; ++a) {
      box.lo[a] = std::min(box.lo[a], b.lo[a]);
      box.hi[a] = std::max(box.hi[a], b.hi[a]);
    }
  }
  double longest = 0.0;
  for (int a = 0; a < d; ++a) longest = std::max(longest, box.side(a));
  const ReproductionConfig rc = cfg.reproduction(phi);
  const double s_low = std::min(cfg.s, phi.kappa() - 0.5);
  for (long long N : budgets) {
    const auto t0 = std::chrono::steady_clock::now();
    const long long m = integer_root(N, d);
    if (m < 2) throw InvalidArgument("budget too small for a uniform lattice");
    const CenterSet cs = uniform_centers(box, longest / static_cast<double>(m - 1));
    const GridSpec grid = GridSpec::covering(box, longest / static_cast<double>(m - 1));
    const DensityField h = build_density(cs, rc, grid);
    const LowSmoothResult res = approximate_low_smoothness(exp, sys, cs, phi, rc, h, s_low);
    RatePoint pt;
    pt.x = static_cast<double>(N);
    pt.centers = cs.size();
    pt.error = lp_error(f, res.F, error_box(f, res.F), cfg.p, measure);
    pt.seconds = seconds_since(t0);
    r.points.push_back(pt);
  }
  finish(r);
  return r;
}

}  // namespace scatshift
