#include "scatshift/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "scatshift/error.hpp"

namespace scatshift {

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1 || n > 64) throw InvalidArgument("Gauss-Legendre order must be in [1, 64]");
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  GaussLegendreRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * x * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  cache[n] = rule;
  return rule;
}

namespace {

void emit_panel(const Box& panel, const GaussLegendreRule& rule, std::vector<QuadratureNode>& out) {
  const int d = panel.dim();
  const auto n = rule.nodes.size();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= n;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    Point t(d);
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      const std::size_t k = rem % n;
      rem /= n;
      const double half = 0.5 * panel.side(i);
      t[i] = panel.lo[i] + half * (rule.nodes[k] + 1.0);
      w *= half * rule.weights[k];
    }
    out.push_back({t, w});
  }
}

void emit_refined(const Box& panel, const GaussLegendreRule& rule, const Point& s, int levels,
                  std::vector<QuadratureNode>& out) {
  if (levels <= 0 || !panel.contains(s)) {
    emit_panel(panel, rule, out);
    return;
  }
  const int d = panel.dim();
  const Point mid = panel.center();
  for (int child = 0; child < (1 << d); ++child) {
    Box b = panel;
    for (int i = 0; i < d; ++i) {
      if (child & (1 << i)) b.lo[i] = mid[i];
      else b.hi[i] = mid[i];
    }
    emit_refined(b, rule, s, levels - 1, out);
  }
}

}  // namespace

std::vector<QuadratureNode> composite_rule(const Box& box, const QuadratureSpec& spec,
                                           const std::optional<Point>& singular) {
  if (!(spec.panel > 0.0)) throw InvalidArgument("quadrature panel width must be positive");
  if (spec.singular_levels < 0 || spec.singular_levels > 30) throw InvalidArgument("singular_levels out of range");
  const auto rule = gauss_legendre(spec.order);
  const int d = box.dim();
  std::array<std::int64_t, kMaxDim> counts{1, 1, 1};
  std::array<double, kMaxDim> widths{0, 0, 0};
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) {
    const auto u = static_cast<std::size_t>(i);
    counts[u] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(box.side(i) / spec.panel - 1e-9)));
    widths[u] = box.side(i) / static_cast<double>(counts[u]);
    total *= static_cast<std::size_t>(counts[u]);
  }
  std::vector<QuadratureNode> out;
  out.reserve(total * static_cast<std::size_t>(std::pow(spec.order, d)));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    Box panel = box;
    for (int i = 0; i < d; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const auto k = static_cast<std::int64_t>(rem % static_cast<std::size_t>(counts[u]));
      rem /= static_cast<std::size_t>(counts[u]);
      panel.lo[i] = box.lo[i] + widths[u] * static_cast<double>(k);
      panel.hi[i] = k + 1 == counts[u] ? box.hi[i] : box.lo[i] + widths[u] * static_cast<double>(k + 1);
    }
    if (singular) emit_refined(panel, rule, *singular, spec.singular_levels, out);
    else emit_panel(panel, rule, out);
  }
  return out;
}

}  // namespace scatshift
