#include "scatshift/lowsmooth.hpp"

#include <algorithm>
#include <cmath>

#include "scatshift/error.hpp"

namespace scatshift {

LowSmoothResult approximate_low_smoothness(const WaveletExpansion& exp, const WaveletSystem& sys,
                                           const CenterSet& centers, const BasisFunction& phi,
                                           const ReproductionConfig& cfg, const DensityField& h, double s,
                                           int extra_levels) {
  const int d = sys.dim();
  if (exp.dim() != d || phi.dim() != d || centers.dim() != d) throw InvalidArgument("dimension mismatch in low-smoothness pipeline");
  if (!(s > 0.0) || !(s < phi.kappa())) throw InvalidArgument("low-smoothness pipeline needs 0 < s < kappa");
  if (extra_levels < 0) throw InvalidArgument("extra_levels must be non-negative");
  const DensitySplit split = split_by_density(exp, sys, h);
  const auto plus = split.plus.terms();
  LowSmoothResult out{ScatteredApproximant(phi, {}, {}), 0, 0, 0, 0, Box{}, 0.0};
  out.plus_terms = plus.size();
  out.minus_terms = split.minus.nonzero();
  if (plus.empty()) return out;

  int jmax = plus.front().v.level;
  Box box = sys.support(plus.front().v);
  for (const auto& t : plus) {
    jmax = std::max(jmax, t.v.level);
    const Box b = sys.support(t.v);
    for (int a = 0; a < d; ++a) {
      box.lo[a] = std::min(box.lo[a], b.lo[a]);
      box.hi[a] = std::max(box.hi[a], b.hi[a]);
    }
  }
  out.node_box = box;
  const int by_density = static_cast<int>(std::ceil(std::log2(4.0 / std::max(h.min(), 1e-300))));
  const int R = std::max(jmax + extra_levels, by_density);
  if (R > 30) throw InvalidArgument("quadrature lattice finer than 2^-30 requested");
  out.node_level = R;

  // Dense lattice over the box; box faces are dyadic at level <= jmax <= R.
  IntVec lo{0, 0, 0}, count{1, 1, 1};
  for (int a = 0; a < d; ++a) {
    const auto u = static_cast<std::size_t>(a);
    lo[u] = static_cast<std::int64_t>(std::llround(std::ldexp(box.lo[a], R)));
    count[u] = static_cast<std::int64_t>(std::llround(std::ldexp(box.hi[a], R))) - lo[u] + 1;
  }
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(count[static_cast<std::size_t>(a)]);
  if (total > 200'000'000) throw InvalidArgument("low-smoothness quadrature lattice too large");
  std::vector<double> tf(total, 0.0);
  const int a0 = sys.support_factor();
  for (const auto& t : plus) {
    const int shift = R - t.v.level;
    IntVec blo{0, 0, 0}, bn{1, 1, 1};
    for (int a = 0; a < d; ++a) {
      const auto u = static_cast<std::size_t>(a);
      blo[u] = t.v.k[u] * (std::int64_t{1} << shift);
      bn[u] = static_cast<std::int64_t>(a0) * (std::int64_t{1} << shift) + 1;
    }
    const double scale = t.coeff * std::ldexp(1.0, t.v.level * phi.kappa());
    IntVec c{0, 0, 0};
    while (true) {
      Point y(d);
      std::size_t flat = 0, stride = 1;
      for (int a = 0; a < d; ++a) {
        const auto u = static_cast<std::size_t>(a);
        y[a] = std::ldexp(static_cast<double>(c[u]), -shift);
        flat += static_cast<std::size_t>(blo[u] + c[u] - lo[u]) * stride;
        stride *= static_cast<std::size_t>(count[u]);
      }
      const double g = sys.eval_T_local(phi, t.v.type, t.v.type == 0, y);
      out.t_constant = std::max(out.t_constant, std::abs(g));
      tf[flat] += scale * g;
      int a = 0;
      while (a < d) {
        const auto u = static_cast<std::size_t>(a);
        if (++c[u] < bn[u]) break;
        c[u] = 0;
        ++a;
      }
      if (a == d) break;
    }
  }
  const double weight = std::ldexp(1.0, -R * d);
  std::vector<SourceNode> nodes;
  for (std::size_t f = 0; f < total; ++f) {
    if (tf[f] == 0.0) continue;
    Point t(d);
    std::size_t rem = f;
    for (int a = 0; a < d; ++a) {
      const auto u = static_cast<std::size_t>(a);
      t[a] = std::ldexp(static_cast<double>(lo[u] + static_cast<std::int64_t>(rem % static_cast<std::size_t>(count[u]))), -R);
      rem /= static_cast<std::size_t>(count[u]);
    }
    nodes.push_back({t, weight, tf[f]});
  }
  out.nodes = nodes.size();
  out.F = assemble_from_nodes(nodes, centers, phi, cfg);
  return out;
}

}  // namespace scatshift
