#include "scatshift/quasilinear.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "scatshift/error.hpp"

namespace scatshift {

ScatteredApproximant::ScatteredApproximant(BasisFunction phi, std::vector<Point> centers, std::vector<double> coeffs)
    : phi_(phi), centers_(std::move(centers)), coeffs_(std::move(coeffs)) {
  if (centers_.size() != coeffs_.size()) throw InvalidArgument("approximant centers and coefficients differ in length");
  for (const auto& c : centers_)
    if (c.dim() != phi_.dim()) throw InvalidArgument("approximant center has the wrong dimension");
}

double ScatteredApproximant::operator()(const Point& x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < centers_.size(); ++i) s += coeffs_[i] * phi_(x - centers_[i]);
  return s;
}

std::vector<double> ScatteredApproximant::evaluate(std::span<const Point> xs) const {
  std::vector<double> out(xs.size(), 0.0);
  if (centers_.empty()) return out;
  if (phi_.kind() != BasisKind::TruncatedPower) {
    const int d = phi_.dim();
    const std::size_t n = centers_.size();
    std::vector<double> flat(n * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < n; ++i)
      for (int k = 0; k < d; ++k) flat[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] = centers_[i][k];
    for (std::size_t m = 0; m < xs.size(); ++m) {
      const Point& x = xs[m];
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
          const double u = x[k] - flat[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)];
          r2 += u * u;
        }
        s += coeffs_[i] * phi_.radial_from_r2(r2);
      }
      out[m] = s;
    }
    return out;
  }
  // sum_{xi < x} a (x - xi)^(k-1), expanded about a shift c: prefix sums of a (xi - c)^i.
  const int deg = phi_.kappa() - 1;
  std::vector<std::size_t> order(centers_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return centers_[a][0] < centers_[b][0]; });
  std::vector<double> sorted(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = centers_[order[i]][0];
  // Blocks keep the shift close to the centers in play.
  const std::size_t block = 64;
  const std::size_t nblocks = (order.size() + block - 1) / block;
  std::vector<double> shift(nblocks);
  std::vector<std::vector<double>> prefix(nblocks);  // cumulative moments of all centers before each block, about its shift
  std::vector<double> binom(static_cast<std::size_t>(deg) + 1, 1.0);
  for (int i = 1; i <= deg; ++i) binom[static_cast<std::size_t>(i)] = binom[static_cast<std::size_t>(i - 1)] * (deg - i + 1) / i;
  // Running moments kept about the current block's shift and re-expanded when it moves.
  std::vector<double> mom(static_cast<std::size_t>(deg) + 1, 0.0);
  double cur = sorted.front();
  for (std::size_t b = 0; b < nblocks; ++b) {
    const double c = sorted[b * block];
    // re-expand mom about c: sum a (xi - c)^i = sum_j C(i,j) (cur - c)^(i-j) sum a (xi - cur)^j
    std::vector<double> re(mom.size(), 0.0);
    const double dshift = cur - c;
    for (int i = 0; i <= deg; ++i) {
      double binij = 1.0;
      for (int j = i; j >= 0; --j) {
        re[static_cast<std::size_t>(i)] += binij * std::pow(dshift, i - j) * mom[static_cast<std::size_t>(j)];
        binij = binij * j / (i - j + 1);
      }
    }
    mom = re;
    cur = c;
    shift[b] = c;
    prefix[b] = mom;
    for (std::size_t k = b * block; k < std::min(order.size(), (b + 1) * block); ++k) {
      const double a = coeffs_[order[k]];
      double p = 1.0;
      for (int i = 0; i <= deg; ++i) {
        mom[static_cast<std::size_t>(i)] += a * p;
        p *= sorted[k] - c;
      }
    }
  }
  const double cst = phi_.constant();
  for (std::size_t n = 0; n < xs.size(); ++n) {
    const double x = xs[n][0];
    const std::size_t cnt = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
    if (cnt == 0) continue;
    const std::size_t b = (cnt - 1) / block;
    const double c = shift[b];
    std::vector<double> m = prefix[b];
    for (std::size_t k = b * block; k < cnt; ++k) {
      const double a = coeffs_[order[k]];
      double p = 1.0;
      for (int i = 0; i <= deg; ++i) {
        m[static_cast<std::size_t>(i)] += a * p;
        p *= sorted[k] - c;
      }
    }
    // (x - xi)^deg = sum_i C(deg,i) (x - c)^(deg-i) (-1)^i (xi - c)^i
    double s = 0.0;
    const double u = x - c;
    for (int i = 0; i <= deg; ++i)
      s += binom[static_cast<std::size_t>(i)] * std::pow(u, deg - i) * ((i % 2) ? -1.0 : 1.0) * m[static_cast<std::size_t>(i)];
    out[n] = cst * s;
  }
  return out;
}

std::string ScatteredApproximant::to_json() const {
  nlohmann::ordered_json j;
  j["basis"] = phi_.describe();
  j["size"] = centers_.size();
  auto& arr = j["terms"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < centers_.size(); ++i)
    arr.push_back({{"center", std::vector<double>(centers_[i].data(), centers_[i].data() + centers_[i].dim())},
                   {"coeff", coeffs_[i]}});
  return j.dump(2);
}

void ScatteredApproximant::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (int i = 0; i < phi_.dim(); ++i) out << "x" << i << ",";
  out << "coeff\n";
  char buf[64];
  for (std::size_t n = 0; n < centers_.size(); ++n) {
    for (int i = 0; i < phi_.dim(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,", centers_[n][i]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", coeffs_[n]);
    out << buf << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

ScatteredApproximant assemble_from_nodes(std::span<const SourceNode> nodes, const CenterSet& centers,
                                         const BasisFunction& phi, const ReproductionConfig& cfg, AssemblyStats* stats) {
  if (centers.dim() != phi.dim()) throw InvalidArgument("center set and basis dimensions differ");
  std::vector<double> a(centers.size(), 0.0);
  AssemblyStats st;
  st.nodes = nodes.size();
  st.min_radius = std::numeric_limits<double>::infinity();
  const Box& region = centers.bounding_box();
  for (const auto& n : nodes) {
    if (n.value == 0.0 || n.weight == 0.0) continue;
    if (!std::isfinite(n.value)) throw InvalidArgument("non-finite Tf at quadrature node " + n.t.to_string());
    if (!region.contains(n.t, 1e-12 * (1.0 + region.distance_to(region.center()))))
      throw InvalidArgument("quadrature node " + n.t.to_string() + " lies outside the region covered by the centers");
    const ReproducingFunctional lam = build_functional(centers, n.t, cfg);
    const double wg = n.weight * n.value;
    for (const auto& term : lam.terms) a[term.index] += wg * term.coeff;
    ++st.active_nodes;
    st.max_enlargements = std::max(st.max_enlargements, lam.enlargements);
    st.max_norm1 = std::max(st.max_norm1, lam.norm1);
    st.min_radius = std::min(st.min_radius, lam.radius);
    st.max_radius = std::max(st.max_radius, lam.radius);
  }
  std::vector<Point> pts;
  std::vector<double> coeffs;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0.0) {
      pts.push_back(centers[i]);
      coeffs.push_back(a[i]);
    }
  st.active_centers = pts.size();
  if (st.active_nodes == 0) st.min_radius = 0.0;
  if (stats) *stats = st;
  return ScatteredApproximant(phi, std::move(pts), std::move(coeffs));
}

std::vector<SourceNode> source_nodes(const AnalyticTestFunction& f, const BasisFunction& phi, const QuadratureSpec& quad) {
  if (f.dim() != phi.dim()) throw InvalidArgument("target and basis dimensions differ");
  if (f.smoothness() < phi.kappa())
    throw InvalidArgument("linear scheme requires a target in C^kappa; '" + f.name() + "' is not (use low-smooth mode)");
  const auto rule = composite_rule(f.support(), quad);
  std::vector<SourceNode> out;
  out.reserve(rule.size());
  for (const auto& q : rule) out.push_back({q.t, q.weight, apply_T(phi, f, q.t)});
  return out;
}

ScatteredApproximant assemble(const AnalyticTestFunction& f, const CenterSet& centers, const BasisFunction& phi,
                              const ReproductionConfig& cfg, const QuadratureSpec& quad, AssemblyStats* stats) {
  const auto nodes = source_nodes(f, phi, quad);
  return assemble_from_nodes(nodes, centers, phi, cfg, stats);
}

double weighted_norm(std::span<const double> g, std::span<const double> H, double s, double p, double cell_volume) {
  if (g.size() != H.size()) throw InvalidArgument("weighted norm: sample and weight lengths differ");
  if (!(p > 0.0)) throw InvalidArgument("weighted norm: p must be positive");
  const bool sup = std::isinf(p);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(H[i] > 0.0)) throw InvalidArgument("weighted norm: majorant must be positive");
    const double v = std::abs(g[i]) * std::pow(H[i], -s);
    if (sup) acc = std::max(acc, v);
    else acc += std::pow(v, p);
  }
  return sup ? acc : std::pow(acc * cell_volume, 1.0 / p);
}

ErrorCertificate error_certificate(const AnalyticTestFunction& f, const ScatteredApproximant& F,
                                   const BasisFunction& phi, const MajorantField& H, double s, double p,
                                   const GridSpec& grid) {
  grid.validate();
  if (!(s >= 0.0) || s > phi.kappa()) throw InvalidArgument("certificate needs 0 <= s <= kappa");
  const std::size_t n = grid.size();
  std::vector<Point> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = grid.node(i);
  const std::vector<double> Fx = F.evaluate(xs);
  std::vector<double> err(n), Hx(n), ref(n), hx(n);
  ErrorCertificate c;
  c.s = s;
  c.p = p;
  c.grid_spacing = grid.spacing;
  c.grid_nodes = n;
  for (std::size_t i = 0; i < n; ++i) {
    err[i] = f(xs[i]) - Fx[i];
    c.sup_error = std::max(c.sup_error, std::abs(err[i]));
    Hx[i] = H(xs[i]);
    hx[i] = std::max(H.density()(xs[i]), H.density().h_min());
    ref[i] = apply_T(phi, f, xs[i]) * std::pow(hx[i], phi.kappa() - s);
  }
  c.weighted_error = weighted_norm(err, Hx, s, p, grid.cell_volume());
  const std::vector<double> ones(n, 1.0);
  c.reference = weighted_norm(ref, ones, 0.0, p, grid.cell_volume());
  c.constant = c.reference > 0.0 ? c.weighted_error / c.reference : 0.0;
  return c;
}

double local_sup_error(const AnalyticTestFunction& f, const ScatteredApproximant& F, const GridSpec& grid,
                       const Box& region) {
  std::vector<Point> xs;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Point x = grid.node(i);
    if (region.contains(x)) xs.push_back(std::move(x));
  }
  const std::vector<double> v = F.evaluate(xs);
  double e = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) e = std::max(e, std::abs(f(xs[i]) - v[i]));
  return e;
}

SchurReport schur_diagnostic(const CenterSet& centers, const BasisFunction& phi, const ReproductionConfig& cfg,
                             const MajorantField& H, double s, const SchurSampling& sampling) {
  sampling.x_grid.validate();
  sampling.t_grid.validate();
  const std::size_t nx = sampling.x_grid.size();
  const std::size_t nt = sampling.t_grid.size();
  std::vector<Point> xs(nx);
  std::vector<double> hx(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    xs[i] = sampling.x_grid.node(i);
    hx[i] = std::pow(H(xs[i]), -s);
  }
  const double vx = sampling.x_grid.cell_volume();
  const double vt = sampling.t_grid.cell_volume();
  const double floor = H.density().h_min();
  std::vector<double> col(nx, 0.0);
  SchurReport rep;
  const bool bound = sampling.kernel == SchurKernel::DecayBound;
  const double hom = phi.kappa() - phi.dim();
  for (std::size_t j = 0; j < nt; ++j) {
    const Point t = sampling.t_grid.node(j);
    double h = 0.0;
    ReproducingFunctional lam;
    if (bound) {
      h = std::max(H.density()(t), floor);
    } else {
      lam = build_functional(centers, t, cfg);
      h = std::max(lam.radius, floor);
    }
    const double ht = std::pow(h, s - phi.kappa());
    const double scale = sampling.bound_constant * std::pow(h, hom);
    double row = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      const double e = bound ? scale * std::pow(1.0 + distance(xs[i], t) / h, -cfg.nu)
                             : std::abs(error_kernel_eval(lam, phi, xs[i]));
      const double k = hx[i] * e * ht;
      row += k * vx;
      col[i] += k * vt;
    }
    rep.row_sup = std::max(rep.row_sup, row);
  }
  for (double c : col) rep.col_sup = std::max(rep.col_sup, c);
  rep.finite = std::isfinite(rep.row_sup) && std::isfinite(rep.col_sup);
  return rep;
}

double schur_ratio_threshold(double nu, int dim) { return std::exp2(-(nu - dim) / 20.0); }

SchurVerdict schur_verdict(std::span<const SchurReport> ladder, double max_increment_ratio, double settle) {
  SchurVerdict v;
  if (ladder.size() < 3) throw InvalidArgument("Schur verdict needs at least three ladder steps");
  std::vector<double> s;
  for (const auto& r : ladder) {
    if (!r.finite) {
      v.reason = "non-finite Schur integral";
      return v;
    }
    s.push_back(std::max(r.row_sup, r.col_sup));
  }
  const std::size_t n = s.size();
  const std::size_t w = std::min<std::size_t>(3, n - 1);
  std::vector<double> inc;
  for (std::size_t i = n - w; i < n; ++i) inc.push_back(s[i] - s[i - 1]);
  bool positive = true;
  for (double d : inc) positive = positive && d > 0.0;
  if (positive) {
    // log increment against step index; slope is log rho
    double mk = 0.0, ml = 0.0;
    for (std::size_t i = 0; i < w; ++i) {
      mk += static_cast<double>(i);
      ml += std::log(inc[i]);
    }
    mk /= static_cast<double>(w);
    ml /= static_cast<double>(w);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < w; ++i) {
      sxy += (static_cast<double>(i) - mk) * (std::log(inc[i]) - ml);
      sxx += (static_cast<double>(i) - mk) * (static_cast<double>(i) - mk);
    }
    v.growth = std::exp(sxy / sxx);
  }
  const double last = inc.back();
  std::ostringstream os;
  os.precision(4);
  if (std::abs(last) <= settle * s[n - 1]) {
    v.pass = true;
    os << "settled: last relative change " << std::abs(last) / s[n - 1];
  } else if (positive && v.growth >= max_increment_ratio) {
    os << "growing: increment ratio " << v.growth << " >= " << max_increment_ratio;
  } else {
    v.pass = true;
    if (positive) os << "converging: increment ratio " << v.growth << " < " << max_increment_ratio;
    else os << "converging: non-monotone increments";
  }
  v.reason = os.str();
  return v;
}

SchurLadder schur_ladder(const BasisFunction& phi, const ReproductionConfig& cfg, double r, double s,
                         const SchurLadderSpec& spec) {
  if (phi.dim() != 1) throw InvalidArgument("the Schur ladder is univariate");
  if (!(spec.fine > 0.0) || spec.coarse < spec.fine || spec.coarse_count < 2 || spec.extents.size() < 3)
    throw InvalidArgument("Schur ladder needs 0 < fine <= coarse, coarse_count >= 2 and three extents");
  SchurLadder out;
  out.r = r;
  out.extents = spec.extents;
  for (double L : spec.extents) {
    if (!(L > 0.0)) throw InvalidArgument("Schur ladder extents must be positive");
    const auto fine_count = static_cast<std::int64_t>(std::llround(L / spec.fine));
    std::vector<Point> pts;
    for (std::int64_t i = fine_count; i > 0; --i) pts.push_back(Point{-static_cast<double>(i) * spec.fine});
    double x = 0.0;
    for (double step = spec.fine; step < spec.coarse; step *= 2.0) {
      pts.push_back(Point{x});
      x += step;
    }
    for (int i = 0; i < spec.coarse_count; ++i) pts.push_back(Point{x + i * spec.coarse});
    const double right = x + (spec.coarse_count - 1) * spec.coarse;
    const CenterSet cs(std::move(pts));
    const GridSpec g = GridSpec::covering(Box{Point{-static_cast<double>(fine_count) * spec.fine}, Point{right}}, spec.fine);
    const DensityField h = build_density(cs, cfg, g);
    const MajorantField H = MajorantField::build_unchecked(h, r);
    SchurSampling sm{g, g, spec.kernel, 1.0};
    out.reports.push_back(schur_diagnostic(cs, phi, cfg, H, s, sm));
  }
  out.verdict = schur_verdict(out.reports, schur_ratio_threshold(cfg.nu, phi.dim()));
  return out;
}

}  // namespace scatshift
