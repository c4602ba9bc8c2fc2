#include "scatshift/nterm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "scatshift/error.hpp"

namespace scatshift {

int NTermConfig::degree(const BasisFunction& phi) const {
  return phi.kappa() - phi.dim() + static_cast<int>(std::ceil(nu));
}

long long NTermConfig::n0(const BasisFunction& phi) const {
  long long r = 1;
  for (int i = 0; i < phi.dim(); ++i) r *= degree(phi);
  return r;
}

int NTermConfig::quadrature_level(int dim) const {
  if (quad_level > 0) return quad_level;
  return dim == 1 ? 8 : dim == 2 ? 4 : 2;
}

ReproductionConfig NTermConfig::reproduction(const BasisFunction& phi) const {
  return ReproductionConfig::for_basis(phi, nu, extra_points);
}

void NTermConfig::validate(const BasisFunction& phi) const {
  const int d = phi.dim();
  if (!(nu > 2.0 * d)) throw InvalidArgument("nterm requires nu > 2d");
  if (!(s > 0.0) || s > phi.kappa()) throw InvalidArgument("nterm requires 0 < s <= kappa");
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("nterm requires 1 <= p < infinity");
  if (fine_level < base_level) throw InvalidArgument("fine level below base level");
  if (fine_level > 24) throw InvalidArgument("fine level above 24");
  if (quad_level < 0) throw InvalidArgument("quadrature level must be non-negative");
  if (extra_points < 0) throw InvalidArgument("extra_points must be non-negative");
}

long long integer_root(long long n, int d) {
  if (n < 0 || d < 1) throw InvalidArgument("integer_root needs n >= 0 and d >= 1");
  auto pw = [d](long long m) {
    long long r = 1;
    for (int i = 0; i < d; ++i) r *= m;
    return r;
  };
  auto m = static_cast<long long>(std::floor(std::pow(static_cast<double>(n), 1.0 / d)));
  while (m > 0 && pw(m) > n) --m;
  while (pw(m + 1) <= n) ++m;
  return m;
}

namespace {

template <class Fn>
void for_each_multi(int dim, long long per_axis, Fn fn) {
  std::array<long long, kMaxDim> i{0, 0, 0};
  while (true) {
    fn(i);
    int a = 0;
    while (a < dim) {
      if (++i[static_cast<std::size_t>(a)] < per_axis) break;
      i[static_cast<std::size_t>(a)] = 0;
      ++a;
    }
    if (a == dim) return;
  }
}

double grid_coordinate(std::int64_t k, long long m, int a0, long long i, int level) {
  const double num = static_cast<double>(k * (m - 1) + static_cast<long long>(a0) * i);
  return std::ldexp(num / static_cast<double>(m - 1), -level);
}

}  // namespace

std::vector<Point> local_grid(const WaveletIndex& v, long long N, const WaveletSystem& sys, long long n0) {
  if (N < n0) throw InvalidArgument("local grid budget " + std::to_string(N) + " is below N0 = " + std::to_string(n0));
  const int d = sys.dim();
  const long long m = integer_root(N, d);
  if (m < 2) throw InvalidArgument("local grid needs at least two points per axis");
  std::vector<Point> out;
  for_each_multi(d, m, [&](const std::array<long long, kMaxDim>& i) {
    Point p(d);
    for (int a = 0; a < d; ++a) p[a] = grid_coordinate(v.k[static_cast<std::size_t>(a)], m, sys.support_factor(), i[static_cast<std::size_t>(a)], v.level);
    out.push_back(p);
  });
  return out;
}

WaveletApproximant wavelet_approximant(const WaveletIndex& v, long long N, const WaveletSystem& sys,
                                       const BasisFunction& phi, const NTermConfig& cfg) {
  cfg.validate(phi);
  const int d = sys.dim();
  if (phi.dim() != d) throw InvalidArgument("basis and wavelet dimensions differ");
  const int R = cfg.quadrature_level(d);
  if (R > sys.resolution()) throw InvalidArgument("quadrature level exceeds the wavelet table resolution");
  const CenterSet cs(local_grid(v, N, sys, cfg.n0(phi)));
  const long long per_axis = static_cast<long long>(sys.support_factor()) * (1LL << R) + 1;
  const double weight = std::ldexp(1.0, -(v.level + R) * d);
  std::vector<SourceNode> nodes;
  for_each_multi(d, per_axis, [&](const std::array<long long, kMaxDim>& i) {
    Point y(d), t(d);
    for (int a = 0; a < d; ++a) {
      const auto u = static_cast<std::size_t>(a);
      y[a] = std::ldexp(static_cast<double>(i[u]), -R);
      t[a] = std::ldexp(static_cast<double>((v.k[u] << R) + i[u]), -(v.level + R));
    }
    const double g = sys.eval_T_local(phi, v.type, v.type == 0, y);
    if (g != 0.0) nodes.push_back({t, weight, std::ldexp(g, v.level * phi.kappa())});
  });
  return WaveletApproximant{assemble_from_nodes(nodes, cs, phi, cfg.reproduction(phi)), N, integer_root(N, d),
                            nodes.size()};
}

ErrorProfile error_profile(const WaveletIndex& v, const WaveletApproximant& wa, const WaveletSystem& sys,
                           const BasisFunction& phi, const NTermConfig& cfg, double grow, int per_unit) {
  if (per_unit < 1 || !(grow >= 0.0)) throw InvalidArgument("error profile sampling must be positive");
  const int d = sys.dim();
  const int a0 = sys.support_factor();
  const Box box = sys.support(v);
  const double l = WaveletSystem::side(v);
  const auto lo = static_cast<long long>(std::floor(-grow * a0 * per_unit));
  const auto n = static_cast<long long>(std::ceil((1.0 + 2.0 * grow) * a0 * per_unit)) + 1;
  std::vector<Point> xs;
  for_each_multi(d, n, [&](const std::array<long long, kMaxDim>& i) {
    Point x(d);
    for (int a = 0; a < d; ++a) {
      const double y = static_cast<double>(lo + i[static_cast<std::size_t>(a)]) / per_unit;
      x[a] = std::ldexp(static_cast<double>(v.k[static_cast<std::size_t>(a)]) + y, -v.level);
    }
    xs.push_back(x);
  });
  const std::vector<double> s = wa.S.evaluate(xs);
  ErrorProfile out;
  const double scale = std::pow(static_cast<double>(wa.n), static_cast<double>(phi.kappa()) / d);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = std::abs(sys.eval(v, xs[i]) - s[i]);
    const double dist = box.distance_to(xs[i]) / l;
    out.sup_error = std::max(out.sup_error, e);
    out.normalized = std::max(out.normalized, e * scale * std::pow(1.0 + dist, cfg.nu - d));
    if (dist > 0.0) {
      out.dist.push_back(dist);
      out.error.push_back(e);
    }
  }
  // Tail slope over samples at least one cube length away.
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < out.dist.size(); ++i)
    if (out.dist[i] >= 1.0 && out.error[i] > 1e-9 * out.sup_error) {
      lx.push_back(std::log(1.0 + out.dist[i]));
      ly.push_back(std::log(out.error[i]));
    }
  if (lx.size() >= 3) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    out.tail_slope = sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
  } else {
    out.tail_slope = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

bool order_greater(const WaveletIndex& a, const WaveletIndex& b) {
  if (a.level != b.level) return a.level < b.level;
  if (a.type != b.type) return a.type > b.type;
  return a.k > b.k;
}

namespace {

struct CubeKey {
  int level;
  IntVec k;
  bool operator==(const CubeKey& o) const { return level == o.level && k == o.k; }
};

struct CubeHash {
  std::size_t operator()(const CubeKey& c) const {
    std::size_t h = std::hash<int>()(c.level);
    for (auto v : c.k) h = h * 1000003u ^ std::hash<std::int64_t>()(v);
    return h;
  }
};

CubeKey parent(const CubeKey& c) {
  CubeKey p{c.level - 1, c.k};
  for (auto& v : p.k) v >>= 1;  // floor division by 2
  return p;
}

}  // namespace

std::vector<double> ordered_partial_sums(const WaveletExpansion& exp, double s, double q) {
  if (!(q > 0.0) || std::isinf(q)) throw InvalidArgument("ordered partial sums need finite q > 0");
  const auto terms = exp.terms();
  struct Cube {
    std::array<double, 8> by_type{};
    double above = 0.0;  // sum over strictly coarser cubes containing this one
    bool done = false;
  };
  std::unordered_map<CubeKey, Cube, CubeHash> cubes;
  std::vector<double> w(terms.size());
  const int j0 = exp.base_level();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    w[i] = std::pow(std::ldexp(1.0, t.v.level) , q * s) * std::pow(std::abs(t.coeff), q);
    CubeKey key{t.v.level, t.v.k};
    cubes[key].by_type[static_cast<std::size_t>(t.v.type)] += w[i];
    while (key.level > j0) {
      key = parent(key);
      if (!cubes.emplace(key, Cube{}).second) break;
    }
  }
  // Resolve `above` from the coarse level downwards.
  std::vector<CubeKey> keys;
  keys.reserve(cubes.size());
  for (const auto& kv : cubes) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end(), [](const CubeKey& a, const CubeKey& b) { return a.level < b.level; });
  for (const auto& key : keys) {
    Cube& c = cubes[key];
    if (key.level > j0) {
      const Cube& pc = cubes.at(parent(key));
      c.above = pc.above + std::accumulate(pc.by_type.begin(), pc.by_type.end(), 0.0);
    }
    c.done = true;
  }
  std::vector<double> out(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Cube& c = cubes.at(CubeKey{terms[i].v.level, terms[i].v.k});
    double same = 0.0;
    for (std::size_t e = static_cast<std::size_t>(terms[i].v.type); e < c.by_type.size(); ++e) same += c.by_type[e];
    out[i] = c.above + same;
  }
  return out;
}

double tl_seminorm_power(const WaveletExpansion& exp, const WaveletSystem& sys, double s, double q, double tau) {
  if (!(q > 0.0) || std::isinf(q) || !(tau > 0.0)) throw InvalidArgument("seminorm power needs finite q, tau > 0");
  const int d = exp.dim();
  const int a0 = sys.support_factor();
  // Per level: sum of l^-qs |f_v|^q over terms whose support covers each cube of that level.
  std::map<int, std::unordered_map<CubeKey, double, CubeHash>> cover;
  for (const auto& t : exp.terms()) {
    const double w = std::pow(std::ldexp(1.0, t.v.level), q * s) * std::pow(std::abs(t.coeff), q);
    auto& lvl = cover[t.v.level];
    for_each_multi(d, a0, [&](const std::array<long long, kMaxDim>& i) {
      CubeKey key{t.v.level, t.v.k};
      for (int a = 0; a < d; ++a) key.k[static_cast<std::size_t>(a)] += i[static_cast<std::size_t>(a)];
      lvl[key] += w;
    });
  }
  if (cover.empty()) return 0.0;
  const int top = cover.begin()->first;
  const int bottom = cover.rbegin()->first;
  // refine[L]: cubes at level L containing a covered cube of a finer level.
  std::map<int, std::unordered_set<CubeKey, CubeHash>> refine;
  for (int L = bottom - 1; L >= top; --L) {
    auto& r = refine[L];
    if (auto it = cover.find(L + 1); it != cover.end())
      for (const auto& kv : it->second) r.insert(parent(kv.first));
    for (const auto& c : refine[L + 1]) r.insert(parent(c));
  }
  double total = 0.0;
  const double expo = tau / q;
  auto cov = [&](const CubeKey& c) {
    auto it = cover.find(c.level);
    if (it == cover.end()) return 0.0;
    auto jt = it->second.find(c);
    return jt == it->second.end() ? 0.0 : jt->second;
  };
  // Depth-first over cubes; M^q is constant on cubes with nothing finer inside.
  std::vector<std::pair<CubeKey, double>> stack;
  std::unordered_set<CubeKey, CubeHash> roots;
  for (const auto& kv : cover[top]) roots.insert(kv.first);
  for (const auto& c : refine[top]) roots.insert(c);
  for (const auto& c : roots) stack.emplace_back(c, 0.0);
  while (!stack.empty()) {
    auto [c, acc] = stack.back();
    stack.pop_back();
    acc += cov(c);
    const auto rit = refine.find(c.level);
    if (rit != refine.end() && rit->second.count(c)) {
      for_each_multi(d, 2, [&](const std::array<long long, kMaxDim>& i) {
        CubeKey child{c.level + 1, c.k};
        for (int a = 0; a < d; ++a) child.k[static_cast<std::size_t>(a)] = 2 * c.k[static_cast<std::size_t>(a)] + i[static_cast<std::size_t>(a)];
        stack.emplace_back(child, acc);
      });
    } else if (acc > 0.0) {
      total += std::pow(acc, expo) * std::ldexp(1.0, -c.level * d);
    }
  }
  return total;
}

CostAllocation allocate(const WaveletExpansion& exp, long long N, const NTermConfig& cfg, const WaveletSystem& sys,
                        const BasisFunction& phi) {
  cfg.validate(phi);
  if (N < 0) throw InvalidArgument("budget must be non-negative");
  const int d = exp.dim();
  const double tau = cfg.tau(d), q = cfg.q(d);
  const auto terms = exp.terms();
  if (terms.empty()) throw InvalidArgument("cannot allocate a budget for the zero expansion");
  const std::vector<double> mq = ordered_partial_sums(exp, cfg.s, q);
  CostAllocation out;
  out.budget = N;
  out.n0 = cfg.n0(phi);
  std::vector<double> raw(terms.size());
  double raw_sum = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double vol = std::ldexp(1.0, -terms[i].v.level * d);
    raw[i] = std::pow(vol * std::abs(terms[i].coeff), q) * std::pow(mq[i], (tau - q) / q);
    raw_sum += raw[i];
  }
  out.norm_tau = cfg.budget_tight ? raw_sum : tl_seminorm_power(exp, sys, cfg.s, q, tau);
  if (!(out.norm_tau > 0.0)) throw InvalidArgument("target has zero F-norm");
  out.a = static_cast<double>(N) / out.norm_tau;
  auto total = [&] {
    double t = 0.0;
    for (double r : raw) t += out.a * r;
    return t;
  };
  double sum = total();
  while (sum > static_cast<double>(N)) {
    out.a *= static_cast<double>(N) / sum * (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
    out.rescaled = true;
    sum = total();
  }
  out.total_cost = sum;
  out.entries.resize(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    CostEntry& e = out.entries[i];
    e.v = terms[i].v;
    e.coeff = terms[i].coeff;
    e.m_qv = std::pow(mq[i], 1.0 / q);
    e.cost = out.a * raw[i];
    e.n = e.cost >= static_cast<double>(out.n0) ? static_cast<long long>(std::floor(e.cost)) : 0;
    out.total_n += e.n;
  }
  return out;
}

const WaveletApproximant& ReferenceCache::get(int type, long long m, const WaveletSystem& sys, const BasisFunction& phi,
                                              const NTermConfig& cfg) {
  for (const auto& e : entries_)
    if (e.type == type && e.m == m) return e.wa;
  long long n = 1;
  for (int i = 0; i < sys.dim(); ++i) n *= m;
  WaveletIndex ref;
  ref.level = 0;
  ref.type = type;
  entries_.push_back({type, m, wavelet_approximant(ref, n, sys, phi, cfg)});
  return entries_.back().wa;
}

NTermApproximant nterm_approximate(const WaveletExpansion& exp, long long N, const NTermConfig& cfg,
                                   const WaveletSystem& sys, const BasisFunction& phi, ReferenceCache* cache) {
  if (N < 1) throw InvalidArgument("budget must be at least 1");
  if (exp.dim() != sys.dim() || phi.dim() != sys.dim()) throw InvalidArgument("dimension mismatch in nterm_approximate");
  ReferenceCache local;
  ReferenceCache& refs = cache ? *cache : local;
  NTermApproximant out{ScatteredApproximant(phi, {}, {}), {}, allocate(exp, N, cfg, sys, phi)};
  const int d = sys.dim();
  const int a0 = sys.support_factor();
  std::map<std::array<double, kMaxDim>, double> merged;
  for (const auto& e : out.allocation.entries) {
    if (e.n == 0) {
      ++out.skipped_terms;
      out.skipped_coefficient_sum += std::abs(e.coeff);
      continue;
    }
    const long long m = integer_root(e.n, d);
    const WaveletApproximant& ref = refs.get(e.v.type, m, sys, phi, cfg);
    const double scale = e.coeff * std::ldexp(1.0, e.v.level * (phi.kappa() - d));
    const auto& eta = ref.S.centers();
    const auto& coef = ref.S.coeffs();
    for (std::size_t c = 0; c < eta.size(); ++c) {
      std::array<double, kMaxDim> key{0.0, 0.0, 0.0};
      for (int a = 0; a < d; ++a) {
        const long long i = std::llround(eta[c][a] * static_cast<double>(m - 1) / a0);
        key[static_cast<std::size_t>(a)] = grid_coordinate(e.v.k[static_cast<std::size_t>(a)], m, a0, i, e.v.level);
      }
      merged[key] += scale * coef[c];
    }
    long long grid = 1;
    for (int a = 0; a < d; ++a) grid *= m;
    out.raw_centers += static_cast<std::size_t>(grid);
    out.contributions.push_back({e.v, e.n, m, static_cast<std::size_t>(grid)});
  }
  std::vector<Point> centers;
  std::vector<double> coeffs;
  centers.reserve(merged.size());
  for (const auto& [key, c] : merged) {
    Point p(d);
    for (int a = 0; a < d; ++a) p[a] = key[static_cast<std::size_t>(a)];
    centers.push_back(p);
    coeffs.push_back(c);
  }
  out.distinct_centers = centers.size();
  out.S = ScatteredApproximant(phi, std::move(centers), std::move(coeffs));
  return out;
}

WaveletExpansion expand_target(const AnalyticTestFunction& f, const NTermConfig& cfg, const WaveletSystem& sys) {
  if (f.dim() != sys.dim()) throw InvalidArgument("target and wavelet dimensions differ");
  const DyadicSamples s = sample_function([&f](const Point& x) { return f(x); }, f.support(), cfg.fine_level, sys);
  return decompose(s, sys, cfg.base_level);
}

NTermApproximant nterm_approximate(const AnalyticTestFunction& f, long long N, const NTermConfig& cfg,
                                   const WaveletSystem& sys, const BasisFunction& phi, ReferenceCache* cache) {
  return nterm_approximate(expand_target(f, cfg, sys), N, cfg, sys, phi, cache);
}

std::string NTermApproximant::to_json() const {
  nlohmann::ordered_json j;
  j["budget"] = allocation.budget;
  j["n0"] = allocation.n0;
  j["a"] = allocation.a;
  j["norm_tau"] = allocation.norm_tau;
  j["total_cost"] = allocation.total_cost;
  j["total_n"] = allocation.total_n;
  j["rescaled"] = allocation.rescaled;
  j["raw_centers"] = raw_centers;
  j["distinct_centers"] = distinct_centers;
  j["skipped_terms"] = skipped_terms;
  j["skipped_coefficient_sum"] = skipped_coefficient_sum;
  auto& arr = j["contributions"] = nlohmann::ordered_json::array();
  const int d = S.basis().dim();
  for (const auto& c : contributions)
    arr.push_back({{"level", c.v.level},
                   {"type", c.v.type},
                   {"k", std::vector<std::int64_t>(c.v.k.begin(), c.v.k.begin() + d)},
                   {"n", c.n},
                   {"m", c.m},
                   {"centers", c.centers}});
  j["approximant"] = nlohmann::ordered_json::parse(S.to_json());
  return j.dump(2);
}

double partial_sum_ratio(std::span<const double> z, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("epsilon must be positive");
  double Z = 0.0, sum = 0.0;
  for (double v : z) {
    if (v < 0.0) throw InvalidArgument("series must be non-negative");
    Z += v;
    if (v > 0.0) sum += v / std::pow(Z, 1.0 - eps);
  }
  return Z > 0.0 ? sum / std::pow(Z, eps) : 0.0;
}

}  // namespace scatshift
