#include "scatshift/wavelets.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"
#include "scatshift/error.hpp"

namespace scatshift {

bool operator<(const WaveletIndex& a, const WaveletIndex& b) {
  if (a.level != b.level) return a.level < b.level;
  if (a.type != b.type) return a.type < b.type;
  return a.k < b.k;
}

WaveletSystem::WaveletSystem(int dim, int vanishing_moments, int max_derivative, int resolution)
    : dim_(dim), max_derivative_(max_derivative), resolution_(resolution), filter_(vanishing_moments) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("wavelet dimension must be in [1, 3]");
  tables_ = build_refinable_tables(filter_, max_derivative, resolution);
  const auto& v = tables_.phi[0].values();
  const std::int64_t scale = std::int64_t{1} << resolution;
  for (int n = 0; n <= filter_.support(); ++n) mu_ += n * v[static_cast<std::size_t>(n * scale)];
}

WaveletSystem WaveletSystem::for_kappa(int dim, int kappa, int resolution) {
  return WaveletSystem(dim, vanishing_moments_for(kappa), kappa, resolution);
}

Box WaveletSystem::cube(const WaveletIndex& v) const {
  const double l = side(v);
  Box b{Point(dim_), Point(dim_)};
  for (int i = 0; i < dim_; ++i) {
    b.lo[i] = l * static_cast<double>(v.k[static_cast<std::size_t>(i)]);
    b.hi[i] = l * static_cast<double>(v.k[static_cast<std::size_t>(i)] + 1);
  }
  return b;
}

Box WaveletSystem::support(const WaveletIndex& v) const {
  const double l = side(v);
  const int a = support_factor();
  Box b{Point(dim_), Point(dim_)};
  for (int i = 0; i < dim_; ++i) {
    b.lo[i] = l * static_cast<double>(v.k[static_cast<std::size_t>(i)]);
    b.hi[i] = l * static_cast<double>(v.k[static_cast<std::size_t>(i)] + a);
  }
  return b;
}

double WaveletSystem::eval_local(int type, bool coarse, const MultiIndex& alpha, const Point& y) const {
  double r = 1.0;
  for (int i = 0; i < dim_; ++i) {
    const int order = alpha[static_cast<std::size_t>(i)];
    if (order > max_derivative_) throw InvalidArgument("derivative order exceeds the wavelet tables");
    const bool psi = !coarse && ((type >> i) & 1);
    const RefinableTable& t = psi ? tables_.psi[static_cast<std::size_t>(order)] : tables_.phi[static_cast<std::size_t>(order)];
    r *= t(y[i]);
    if (r == 0.0) return 0.0;
  }
  return r;
}

double WaveletSystem::eval_derivative(const WaveletIndex& v, const MultiIndex& alpha, const Point& x) const {
  Point y(dim_);
  int total = 0;
  for (int i = 0; i < dim_; ++i) {
    y[i] = std::ldexp(x[i], v.level) - static_cast<double>(v.k[static_cast<std::size_t>(i)]);
    total += alpha[static_cast<std::size_t>(i)];
  }
  return std::ldexp(eval_local(v.type, v.type == 0, alpha, y), v.level * total);
}

double WaveletSystem::eval(const WaveletIndex& v, const Point& x) const {
  return eval_derivative(v, MultiIndex{0, 0, 0}, x);
}

double WaveletSystem::eval_T_local(const BasisFunction& phi, int type, bool coarse, const Point& y) const {
  if (phi.dim() != dim_) throw InvalidArgument("basis and wavelet dimensions differ");
  if (phi.kappa() > max_derivative_) throw InvalidArgument("wavelet tables do not reach the order of T");
  double sum = 0.0;
  if (phi.kind() == BasisKind::TruncatedPower) {
    sum = eval_local(type, coarse, MultiIndex{phi.kappa(), 0, 0}, y);
  } else {
    const int m = phi.m();
    const auto& half = MultiIndexTable::get(dim_, m);
    const double mfact = std::tgamma(m + 1.0);
    for (std::size_t i = half.degree_begin(m); i < half.degree_begin(m + 1); ++i) {
      const MultiIndex& beta = half[i];
      double bfact = 1.0;
      MultiIndex twice{0, 0, 0};
      for (int k = 0; k < dim_; ++k) {
        bfact *= std::tgamma(beta[static_cast<std::size_t>(k)] + 1.0);
        twice[static_cast<std::size_t>(k)] = 2 * beta[static_cast<std::size_t>(k)];
      }
      sum += mfact / bfact * eval_local(type, coarse, twice, y);
    }
  }
  return sum / (phi.fundamental_constant() * phi.constant());
}

double WaveletSystem::eval_T(const BasisFunction& phi, const WaveletIndex& v, const Point& x) const {
  Point y(dim_);
  for (int i = 0; i < dim_; ++i) y[i] = std::ldexp(x[i], v.level) - static_cast<double>(v.k[static_cast<std::size_t>(i)]);
  return std::ldexp(eval_T_local(phi, v.type, v.type == 0, y), v.level * phi.kappa());
}

std::size_t DyadicSamples::size() const {
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(count[static_cast<std::size_t>(i)]);
  return n;
}

Point DyadicSamples::point(std::size_t flat, double mu) const {
  Point p(dim);
  for (int i = 0; i < dim; ++i) {
    const auto n = static_cast<std::size_t>(count[static_cast<std::size_t>(i)]);
    const auto k = lo[static_cast<std::size_t>(i)] + static_cast<std::int64_t>(flat % n);
    flat /= n;
    p[i] = std::ldexp(static_cast<double>(k) + mu, -level);
  }
  return p;
}

WaveletIndex CoefficientBlock::index(std::size_t flat, int dim) const {
  WaveletIndex v;
  v.level = level;
  v.type = type;
  for (int i = 0; i < dim; ++i) {
    const auto n = static_cast<std::size_t>(count[static_cast<std::size_t>(i)]);
    v.k[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] + static_cast<std::int64_t>(flat % n);
    flat /= n;
  }
  return v;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

struct NdArray {
  int dim = 1;
  IntVec lo{0, 0, 0};
  IntVec count{1, 1, 1};
  std::vector<double> v;

  std::size_t size() const {
    std::size_t n = 1;
    for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(count[static_cast<std::size_t>(i)]);
    return n;
  }
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int i = 0; i < axis; ++i) s *= static_cast<std::size_t>(count[static_cast<std::size_t>(i)]);
    return s;
  }
};

NdArray make_array(int dim, const IntVec& lo, const IntVec& count) {
  NdArray a;
  a.dim = dim;
  a.lo = lo;
  a.count = count;
  for (int i = dim; i < kMaxDim; ++i) a.count[static_cast<std::size_t>(i)] = 1;
  a.v.assign(a.size(), 0.0);
  return a;
}

/// Applies a 1D operator along `axis` line by line.
template <class LineOp>
NdArray along_axis(const NdArray& in, int axis, std::int64_t out_lo, std::int64_t out_count, LineOp op) {
  IntVec lo = in.lo, count = in.count;
  lo[static_cast<std::size_t>(axis)] = out_lo;
  count[static_cast<std::size_t>(axis)] = out_count;
  NdArray out = make_array(in.dim, lo, count);
  const std::size_t in_stride = in.stride(axis);
  const std::size_t out_stride = out.stride(axis);
  const auto n_in = static_cast<std::size_t>(in.count[static_cast<std::size_t>(axis)]);
  const auto n_out = static_cast<std::size_t>(out_count);
  // Enumerate lines: all positions with axis index 0.
  const std::size_t total_in = in.size();
  std::vector<double> line_in(n_in), line_out(n_out);
  for (std::size_t base = 0; base < total_in; ++base) {
    if ((base / in_stride) % n_in != 0) continue;
    const std::size_t outer = base / (in_stride * n_in);
    const std::size_t inner = base % in_stride;
    for (std::size_t i = 0; i < n_in; ++i) line_in[i] = in.v[base + i * in_stride];
    op(line_in, line_out);
    const std::size_t obase = outer * out_stride * n_out + inner;
    for (std::size_t i = 0; i < n_out; ++i) out.v[obase + i * out_stride] = line_out[i];
  }
  return out;
}

NdArray analyse(const NdArray& in, int axis, const std::vector<double>& filt) {
  const auto L = static_cast<std::int64_t>(filt.size());
  const std::int64_t lo = in.lo[static_cast<std::size_t>(axis)];
  const std::int64_t hi = lo + in.count[static_cast<std::size_t>(axis)] - 1;
  const std::int64_t klo = ceil_div(lo - (L - 1), 2);
  const std::int64_t khi = floor_div(hi, 2);
  return along_axis(in, axis, klo, khi - klo + 1, [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::int64_t k = klo; k <= khi; ++k) {
      double s = 0.0;
      const std::int64_t n0 = std::max(2 * k, lo), n1 = std::min(2 * k + L - 1, hi);
      for (std::int64_t n = n0; n <= n1; ++n) s += filt[static_cast<std::size_t>(n - 2 * k)] * x[static_cast<std::size_t>(n - lo)];
      y[static_cast<std::size_t>(k - klo)] = s;
    }
  });
}

NdArray synthesise(const NdArray& in, int axis, const std::vector<double>& filt, std::int64_t out_lo, std::int64_t out_count) {
  const auto L = static_cast<std::int64_t>(filt.size());
  const std::int64_t klo = in.lo[static_cast<std::size_t>(axis)];
  return along_axis(in, axis, out_lo, out_count, [&](const std::vector<double>& a, std::vector<double>& x) {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) continue;
      const std::int64_t k = klo + static_cast<std::int64_t>(i);
      for (std::int64_t t = 0; t < L; ++t) {
        const std::int64_t n = 2 * k + t - out_lo;
        if (n >= 0 && n < out_count) x[static_cast<std::size_t>(n)] += filt[static_cast<std::size_t>(t)] * a[i];
      }
    }
  });
}

NdArray embed(const NdArray& in, const IntVec& lo, const IntVec& count) {
  NdArray out = make_array(in.dim, lo, count);
  const std::size_t n = in.size();
  for (std::size_t f = 0; f < n; ++f) {
    std::size_t rem = f, of = 0, stride = 1;
    for (int i = 0; i < in.dim; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const auto c = static_cast<std::int64_t>(rem % static_cast<std::size_t>(in.count[u]));
      rem /= static_cast<std::size_t>(in.count[u]);
      of += static_cast<std::size_t>(in.lo[u] + c - lo[u]) * stride;
      stride *= static_cast<std::size_t>(count[u]);
    }
    out.v[of] = in.v[f];
  }
  return out;
}

}  // namespace

WaveletExpansion::WaveletExpansion(int dim, int base_level, int fine_level, int vanishing_moments,
                                   std::vector<CoefficientBlock> blocks)
    : dim_(dim), j0_(base_level), J_(fine_level), n_(vanishing_moments), blocks_(std::move(blocks)) {
  if (fine_level < base_level) throw InvalidArgument("fine level below base level");
}

std::vector<WaveletTerm> WaveletExpansion::terms() const {
  std::vector<WaveletTerm> out;
  for (const auto& b : blocks_)
    for (std::size_t i = 0; i < b.values.size(); ++i)
      if (b.values[i] != 0.0) out.push_back({b.index(i, dim_), b.values[i]});
  return out;
}

std::size_t WaveletExpansion::nonzero() const {
  std::size_t n = 0;
  for (const auto& b : blocks_)
    for (double v : b.values) n += v != 0.0;
  return n;
}

WaveletExpansion WaveletExpansion::zeros_like() const {
  WaveletExpansion z = *this;
  for (auto& b : z.blocks_) std::fill(b.values.begin(), b.values.end(), 0.0);
  return z;
}

namespace {

std::ptrdiff_t locate(const CoefficientBlock& b, const WaveletIndex& v, int dim) {
  if (b.level != v.level || b.type != v.type) return -1;
  std::size_t flat = 0, stride = 1;
  for (int i = 0; i < dim; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const std::int64_t off = v.k[u] - b.lo[u];
    if (off < 0 || off >= b.count[u]) return -1;
    flat += static_cast<std::size_t>(off) * stride;
    stride *= static_cast<std::size_t>(b.count[u]);
  }
  return static_cast<std::ptrdiff_t>(flat);
}

}  // namespace

double WaveletExpansion::coefficient(const WaveletIndex& v) const {
  for (const auto& b : blocks_)
    if (auto i = locate(b, v, dim_); i >= 0) return b.values[static_cast<std::size_t>(i)];
  return 0.0;
}

void WaveletExpansion::set_coefficient(const WaveletIndex& v, double value) {
  for (auto& b : blocks_)
    if (auto i = locate(b, v, dim_); i >= 0) {
      b.values[static_cast<std::size_t>(i)] = value;
      return;
    }
  throw InvalidArgument("wavelet index outside the expansion layout");
}

namespace {

/// Calls fn(flat) for every k in block with x in the closed support box of v.
template <class Fn>
void for_each_covering(const CoefficientBlock& b, int dim, int support, const Point& x, Fn fn) {
  IntVec lo{0, 0, 0}, hi{0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double y = std::ldexp(x[i], b.level);
    lo[u] = std::max<std::int64_t>(b.lo[u], static_cast<std::int64_t>(std::ceil(y - support)));
    hi[u] = std::min<std::int64_t>(b.lo[u] + b.count[u] - 1, static_cast<std::int64_t>(std::floor(y)));
    if (lo[u] > hi[u]) return;
  }
  IntVec c = lo;
  while (true) {
    std::size_t flat = 0, stride = 1;
    for (int i = 0; i < dim; ++i) {
      const auto u = static_cast<std::size_t>(i);
      flat += static_cast<std::size_t>(c[u] - b.lo[u]) * stride;
      stride *= static_cast<std::size_t>(b.count[u]);
    }
    fn(flat);
    int axis = 0;
    while (axis < dim) {
      const auto u = static_cast<std::size_t>(axis);
      if (++c[u] <= hi[u]) break;
      c[u] = lo[u];
      ++axis;
    }
    if (axis == dim) break;
  }
}

}  // namespace

double WaveletExpansion::eval(const WaveletSystem& sys, const Point& x) const {
  double s = 0.0;
  for (const auto& b : blocks_)
    for_each_covering(b, dim_, sys.support_factor(), x, [&](std::size_t i) {
      if (b.values[i] != 0.0) s += b.values[i] * sys.eval(b.index(i, dim_), x);
    });
  return s;
}

std::string WaveletExpansion::to_json() const {
  nlohmann::ordered_json j;
  j["dim"] = dim_;
  j["family"] = "db" + std::to_string(n_);
  j["base_level"] = j0_;
  j["fine_level"] = J_;
  auto& arr = j["terms"] = nlohmann::ordered_json::array();
  for (const auto& t : terms())
    arr.push_back({{"level", t.v.level},
                   {"type", t.v.type},
                   {"k", std::vector<std::int64_t>(t.v.k.begin(), t.v.k.begin() + dim_)},
                   {"coeff", t.coeff}});
  return j.dump(2);
}

DyadicSamples sample_function(const std::function<double(const Point&)>& f, const Box& box, int level,
                              const WaveletSystem& sys) {
  if (box.dim() != sys.dim()) throw InvalidArgument("sampling box dimension differs from the wavelet system");
  DyadicSamples s;
  s.dim = sys.dim();
  s.level = level;
  const double mu = sys.sample_offset();
  for (int i = 0; i < s.dim; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const auto lo = static_cast<std::int64_t>(std::ceil(std::ldexp(box.lo[i], level) - mu));
    const auto hi = static_cast<std::int64_t>(std::floor(std::ldexp(box.hi[i], level) - mu));
    s.lo[u] = lo;
    s.count[u] = std::max<std::int64_t>(hi - lo + 1, 1);
  }
  s.values.resize(s.size());
  for (std::size_t n = 0; n < s.values.size(); ++n) s.values[n] = f(s.point(n, mu));
  return s;
}

WaveletExpansion decompose(const DyadicSamples& samples, const WaveletSystem& sys, int base_level) {
  const int d = sys.dim();
  if (samples.dim != d) throw InvalidArgument("sample dimension differs from the wavelet system");
  if (samples.values.size() != samples.size()) throw InvalidArgument("sample array size mismatch");
  if (base_level > samples.level) throw InvalidArgument("base level above the sample level");
  for (double v : samples.values)
    if (!std::isfinite(v)) throw InvalidArgument("non-finite sample");
  NdArray cur = make_array(d, samples.lo, samples.count);
  const double in_scale = std::ldexp(1.0, -samples.level * d);
  const double root = std::sqrt(in_scale);
  for (std::size_t i = 0; i < cur.v.size(); ++i) cur.v[i] = samples.values[i] * root;
  const auto& h = sys.filter().lowpass();
  const auto& g = sys.filter().highpass();
  std::vector<CoefficientBlock> blocks;
  for (int j = samples.level; j > base_level; --j) {
    std::map<int, NdArray> parts{{0, cur}};
    for (int axis = 0; axis < d; ++axis) {
      std::map<int, NdArray> next;
      for (auto& [bits, arr] : parts) {
        next[bits] = analyse(arr, axis, h);
        next[bits | (1 << axis)] = analyse(arr, axis, g);
      }
      parts.swap(next);
    }
    const double to_inf = std::sqrt(std::ldexp(1.0, (j - 1) * d));
    for (int e = (1 << d) - 1; e >= 1; --e) {
      CoefficientBlock b;
      b.level = j - 1;
      b.type = e;
      b.lo = parts[e].lo;
      b.count = parts[e].count;
      b.values = parts[e].v;
      for (double& v : b.values) v *= to_inf;
      blocks.push_back(std::move(b));
    }
    cur = parts[0];
  }
  CoefficientBlock coarse;
  coarse.level = base_level;
  coarse.type = 0;
  coarse.lo = cur.lo;
  coarse.count = cur.count;
  coarse.values = cur.v;
  const double to_inf = std::sqrt(std::ldexp(1.0, base_level * d));
  for (double& v : coarse.values) v *= to_inf;
  blocks.push_back(std::move(coarse));
  // Coarse first, then levels ascending with types ascending.
  std::reverse(blocks.begin(), blocks.end());
  return WaveletExpansion(d, base_level, samples.level, sys.vanishing_moments(), std::move(blocks));
}

DyadicSamples reconstruct(const WaveletExpansion& expansion, const WaveletSystem& sys) {
  const int d = sys.dim();
  if (expansion.dim() != d) throw InvalidArgument("expansion dimension differs from the wavelet system");
  const auto& h = sys.filter().lowpass();
  const auto& g = sys.filter().highpass();
  const auto L = static_cast<std::int64_t>(h.size());
  const int j0 = expansion.base_level();
  auto to_array = [&](const CoefficientBlock& b) {
    NdArray a = make_array(d, b.lo, b.count);
    const double scale = 1.0 / std::sqrt(std::ldexp(1.0, b.level * d));
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] = b.values[i] * scale;
    return a;
  };
  NdArray cur;
  bool have = false;
  for (const auto& b : expansion.blocks())
    if (b.type == 0 && b.level == j0) {
      cur = to_array(b);
      have = true;
    }
  if (!have) throw InvalidArgument("expansion has no coarse block");
  for (int j = j0; j < expansion.fine_level(); ++j) {
    std::map<int, NdArray> parts{{0, cur}};
    for (const auto& b : expansion.blocks())
      if (b.level == j && b.type > 0) parts[b.type] = to_array(b);
    // Common index box for all parts at this level.
    IntVec lo = cur.lo, hi{0, 0, 0};
    for (int i = 0; i < d; ++i) hi[static_cast<std::size_t>(i)] = cur.lo[static_cast<std::size_t>(i)] + cur.count[static_cast<std::size_t>(i)] - 1;
    for (auto& [bits, arr] : parts)
      for (int i = 0; i < d; ++i) {
        const auto u = static_cast<std::size_t>(i);
        lo[u] = std::min(lo[u], arr.lo[u]);
        hi[u] = std::max(hi[u], arr.lo[u] + arr.count[u] - 1);
      }
    IntVec count{1, 1, 1};
    for (int i = 0; i < d; ++i) count[static_cast<std::size_t>(i)] = hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)] + 1;
    for (int e = 0; e < (1 << d); ++e) {
      if (parts.count(e)) parts[e] = embed(parts[e], lo, count);
      else parts[e] = make_array(d, lo, count);
    }
    for (int axis = d - 1; axis >= 0; --axis) {
      std::map<int, NdArray> next;
      const auto u = static_cast<std::size_t>(axis);
      const std::int64_t out_lo = 2 * lo[u];
      const std::int64_t out_count = 2 * (hi[u] - lo[u]) + L;
      for (auto& [bits, arr] : parts) {
        if (bits & (1 << axis)) continue;
        NdArray a = synthesise(arr, axis, h, out_lo, out_count);
        const NdArray b = synthesise(parts[bits | (1 << axis)], axis, g, out_lo, out_count);
        for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
        next[bits] = std::move(a);
      }
      parts.swap(next);
    }
    cur = parts[0];
  }
  DyadicSamples s;
  s.dim = d;
  s.level = expansion.fine_level();
  s.lo = cur.lo;
  s.count = cur.count;
  const double scale = std::sqrt(std::ldexp(1.0, s.level * d));
  s.values = cur.v;
  for (double& v : s.values) v *= scale;
  return s;
}

double maximal_function(const WaveletExpansion& expansion, const WaveletSystem& sys, double s, double q, const Point& x) {
  if (!(q > 0.0)) throw InvalidArgument("maximal function needs q > 0");
  const bool sup = std::isinf(q);
  double acc = 0.0;
  for (const auto& b : expansion.blocks()) {
    const double lsc = std::ldexp(1.0, b.level);  // l(v)^-1
    const double w = std::pow(lsc, s);
    for_each_covering(b, expansion.dim(), sys.support_factor(), x, [&](std::size_t i) {
      const double v = w * std::abs(b.values[i]);
      if (sup) acc = std::max(acc, v);
      else acc += std::pow(v, q);
    });
  }
  return sup ? acc : std::pow(acc, 1.0 / q);
}

TlNorm tl_norm(const WaveletExpansion& expansion, const WaveletSystem& sys, double s, double p, double q,
               const GridSpec& grid) {
  grid.validate();
  if (!(p > 0.0)) throw InvalidArgument("tl norm needs p > 0");
  const bool sup = std::isinf(p);
  double acc = 0.0;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double m = maximal_function(expansion, sys, s, q, grid.node(n));
    if (sup) acc = std::max(acc, m);
    else acc += std::pow(m, p);
  }
  TlNorm out;
  out.seminorm = sup ? acc : std::pow(acc * grid.cell_volume(), 1.0 / p);
  const DyadicSamples f = reconstruct(expansion, sys);
  double fp = 0.0;
  for (double v : f.values) fp = sup ? std::max(fp, std::abs(v)) : fp + std::pow(std::abs(v), p);
  if (!sup) fp = std::pow(fp * std::ldexp(1.0, -f.level * f.dim), 1.0 / p);
  out.norm = out.seminorm + fp;
  return out;
}

DensitySplit split_by_density(const WaveletExpansion& expansion, const WaveletSystem& sys, const DensityField& h) {
  const GridSpec& g = h.grid();
  if (g.dim() != expansion.dim()) throw InvalidArgument("density and expansion dimensions differ");
  DensitySplit out{expansion.zeros_like(), expansion.zeros_like()};
  for (std::size_t bi = 0; bi < expansion.blocks().size(); ++bi) {
    const auto& b = expansion.blocks()[bi];
    for (std::size_t i = 0; i < b.values.size(); ++i) {
      if (b.values[i] == 0.0) continue;
      const WaveletIndex v = b.index(i, expansion.dim());
      bool plus = b.type == 0;
      if (!plus) {
        const Box box = sys.support(v);
        double hv = 0.0;
        IntVec lo{0, 0, 0}, hi{0, 0, 0};
        bool any = true;
        for (int a = 0; a < g.dim(); ++a) {
          const auto u = static_cast<std::size_t>(a);
          lo[u] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((box.lo[a] - g.origin[a]) / g.spacing)));
          hi[u] = std::min<std::int64_t>(g.counts[u] - 1, static_cast<std::int64_t>(std::floor((box.hi[a] - g.origin[a]) / g.spacing)));
          any = any && lo[u] <= hi[u];
        }
        if (any) {
          IntVec c = lo;
          while (true) {
            hv = std::max(hv, h.at_node(g.flat_index(c)));
            int axis = 0;
            while (axis < g.dim()) {
              const auto u = static_cast<std::size_t>(axis);
              if (++c[u] <= hi[u]) break;
              c[u] = lo[u];
              ++axis;
            }
            if (axis == g.dim()) break;
          }
        } else {
          hv = h(box.center());
        }
        plus = WaveletSystem::side(v) >= hv;
      }
      (plus ? out.plus : out.minus).blocks()[bi].values[i] = b.values[i];
    }
  }
  return out;
}

}  // namespace scatshift
