#include "scatshift/geometry.hpp"

#include <cmath>
#include <sstream>

#include "scatshift/error.hpp"

namespace scatshift {

Point::Point(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("point dimension must be in [1, 3], got " + std::to_string(dim));
}

Point::Point(std::initializer_list<double> coords) : Point(static_cast<int>(coords.size())) {
  int i = 0;
  for (double v : coords) c_[static_cast<std::size_t>(i++)] = v;
}

Point Point::from_span(std::span<const double> coords) {
  Point p(static_cast<int>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) p.c_[i] = coords[i];
  return p;
}

Point Point::filled(int dim, double value) {
  Point p(dim);
  for (int i = 0; i < dim; ++i) p[i] = value;
  return p;
}

Point& Point::operator+=(const Point& o) {
  for (int i = 0; i < dim_; ++i) c_[static_cast<std::size_t>(i)] += o[i];
  return *this;
}

Point& Point::operator-=(const Point& o) {
  for (int i = 0; i < dim_; ++i) c_[static_cast<std::size_t>(i)] -= o[i];
  return *this;
}

Point& Point::operator*=(double a) {
  for (int i = 0; i < dim_; ++i) c_[static_cast<std::size_t>(i)] *= a;
  return *this;
}

double Point::norm2() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += c_[static_cast<std::size_t>(i)] * c_[static_cast<std::size_t>(i)];
  return s;
}

double Point::norm() const { return std::sqrt(norm2()); }

bool Point::finite() const {
  for (int i = 0; i < dim_; ++i)
    if (!std::isfinite(c_[static_cast<std::size_t>(i)])) return false;
  return true;
}

std::string Point::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (int i = 0; i < dim_; ++i) os << (i ? ", " : "") << c_[static_cast<std::size_t>(i)];
  os << ')';
  return os.str();
}

bool operator==(const Point& a, const Point& b) {
  if (a.dim_ != b.dim_) return false;
  for (int i = 0; i < a.dim_; ++i)
    if (a[i] != b[i]) return false;
  return true;
}

Point operator+(Point a, const Point& b) { return a += b; }
Point operator-(Point a, const Point& b) { return a -= b; }
Point operator*(double s, Point a) { return a *= s; }

double distance2(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double distance(const Point& a, const Point& b) { return std::sqrt(distance2(a, b)); }

bool lex_less(const Point& a, const Point& b) {
  for (int i = 0; i < a.dim(); ++i) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return false;
}

bool Box::contains(const Point& x, double slack) const {
  for (int i = 0; i < dim(); ++i)
    if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= side(i);
  return v;
}

Point Box::center() const {
  Point c(dim());
  for (int i = 0; i < dim(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
  return c;
}

Box Box::padded(double pad) const {
  Box b = *this;
  for (int i = 0; i < dim(); ++i) {
    b.lo[i] -= pad;
    b.hi[i] += pad;
  }
  return b;
}

double Box::distance_to(const Point& x) const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) {
    double d = 0.0;
    if (x[i] < lo[i]) d = lo[i] - x[i];
    else if (x[i] > hi[i]) d = x[i] - hi[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Box Box::unit(int dim) { return cube(dim, 0.0, 1.0); }

Box Box::cube(int dim, double lo, double hi) { return Box{Point::filled(dim, lo), Point::filled(dim, hi)}; }

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int i = 0; i < dim(); ++i) n *= static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]);
  return n;
}

std::array<std::int64_t, kMaxDim> GridSpec::multi_index(std::size_t flat) const {
  std::array<std::int64_t, kMaxDim> idx{0, 0, 0};
  for (int i = 0; i < dim(); ++i) {
    const auto n = static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]);
    idx[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(flat % n);
    flat /= n;
  }
  return idx;
}

std::size_t GridSpec::flat_index(const std::array<std::int64_t, kMaxDim>& idx) const {
  std::size_t flat = 0;
  for (int i = dim() - 1; i >= 0; --i)
    flat = flat * static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]) +
           static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
  return flat;
}

Point GridSpec::node(std::size_t flat) const {
  const auto idx = multi_index(flat);
  Point p = origin;
  for (int i = 0; i < dim(); ++i) p[i] += spacing * static_cast<double>(idx[static_cast<std::size_t>(i)]);
  return p;
}

std::array<std::int64_t, kMaxDim> GridSpec::nearest(const Point& x) const {
  std::array<std::int64_t, kMaxDim> idx{0, 0, 0};
  for (int i = 0; i < dim(); ++i) {
    const auto n = counts[static_cast<std::size_t>(i)];
    auto k = static_cast<std::int64_t>(std::llround((x[i] - origin[i]) / spacing));
    if (k < 0) k = 0;
    if (k > n - 1) k = n - 1;
    idx[static_cast<std::size_t>(i)] = k;
  }
  return idx;
}

Box GridSpec::bounds() const {
  Box b{origin, origin};
  for (int i = 0; i < dim(); ++i)
    b.hi[i] += spacing * static_cast<double>(counts[static_cast<std::size_t>(i)] - 1);
  return b;
}

double GridSpec::cell_volume() const { return std::pow(spacing, dim()); }

GridSpec GridSpec::covering(const Box& box, double h) {
  if (!(h > 0.0)) throw InvalidArgument("grid spacing must be positive");
  double longest = 0.0;
  for (int i = 0; i < box.dim(); ++i) longest = std::max(longest, box.side(i));
  const auto cells = static_cast<std::int64_t>(std::ceil(longest / h - 1e-12));
  GridSpec g;
  g.origin = box.lo;
  g.spacing = cells > 0 ? longest / static_cast<double>(cells) : h;
  for (int i = 0; i < box.dim(); ++i)
    g.counts[static_cast<std::size_t>(i)] =
        static_cast<std::int64_t>(std::llround(box.side(i) / g.spacing)) + 1;
  return g;
}

GridSpec GridSpec::cell_centred(const Box& box, double h) {
  if (!(h > 0.0)) throw InvalidArgument("grid spacing must be positive");
  GridSpec g;
  g.origin = box.lo;
  g.spacing = h;
  for (int i = 0; i < box.dim(); ++i) {
    const auto n = static_cast<std::int64_t>(std::llround(box.side(i) / h));
    g.counts[static_cast<std::size_t>(i)] = std::max<std::int64_t>(n, 1);
    g.origin[i] += 0.5 * h;
  }
  return g;
}

void GridSpec::validate() const {
  if (dim() < 1) throw InvalidArgument("grid has no dimension");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidArgument("grid spacing must be positive and finite");
  for (int i = 0; i < dim(); ++i)
    if (counts[static_cast<std::size_t>(i)] < 1) throw InvalidArgument("grid counts must be positive");
}

}  // namespace scatshift
