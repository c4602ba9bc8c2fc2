#include "scatshift/jet.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "scatshift/error.hpp"

namespace scatshift {

namespace {

int degree(const MultiIndex& a, int dim) {
  int s = 0;
  for (int i = 0; i < dim; ++i) s += a[static_cast<std::size_t>(i)];
  return s;
}

void enumerate(int dim, int total, int axis, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (axis == dim - 1) {
    cur[static_cast<std::size_t>(axis)] = total;
    out.push_back(cur);
    return;
  }
  for (int k = total; k >= 0; --k) {
    cur[static_cast<std::size_t>(axis)] = k;
    enumerate(dim, total - k, axis + 1, cur, out);
  }
}

}  // namespace

MultiIndexTable::MultiIndexTable(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("jet dimension out of range");
  if (order < 0) throw InvalidArgument("jet order must be non-negative");
  for (int k = 0; k <= order; ++k) {
    degree_begin_.push_back(indices_.size());
    MultiIndex cur{0, 0, 0};
    enumerate(dim, k, 0, cur, indices_);
  }
  degree_begin_.push_back(indices_.size());
  for (std::size_t a = 0; a < indices_.size(); ++a) {
    for (std::size_t b = 0; b < indices_.size(); ++b) {
      if (degree(indices_[a], dim) + degree(indices_[b], dim) > order) continue;
      MultiIndex c{0, 0, 0};
      for (int i = 0; i < dim; ++i)
        c[static_cast<std::size_t>(i)] = indices_[a][static_cast<std::size_t>(i)] + indices_[b][static_cast<std::size_t>(i)];
      products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                           static_cast<std::uint32_t>(find(c))});
    }
  }
}

const MultiIndexTable& MultiIndexTable::get(int dim, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<MultiIndexTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{dim, order}];
  if (!slot) slot = std::make_unique<MultiIndexTable>(dim, order);
  return *slot;
}

std::size_t MultiIndexTable::find(const MultiIndex& alpha) const {
  const int k = degree(alpha, dim_);
  if (k > order_) return indices_.size();
  for (std::size_t i = degree_begin_[static_cast<std::size_t>(k)]; i < degree_begin_[static_cast<std::size_t>(k) + 1]; ++i) {
    bool eq = true;
    for (int j = 0; j < dim_; ++j) eq = eq && indices_[i][static_cast<std::size_t>(j)] == alpha[static_cast<std::size_t>(j)];
    if (eq) return i;
  }
  return indices_.size();
}

Jet::Jet(const MultiIndexTable& table, double constant) : table_(&table), c_(table.size(), 0.0) { c_[0] = constant; }

Jet Jet::variable(const MultiIndexTable& table, int axis, double at) {
  Jet j(table, at);
  if (table.order() >= 1) {
    MultiIndex e{0, 0, 0};
    e[static_cast<std::size_t>(axis)] = 1;
    j.c_[table.find(e)] = 1.0;
  }
  return j;
}

double Jet::coeff(const MultiIndex& alpha) const {
  const std::size_t i = table_->find(alpha);
  return i < c_.size() ? c_[i] : 0.0;
}

double Jet::derivative(const MultiIndex& alpha) const {
  double f = 1.0;
  for (int i = 0; i < table_->dim(); ++i)
    for (int k = 2; k <= alpha[static_cast<std::size_t>(i)]; ++k) f *= k;
  return f * coeff(alpha);
}

Jet& Jet::operator+=(const Jet& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  std::vector<double> r(c_.size(), 0.0);
  for (const auto& p : table_->products()) r[p.c] += c_[p.a] * o.c_[p.b];
  c_.swap(r);
  return *this;
}

Jet& Jet::operator+=(double a) {
  c_[0] += a;
  return *this;
}

Jet& Jet::operator*=(double a) {
  for (double& v : c_) v *= a;
  return *this;
}

Jet Jet::compose(std::span<const double> taylor) const {
  // Horner in u = this - value(), which has no constant term.
  Jet u = *this;
  u.c_[0] = 0.0;
  const int order = table_->order();
  Jet r(*table_, taylor[static_cast<std::size_t>(order)]);
  for (int k = order - 1; k >= 0; --k) {
    r *= u;
    r.c_[0] += taylor[static_cast<std::size_t>(k)];
  }
  return r;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator*(const Jet& a, const Jet& b) {
  Jet r = a;
  return r *= b;
}
Jet operator+(Jet a, double b) { return a += b; }
Jet operator+(double b, Jet a) { return a += b; }
Jet operator-(Jet a, double b) { return a += -b; }
Jet operator-(double b, const Jet& a) { return (a * -1.0) + b; }
Jet operator*(Jet a, double b) { return a *= b; }
Jet operator*(double b, Jet a) { return a *= b; }
Jet operator-(const Jet& a) { return a * -1.0; }
Jet operator/(Jet a, double b) { return a *= 1.0 / b; }

Jet operator/(double a, const Jet& b) {
  const int n = b.table().order();
  const double v = b.value();
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  double p = 1.0 / v;
  for (int k = 0; k <= n; ++k) {
    t[static_cast<std::size_t>(k)] = a * p;
    p *= -1.0 / v;
  }
  return b.compose(t);
}

Jet operator/(const Jet& a, const Jet& b) { return a * (1.0 / b); }

Jet exp(const Jet& a) {
  const int n = a.table().order();
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  const double e = std::exp(a.value());
  double f = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) f *= k;
    t[static_cast<std::size_t>(k)] = e / f;
  }
  return a.compose(t);
}

Jet log(const Jet& a) {
  const int n = a.table().order();
  const double v = a.value();
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  t[0] = std::log(v);
  double p = 1.0;
  for (int k = 1; k <= n; ++k) {
    p /= v;
    t[static_cast<std::size_t>(k)] = ((k % 2) ? 1.0 : -1.0) * p / k;
  }
  return a.compose(t);
}

Jet pow(const Jet& a, double e) {
  const int n = a.table().order();
  const double v = a.value();
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  double binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) binom *= (e - (k - 1)) / k;
    t[static_cast<std::size_t>(k)] = binom * std::pow(v, e - k);
  }
  return a.compose(t);
}

Jet sqrt(const Jet& a) { return pow(a, 0.5); }

Jet cos(const Jet& a) {
  const int n = a.table().order();
  const double c = std::cos(a.value());
  const double s = std::sin(a.value());
  const double cyc[4] = {c, -s, -c, s};
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  double f = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) f *= k;
    t[static_cast<std::size_t>(k)] = cyc[k % 4] / f;
  }
  return a.compose(t);
}

Jet sin(const Jet& a) {
  const int n = a.table().order();
  const double c = std::cos(a.value());
  const double s = std::sin(a.value());
  const double cyc[4] = {s, c, -s, -c};
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  double f = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) f *= k;
    t[static_cast<std::size_t>(k)] = cyc[k % 4] / f;
  }
  return a.compose(t);
}

}  // namespace scatshift
