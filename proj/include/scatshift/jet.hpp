#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "scatshift/geometry.hpp"

namespace scatshift {

using MultiIndex = std::array<int, kMaxDim>;

/// Multi-indices of total degree <= order in dim variables, graded then
/// lexicographic, with a precomputed product table.
class MultiIndexTable {
 public:
  static const MultiIndexTable& get(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  /// Position of alpha, or size() if |alpha| > order.
  std::size_t find(const MultiIndex& alpha) const;
  /// Start of the block of degree k.
  std::size_t degree_begin(int k) const { return degree_begin_[static_cast<std::size_t>(k)]; }

  struct Product {
    std::uint32_t a, b, c;
  };
  const std::vector<Product>& products() const { return products_; }

  MultiIndexTable(int dim, int order);

 private:
  int dim_;
  int order_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> degree_begin_;
  std::vector<Product> products_;
};

/// Truncated multivariate Taylor polynomial sum_alpha c_alpha (x - x0)^alpha.
class Jet {
 public:
  Jet() = default;
  Jet(const MultiIndexTable& table, double constant);
  static Jet variable(const MultiIndexTable& table, int axis, double at);

  const MultiIndexTable& table() const { return *table_; }
  double value() const { return c_[0]; }
  double coeff(std::size_t i) const { return c_[i]; }
  double coeff(const MultiIndex& alpha) const;
  /// D^alpha at the expansion point, i.e. alpha! c_alpha.
  double derivative(const MultiIndex& alpha) const;
  std::span<const double> coeffs() const { return c_; }

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator+=(double a);
  Jet& operator*=(double a);

  /// g(this) given the Taylor coefficients g^(k)(value())/k!, k = 0..order.
  Jet compose(std::span<const double> taylor) const;

 private:
  const MultiIndexTable* table_ = nullptr;
  std::vector<double> c_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator+(Jet a, double b);
Jet operator+(double b, Jet a);
Jet operator-(Jet a, double b);
Jet operator-(double b, const Jet& a);
Jet operator*(Jet a, double b);
Jet operator*(double b, Jet a);
Jet operator-(const Jet& a);
Jet operator/(const Jet& a, const Jet& b);
Jet operator/(double a, const Jet& b);
Jet operator/(Jet a, double b);

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet pow(const Jet& a, double p);
Jet sqrt(const Jet& a);
Jet cos(const Jet& a);
Jet sin(const Jet& a);

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

}  // namespace scatshift
