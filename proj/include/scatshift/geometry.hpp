#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace scatshift {

inline constexpr int kMaxDim = 3;

/// Point of R^d, d <= kMaxDim, stored inline.
class Point {
 public:
  Point() = default;
  explicit Point(int dim);
  Point(std::initializer_list<double> coords);
  static Point from_span(std::span<const double> coords);
  static Point filled(int dim, double value);

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  const double* data() const { return c_.data(); }

  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);
  Point& operator*=(double a);

  double norm() const;
  double norm2() const;
  bool finite() const;
  std::string to_string() const;

  friend bool operator==(const Point& a, const Point& b);

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

Point operator+(Point a, const Point& b);
Point operator-(Point a, const Point& b);
Point operator*(double s, Point a);

double distance(const Point& a, const Point& b);
double distance2(const Point& a, const Point& b);

/// Strict lexicographic order on coordinates.
bool lex_less(const Point& a, const Point& b);

/// Closed axis-aligned box.
struct Box {
  Point lo;
  Point hi;

  int dim() const { return lo.dim(); }
  bool contains(const Point& x, double slack = 0.0) const;
  double side(int axis) const { return hi[axis] - lo[axis]; }
  double volume() const;
  Point center() const;
  Box padded(double pad) const;
  /// Euclidean distance from x to the box (0 inside).
  double distance_to(const Point& x) const;
  static Box unit(int dim);
  static Box cube(int dim, double lo, double hi);
};

/// Regular lattice origin + spacing * i, i in [0, counts).
struct GridSpec {
  Point origin;
  double spacing = 0.0;
  std::array<std::int64_t, kMaxDim> counts{1, 1, 1};

  int dim() const { return origin.dim(); }
  std::size_t size() const;
  Point node(std::size_t flat) const;
  std::array<std::int64_t, kMaxDim> multi_index(std::size_t flat) const;
  std::size_t flat_index(const std::array<std::int64_t, kMaxDim>& idx) const;
  /// Index of the node nearest to x, clamped to the lattice.
  std::array<std::int64_t, kMaxDim> nearest(const Point& x) const;
  Box bounds() const;
  double cell_volume() const;

  /// Lattice covering box with nodes on both faces and spacing <= h.
  static GridSpec covering(const Box& box, double h);
  /// Cell-centred lattice: nodes at the midpoints of cells of width h tiling box.
  static GridSpec cell_centred(const Box& box, double h);
  void validate() const;
};

}  // namespace scatshift
