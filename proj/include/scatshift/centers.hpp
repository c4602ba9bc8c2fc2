#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "scatshift/geometry.hpp"

namespace scatshift {

struct Neighbor {
  std::size_t index;
  double distance;
};

/// Uniform bucket grid over the bounding box of a point cloud.
class BucketGrid {
 public:
  BucketGrid() = default;
  BucketGrid(std::span<const Point> points, const Box& bounds);

  /// k nearest points to t, ordered by distance then lexicographically.
  std::vector<Neighbor> k_nearest(std::span<const Point> points, const Point& t, std::size_t k) const;

 private:
  int dim_ = 0;
  Box bounds_;
  double cell_ = 1.0;
  std::array<std::int64_t, kMaxDim> counts_{1, 1, 1};
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> items_;

  std::array<std::int64_t, kMaxDim> cell_of(const Point& x) const;
  std::size_t flat(const std::array<std::int64_t, kMaxDim>& c) const;
};

/// Finite, duplicate-free point set with a spatial index.
class CenterSet {
 public:
  CenterSet() = default;
  explicit CenterSet(std::vector<Point> points);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Point>& points() const { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  const Box& bounding_box() const { return bounds_; }

  /// k nearest centers; ties broken lexicographically on coordinates.
  std::vector<Neighbor> k_nearest(const Point& t, std::size_t k) const;
  /// Reference implementation by exhaustive search, same ordering.
  std::vector<Neighbor> k_nearest_brute(const Point& t, std::size_t k) const;

  /// Largest distance from a box point to the nearest center, estimated on a lattice.
  double fill_distance(const Box& box, double probe_spacing) const;

 private:
  int dim_ = 0;
  std::vector<Point> points_;
  Box bounds_;
  std::shared_ptr<const BucketGrid> index_;
};

// Generators.
CenterSet uniform_centers(const Box& box, double spacing);
/// Left half (axis 0) at spacing `fine`, right half at spacing `fine * ratio`.
CenterSet two_density_centers(const Box& box, double fine, int ratio);
CenterSet random_centers(const Box& box, std::size_t count, std::uint64_t seed);
/// Lattice at `spacing` with each point displaced uniformly by up to jitter*spacing per axis.
CenterSet jittered_centers(const Box& box, double spacing, double jitter, std::uint64_t seed);

/// CSV with header x0,x1,...; one point per row.
CenterSet read_centers_csv(const std::string& path);
void write_centers_csv(const CenterSet& centers, const std::string& path);
CenterSet parse_centers_csv(const std::string& text, const std::string& source = "<memory>");

}  // namespace scatshift
