#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scatshift/geometry.hpp"
#include "scatshift/jet.hpp"

namespace scatshift {

/// Target function with a closed form that can be evaluated on doubles and
/// on Taylor jets. Both the function and its derivatives vanish outside the
/// support box.
class AnalyticTestFunction {
 public:
  using ValueFn = std::function<double(const Point&)>;
  using JetFn = std::function<Jet(std::span<const Jet>)>;

  AnalyticTestFunction(std::string name, int dim, Box support, int smoothness, ValueFn value, JetFn jet,
                       std::optional<Point> singularity = std::nullopt);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const Box& support() const { return support_; }
  /// Largest k with f in C^k; a large value means C^infinity.
  int smoothness() const { return smoothness_; }
  const std::optional<Point>& singularity() const { return singularity_; }

  double operator()(const Point& x) const;
  /// Taylor jet of order `order` at x; zero outside the support box.
  Jet jet(const Point& x, int order) const;

 private:
  std::string name_;
  int dim_;
  Box support_;
  int smoothness_;
  ValueFn value_;
  JetFn jet_;
  std::optional<Point> singularity_;
};

inline constexpr int kSmooth = 1000;

/// Parsed "name:key=value,key=value".
struct TargetSpec {
  std::string name;
  std::map<std::string, double> params;
  static TargetSpec parse(std::string_view text);
};

/// Registry lookup. Known names: bump, cosbump, cusp, zero.
AnalyticTestFunction make_target(std::string_view spec, int dim);
std::vector<std::string> registered_targets();

}  // namespace scatshift
