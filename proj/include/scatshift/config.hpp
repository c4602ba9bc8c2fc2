#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scatshift/basis.hpp"
#include "scatshift/centers.hpp"
#include "scatshift/nterm.hpp"
#include "scatshift/quadrature.hpp"
#include "scatshift/rates.hpp"
#include "scatshift/reproduction.hpp"

namespace scatshift {

struct BasisConfig {
  std::string kind = "surface_spline";  ///< surface_spline | truncated_power
  int dim = 1;
  int m = 1;      ///< surface splines: T = Delta^m
  int kappa = 2;  ///< truncated powers: T = D^kappa
  double c = 1.0;

  BasisFunction make() const;
};

struct CenterConfig {
  std::string source = "uniform";  ///< csv | uniform | two_density | random | jittered
  std::string path;
  std::vector<double> lo;  ///< empty: target support grown by 0.5
  std::vector<double> hi;
  double spacing = 1.0 / 32.0;  ///< uniform / jittered lattice, fine spacing for two_density
  int ratio = 4;                ///< two_density coarse / fine
  std::size_t count = 0;        ///< random
  double jitter = 0.25;         ///< jittered, fraction of the spacing
  std::optional<std::uint64_t> seed;

  Box box(const Box& fallback) const;
  CenterSet make(const Box& fallback) const;
};

/// Lattice for density, majorant and error evaluation. Empty box means the
/// target support; spacing 0 means a quarter of the center spacing.
struct GridConfig {
  std::vector<double> lo;
  std::vector<double> hi;
  double spacing = 0.0;
};

struct WaveletConfig {
  int vanishing_moments = 0;  ///< 0 picks from kappa
  int base_level = 0;
  int fine_level = 12;
  int resolution = 10;
};

struct NormConfig {
  double s = 1.0;
  double p = 2.0;  ///< a JSON string "inf" gives infinity
  double q = 0.0;  ///< 0 means the default q = 1 / (1 + s/d)
};

struct NTermOptions {
  long long budget = 256;
  std::vector<long long> budgets;
  double nu = 3.0;
  int quad_level = 0;
  int extra_points = 0;
  bool budget_tight = false;
};

/// Standard Schur ladder: fine centers on [-L, 0), geometric grading up to the
/// coarse spacing, `coarse_count` coarse centers; L doubles through `extents`.
struct SchurConfig {
  double fine = 1.0 / 16.0;
  double coarse = 4.0;
  int coarse_count = 9;
  std::vector<double> extents{4, 8, 16, 32, 64, 128, 256};
  std::string kernel = "decay_bound";  ///< decay_bound | actual
  bool probe_bound = true;             ///< also run r = (nu - d)/kappa and expect failure
};

struct VerifyConfig {
  std::string scheme = "divided_difference";  ///< divided_difference | least_norm
  double c_bound = 4.0;
  std::size_t anchors = 48;
  std::size_t radii = 40;
  std::size_t directions = 6;
  double max_ratio = 128.0;
  std::optional<std::uint64_t> seed;
  std::vector<double> representation_points{0.3, 0.5, 0.7};
  bool schur = true;
};

struct ExperimentConfig {
  BasisConfig basis;
  CenterConfig centers;
  double nu = 2.0;
  int extra_points = 0;
  double c_max = 0.0;
  int enlargement_cap = 0;
  std::optional<double> r;  ///< majorant exponent; default 0.9 (nu - d) / kappa
  GridConfig grid;
  QuadratureSpec quadrature{1.0 / 128.0, 4, 0};
  WaveletConfig wavelets;
  std::string target = "bump:c=0.5,R=0.5";
  NormConfig norm;
  NTermOptions nterm;
  LinearLadder ladder;
  SchurConfig schur;
  VerifyConfig verify;
  std::string output;

  /// Strict parse: unknown keys and wrong types are errors.
  static ExperimentConfig from_json(const std::string& text);
  /// Full resolved config, defaults included.
  std::string to_json() const;

  ReproductionConfig reproduction(const BasisFunction& phi) const;
  double majorant_exponent() const;
  NTermConfig nterm_config() const;
  GridSpec density_grid(const Box& fallback) const;

  /// Cross-field checks for the given command (and rates mode).
  void validate(const std::string& command, const std::string& mode = "") const;
};

/// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON when
/// possible and taken as a string otherwise.
std::string apply_override(const std::string& config_json, const std::string& assignment);

}  // namespace scatshift
