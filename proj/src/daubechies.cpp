#include "scatshift/daubechies.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "scatshift/error.hpp"

namespace scatshift {

namespace {

using cplx = std::complex<double>;

std::vector<cplx> poly_roots(const std::vector<double>& ascending) {
  // Companion matrix of the monic polynomial.
  const int deg = static_cast<int>(ascending.size()) - 1;
  if (deg < 1) return {};
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(deg, deg);
  const double lead = ascending.back();
  for (int i = 0; i < deg; ++i) c(0, i) = -ascending[static_cast<std::size_t>(deg - 1 - i)] / lead;
  for (int i = 1; i < deg; ++i) c(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  std::vector<cplx> roots;
  for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()(i));
  // Newton polish on the original polynomial.
  for (auto& r : roots) {
    for (int it = 0; it < 8; ++it) {
      cplx p = ascending.back(), dp = 0.0;
      for (int k = deg - 1; k >= 0; --k) {
        dp = dp * r + p;
        p = p * r + ascending[static_cast<std::size_t>(k)];
      }
      if (std::abs(dp) == 0.0) break;
      const cplx step = p / dp;
      r -= step;
      if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(r))) break;
    }
  }
  return roots;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

DaubechiesFilter::DaubechiesFilter(int vanishing_moments) : n_(vanishing_moments) {
  if (n_ < 1 || n_ > 24) throw InvalidArgument("Daubechies order must be in [1, 24]");
  // |H|^2 factor P(y) = sum_k C(N-1+k, k) y^k with y = (2 - z - 1/z)/4.
  std::vector<double> p(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) p[static_cast<std::size_t>(k)] = binomial(n_ - 1 + k, k);
  std::vector<cplx> poly{1.0};
  auto mul_linear = [&](cplx root) {
    std::vector<cplx> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= root * poly[i];
    }
    poly.swap(next);
  };
  for (const cplx y : poly_roots(p)) {
    // z + 1/z = 2 - 4y; keep the root inside the unit circle.
    const cplx b = 2.0 - 4.0 * y;
    const cplx disc = std::sqrt(b * b - 4.0);
    cplx z = 0.5 * (b + disc);
    if (std::abs(z) > 1.0) z = 0.5 * (b - disc);
    mul_linear(z);
  }
  for (int k = 0; k < n_; ++k) mul_linear(-1.0);
  h_.resize(poly.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    h_[i] = poly[i].real();
    sum += h_[i];
  }
  for (double& v : h_) v *= std::sqrt(2.0) / sum;
  // Front-load the energy (minimum-phase ordering).
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < h_.size(); ++i) (i < h_.size() / 2 ? head : tail) += h_[i] * h_[i];
  if (head < tail) std::reverse(h_.begin(), h_.end());
  const int L = length();
  g_.resize(h_.size());
  for (int k = 0; k < L; ++k) g_[static_cast<std::size_t>(k)] = ((k % 2) ? -1.0 : 1.0) * h_[static_cast<std::size_t>(L - 1 - k)];
}

double daubechies_holder(int n) {
  static const double table[] = {0.0, 0.0, 0.550, 1.088, 1.618, 1.969, 2.189, 2.460, 2.761, 3.074, 3.361};
  if (n < 1) throw InvalidArgument("Daubechies order must be positive");
  if (n <= 10) return table[n];
  return table[10] + 0.2075 * (n - 10);
}

double highpass_moment_defect(const DaubechiesFilter& filter) {
  const auto& g = filter.highpass();
  const double span = static_cast<double>(g.size() - 1);
  double worst = 0.0;
  for (int j = 0; j < filter.vanishing_moments(); ++j) {
    double m = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) m += std::pow((static_cast<double>(k) - 0.5 * span) / span, j) * g[k];
    worst = std::max(worst, std::abs(m));
  }
  return worst;
}

int vanishing_moments_for(int kappa, double margin) {
  for (int n = 2; n <= 24; ++n)
    if (daubechies_holder(n) >= kappa + margin) return n;
  throw InvalidArgument("no Daubechies family up to order 24 is smooth enough for kappa = " + std::to_string(kappa));
}

RefinableTable::RefinableTable(std::vector<double> values, int resolution, int support)
    : values_(std::move(values)), resolution_(resolution), support_(support) {}

double RefinableTable::operator()(double y) const {
  if (!(y > 0.0) || !(y < support_)) return 0.0;
  const double s = std::ldexp(y, resolution_);
  const double fl = std::floor(s);
  const auto i = static_cast<std::int64_t>(fl);
  const double u = s - fl;
  const auto n = static_cast<std::int64_t>(values_.size());
  auto at = [&](std::int64_t k) { return k < 0 || k >= n ? 0.0 : values_[static_cast<std::size_t>(k)]; };
  if (u == 0.0) return at(i);
  // Cubic Lagrange through i-1, i, i+1, i+2.
  const double w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
  const double w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
  const double w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
  const double w3 = (u + 1.0) * u * (u - 1.0) / 6.0;
  return w0 * at(i - 1) + w1 * at(i) + w2 * at(i + 1) + w3 * at(i + 2);
}

double RefinableTable::sup_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

RefinableTables build_refinable_tables(const DaubechiesFilter& filter, int max_order, int resolution) {
  const int N = filter.vanishing_moments();
  if (max_order < 0) throw InvalidArgument("derivative order must be non-negative");
  if (max_order > 0 && !(daubechies_holder(N) > max_order))
    throw InvalidArgument("Daubechies family with " + std::to_string(N) + " vanishing moments is not " +
                          std::to_string(max_order) + " times differentiable");
  if (resolution < 1 || resolution > 20) throw InvalidArgument("table resolution must be in [1, 20]");
  const auto& h = filter.lowpass();
  const auto& g = filter.highpass();
  const int L = filter.length();
  const int S = filter.support();
  const std::int64_t scale = std::int64_t{1} << resolution;
  const std::size_t size = static_cast<std::size_t>(S) * static_cast<std::size_t>(scale) + 1;
  RefinableTables out;
  for (int k = 0; k <= max_order; ++k) {
    // phi^(k)(n), n = 0..S: eigenvector of 2^k sqrt2 h_{2n-m}.
    const int n = S + 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n);
    const double fk = std::ldexp(std::sqrt(2.0), k);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const int idx = 2 * r - c;
        if (idx >= 0 && idx < L) a(r, c) = fk * h[static_cast<std::size_t>(idx)];
      }
      a(r, r) -= 1.0;
    }
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    for (int c = 0; c < n; ++c) a(n, c) = std::pow(static_cast<double>(c), k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = ((k % 2) ? -1.0 : 1.0) * kfact;
    const Eigen::VectorXd ints = a.colPivHouseholderQr().solve(rhs);
    std::vector<double> phi(size, 0.0);
    for (int c = 0; c < n; ++c) phi[static_cast<std::size_t>(c) * static_cast<std::size_t>(scale)] = ints(c);
    phi.front() = 0.0;
    phi.back() = 0.0;
    for (int r = 1; r <= resolution; ++r) {
      const std::int64_t step = std::int64_t{1} << (resolution - r);
      for (std::int64_t j = step; j < static_cast<std::int64_t>(size); j += 2 * step) {
        // x = j / scale; 2x - i has table index 2j - i*scale.
        double s = 0.0;
        for (int i = 0; i < L; ++i) {
          const std::int64_t idx = 2 * j - i * scale;
          if (idx > 0 && idx < static_cast<std::int64_t>(size)) s += h[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(idx)];
        }
        phi[static_cast<std::size_t>(j)] = fk * s;
      }
    }
    std::vector<double> psi(size, 0.0);
    for (std::int64_t j = 1; j + 1 < static_cast<std::int64_t>(size); ++j) {
      double s = 0.0;
      for (int i = 0; i < L; ++i) {
        const std::int64_t idx = 2 * j - i * scale;
        if (idx > 0 && idx < static_cast<std::int64_t>(size)) s += g[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(idx)];
      }
      psi[static_cast<std::size_t>(j)] = fk * s;
    }
    out.phi.emplace_back(std::move(phi), resolution, S);
    out.psi.emplace_back(std::move(psi), resolution, S);
  }
  return out;
}

}  // namespace scatshift
