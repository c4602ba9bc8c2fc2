#include "scatshift/centers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "scatshift/error.hpp"

namespace scatshift {

namespace {

struct Candidate {
  double d2;
  std::size_t index;
};

bool candidate_less(std::span<const Point> pts, const Candidate& a, const Candidate& b) {
  if (a.d2 != b.d2) return a.d2 < b.d2;
  if (lex_less(pts[a.index], pts[b.index])) return true;
  if (lex_less(pts[b.index], pts[a.index])) return false;
  return a.index < b.index;
}

}  // namespace

BucketGrid::BucketGrid(std::span<const Point> points, const Box& bounds) : dim_(bounds.dim()), bounds_(bounds) {
  const auto n = points.size();
  double extent = 0.0;
  for (int i = 0; i < dim_; ++i) extent = std::max(extent, bounds.side(i));
  if (extent <= 0.0) extent = 1.0;
  // About two points per cell for quasi-uniform sets, bounded cell count.
  double vol = 1.0;
  int active = 0;
  for (int i = 0; i < dim_; ++i)
    if (bounds.side(i) > 0.0) {
      vol *= bounds.side(i);
      ++active;
    }
  cell_ = active > 0 ? std::pow(2.0 * vol / static_cast<double>(std::max<std::size_t>(n, 1)), 1.0 / active) : extent;
  cell_ = std::max(cell_, extent * 1e-6);
  std::size_t total = 1;
  for (int i = 0; i < dim_; ++i) {
    auto c = static_cast<std::int64_t>(std::floor(bounds.side(i) / cell_)) + 1;
    counts_[static_cast<std::size_t>(i)] = c;
    total *= static_cast<std::size_t>(c);
  }
  if (total > 8 * n + 64) {
    cell_ *= std::pow(static_cast<double>(total) / static_cast<double>(8 * n + 64), 1.0 / dim_);
    total = 1;
    for (int i = 0; i < dim_; ++i) {
      auto c = static_cast<std::int64_t>(std::floor(bounds.side(i) / cell_)) + 1;
      counts_[static_cast<std::size_t>(i)] = c;
      total *= static_cast<std::size_t>(c);
    }
  }
  std::vector<std::uint32_t> count(total + 1, 0);
  std::vector<std::size_t> cell_ids(n);
  for (std::size_t p = 0; p < n; ++p) {
    cell_ids[p] = flat(cell_of(points[p]));
    ++count[cell_ids[p] + 1];
  }
  for (std::size_t c = 0; c < total; ++c) count[c + 1] += count[c];
  start_ = count;
  items_.resize(n);
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t p = 0; p < n; ++p) items_[fill[cell_ids[p]]++] = static_cast<std::uint32_t>(p);
}

std::array<std::int64_t, kMaxDim> BucketGrid::cell_of(const Point& x) const {
  std::array<std::int64_t, kMaxDim> c{0, 0, 0};
  for (int i = 0; i < dim_; ++i) {
    const auto u = static_cast<std::size_t>(i);
    auto k = static_cast<std::int64_t>(std::floor((x[i] - bounds_.lo[i]) / cell_));
    c[u] = std::clamp<std::int64_t>(k, 0, counts_[u] - 1);
  }
  return c;
}

std::size_t BucketGrid::flat(const std::array<std::int64_t, kMaxDim>& c) const {
  std::size_t f = 0;
  for (int i = dim_ - 1; i >= 0; --i)
    f = f * static_cast<std::size_t>(counts_[static_cast<std::size_t>(i)]) + static_cast<std::size_t>(c[static_cast<std::size_t>(i)]);
  return f;
}

std::vector<Neighbor> BucketGrid::k_nearest(std::span<const Point> points, const Point& t, std::size_t k) const {
  std::vector<Candidate> cand;
  const auto c0 = cell_of(t);
  std::int64_t max_ring = 0;
  for (int i = 0; i < dim_; ++i) {
    const auto u = static_cast<std::size_t>(i);
    max_ring = std::max({max_ring, c0[u], counts_[u] - 1 - c0[u]});
  }
  std::vector<double> scratch;
  for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
    std::array<std::int64_t, kMaxDim> lo{0, 0, 0}, hi{0, 0, 0};
    for (int i = 0; i < dim_; ++i) {
      const auto u = static_cast<std::size_t>(i);
      lo[u] = std::max<std::int64_t>(0, c0[u] - ring);
      hi[u] = std::min<std::int64_t>(counts_[u] - 1, c0[u] + ring);
    }
    std::array<std::int64_t, kMaxDim> c = lo;
    while (true) {
      std::int64_t cheb = 0;
      for (int i = 0; i < dim_; ++i) {
        const auto u = static_cast<std::size_t>(i);
        cheb = std::max(cheb, std::abs(c[u] - c0[u]));
      }
      if (cheb == ring) {
        const std::size_t f = flat(c);
        for (std::uint32_t s = start_[f]; s < start_[f + 1]; ++s)
          cand.push_back({distance2(points[items_[s]], t), items_[s]});
      }
      int axis = 0;
      while (axis < dim_) {
        const auto u = static_cast<std::size_t>(axis);
        if (++c[u] <= hi[u]) break;
        c[u] = lo[u];
        ++axis;
      }
      if (axis == dim_) break;
    }
    if (cand.size() < k) continue;
    // Every unvisited point lies outside the visited block of cells.
    double bound = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim_; ++i) {
      const auto u = static_cast<std::size_t>(i);
      if (lo[u] > 0) bound = std::min(bound, t[i] - (bounds_.lo[i] + cell_ * static_cast<double>(lo[u])));
      if (hi[u] < counts_[u] - 1) bound = std::min(bound, (bounds_.lo[i] + cell_ * static_cast<double>(hi[u] + 1)) - t[i]);
    }
    if (std::isinf(bound)) break;
    bound = std::max(bound, 0.0);
    scratch.resize(cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i) scratch[i] = cand[i].d2;
    std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k - 1), scratch.end());
    if (scratch[k - 1] < bound * bound) break;
  }
  std::sort(cand.begin(), cand.end(), [&](const Candidate& a, const Candidate& b) { return candidate_less(points, a, b); });
  if (cand.size() > k) cand.resize(k);
  std::vector<Neighbor> out;
  out.reserve(cand.size());
  for (const auto& c : cand) out.push_back({c.index, std::sqrt(c.d2)});
  return out;
}

CenterSet::CenterSet(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidArgument("center set is empty");
  if (points_.size() > 0xFFFFFFF0u) throw InvalidArgument("center set too large");
  dim_ = points_.front().dim();
  if (dim_ < 1) throw InvalidArgument("center set has points without dimension");
  bounds_ = Box{points_.front(), points_.front()};
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Point& p = points_[i];
    if (p.dim() != dim_) throw InvalidArgument("center " + std::to_string(i) + " has a different dimension");
    if (!p.finite()) throw InvalidArgument("center " + std::to_string(i) + " has a non-finite coordinate");
    for (int a = 0; a < dim_; ++a) {
      bounds_.lo[a] = std::min(bounds_.lo[a], p[a]);
      bounds_.hi[a] = std::max(bounds_.hi[a], p[a]);
    }
  }
  std::vector<std::size_t> order(points_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lex_less(points_[a], points_[b]); });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (points_[order[i]] == points_[order[i - 1]])
      throw InvalidArgument("duplicate center " + points_[order[i]].to_string() + " at rows " +
                            std::to_string(std::min(order[i], order[i - 1])) + " and " +
                            std::to_string(std::max(order[i], order[i - 1])));
  index_ = std::make_shared<BucketGrid>(points_, bounds_);
}

std::vector<Neighbor> CenterSet::k_nearest(const Point& t, std::size_t k) const {
  if (t.dim() != dim_) throw InvalidArgument("query point has the wrong dimension");
  if (!t.finite()) throw InvalidArgument("query point is not finite");
  if (k == 0) return {};
  if (k > points_.size()) throw InvalidArgument("requested " + std::to_string(k) + " neighbours from a set of " + std::to_string(points_.size()));
  return index_->k_nearest(points_, t, k);
}

std::vector<Neighbor> CenterSet::k_nearest_brute(const Point& t, std::size_t k) const {
  if (k > points_.size()) throw InvalidArgument("requested more neighbours than centers");
  std::vector<Candidate> cand;
  cand.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) cand.push_back({distance2(points_[i], t), i});
  std::sort(cand.begin(), cand.end(), [&](const Candidate& a, const Candidate& b) { return candidate_less(points_, a, b); });
  cand.resize(k);
  std::vector<Neighbor> out;
  for (const auto& c : cand) out.push_back({c.index, std::sqrt(c.d2)});
  return out;
}

double CenterSet::fill_distance(const Box& box, double probe_spacing) const {
  const GridSpec g = GridSpec::covering(box, probe_spacing);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, k_nearest(g.node(i), 1)[0].distance);
  return worst;
}

CenterSet uniform_centers(const Box& box, double spacing) {
  if (!(spacing > 0.0)) throw InvalidArgument("center spacing must be positive");
  const GridSpec g = GridSpec::covering(box, spacing);
  std::vector<Point> pts;
  pts.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) pts.push_back(g.node(i));
  return CenterSet(std::move(pts));
}

CenterSet two_density_centers(const Box& box, double fine, int ratio) {
  if (!(fine > 0.0) || ratio < 1) throw InvalidArgument("two-density centers need fine spacing > 0 and ratio >= 1");
  const double coarse = fine * ratio;
  const double mid = 0.5 * (box.lo[0] + box.hi[0]);
  // Snap the interface to the coarse lattice anchored at box.lo.
  const double cells = std::round((mid - box.lo[0]) / coarse);
  const double split = box.lo[0] + cells * coarse;
  Box left = box, right = box;
  left.hi[0] = split;
  right.lo[0] = split;
  std::vector<Point> pts;
  auto add = [&](const Box& b, double h, bool skip_left_face) {
    GridSpec g;
    g.origin = b.lo;
    g.spacing = h;
    for (int i = 0; i < b.dim(); ++i)
      g.counts[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(b.side(i) / h + 1e-9)) + 1;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto idx = g.multi_index(i);
      if (skip_left_face && idx[0] == 0) continue;
      pts.push_back(g.node(i));
    }
  };
  add(left, fine, false);
  add(right, coarse, true);
  return CenterSet(std::move(pts));
}

CenterSet random_centers(const Box& box, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw InvalidArgument("random center count must be positive");
  std::mt19937_64 rng(seed);
  std::vector<Point> pts;
  pts.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    Point p(box.dim());
    for (int i = 0; i < box.dim(); ++i) p[i] = std::uniform_real_distribution<double>(box.lo[i], box.hi[i])(rng);
    pts.push_back(p);
  }
  return CenterSet(std::move(pts));
}

CenterSet jittered_centers(const Box& box, double spacing, double jitter, std::uint64_t seed) {
  if (!(jitter >= 0.0 && jitter < 0.5)) throw InvalidArgument("jitter must be in [0, 0.5)");
  const GridSpec g = GridSpec::covering(box, spacing);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-jitter, jitter);
  std::vector<Point> pts;
  pts.reserve(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    Point p = g.node(n);
    for (int i = 0; i < box.dim(); ++i) p[i] += u(rng) * g.spacing;
    pts.push_back(p);
  }
  return CenterSet(std::move(pts));
}

CenterSet parse_centers_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError(source + ": empty center file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  int dim = 0;
  {
    std::stringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (col != "x" + std::to_string(dim))
        throw IoError(source + ": header column " + std::to_string(dim) + " should be 'x" + std::to_string(dim) + "', got '" + col + "'");
      ++dim;
    }
  }
  if (dim < 1 || dim > kMaxDim) throw IoError(source + ": header must be x0[,x1[,x2]]");
  std::vector<Point> pts;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    Point p(dim);
    int col = 0;
    while (std::getline(ls, cell, ',')) {
      if (col >= dim) throw IoError(source + ": row " + std::to_string(row) + " has more than " + std::to_string(dim) + " columns");
      try {
        std::size_t used = 0;
        p[col] = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw IoError(source + ": row " + std::to_string(row) + " column " + std::to_string(col) + " is not a number: '" + cell + "'");
      }
      ++col;
    }
    if (col != dim) throw IoError(source + ": row " + std::to_string(row) + " has " + std::to_string(col) + " columns, expected " + std::to_string(dim));
    if (!p.finite()) throw IoError(source + ": row " + std::to_string(row) + " has a non-finite coordinate");
    pts.push_back(p);
  }
  if (pts.empty()) throw IoError(source + ": no centers");
  try {
    return CenterSet(std::move(pts));
  } catch (const InvalidArgument& e) {
    throw IoError(source + ": " + e.what());
  }
}

CenterSet read_centers_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open center file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_centers_csv(ss.str(), path);
}

void write_centers_csv(const CenterSet& centers, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write center file '" + path + "'");
  for (int i = 0; i < centers.dim(); ++i) out << (i ? "," : "") << "x" << i;
  out << '\n';
  char buf[64];
  for (const auto& p : centers.points()) {
    for (int i = 0; i < centers.dim(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", p[i]);
      out << (i ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing center file '" + path + "'");
}

}  // namespace scatshift
