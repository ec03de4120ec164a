#include "ifgf/boxtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ifgf {

namespace {

// Integer coordinates are computed once at the finest representable level and
// shifted down; floor(t * 2^a) >> b == floor(t * 2^(a-b)) holds exactly because
// scaling by powers of two is exact.
constexpr int kFineBits = kMaxTreeDepth - 1;

std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0x1fffff;
  v = (v | v << 32) & 0x1f00000000ffffULL;
  v = (v | v << 16) & 0x1f0000ff0000ffULL;
  v = (v | v << 8) & 0x100f00f00f00f00fULL;
  v = (v | v << 4) & 0x10c30c30c30c30c3ULL;
  v = (v | v << 2) & 0x1249249249249249ULL;
  return v;
}

std::uint64_t compact_bits(std::uint64_t v) {
  v &= 0x1249249249249249ULL;
  v = (v ^ (v >> 2)) & 0x10c30c30c30c30c3ULL;
  v = (v ^ (v >> 4)) & 0x100f00f00f00f00fULL;
  v = (v ^ (v >> 8)) & 0x1f0000ff0000ffULL;
  v = (v ^ (v >> 16)) & 0x1f00000000ffffULL;
  v = (v ^ (v >> 32)) & 0x1fffff;
  return v;
}

std::uint64_t morton(const std::array<std::uint32_t, 3>& k) {
  return spread_bits(k[0]) | (spread_bits(k[1]) << 1) | (spread_bits(k[2]) << 2);
}

std::array<std::uint32_t, 3> unmorton(std::uint64_t code) {
  return {static_cast<std::uint32_t>(compact_bits(code)), static_cast<std::uint32_t>(compact_bits(code >> 1)),
          static_cast<std::uint32_t>(compact_bits(code >> 2))};
}

std::uint64_t code_at_level(std::uint64_t fine_code, int level) {
  return fine_code >> (3 * (kMaxTreeDepth - level));
}

void check_level(const BoxTree& tree, int level) {
  if (level < 1 || level > tree.depth()) {
    throw std::out_of_range("box level " + std::to_string(level) + " outside [1, " + std::to_string(tree.depth()) + "]");
  }
}

int chebyshev_distance(const BoxKey& a, const BoxKey& b) {
  int d = 0;
  for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(a.k[i] - b.k[i]));
  return d;
}

}  // namespace

int depth_for_wavelength(double root_side, double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("depth_for_wavelength requires kappa > 0");
  const double quarter_wavelength = 0.25 * (2.0 * pi / kappa);
  const double levels = std::round(std::log2(root_side / quarter_wavelength));
  return std::clamp(static_cast<int>(levels) + 1, 1, kMaxTreeDepth);
}

BoxTree BoxTree::build(std::span<const Vec3> points, double kappa, const TreeOptions& options) {
  if (points.empty()) throw std::invalid_argument("cannot build a box tree over an empty point cloud");
  if (points.size() >= std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("too many points");
  if (options.depth < 0 || options.depth > kMaxTreeDepth) {
    throw std::invalid_argument("tree depth must be in [1, " + std::to_string(kMaxTreeDepth) + "]");
  }

  BoxTree tree;
  Vec3 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  const double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
  if (!std::isfinite(extent)) throw std::invalid_argument("point cloud has non-finite coordinates");
  if (extent == 0.0 && points.size() > 1) throw std::invalid_argument("point cloud has zero extent");

  tree.root_center_ = (lo + hi) * 0.5;
  tree.root_side_ = extent > 0.0 ? extent * (1.0 + 2e-6) : 1.0;
  tree.root_lo_ = tree.root_center_ - Vec3{1.0, 1.0, 1.0} * (0.5 * tree.root_side_);

  // Finest-level Morton code of every point.
  const double scale = static_cast<double>(1u << kFineBits);
  std::vector<std::uint64_t> fine(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::array<std::uint32_t, 3> q{};
    for (int a = 0; a < 3; ++a) {
      const double t = (points[i][a] - tree.root_lo_[a]) / tree.root_side_;
      q[a] = static_cast<std::uint32_t>(std::clamp(t * scale, 0.0, scale - 1.0));
    }
    fine[i] = morton(q);
  }
  tree.permutation_.resize(points.size());
  std::iota(tree.permutation_.begin(), tree.permutation_.end(), 0u);
  std::stable_sort(tree.permutation_.begin(), tree.permutation_.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return fine[a] < fine[b]; });
  std::vector<std::uint64_t> sorted_fine(points.size());
  tree.sorted_points_.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    sorted_fine[i] = fine[tree.permutation_[i]];
    tree.sorted_points_[i] = points[tree.permutation_[i]];
  }

  const auto count_boxes = [&](int level) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < sorted_fine.size(); ++i) {
      if (i == 0 || code_at_level(sorted_fine[i], level) != code_at_level(sorted_fine[i - 1], level)) ++count;
    }
    return count;
  };

  if (options.depth > 0) {
    tree.depth_ = options.depth;
  } else if (points.size() == 1) {
    tree.depth_ = 1;
  } else if (kappa > 0.0) {
    tree.depth_ = depth_for_wavelength(tree.root_side_, kappa);
  } else {
    const double target = std::max(1, options.leaf_size_target);
    int d = 1;
    while (d < kMaxTreeDepth && static_cast<double>(points.size()) / count_boxes(d) > target) ++d;
    tree.depth_ = d;
  }

  tree.levels_.resize(tree.depth_ + 1);
  for (int d = 1; d <= tree.depth_; ++d) {
    Level& lv = tree.levels_[d];
    for (std::size_t i = 0; i < sorted_fine.size(); ++i) {
      const auto code = code_at_level(sorted_fine[i], d);
      if (lv.codes.empty() || lv.codes.back() != code) {
        lv.codes.push_back(code);
        lv.offsets.push_back(static_cast<std::uint32_t>(i));
      }
    }
    lv.offsets.push_back(static_cast<std::uint32_t>(points.size()));
  }
  for (int d = 2; d <= tree.depth_; ++d) {
    Level& lv = tree.levels_[d];
    Level& up = tree.levels_[d - 1];
    lv.parent.resize(lv.codes.size());
    up.first_child.assign(up.codes.size() + 1, static_cast<std::uint32_t>(lv.codes.size()));
    std::size_t p = 0;
    for (std::size_t b = 0; b < lv.codes.size(); ++b) {
      while (up.codes[p] != (lv.codes[b] >> 3)) ++p;
      lv.parent[b] = static_cast<std::uint32_t>(p);
    }
    for (std::size_t b = lv.codes.size(); b-- > 0;) up.first_child[lv.parent[b]] = static_cast<std::uint32_t>(b);
  }
  return tree;
}

double BoxTree::side(int level) const { return std::ldexp(root_side_, -(level - 1)); }

Vec3 BoxTree::center(const BoxKey& key) const {
  const double h = side(key.level);
  Vec3 c;
  for (int i = 0; i < 3; ++i) c[i] = root_lo_[i] + 0.5 * h * (2.0 * key.k[i] - 1.0);
  return c;
}

BoxKey BoxTree::key(int level, std::size_t box) const {
  check_level(*this, level);
  const auto k = unmorton(levels_[level].codes.at(box));
  return {level, {static_cast<int>(k[0]) + 1, static_cast<int>(k[1]) + 1, static_cast<int>(k[2]) + 1}};
}

PointRange BoxTree::points(int level, std::size_t box) const {
  const auto& offs = levels_.at(level).offsets;
  return {offs.at(box), offs.at(box + 1)};
}

std::optional<std::size_t> BoxTree::find_code(int level, std::uint64_t code) const {
  const auto& codes = levels_[level].codes;
  const auto it = std::lower_bound(codes.begin(), codes.end(), code);
  if (it == codes.end() || *it != code) return std::nullopt;
  return static_cast<std::size_t>(it - codes.begin());
}

std::optional<std::size_t> BoxTree::find(const BoxKey& key) const {
  if (key.level < 1 || key.level > depth_) return std::nullopt;
  const int n = 1 << (key.level - 1);
  std::array<std::uint32_t, 3> k{};
  for (int i = 0; i < 3; ++i) {
    if (key.k[i] < 1 || key.k[i] > n) return std::nullopt;
    k[i] = static_cast<std::uint32_t>(key.k[i] - 1);
  }
  return find_code(key.level, morton(k));
}

std::vector<std::size_t> BoxTree::neighbors(int level, std::size_t box) const {
  const BoxKey k = key(level, box);
  std::vector<std::size_t> out;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const BoxKey nk{level, {k.k[0] + dx, k.k[1] + dy, k.k[2] + dz}};
        if (const auto idx = find(nk)) out.push_back(*idx);
      }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> BoxTree::children(int level, std::size_t box) const {
  check_level(*this, level);
  if (level == depth_) return {};
  const auto& fc = levels_[level].first_child;
  std::vector<std::size_t> out;
  for (std::uint32_t c = fc.at(box); c < fc.at(box + 1); ++c) out.push_back(c);
  return out;
}

std::size_t BoxTree::parent(int level, std::size_t box) const {
  check_level(*this, level);
  if (level < 2) throw std::out_of_range("the root box has no parent");
  return levels_[level].parent.at(box);
}

std::vector<std::size_t> BoxTree::cousins(int level, std::size_t box) const {
  if (level < 2) return {};
  const BoxKey self = key(level, box);
  std::vector<std::size_t> out;
  for (std::size_t pn : neighbors(level - 1, parent(level, box))) {
    for (std::size_t c : children(level - 1, pn)) {
      if (chebyshev_distance(key(level, c), self) > 1) out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

BoxKey box_of_point(const BoxTree& tree, const Vec3& x, int level) {
  check_level(tree, level);
  const Vec3 lo = tree.root_center() - Vec3{1.0, 1.0, 1.0} * (0.5 * tree.root_side());
  const double scale = static_cast<double>(1u << kFineBits);
  BoxKey key{level, {}};
  for (int a = 0; a < 3; ++a) {
    const double t = (x[a] - lo[a]) / tree.root_side();
    if (!(t >= 0.0 && t < 1.0)) throw std::out_of_range("point lies outside the root box");
    const auto q = static_cast<std::uint32_t>(std::min(t * scale, scale - 1.0));
    key.k[a] = static_cast<int>(q >> (kMaxTreeDepth - level)) + 1;
  }
  return key;
}

std::vector<BoxKey> neighbors(const BoxTree& tree, const BoxKey& key) {
  const auto idx = tree.find(key);
  if (!idx) throw std::invalid_argument("neighbors: box is not relevant");
  std::vector<BoxKey> out;
  for (auto b : tree.neighbors(key.level, *idx)) out.push_back(tree.key(key.level, b));
  return out;
}

BoxKey parent(const BoxKey& key) {
  if (key.level < 2) throw std::out_of_range("the root box has no parent");
  return {key.level - 1, {(key.k[0] + 1) / 2, (key.k[1] + 1) / 2, (key.k[2] + 1) / 2}};
}

std::vector<BoxKey> children(const BoxTree& tree, const BoxKey& key) {
  const auto idx = tree.find(key);
  if (!idx) throw std::invalid_argument("children: box is not relevant");
  std::vector<BoxKey> out;
  for (auto c : tree.children(key.level, *idx)) out.push_back(tree.key(key.level + 1, c));
  return out;
}

std::vector<BoxKey> cousins(const BoxTree& tree, const BoxKey& key) {
  const auto idx = tree.find(key);
  if (!idx) throw std::invalid_argument("cousins: box is not relevant");
  std::vector<BoxKey> out;
  for (auto c : tree.cousins(key.level, *idx)) out.push_back(tree.key(key.level, c));
  return out;
}

}  // namespace ifgf
