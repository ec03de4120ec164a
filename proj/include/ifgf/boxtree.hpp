#ifndef IFGF_BOXTREE_HPP
#define IFGF_BOXTREE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ifgf/types.hpp"

namespace ifgf {

/// Level d (1-based) and 1-based integer box coordinates k in [1, 2^(d-1)]^3.
struct BoxKey {
  int level = 1;
  std::array<int, 3> k{1, 1, 1};

  friend bool operator==(const BoxKey&, const BoxKey&) = default;
  friend auto operator<=>(const BoxKey&, const BoxKey&) = default;
};

struct TreeOptions {
  /// Depth override; 0 selects the automatic rule.
  int depth = 0;
  /// Mean points per relevant leaf used by the kappa = 0 depth rule.
  int leaf_size_target = 32;
};

/// Half-open index range into the tree's sorted point array.
struct PointRange {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  std::uint32_t size() const { return end - begin; }
};

inline constexpr int kMaxTreeDepth = 21;

/// Non-adaptive octree over a point cloud that stores only relevant (non-empty) boxes.
///
/// Points are reordered once by the Morton code of their leaf box, so every box at
/// every level owns a contiguous range of the sorted points. Boxes of a level are
/// kept sorted by Morton code; a box is addressed by (level, index in that level).
class BoxTree {
 public:
  static BoxTree build(std::span<const Vec3> points, double kappa, const TreeOptions& options = {});

  int depth() const { return depth_; }
  double root_side() const { return root_side_; }
  Vec3 root_center() const { return root_center_; }
  double side(int level) const;
  Vec3 center(const BoxKey& key) const;
  Vec3 center(int level, std::size_t box) const { return center(key(level, box)); }

  std::size_t num_points() const { return sorted_points_.size(); }
  std::span<const Vec3> sorted_points() const { return sorted_points_; }
  /// Sorted position -> original cloud index.
  std::span<const std::uint32_t> permutation() const { return permutation_; }

  std::size_t box_count(int level) const { return levels_.at(level).codes.size(); }
  BoxKey key(int level, std::size_t box) const;
  PointRange points(int level, std::size_t box) const;
  std::optional<std::size_t> find(const BoxKey& key) const;

  /// Relevant same-level boxes within Chebyshev index distance 1, including `box`.
  std::vector<std::size_t> neighbors(int level, std::size_t box) const;
  /// Relevant level+1 boxes whose parent is `box`, in Morton order.
  std::vector<std::size_t> children(int level, std::size_t box) const;
  /// Index of the level-1 parent box. Requires level >= 2.
  std::size_t parent(int level, std::size_t box) const;
  /// Relevant non-neighbor children of the neighbors of the parent.
  std::vector<std::size_t> cousins(int level, std::size_t box) const;

 private:
  struct Level {
    std::vector<std::uint64_t> codes;    // sorted Morton codes of relevant boxes
    std::vector<std::uint32_t> offsets;  // point ranges, size codes.size() + 1
    std::vector<std::uint32_t> parent;   // index into the previous level
    std::vector<std::uint32_t> first_child;  // children range start in next level, size + 1
  };

  std::optional<std::size_t> find_code(int level, std::uint64_t code) const;

  int depth_ = 1;
  double root_side_ = 1.0;
  Vec3 root_center_{};
  Vec3 root_lo_{};
  std::vector<Vec3> sorted_points_;
  std::vector<std::uint32_t> permutation_;
  std::vector<Level> levels_;  // index 0 unused
};

/// Level-d key of the half-open box containing x. Throws if x lies outside the root.
BoxKey box_of_point(const BoxTree& tree, const Vec3& x, int level);

std::vector<BoxKey> neighbors(const BoxTree& tree, const BoxKey& key);
BoxKey parent(const BoxKey& key);
std::vector<BoxKey> children(const BoxTree& tree, const BoxKey& key);
std::vector<BoxKey> cousins(const BoxTree& tree, const BoxKey& key);

/// Depth for which H_D is closest to a quarter wavelength (in log2), at least 1.
int depth_for_wavelength(double root_side, double kappa);

}  // namespace ifgf

#endif  // IFGF_BOXTREE_HPP
