#ifndef IFGF_CONEHIER_HPP
#define IFGF_CONEHIER_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ifgf/boxtree.hpp"
#include "ifgf/cheb.hpp"
#include "ifgf/types.hpp"

namespace ifgf {

/// Cone-domain partition of [0, sqrt(3)/3] x [0, pi] x [0, 2 pi) for one level:
/// n_s radial intervals, n_c polar intervals and 2 n_c azimuthal intervals.
struct ConeGrid {
  int level = 1;
  int n_s = 1;
  int n_c = 2;

  double ds() const { return eta / n_s; }
  double dtheta() const { return pi / n_c; }
  double dphi() const { return pi / n_c; }
  int segment_count() const { return n_s * n_c * 2 * n_c; }

  /// gamma is 1-based: (radial, polar, azimuthal).
  std::uint32_t code(const std::array<int, 3>& gamma) const {
    return static_cast<std::uint32_t>((gamma[0] - 1) + n_s * ((gamma[1] - 1) + n_c * (gamma[2] - 1)));
  }
  std::array<int, 3> gamma(std::uint32_t code) const {
    const int c = static_cast<int>(code);
    return {c % n_s + 1, (c / n_s) % n_c + 1, c / (n_s * n_c) + 1};
  }
  /// (s, theta, phi) parameter intervals of a segment.
  std::array<Interval, 3> intervals(const std::array<int, 3>& gamma) const {
    return {Interval{(gamma[0] - 1) * ds(), gamma[0] * ds()}, Interval{(gamma[1] - 1) * dtheta(), gamma[1] * dtheta()},
            Interval{(gamma[2] - 1) * dphi(), gamma[2] * dphi()}};
  }

  friend bool operator==(const ConeGrid&, const ConeGrid&) = default;
};

struct SegmentKey {
  BoxKey box;
  std::array<int, 3> gamma{1, 1, 1};

  friend bool operator==(const SegmentKey&, const SegmentKey&) = default;
};

/// Per-level cone grids for a tree of the given box sides (sides[d-1] = H_d).
/// The leaf level gets (n_s_leaf, n_c_leaf); moving to the coarser level d-1 both
/// counts double when kappa * H_{d-1} >= 1 and are copied otherwise.
/// Element d-1 of the result is the grid of level d.
std::vector<ConeGrid> refinement_schedule(double kappa, std::span<const double> sides, int n_s_leaf = 1,
                                          int n_c_leaf = 2);

/// Segment of x, located relative to a box center, together with its reference
/// coordinates in [-1, 1]^3 inside that segment.
struct SegmentLocation {
  std::uint32_t code = 0;
  double ts = 0.0;
  double tt = 0.0;
  double tp = 0.0;
};

/// Locate x in the cone segments around a box of the given side. Returns nullopt
/// when x lies inside the s > sqrt(3)/3 region (closer than 1.5 H to the center).
/// Throws std::domain_error if x coincides with the center.
std::optional<SegmentLocation> locate_segment(const ConeGrid& grid, const Vec3& center, double side, const Vec3& x);

/// 1-based gamma of the segment containing x, or nullopt for s > sqrt(3)/3.
std::optional<std::array<int, 3>> segment_of_point(const ConeGrid& grid, const Vec3& center, double side,
                                                   const Vec3& x);

/// Cartesian Chebyshev nodes of a segment, P_s * P_ang^2 of them, s fastest.
std::vector<Vec3> interpolation_nodes(const ConeGrid& grid, const Vec3& center, double side,
                                      const std::array<int, 3>& gamma, int ps, int pang);

/// Relevant cone segments of every relevant box on every level, stored per level
/// as sorted segment codes in one flat array with per-box offsets. A segment's
/// "slot" is its position in that flat array; node coordinates are cached per slot.
class ConeHierarchy {
 public:
  ConeHierarchy() = default;

  int depth() const { return static_cast<int>(grids_.size()); }
  const ConeGrid& grid(int level) const { return grids_.at(level - 1); }
  std::span<const ConeGrid> grids() const { return grids_; }
  int ps() const { return ps_; }
  int pang() const { return pang_; }
  int nodes_per_segment() const { return ps_ * pang_ * pang_; }

  std::size_t segment_count(int level) const { return levels_.at(level).codes.size(); }
  std::size_t total_segment_count() const;
  /// Sorted codes of the relevant segments of a box.
  std::span<const std::uint32_t> segments(int level, std::size_t box) const;
  /// Slot of the first segment of a box.
  std::size_t first_slot(int level, std::size_t box) const { return levels_.at(level).offsets.at(box); }
  std::optional<std::size_t> find_slot(int level, std::size_t box, std::uint32_t code) const;
  /// Cached interpolation nodes of a slot.
  std::span<const Vec3> nodes(int level, std::size_t slot) const;

  std::vector<SegmentKey> relevant_segments(const BoxTree& tree, int level, std::size_t box) const;

 private:
  friend ConeHierarchy compute_relevant_segments(const BoxTree&, std::vector<ConeGrid>, int, int);

  struct Level {
    std::vector<std::uint32_t> offsets;  // box -> first slot, size boxes + 1
    std::vector<std::uint32_t> codes;    // slot -> segment code
    std::vector<Vec3> nodes;             // slot * P + node
  };

  std::vector<ConeGrid> grids_;
  std::vector<Level> levels_;  // index 0 unused
  int ps_ = 3;
  int pang_ = 5;
};

/// Single sweep over levels 3..D marking, for each relevant box, the segments that
/// contain a cousin point and, from level 4 on, those that contain an interpolation
/// node of a relevant segment of the parent box.
ConeHierarchy compute_relevant_segments(const BoxTree& tree, std::vector<ConeGrid> grids, int ps, int pang);

}  // namespace ifgf

#endif  // IFGF_CONEHIER_HPP
