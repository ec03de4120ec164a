#include "ifgf/conehier.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "ifgf/kernel.hpp"

namespace ifgf {

std::vector<ConeGrid> refinement_schedule(double kappa, std::span<const double> sides, int n_s_leaf, int n_c_leaf) {
  if (n_s_leaf < 1 || n_c_leaf < 1) throw std::invalid_argument("refinement_schedule: leaf counts must be >= 1");
  const int depth = static_cast<int>(sides.size());
  std::vector<ConeGrid> grids(depth);
  if (depth == 0) return grids;
  grids[depth - 1] = {depth, n_s_leaf, n_c_leaf};
  for (int d = depth; d >= 2; --d) {
    ConeGrid g = grids[d - 1];
    g.level = d - 1;
    if (kappa * sides[d - 2] >= 1.0) {
      g.n_s *= 2;
      g.n_c *= 2;
    }
    grids[d - 2] = g;
  }
  return grids;
}

namespace {

inline int clamp_index(double t, int n) {
  // floor(t) + 1, clamped to 1..n. t is non-negative here.
  const int i = static_cast<int>(t) + 1;
  return i > n ? n : (i < 1 ? 1 : i);
}

inline double clamp_ref(double t) { return t < -1.0 ? -1.0 : (t > 1.0 ? 1.0 : t); }

}  // namespace

std::optional<SegmentLocation> locate_segment(const ConeGrid& grid, const Vec3& center, double side, const Vec3& x) {
  const SphericalPoint sp = to_spherical(x - center);
  const double h = box_radius(side);
  double s = h / sp.r;
  if (s > eta * (1.0 + 1e-12)) return std::nullopt;
  if (s > eta) s = eta;

  const double ds = grid.ds();
  const double dt = grid.dtheta();
  const double dp = grid.dphi();
  const int g1 = clamp_index(s / ds, grid.n_s);
  const int g2 = clamp_index(sp.theta / dt, grid.n_c);
  const int g3 = clamp_index(sp.phi / dp, 2 * grid.n_c);

  SegmentLocation loc;
  loc.code = grid.code({g1, g2, g3});
  loc.ts = clamp_ref(2.0 * (s / ds - (g1 - 1)) - 1.0);
  loc.tt = clamp_ref(2.0 * (sp.theta / dt - (g2 - 1)) - 1.0);
  loc.tp = clamp_ref(2.0 * (sp.phi / dp - (g3 - 1)) - 1.0);
  return loc;
}

std::optional<std::array<int, 3>> segment_of_point(const ConeGrid& grid, const Vec3& center, double side,
                                                   const Vec3& x) {
  const auto loc = locate_segment(grid, center, side, x);
  if (!loc) return std::nullopt;
  return grid.gamma(loc->code);
}

std::vector<Vec3> interpolation_nodes(const ConeGrid& grid, const Vec3& center, double side,
                                      const std::array<int, 3>& gamma, int ps, int pang) {
  if (gamma[0] < 1 || gamma[0] > grid.n_s || gamma[1] < 1 || gamma[1] > grid.n_c || gamma[2] < 1 ||
      gamma[2] > 2 * grid.n_c) {
    throw std::out_of_range("interpolation_nodes: gamma out of range");
  }
  const auto iv = grid.intervals(gamma);
  const auto s_nodes = cheb_nodes(ps, iv[0].lo, iv[0].hi);
  const auto t_nodes = cheb_nodes(pang, iv[1].lo, iv[1].hi);
  const auto p_nodes = cheb_nodes(pang, iv[2].lo, iv[2].hi);
  const double h = box_radius(side);

  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(ps) * pang * pang);
  for (double phi : p_nodes) {
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    for (double theta : t_nodes) {
      const double ct = std::cos(theta);
      const double st = std::sin(theta);
      for (double s : s_nodes) {
        const double r = h / s;
        out.push_back({center.x + r * st * cp, center.y + r * st * sp, center.z + r * ct});
      }
    }
  }
  return out;
}

std::size_t ConeHierarchy::total_segment_count() const {
  std::size_t total = 0;
  for (std::size_t d = 1; d < levels_.size(); ++d) total += levels_[d].codes.size();
  return total;
}

std::span<const std::uint32_t> ConeHierarchy::segments(int level, std::size_t box) const {
  const Level& lv = levels_.at(level);
  if (lv.offsets.empty()) return {};
  return std::span<const std::uint32_t>(lv.codes).subspan(lv.offsets.at(box), lv.offsets.at(box + 1) - lv.offsets[box]);
}

std::optional<std::size_t> ConeHierarchy::find_slot(int level, std::size_t box, std::uint32_t code) const {
  const Level& lv = levels_.at(level);
  if (lv.offsets.empty()) return std::nullopt;
  const auto first = lv.codes.begin() + lv.offsets[box];
  const auto last = lv.codes.begin() + lv.offsets[box + 1];
  const auto it = std::lower_bound(first, last, code);
  if (it == last || *it != code) return std::nullopt;
  return static_cast<std::size_t>(it - lv.codes.begin());
}

std::span<const Vec3> ConeHierarchy::nodes(int level, std::size_t slot) const {
  const std::size_t p = nodes_per_segment();
  return std::span<const Vec3>(levels_.at(level).nodes).subspan(slot * p, p);
}

std::vector<SegmentKey> ConeHierarchy::relevant_segments(const BoxTree& tree, int level, std::size_t box) const {
  std::vector<SegmentKey> out;
  const BoxKey key = tree.key(level, box);
  for (std::uint32_t code : segments(level, box)) out.push_back({key, grid(level).gamma(code)});
  return out;
}

ConeHierarchy compute_relevant_segments(const BoxTree& tree, std::vector<ConeGrid> grids, int ps, int pang) {
  const int depth = tree.depth();
  if (static_cast<int>(grids.size()) != depth) {
    throw std::invalid_argument("compute_relevant_segments: expected one grid per level");
  }
  if (ps < 1 || pang < 1) throw std::invalid_argument("compute_relevant_segments: orders must be >= 1");

  ConeHierarchy hier;
  hier.grids_ = std::move(grids);
  hier.ps_ = ps;
  hier.pang_ = pang;
  hier.levels_.resize(depth + 1);
  const std::size_t per_segment = hier.nodes_per_segment();
  const auto sorted = tree.sorted_points();

  for (int d = 1; d <= depth; ++d) {
    auto& lv = hier.levels_[d];
    const std::size_t boxes = tree.box_count(d);
    lv.offsets.assign(boxes + 1, 0);
    if (d < 3) continue;

    const ConeGrid& grid = hier.grid(d);
    const double side = tree.side(d);
    const auto& up = hier.levels_[d - 1];
    std::vector<std::uint32_t> marks;
    for (std::size_t b = 0; b < boxes; ++b) {
      marks.clear();
      const Vec3 center = tree.center(d, b);
      for (std::size_t c : tree.cousins(d, b)) {
        const PointRange pr = tree.points(d, c);
        for (std::uint32_t i = pr.begin; i < pr.end; ++i) {
          const auto loc = locate_segment(grid, center, side, sorted[i]);
          if (!loc) throw std::logic_error("cousin point inside the near region of box at level " + std::to_string(d));
          marks.push_back(loc->code);
        }
      }
      if (d >= 4) {
        const std::size_t pb = tree.parent(d, b);
        for (std::uint32_t slot = up.offsets[pb]; slot < up.offsets[pb + 1]; ++slot) {
          for (std::size_t k = 0; k < per_segment; ++k) {
            const auto loc = locate_segment(grid, center, side, up.nodes[slot * per_segment + k]);
            if (!loc) throw std::logic_error("parent node inside the near region of box at level " + std::to_string(d));
            marks.push_back(loc->code);
          }
        }
      }
      std::sort(marks.begin(), marks.end());
      marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
      lv.codes.insert(lv.codes.end(), marks.begin(), marks.end());
      lv.offsets[b + 1] = static_cast<std::uint32_t>(lv.codes.size());
    }

    lv.nodes.reserve(lv.codes.size() * per_segment);
    for (std::size_t b = 0; b < boxes; ++b) {
      const Vec3 center = tree.center(d, b);
      for (std::uint32_t slot = lv.offsets[b]; slot < lv.offsets[b + 1]; ++slot) {
        const auto pts = interpolation_nodes(grid, center, side, grid.gamma(lv.codes[slot]), ps, pang);
        lv.nodes.insert(lv.nodes.end(), pts.begin(), pts.end());
      }
    }
  }
  return hier;
}

}  // namespace ifgf
