#ifndef IFGF_EVALUATOR_HPP
#define IFGF_EVALUATOR_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ifgf/boxtree.hpp"
#include "ifgf/cheb.hpp"
#include "ifgf/conehier.hpp"
#include "ifgf/types.hpp"

namespace ifgf {

struct EvaluatorParams {
  int ps = 3;
  int pang = 5;
  /// Leaf cone grid; 0 selects the default for the wavenumber, (1, 2) for
  /// kappa > 0 and (3, 3) on every level for kappa = 0.
  int leaf_ns = 0;
  int leaf_nc = 0;
  /// Tree depth override; 0 selects the automatic rule.
  int depth = 0;
  int leaf_size_target = 32;
};

inline constexpr int kHelmholtzLeafNs = 1;
inline constexpr int kHelmholtzLeafNc = 2;
inline constexpr int kLaplaceLeafNs = 3;
inline constexpr int kLaplaceLeafNc = 3;

/// Params with automatic leaf-grid entries replaced by the defaults for kappa.
EvaluatorParams resolve_params(EvaluatorParams params, double kappa);

struct LevelStats {
  int level = 1;
  double side = 0.0;
  std::size_t boxes = 0;
  std::size_t segments = 0;
  ConeGrid grid;
};

/// Everything about an evaluation that does not depend on the coefficients:
/// tree, cone grids, relevant segments with cached nodes, and cousin lists.
class EvaluationPlan {
 public:
  const BoxTree& tree() const { return tree_; }
  const ConeHierarchy& cones() const { return cones_; }
  double kappa() const { return kappa_; }
  const EvaluatorParams& params() const { return params_; }
  const ChebTransform& transform() const { return transform_; }
  std::size_t size() const { return tree_.num_points(); }
  int depth() const { return tree_.depth(); }

  std::span<const std::uint32_t> cousins(int level, std::size_t box) const;
  std::span<const std::uint32_t> neighbors(std::size_t leaf_box) const;

  std::vector<LevelStats> level_stats() const;

 private:
  friend EvaluationPlan precompute(std::span<const Vec3>, double, const EvaluatorParams&);

  EvaluationPlan(int ps, int pang) : transform_(ps, pang) {}

  struct Csr {
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> items;
  };

  BoxTree tree_;
  ConeHierarchy cones_;
  double kappa_ = 0.0;
  EvaluatorParams params_;
  ChebTransform transform_;
  std::vector<Csr> cousins_;  // index 0 unused
  Csr leaf_neighbors_;
};

EvaluationPlan precompute(std::span<const Vec3> points, double kappa, const EvaluatorParams& params = {});

struct EvaluateOptions {
  /// Worker threads; 1 runs the sequential reference path. Results do not depend on it.
  int threads = 1;
  /// Debug tally of (target, source) pairs accounted for, row-major N x N in
  /// original point order. Only allowed for N <= kMaxCoverageSize.
  std::vector<std::uint32_t>* pair_coverage = nullptr;
};

inline constexpr std::size_t kMaxCoverageSize = 2048;

/// I(x_l) = sum over m != l of a_m G(x_l, x_m) for every point, in original order.
std::vector<cplx> evaluate(const EvaluationPlan& plan, std::span<const cplx> coefficients,
                           const EvaluateOptions& options = {});

/// Exact O(N |targets|) summation at the given target indices, self term excluded.
std::vector<cplx> direct_oracle(std::span<const Vec3> points, std::span<const cplx> coefficients, double kappa,
                                std::span<const std::size_t> targets, int threads = 1);

/// sqrt(sum |exact - acc|^2 / sum |exact|^2). Throws std::domain_error if the
/// denominator vanishes.
double relative_error(std::span<const cplx> acc, std::span<const cplx> exact);
/// Same, restricted to entries `subset` of full-length vectors.
double relative_error(std::span<const cplx> acc, std::span<const cplx> exact, std::span<const std::size_t> subset);

/// First min(m, n) entries of a seeded random permutation of 0..n-1.
std::vector<std::size_t> random_subset(std::size_t n, std::size_t m, std::uint64_t seed);

/// Resident-set high-water mark in bytes, 0 where the platform does not expose it.
std::uint64_t peak_memory_bytes();

}  // namespace ifgf

#endif  // IFGF_EVALUATOR_HPP
