#include "ifgf/evaluator.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ifgf/kernel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ifgf {

namespace {

int clamp_threads(int threads) { return threads < 1 ? 1 : threads; }

[[noreturn]] void invariant_failure(const std::string& what) {
  throw std::logic_error("internal invariant violated: " + what);
}

// Pairwise summation of v[lo, hi).
cplx pairwise_sum(const cplx* v, std::size_t n) {
  if (n <= 8) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += v[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

// First exception thrown inside a parallel loop, rethrown after the loop joins.
class ErrorSlot {
 public:
  template <class F>
  void run(F&& body) {
    try {
      body();
    } catch (...) {
#pragma omp critical(ifgf_error_slot)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

std::span<const std::uint32_t> EvaluationPlan::cousins(int level, std::size_t box) const {
  const Csr& c = cousins_.at(level);
  if (c.offsets.empty()) return {};
  return std::span<const std::uint32_t>(c.items).subspan(c.offsets.at(box), c.offsets.at(box + 1) - c.offsets[box]);
}

std::span<const std::uint32_t> EvaluationPlan::neighbors(std::size_t leaf_box) const {
  const Csr& c = leaf_neighbors_;
  return std::span<const std::uint32_t>(c.items).subspan(c.offsets.at(leaf_box),
                                                         c.offsets.at(leaf_box + 1) - c.offsets[leaf_box]);
}

std::vector<LevelStats> EvaluationPlan::level_stats() const {
  std::vector<LevelStats> out;
  for (int d = 1; d <= depth(); ++d) {
    out.push_back({d, tree_.side(d), tree_.box_count(d), cones_.segment_count(d), cones_.grid(d)});
  }
  return out;
}

EvaluatorParams resolve_params(EvaluatorParams params, double kappa) {
  const bool laplace = Wavenumber(kappa).is_laplace();
  if (params.leaf_ns == 0) params.leaf_ns = laplace ? kLaplaceLeafNs : kHelmholtzLeafNs;
  if (params.leaf_nc == 0) params.leaf_nc = laplace ? kLaplaceLeafNc : kHelmholtzLeafNc;
  return params;
}

EvaluationPlan precompute(std::span<const Vec3> points, double kappa, const EvaluatorParams& requested) {
  const Wavenumber k(kappa);
  const EvaluatorParams params = resolve_params(requested, kappa);
  EvaluationPlan plan(params.ps, params.pang);
  plan.kappa_ = k.value();
  plan.params_ = params;
  plan.tree_ = BoxTree::build(points, plan.kappa_, TreeOptions{params.depth, params.leaf_size_target});

  const int depth = plan.tree_.depth();
  std::vector<double> sides;
  for (int d = 1; d <= depth; ++d) sides.push_back(plan.tree_.side(d));
  plan.cones_ = compute_relevant_segments(
      plan.tree_, refinement_schedule(plan.kappa_, sides, params.leaf_ns, params.leaf_nc), params.ps, params.pang);

  plan.cousins_.resize(depth + 1);
  for (int d = 3; d <= depth; ++d) {
    auto& csr = plan.cousins_[d];
    csr.offsets.push_back(0);
    for (std::size_t b = 0; b < plan.tree_.box_count(d); ++b) {
      for (std::size_t c : plan.tree_.cousins(d, b)) csr.items.push_back(static_cast<std::uint32_t>(c));
      csr.offsets.push_back(static_cast<std::uint32_t>(csr.items.size()));
    }
  }
  auto& nb = plan.leaf_neighbors_;
  nb.offsets.push_back(0);
  for (std::size_t b = 0; b < plan.tree_.box_count(depth); ++b) {
    for (std::size_t c : plan.tree_.neighbors(depth, b)) nb.items.push_back(static_cast<std::uint32_t>(c));
    nb.offsets.push_back(static_cast<std::uint32_t>(nb.items.size()));
  }
  return plan;
}

std::vector<cplx> evaluate(const EvaluationPlan& plan, std::span<const cplx> coefficients,
                           const EvaluateOptions& options) {
  const std::size_t n = plan.size();
  if (coefficients.size() != n) throw std::invalid_argument("evaluate: expected one coefficient per point");
  const int threads = clamp_threads(options.threads);
  (void)threads;

  std::uint32_t* hits = nullptr;
  if (options.pair_coverage) {
    if (n > kMaxCoverageSize) throw std::invalid_argument("evaluate: pair coverage tally limited to N <= 2048");
    options.pair_coverage->assign(n * n, 0);
    hits = options.pair_coverage->data();
  }

  const BoxTree& tree = plan.tree();
  const ConeHierarchy& cones = plan.cones();
  const ChebTransform& transform = plan.transform();
  const auto pts = tree.sorted_points();
  const auto perm = tree.permutation();
  const double kappa = plan.kappa();
  const int depth = tree.depth();
  const std::size_t per_segment = transform.size();

  std::vector<cplx> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = coefficients[perm[i]];
  std::vector<cplx> field(n, cplx{0.0, 0.0});

  // Leaf level: direct neighbor sums and direct node values.
  const std::size_t leaves = tree.box_count(depth);
  std::vector<cplx> values(cones.segment_count(depth) * per_segment);
  ErrorSlot errors;
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (std::size_t b = 0; b < leaves; ++b) errors.run([&] {
    const PointRange tr = tree.points(depth, b);
    const auto nbrs = plan.neighbors(b);
    for (std::uint32_t i = tr.begin; i < tr.end; ++i) {
      const Vec3 x = pts[i];
      double re = 0.0, im = 0.0;
      for (std::uint32_t nbox : nbrs) {
        const PointRange sr = tree.points(depth, nbox);
        for (std::uint32_t j = sr.begin; j < sr.end; ++j) {
          if (j == i) continue;
          const cplx v = mul(a[j], detail::green_unchecked(distance(x, pts[j]), kappa));
          re += v.real();
          im += v.imag();
          if (hits) ++hits[perm[i] * n + perm[j]];
        }
      }
      field[i] += cplx{re, im};
    }

    const Vec3 center = tree.center(depth, b);
    const std::size_t first = cones.first_slot(depth, b);
    const std::size_t count = cones.segments(depth, b).size();
    for (std::size_t slot = first; slot < first + count; ++slot) {
      const auto nodes = cones.nodes(depth, slot);
      for (std::size_t k = 0; k < per_segment; ++k) {
        const Vec3 x = nodes[k];
        const double dc = distance(x, center);
        double re = 0.0, im = 0.0;
        for (std::uint32_t j = tr.begin; j < tr.end; ++j) {
          const cplx v = mul(a[j], detail::analytic_unchecked(distance(x, pts[j]), dc, kappa));
          re += v.real();
          im += v.imag();
        }
        values[slot * per_segment + k] = {re, im};
      }
    }
  });
  errors.rethrow();

  // Upward pass.
  std::vector<cplx> coeffs;
  for (int d = depth; d >= 3; --d) {
    const ConeGrid& grid = cones.grid(d);
    const double side = tree.side(d);
    const std::size_t boxes = tree.box_count(d);
    const std::size_t segments = cones.segment_count(d);

    coeffs.assign(segments * per_segment, cplx{0.0, 0.0});
#pragma omp parallel num_threads(threads)
    {
      std::vector<cplx> work(per_segment);
#pragma omp for schedule(static)
      for (std::size_t slot = 0; slot < segments; ++slot) {
        transform.fit(std::span<const cplx>(values).subspan(slot * per_segment, per_segment),
                      std::span<cplx>(coeffs).subspan(slot * per_segment, per_segment), work);
      }
    }
    std::vector<cplx>().swap(values);

    const auto interpolate = [&](std::size_t box, const Vec3& center, const Vec3& x, int at_level) -> cplx {
      const auto loc = locate_segment(grid, center, side, x);
      if (!loc) invariant_failure("target inside the near region of an interpolating box at level " +
                                  std::to_string(at_level));
      const auto slot = cones.find_slot(at_level, box, loc->code);
      if (!slot) invariant_failure("missing relevant segment at level " + std::to_string(at_level));
      return transform.eval(std::span<const cplx>(coeffs).subspan(*slot * per_segment, per_segment), loc->ts,
                            loc->tt, loc->tp);
    };

    // Cousin evaluation, owned by the target box. The cousin relation is symmetric.
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
      for (std::size_t t = 0; t < boxes; ++t) errors.run([&] {
      const PointRange tr = tree.points(d, t);
      const auto cousin_boxes = plan.cousins(d, t);
      for (std::uint32_t c : cousin_boxes) {
        const Vec3 center = tree.center(d, c);
        for (std::uint32_t i = tr.begin; i < tr.end; ++i) {
          const Vec3 x = pts[i];
          const cplx f = interpolate(c, center, x, d);
          field[i] += mul(f, detail::green_unchecked(distance(x, center), kappa));
          if (hits) {
            const PointRange sr = tree.points(d, c);
            for (std::uint32_t j = sr.begin; j < sr.end; ++j) ++hits[perm[i] * n + perm[j]];
          }
        }
      }
    });
    errors.rethrow();

    if (d == 3) break;

    // Re-centered accumulation onto parent nodes, owned by the parent box.
    const std::size_t parents = tree.box_count(d - 1);
    values.assign(cones.segment_count(d - 1) * per_segment, cplx{0.0, 0.0});
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
    for (std::size_t p = 0; p < parents; ++p) errors.run([&] {
      const Vec3 parent_center = tree.center(d - 1, p);
      const std::size_t first = cones.first_slot(d - 1, p);
      const std::size_t count = cones.segments(d - 1, p).size();
      if (count == 0) return;
      for (std::size_t c : tree.children(d - 1, p)) {
        const Vec3 child_center = tree.center(d, c);
        for (std::size_t slot = first; slot < first + count; ++slot) {
          const auto nodes = cones.nodes(d - 1, slot);
          for (std::size_t k = 0; k < per_segment; ++k) {
            const Vec3 x = nodes[k];
            const cplx f = interpolate(c, child_center, x, d);
            const cplx shift =
                detail::analytic_unchecked(distance(x, child_center), distance(x, parent_center), kappa);
            values[slot * per_segment + k] += mul(f, shift);
          }
        }
      }
    });
    errors.rethrow();
  }

  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[perm[i]] = field[i];
  return out;
}

std::vector<cplx> direct_oracle(std::span<const Vec3> points, std::span<const cplx> coefficients, double kappa,
                                std::span<const std::size_t> targets, int threads) {
  if (points.size() != coefficients.size()) {
    throw std::invalid_argument("direct_oracle: point and coefficient counts differ");
  }
  const Wavenumber k(kappa);
  for (std::size_t t : targets) {
    if (t >= points.size()) throw std::out_of_range("direct_oracle: target index out of range");
  }
  const std::size_t n = points.size();
  std::vector<cplx> out(targets.size());
  threads = clamp_threads(threads);
  ErrorSlot errors;
#pragma omp parallel num_threads(threads)
  {
    std::vector<cplx> terms(n);
#pragma omp for schedule(dynamic, 16)
    for (std::size_t q = 0; q < targets.size(); ++q) errors.run([&] {
      const std::size_t l = targets[q];
      const Vec3 x = points[l];
      for (std::size_t m = 0; m < n; ++m) {
        terms[m] = m == l ? cplx{0.0, 0.0} : coefficients[m] * green(x, points[m], k.value());
      }
      out[q] = pairwise_sum(terms.data(), n);
    });
  }
  errors.rethrow();
  return out;
}

double relative_error(std::span<const cplx> acc, std::span<const cplx> exact) {
  if (acc.size() != exact.size()) throw std::invalid_argument("relative_error: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    num += std::norm(exact[i] - acc[i]);
    den += std::norm(exact[i]);
  }
  if (!(den > 0.0)) throw std::domain_error("relative_error: exact values are all zero");
  return std::sqrt(num / den);
}

double relative_error(std::span<const cplx> acc, std::span<const cplx> exact, std::span<const std::size_t> subset) {
  if (acc.size() != exact.size()) throw std::invalid_argument("relative_error: length mismatch");
  std::vector<cplx> a, e;
  a.reserve(subset.size());
  e.reserve(subset.size());
  for (std::size_t i : subset) {
    a.push_back(acc[i]);
    e.push_back(exact[i]);
  }
  return relative_error(a, e);
}

std::vector<std::size_t> random_subset(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw so the order is library independent.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  idx.resize(std::min(n, m));
  return idx;
}

std::uint64_t peak_memory_bytes() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream fields(line.substr(6));
      std::uint64_t kb = 0;
      fields >> kb;
      return kb * 1024;
    }
  }
  return 0;
}

}  // namespace ifgf
