#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "ifgf/evaluator.hpp"
#include "ifgf/geometry.hpp"
#include "ifgf/kernel.hpp"

using namespace ifgf;

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

std::vector<cplx> random_coeffs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> out(n);
  for (auto& z : out) z = {u(rng), u(rng)};
  return out;
}

}  // namespace

TEST_CASE("two points") {
  const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}};
  const std::vector<cplx> a{{1, 0}, {0, 2}};
  for (double kappa : {0.0, 3.0}) {
    const auto plan = precompute(pts, kappa);
    const auto out = evaluate(plan, a);
    const cplx g = std::exp(cplx{0, kappa}) / (4 * pi);
    CHECK(std::abs(out[0] - a[1] * g) < 1e-15);
    CHECK(std::abs(out[1] - a[0] * g) < 1e-15);
  }
}

TEST_CASE("zero coefficients give a zero field") {
  const auto cloud = gen_sphere(1.0, 8);
  const auto plan = precompute(cloud.points, 2.0);
  const auto out = evaluate(plan, std::vector<cplx>(cloud.size()));
  for (const auto& z : out) CHECK(z == cplx{0, 0});
  CHECK_THROWS_AS(evaluate(plan, std::vector<cplx>(3)), std::invalid_argument);
}

TEST_CASE("direct oracle") {
  const auto cloud = gen_rough_sphere(1.0, 6);
  const auto a = random_coeffs(cloud.size(), 3);
  const auto idx = all_indices(cloud.size());
  const auto ref = direct_oracle(cloud.points, a, 5.0, idx);

  // Relabeling the points permutes the output.
  std::vector<std::size_t> perm = idx;
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(9));
  std::vector<Vec3> p2;
  std::vector<cplx> a2;
  for (auto i : perm) {
    p2.push_back(cloud.points[i]);
    a2.push_back(a[i]);
  }
  const auto out2 = direct_oracle(p2, a2, 5.0, idx);
  for (std::size_t k = 0; k < perm.size(); ++k) CHECK(std::abs(out2[k] - ref[perm[k]]) <= 1e-13 * std::abs(ref[perm[k]]));

  const std::vector<std::size_t> few{3, 0, 17};
  const auto part = direct_oracle(cloud.points, a, 5.0, few);
  for (std::size_t k = 0; k < few.size(); ++k) CHECK(part[k] == ref[few[k]]);
  CHECK(direct_oracle(cloud.points, a, 5.0, few, 3) == part);
  CHECK_THROWS_AS(direct_oracle(cloud.points, a, 5.0, std::vector<std::size_t>{cloud.size()}), std::out_of_range);
}

TEST_CASE("relative error") {
  const std::vector<cplx> exact{{1, 0}, {0, 1}, {1, 1}};
  CHECK(relative_error(exact, exact) == 0.0);
  std::vector<cplx> acc = exact;
  acc[1] += cplx{0.5, 0};
  CHECK(relative_error(acc, exact) == doctest::Approx(0.25));
  const std::vector<cplx> doubled{{2, 0}, {0, 2}, {2, 2}};
  CHECK(relative_error(doubled, exact) == doctest::Approx(1.0));
  CHECK_THROWS_AS(relative_error(exact, std::vector<cplx>(3)), std::domain_error);
  CHECK_THROWS_AS(relative_error(exact, std::vector<cplx>(2, 1.0)), std::invalid_argument);
  const std::vector<std::size_t> sub{0, 2};
  CHECK(relative_error(acc, exact, sub) == 0.0);
}

TEST_CASE("random subset") {
  const auto s = random_subset(100, 30, 4);
  CHECK(s.size() == 30);
  std::set<std::size_t> u(s.begin(), s.end());
  CHECK(u.size() == 30);
  CHECK(*u.rbegin() < 100);
  CHECK(random_subset(100, 30, 4) == s);
  CHECK(random_subset(100, 30, 5) != s);
  CHECK(random_subset(10, 50, 1).size() == 10);
}

TEST_CASE("accuracy against the full oracle") {
  const auto cloud = gen_sphere(1.0, 16);
  const auto a = random_coeffs(cloud.size(), 11);
  const auto idx = all_indices(cloud.size());
  for (double ka : {0.0, pi, 4 * pi}) {
    CAPTURE(ka);
    const auto plan = precompute(cloud.points, ka);
    const auto err = relative_error(evaluate(plan, a), direct_oracle(cloud.points, a, ka, idx));
    CHECK(err < 1e-3);
    CHECK(err > 0.0);
  }
}

TEST_CASE("plan properties") {
  const auto cloud = gen_spheroid(1.0, 1.0, 0.6, 0.3, 14);
  const double kappa = 6.0;
  const auto plan = precompute(cloud.points, kappa);
  CHECK(plan.params().leaf_ns == kHelmholtzLeafNs);
  CHECK(plan.params().leaf_nc == kHelmholtzLeafNc);
  const auto a = random_coeffs(cloud.size(), 1), b = random_coeffs(cloud.size(), 2);
  const cplx alpha{0.3, -1.2}, beta{2.0, 0.5};

  SUBCASE("linearity") {
    std::vector<cplx> mix(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) mix[i] = alpha * a[i] + beta * b[i];
    const auto fa = evaluate(plan, a), fb = evaluate(plan, b), fm = evaluate(plan, mix);
    std::vector<cplx> comb(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) comb[i] = alpha * fa[i] + beta * fb[i];
    CHECK(relative_error(fm, comb) < 1e-12);
  }
  SUBCASE("plan reuse matches fresh plans") {
    const auto reuse_a = evaluate(plan, a);
    const auto reuse_b = evaluate(plan, b);
    CHECK(reuse_a == evaluate(precompute(cloud.points, kappa), a));
    CHECK(reuse_b == evaluate(precompute(cloud.points, kappa), b));
  }
  SUBCASE("threads do not change the result") {
    const auto serial = evaluate(plan, a, {1, nullptr});
    const auto parallel = evaluate(plan, a, {2, nullptr});
    CHECK(relative_error(parallel, serial) <= 1e-12);
    CHECK(parallel == serial);
  }
}

TEST_CASE("every pair is accounted for exactly once") {
  for (double kappa : {0.0, 8.0}) {
    const auto cloud = gen_rough_sphere(1.0, 12);
    REQUIRE(cloud.size() <= kMaxCoverageSize);
    const auto plan = precompute(cloud.points, kappa);
    CHECK(plan.depth() >= 3);
    std::vector<std::uint32_t> tally;
    evaluate(plan, cloud.coefficients, {1, &tally});
    const std::size_t n = cloud.size();
    REQUIRE(tally.size() == n * n);
    std::size_t bad = 0;
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t m = 0; m < n; ++m) bad += tally[l * n + m] != (l == m ? 0u : 1u);
    CHECK(bad == 0);
  }
  const auto big = gen_sphere(1.0, 19);
  std::vector<std::uint32_t> tally;
  CHECK_THROWS_AS(evaluate(precompute(big.points, 1.0), big.coefficients, {1, &tally}), std::invalid_argument);
}

TEST_CASE("laplace uses one grid on every level") {
  const auto cloud = gen_sphere(1.0, 20);
  const auto plan = precompute(cloud.points, 0.0);
  CHECK(plan.params().leaf_ns == kLaplaceLeafNs);
  CHECK(plan.params().leaf_nc == kLaplaceLeafNc);
  const auto stats = plan.level_stats();
  REQUIRE(stats.size() == static_cast<std::size_t>(plan.depth()));
  for (const auto& l : stats) CHECK((l.grid.n_s == kLaplaceLeafNs && l.grid.n_c == kLaplaceLeafNc));
  CHECK(stats[0].segments == 0);
  CHECK(stats[1].segments == 0);
}

TEST_CASE("bad parameters") {
  const auto cloud = gen_sphere(1.0, 4);
  CHECK_THROWS(precompute(cloud.points, -1.0));
  CHECK_THROWS(precompute(cloud.points, std::nan("")));
  EvaluatorParams p;
  p.ps = 0;
  CHECK_THROWS(precompute(cloud.points, 1.0, p));
  CHECK_THROWS(precompute(std::vector<Vec3>{}, 1.0));
}
