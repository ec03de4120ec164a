#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "ifgf/boxtree.hpp"
#include "ifgf/geometry.hpp"

using namespace ifgf;

namespace {

std::vector<Vec3> random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({u(rng), 0.5 * u(rng), 2.0 * u(rng)});
  return pts;
}

Vec3 root_lo(const BoxTree& t) { return t.root_center() - Vec3{1, 1, 1} * (0.5 * t.root_side()); }

// Linear scan over every level-d key with the half-open containment test.
BoxKey scan_box(const BoxTree& t, const Vec3& x, int d) {
  const int m = 1 << (d - 1);
  const double H = t.side(d);
  const Vec3 lo = root_lo(t);
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j)
      for (int k = 1; k <= m; ++k) {
        const std::array<int, 3> key{i, j, k};
        bool inside = true;
        for (int a = 0; a < 3 && inside; ++a) {
          const double b = lo[a] + (key[a] - 1) * H;
          inside = b <= x[a] && x[a] < b + H;
        }
        if (inside) return {d, key};
      }
  return {0, {0, 0, 0}};
}

std::set<BoxKey> keys_of(const BoxTree& t, int d, const std::vector<std::size_t>& idx) {
  std::set<BoxKey> out;
  for (auto i : idx) out.insert(t.key(d, i));
  return out;
}

}  // namespace

TEST_CASE("depth from the wavelength") {
  // H1 = 4 lambda -> D = 5.
  const double lambda = 0.5;
  CHECK(depth_for_wavelength(4 * lambda, 2 * pi / lambda) == 5);
  CHECK(depth_for_wavelength(lambda / 4, 2 * pi / lambda) == 1);
  CHECK_THROWS(depth_for_wavelength(1.0, 0.0));

  const auto sphere = gen_sphere(1.0, 64);
  const auto tree = BoxTree::build(sphere.points, 4.0 * pi);
  CHECK(tree.depth() == 5);
  const double lambda_s = 2 * pi / (4 * pi);
  CHECK(tree.side(5) == doctest::Approx(0.25 * lambda_s).epsilon(0.01));
}

TEST_CASE("root box and level geometry") {
  const auto pts = random_cloud(500, 1);
  const auto t = BoxTree::build(pts, 3.0);
  for (const auto& p : pts) {
    for (int a = 0; a < 3; ++a) {
      CHECK(p[a] >= root_lo(t)[a]);
      CHECK(p[a] < root_lo(t)[a] + t.root_side());
    }
  }
  CHECK(t.side(3) == t.root_side() / 4);
  const Vec3 c = t.center(BoxKey{2, {1, 1, 1}});
  CHECK(distance(c, t.root_center() - Vec3{1, 1, 1} * (t.root_side() / 4)) < 1e-15);
  CHECK(box_of_point(t, t.root_center(), 2) == BoxKey{2, {2, 2, 2}});
  for (int d = 1; d <= t.depth(); ++d) CHECK(box_of_point(t, root_lo(t), d) == BoxKey{d, {1, 1, 1}});
  CHECK_THROWS_AS(box_of_point(t, t.root_center() + Vec3{t.root_side(), 0, 0}, 2), std::out_of_range);
}

TEST_CASE("single point and degenerate clouds") {
  const std::vector<Vec3> one{{1, 2, 3}};
  const auto t = BoxTree::build(one, 5.0);
  CHECK(t.depth() == 1);
  CHECK(t.box_count(1) == 1);
  const std::vector<Vec3> same{{1, 1, 1}, {1, 1, 1}};
  CHECK_THROWS_AS(BoxTree::build(same, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(BoxTree::build(std::vector<Vec3>{}, 1.0), std::invalid_argument);
}

TEST_CASE("partition and box lookup against a linear scan") {
  for (std::uint64_t seed : {2u, 3u, 4u}) {
    const auto pts = random_cloud(700, seed);
    const auto t = BoxTree::build(pts, 0.0, TreeOptions{4, 16});
    REQUIRE(t.depth() == 4);
    const auto sorted = t.sorted_points();
    const auto perm = t.permutation();
    std::vector<int> seen(pts.size(), 0);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      ++seen[perm[i]];
      CHECK(sorted[i] == pts[perm[i]]);
    }
    for (int s : seen) CHECK(s == 1);

    for (int d = 1; d <= t.depth(); ++d) {
      std::uint32_t next = 0;
      for (std::size_t b = 0; b < t.box_count(d); ++b) {
        const auto r = t.points(d, b);
        CHECK(r.begin == next);
        CHECK(r.size() > 0);
        next = r.end;
        const BoxKey key = t.key(d, b);
        CHECK(t.find(key) == b);
        for (auto i = r.begin; i < r.end; ++i) {
          CHECK(box_of_point(t, sorted[i], d) == key);
          CHECK(scan_box(t, sorted[i], d) == key);
        }
        if (d >= 2) CHECK(t.key(d - 1, t.parent(d, b)) == parent(key));
      }
      CHECK(next == pts.size());
    }
  }
}

TEST_CASE("neighbors, children and cousins against the definitions") {
  const auto pts = gen_sphere(1.0, 12).points;
  const auto t = BoxTree::build(pts, 0.0, TreeOptions{5, 16});
  CHECK(t.neighbors(1, 0) == std::vector<std::size_t>{0});
  for (std::size_t b = 0; b < t.box_count(2); ++b) CHECK(t.neighbors(2, b).size() == t.box_count(2));

  CHECK(parent(BoxKey{3, {3, 4, 1}}) == BoxKey{2, {2, 2, 1}});
  CHECK_THROWS(parent(BoxKey{1, {1, 1, 1}}));

  for (int d = 1; d <= t.depth(); ++d) {
    std::map<BoxKey, std::size_t> all;
    for (std::size_t b = 0; b < t.box_count(d); ++b) all[t.key(d, b)] = b;
    for (const auto& [key, b] : all) {
      std::set<BoxKey> nb_expect, cousin_expect;
      for (const auto& [other, ob] : all) {
        int dist = 0;
        for (int a = 0; a < 3; ++a) dist = std::max(dist, std::abs(other.k[a] - key.k[a]));
        if (dist <= 1) nb_expect.insert(other);
      }
      if (d >= 2) {
        const BoxKey pk = parent(key);
        for (const auto& [other, ob] : all) {
          const BoxKey po = parent(other);
          int pd = 0;
          for (int a = 0; a < 3; ++a) pd = std::max(pd, std::abs(po.k[a] - pk.k[a]));
          if (pd <= 1 && !nb_expect.count(other)) cousin_expect.insert(other);
        }
      }
      const auto nb = t.neighbors(d, b);
      const auto co = t.cousins(d, b);
      CHECK(keys_of(t, d, nb) == nb_expect);
      CHECK(keys_of(t, d, co) == cousin_expect);
      CHECK(nb.size() <= 27);
      CHECK(co.size() <= 189);
      if (d <= 2) CHECK(co.empty());
      CHECK(std::is_sorted(nb.begin(), nb.end()));
      CHECK(std::is_sorted(co.begin(), co.end()));
      for (auto c : co) {
        const auto back = t.cousins(d, c);
        CHECK(std::binary_search(back.begin(), back.end(), b));
        // Every point of a cousin is at least 1.5 H from the box center.
        const auto r = t.points(d, c);
        for (auto i = r.begin; i < r.end; ++i) CHECK(distance(t.sorted_points()[i], t.center(d, b)) >= 1.5 * t.side(d));
      }
      if (d < t.depth()) {
        const auto ch = t.children(d, b);
        CHECK(ch.size() >= 1);
        CHECK(ch.size() <= 8);
        for (auto c : ch) CHECK(t.parent(d + 1, c) == b);
      }
      const auto keyed = ifgf::neighbors(t, key);
      CHECK(std::set<BoxKey>(keyed.begin(), keyed.end()) == nb_expect);
      const auto keyed_c = ifgf::cousins(t, key);
      CHECK(std::set<BoxKey>(keyed_c.begin(), keyed_c.end()) == cousin_expect);
    }
  }
}

TEST_CASE("cousin bound on a full grid") {
  // A full 8 x 8 x 8 grid of points at level 4: interior boxes reach 189 cousins.
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int k = 0; k < 8; ++k) pts.push_back({i + 0.5, j + 0.5, k + 0.5});
  const auto t = BoxTree::build(pts, 0.0, TreeOptions{4, 1});
  REQUIRE(t.box_count(4) == 512);
  std::size_t most = 0;
  for (std::size_t b = 0; b < t.box_count(4); ++b) most = std::max(most, t.cousins(4, b).size());
  CHECK(most == 189);
}

TEST_CASE("laplace depth rule keeps mean leaf occupancy under the target") {
  const auto pts = gen_sphere(1.0, 32).points;
  for (int target : {8, 16, 32, 64}) {
    const auto t = BoxTree::build(pts, 0.0, TreeOptions{0, target});
    const double mean = static_cast<double>(pts.size()) / t.box_count(t.depth());
    CHECK(mean <= target);
    if (t.depth() > 1) CHECK(static_cast<double>(pts.size()) / t.box_count(t.depth() - 1) > target);
  }
}
