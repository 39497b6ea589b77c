#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "manylat/lattice.hpp"

using namespace manylat;

TEST_CASE("box conventions: sides count sites", "[lattice]") {
  Box b = Box::interval(0, 5);
  REQUIRE(b.volume() == 6);
  REQUIRE(b.contains({0}));
  REQUIRE(b.contains({5}));
  REQUIRE_FALSE(b.contains({6}));

  Box c = Box::centered_cube(2, 6);
  REQUIRE(c.sides == IVec{7, 7});
  REQUIRE(c.corner == IVec{-3, -3});
  REQUIRE(c.volume() == 49);
  REQUIRE(c.contains({-3, 3}));
  REQUIRE_FALSE(c.contains({4, 0}));
}

TEST_CASE("site enumeration is lexicographic and invertible", "[lattice]") {
  Box b(2, {1, -1}, {3, 4});
  Domain dom(b);
  REQUIRE(dom.size() == 12);
  for (long i = 0; i < b.volume(); ++i) REQUIRE(dom.index_of(b.site(i)) >= 0);
  REQUIRE(std::is_sorted(dom.sites.begin(), dom.sites.end()));
  for (long i = 0; i < dom.size(); ++i) REQUIRE(dom.index_of(dom.sites[i]) == i);
}

TEST_CASE("box distance matches hand values and detects intersection", "[lattice]") {
  REQUIRE(box_distance(Box::interval(0, 5), Box::interval(9, 14)) == 4.0);
  REQUIRE(box_distance(Box::interval(0, 5), Box::interval(5, 9)) == 0.0);
  Box a(2, {0, 0}, {2, 2});
  Box b(2, {4, 5}, {2, 2});
  REQUIRE(box_distance(a, b) == Catch::Approx(std::sqrt(3.0 * 3.0 + 4.0 * 4.0)));
  REQUIRE(box_distance(a, a) == 0.0);
}

TEST_CASE("box distance is zero iff the boxes share a site", "[lattice]") {
  for (long c1 = -2; c1 <= 4; ++c1) {
    Box a = Box::interval(0, 2);
    Box b = Box::interval(c1, c1 + 1);
    bool meet = !a.disjoint(b);
    REQUIRE((box_distance(a, b) == 0.0) == meet);
  }
}

TEST_CASE("boundary ratio reproduces the reference values", "[lattice]") {
  // d=1, depth cutoff below one lattice step: the two endpoints
  for (long L : {4L, 10L, 50L})
    REQUIRE(boundary_ratio(Box::interval(0, L - 1), 0.0) == Catch::Approx(2.0 / double(L)));
  // d=2 side 10, h=1: outer ring of 36 sites out of 100
  REQUIRE(boundary_ratio(Box(2, {0, 0}, {10, 10}), 1.0) == Catch::Approx(0.36));
  // cutoff beyond the diameter: everything is boundary
  Box small(2, {0, 0}, {4, 4});
  REQUIRE(boundary_ratio(small, small.diameter() + 1) == 1.0);
}

TEST_CASE("boundary ratio vanishes as the box grows at fixed depth", "[lattice]") {
  double prev = 1.0;
  for (long L : {10L, 40L, 160L}) {
    double r = boundary_ratio(Box::interval(0, L - 1), 2.0);
    REQUIRE(r < prev);
    prev = r;
  }
  REQUIRE(prev < 0.05);
}

TEST_CASE("domains reject overlapping boxes and support union", "[lattice]") {
  Box a = Box::interval(0, 5), b = Box::interval(9, 14);
  Domain u = domain_union(Domain(a), Domain(b));
  REQUIRE(u.size() == 12);
  REQUIRE_THROWS_AS(Domain(std::vector<Box>{a, Box::interval(5, 7)}), GeometryError);
  REQUIRE_THROWS_AS(domain_union(Domain(a), Domain(Box::interval(3, 4))), GeometryError);
  REQUIRE(domain_distance(Domain(a), Domain(b)) == 4.0);
}

TEST_CASE("interior strips a layer of the declared depth", "[lattice]") {
  Domain dom(Box::interval(0, 9));
  Domain in1 = dom.interior(1.0);
  REQUIRE(in1.size() == 8);
  REQUIRE(in1.contains({1}));
  REQUIRE_FALSE(in1.contains({0}));
  REQUIRE(in1.is_subset_of(dom));
  REQUIRE_THROWS_AS(Domain(Box::interval(0, 2)).interior(5.0), GeometryError);

  // d=2: a Euclidean ball of radius 1.5 covers all 8 surrounding sites
  Domain sq(Box(2, {0, 0}, {5, 5}));
  Domain in = sq.interior(1.5);
  REQUIRE(in.size() == 9);
  for (const IVec& x : in.sites)
    for (const IVec& off : {IVec{1, 0}, IVec{-1, 0}, IVec{0, 1}, IVec{0, -1}}) {
      IVec y = x;
      y[0] += off[0];
      y[1] += off[1];
      REQUIRE(sq.contains(y));
    }
}

TEST_CASE("translation shifts sites exactly", "[lattice]") {
  Domain dom(Box(2, {0, 0}, {3, 2}));
  Domain t = dom.translated({5, -1});
  REQUIRE(t.size() == dom.size());
  for (long i = 0; i < dom.size(); ++i) {
    REQUIRE(t.sites[i][0] == dom.sites[i][0] + 5);
    REQUIRE(t.sites[i][1] == dom.sites[i][1] - 1);
  }
}

TEST_CASE("cube sequence reproduces the reference ladder", "[lattice]") {
  CubeSequenceParams p;  // d=1, theta=1.5, Ltilde=16, R0=1, delta=4, lambda=2
  REQUIRE(p.R() == Catch::Approx(10.0));
  CubeFamily fam = make_cube_sequence(p, 2);
  REQUIRE(fam.levels.size() == 3);
  REQUIRE(fam.levels[0].L == 6);
  REQUIRE(fam.levels[1].L == 16);
  REQUIRE(fam.levels[2].L == 40);
  REQUIRE(fam.levels[0].cube.volume() == 7);
  REQUIRE(fam.levels[0].gap == 4);
  REQUIRE(fam.levels[1].gap == 8);

  // the 2^d translates sit inside the next cube, disjoint, spaced >= R0
  for (int N = 0; N < 2; ++N) {
    const CubeLevel& lvl = fam.levels[size_t(N)];
    REQUIRE(lvl.gammas.size() == 2);
    Box outer = fam.levels[size_t(N) + 1].cube;
    Box t0 = lvl.cube.translated(lvl.gammas[0]);
    Box t1 = lvl.cube.translated(lvl.gammas[1]);
    REQUIRE(t0.disjoint(t1));
    REQUIRE(box_distance(t0, t1) >= p.R0);
    for (const Box& t : {t0, t1})
      for (long i = 0; i < t.volume(); ++i) REQUIRE(outer.contains(t.site(i)));
  }
}

TEST_CASE("cube sequence sides stay within 2 of the real target", "[lattice]") {
  CubeSequenceParams p;
  p.Ltilde = 30;
  CubeFamily fam = make_cube_sequence(p, 3);
  double R = p.R();
  for (int N = 0; N <= 3; ++N) {
    double target = std::pow(2.0, N) * p.Ltilde - std::pow(p.theta, N) * R;
    REQUIRE(std::abs(double(fam.levels[size_t(N)].L) - target) <= 2.0);
    REQUIRE(fam.levels[size_t(N)].L % 2 == 0);
  }
}

TEST_CASE("cube sequence validation names the violated constraint", "[lattice]") {
  CubeSequenceParams p;
  p.theta = 2.5;
  REQUIRE_THROWS_WITH(make_cube_sequence(p, 1), Catch::Matchers::ContainsSubstring("theta"));
  p = CubeSequenceParams{};
  p.lambda = 0.5;  // lambda > d fails
  REQUIRE_THROWS_WITH(make_cube_sequence(p, 1), Catch::Matchers::ContainsSubstring("lambda"));
  p = CubeSequenceParams{};
  p.Ltilde = 5;  // below R = 10
  REQUIRE_THROWS_AS(make_cube_sequence(p, 1), ConfigError);
  p = CubeSequenceParams{};
  REQUIRE_NOTHROW(make_cube_sequence(p, 0));  // single level needs no gap
}
