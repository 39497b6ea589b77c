#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "manylat/manybody.hpp"
#include "manylat/oneparticle.hpp"

using namespace manylat;
using Catch::Matchers::WithinAbs;

namespace {

PotentialField flat_field(const Domain& dom) {
  return sample_potential(DisorderSpec::constant(0.0), dom, 1, 0);
}

std::vector<double> dense_levels(const Domain& dom, const PotentialField& f, long n,
                                 Statistics st, const InteractionSpec& inter,
                                 double r0 = 0) {
  BasisSet b = enumerate_basis(dom, n, st, r0);
  return diagonalize(assemble_many_body(b, f, inter).matrix, true).evals;
}

}  // namespace

TEST_CASE("two bosons on two sites solve in closed form", "[manybody]") {
  Domain dom(Box::interval(0, 1));
  BasisSet b = enumerate_basis(dom, 2, Statistics::bose);
  REQUIRE(b.dim() == 3);
  auto H = assemble_many_body(b, flat_field(dom), InteractionSpec::none_interaction()).matrix;
  double s2 = std::sqrt(2.0);
  REQUIRE(H(0, 0) == 4.0);
  REQUIRE(H(1, 1) == 4.0);
  REQUIRE(H(2, 2) == 4.0);
  REQUIRE_THAT(H(1, 0), WithinAbs(-s2, 1e-15));
  REQUIRE_THAT(H(2, 1), WithinAbs(-s2, 1e-15));
  REQUIRE(H(2, 0) == 0.0);
  auto evals = diagonalize(H, true).evals;
  REQUIRE_THAT(evals[0], WithinAbs(2.0, 1e-12));
  REQUIRE_THAT(evals[1], WithinAbs(4.0, 1e-12));
  REQUIRE_THAT(evals[2], WithinAbs(6.0, 1e-12));
}

TEST_CASE("two fermions fill two sites completely", "[manybody]") {
  Domain dom(Box::interval(0, 1));
  auto evals = dense_levels(dom, flat_field(dom), 2, Statistics::fermi,
                            InteractionSpec::none_interaction());
  REQUIRE(evals.size() == 1);
  REQUIRE_THAT(evals[0], WithinAbs(4.0, 1e-12));
}

TEST_CASE("two distinguishable particles on two sites", "[manybody]") {
  Domain dom(Box::interval(0, 1));
  auto evals = dense_levels(dom, flat_field(dom), 2, Statistics::boltzmann,
                            InteractionSpec::none_interaction());
  REQUIRE(evals.size() == 4);
  REQUIRE_THAT(evals[0], WithinAbs(2.0, 1e-12));
  REQUIRE_THAT(evals[1], WithinAbs(4.0, 1e-12));
  REQUIRE_THAT(evals[2], WithinAbs(4.0, 1e-12));
  REQUIRE_THAT(evals[3], WithinAbs(6.0, 1e-12));
}

TEST_CASE("free sectors are sums of one-body levels", "[manybody]") {
  // a 2x3 grid makes fermionic hops jump over occupied sites in the site
  // ordering, so the sign bookkeeping is load-bearing here
  Domain dom(Box(2, {0, 0}, {2, 3}));
  DisorderSpec dis = DisorderSpec::uniform(0.0, 1.0);
  PotentialField f = sample_potential(dis, dom, 7, 0);
  std::vector<double> one = diagonalize(assemble_one_body(dom, f).matrix, true).evals;
  long m = long(one.size());

  auto check = [&](Statistics st, const std::vector<double>& expected_sorted) {
    auto got = dense_levels(dom, f, 2, st, InteractionSpec::none_interaction());
    REQUIRE(got.size() == expected_sorted.size());
    for (size_t k = 0; k < got.size(); ++k)
      REQUIRE_THAT(got[k], WithinAbs(expected_sorted[k], 1e-9));
  };

  std::vector<double> fermi_sums, bose_sums, boltz_sums;
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < m; ++j) {
      boltz_sums.push_back(one[i] + one[j]);
      if (i < j) fermi_sums.push_back(one[i] + one[j]);
      if (i <= j) bose_sums.push_back(one[i] + one[j]);
    }
  std::sort(fermi_sums.begin(), fermi_sums.end());
  std::sort(bose_sums.begin(), bose_sums.end());
  std::sort(boltz_sums.begin(), boltz_sums.end());
  check(Statistics::fermi, fermi_sums);
  check(Statistics::bose, bose_sums);
  check(Statistics::boltzmann, boltz_sums);

  // three fermions, same idea
  std::vector<double> triples;
  for (long i = 0; i < m; ++i)
    for (long j = i + 1; j < m; ++j)
      for (long k = j + 1; k < m; ++k) triples.push_back(one[i] + one[j] + one[k]);
  std::sort(triples.begin(), triples.end());
  auto got3 = dense_levels(dom, f, 3, Statistics::fermi, InteractionSpec::none_interaction());
  REQUIRE(got3.size() == triples.size());
  for (size_t k = 0; k < got3.size(); ++k)
    REQUIRE_THAT(got3[k], WithinAbs(triples[k], 1e-9));
}

TEST_CASE("assembled matrices are exactly symmetric", "[manybody]") {
  Domain dom(Box(2, {0, 0}, {3, 2}));
  PotentialField f = sample_potential(DisorderSpec::uniform(0.0, 2.0), dom, 3, 5);
  auto inter = InteractionSpec::yukawa(0.7, 1.3);
  for (Statistics st : {Statistics::boltzmann, Statistics::bose, Statistics::fermi}) {
    BasisSet b = enumerate_basis(dom, 2, st);
    auto H = assemble_many_body(b, f, inter).matrix;
    REQUIRE((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("pair energies enter the diagonal only", "[manybody]") {
  Domain dom(Box::interval(0, 2));
  auto inter = InteractionSpec::compact({0.0, 3.0, 0.0, 0.0, 0.5});
  REQUIRE(pair_energy(inter, dom, {0, 1}) == 3.0);
  REQUIRE(pair_energy(inter, dom, {0, 2}) == 0.5);
  REQUIRE(pair_energy(inter, dom, {0, 1, 2}) == 3.0 + 3.0 + 0.5);

  PotentialField f = flat_field(dom);
  BasisSet b = enumerate_basis(dom, 2, Statistics::bose);
  auto H0 = assemble_many_body(b, f, InteractionSpec::none_interaction()).matrix;
  auto H1 = assemble_many_body(b, f, inter).matrix;
  Eigen::MatrixXd diff = H1 - H0;
  for (long r = 0; r < b.dim(); ++r) {
    REQUIRE(diff(r, r) == pair_energy(inter, dom, b.configs[size_t(r)]));
    for (long c = 0; c < b.dim(); ++c)
      if (c != r) REQUIRE(diff(r, c) == 0.0);
  }
}

TEST_CASE("hard cores must agree between basis and interaction", "[manybody]") {
  Domain dom(Box::interval(0, 2));
  auto inter = InteractionSpec::hardcore(1.5);
  PotentialField f = flat_field(dom);
  BasisSet plain = enumerate_basis(dom, 2, Statistics::bose);
  REQUIRE_THROWS_AS(assemble_many_body(plain, f, inter), ConfigError);
  BasisSet wrong = enumerate_basis(dom, 2, Statistics::bose, 1.0);
  REQUIRE_THROWS_AS(assemble_many_body(wrong, f, inter), ConfigError);

  // r0 = 1.5 on three sites leaves the single configuration {0, 2}; a tail
  // acting at squared distance 4 shifts its energy and no hop survives
  auto tail = std::make_shared<InteractionSpec>(InteractionSpec::compact({0, 0, 0, 0, 5.0}));
  auto core = InteractionSpec::hardcore(1.5, tail);
  BasisSet b = enumerate_basis(dom, 2, Statistics::bose, 1.5);
  REQUIRE(b.dim() == 1);
  auto H = assemble_many_body(b, f, core).matrix;
  REQUIRE(H.rows() == 1);
  REQUIRE(H(0, 0) == 9.0);
}

TEST_CASE("field and basis domains must match", "[manybody]") {
  Domain dom(Box::interval(0, 2));
  Domain other(Box::interval(0, 3));
  BasisSet b = enumerate_basis(dom, 2, Statistics::bose);
  PotentialField f = flat_field(other);
  REQUIRE_THROWS_AS(assemble_many_body(b, f, InteractionSpec::none_interaction()),
                    ConfigError);
}

TEST_CASE("best-first sector search matches the dense free spectrum", "[manybody]") {
  Domain dom(Box::interval(0, 2));
  PotentialField f = sample_potential(DisorderSpec::uniform(0.0, 1.0), dom, 11, 2);
  std::vector<double> one = diagonalize(assemble_one_body(dom, f).matrix).evals;
  for (Statistics st : {Statistics::boltzmann, Statistics::bose, Statistics::fermi}) {
    auto dense = dense_levels(dom, f, 2, st, InteractionSpec::none_interaction());
    for (long k = 1; k <= long(dense.size()); ++k)
      REQUIRE_THAT(free_sector_energy(one, 2, st, k),
                   WithinAbs(dense[size_t(k - 1)], 1e-9));
    REQUIRE_THROWS_AS(free_sector_energy(one, 2, st, long(dense.size()) + 1),
                      GeometryError);
  }
}

TEST_CASE("ordered tuples weight the sector search by multiplicity", "[manybody]") {
  std::vector<double> one{1.0, 3.0};
  // sums: 2 (once), 4 (twice), 6 (once)
  REQUIRE(free_sector_energy(one, 2, Statistics::boltzmann, 1) == 2.0);
  REQUIRE(free_sector_energy(one, 2, Statistics::boltzmann, 2) == 4.0);
  REQUIRE(free_sector_energy(one, 2, Statistics::boltzmann, 3) == 4.0);
  REQUIRE(free_sector_energy(one, 2, Statistics::boltzmann, 4) == 6.0);
  REQUIRE_THROWS_AS(free_sector_energy(one, 2, Statistics::boltzmann, 5), GeometryError);
  REQUIRE_THROWS_AS(free_sector_energy(one, 3, Statistics::fermi, 1), GeometryError);
  REQUIRE_THROWS_AS(free_sector_energy(one, 0, Statistics::bose, 1), ConfigError);
  REQUIRE_THROWS_AS(free_sector_energy(one, 2, Statistics::bose, 0), ConfigError);
}

TEST_CASE("entropy level counts round exactly on log-integer input", "[manybody]") {
  REQUIRE(entropy_level_count(0.0) == 1);
  REQUIRE(entropy_level_count(std::log(2.0)) == 2);
  REQUIRE(entropy_level_count(std::log(3.0)) == 3);
  REQUIRE(entropy_level_count(std::log(7.0) + 5e-13) == 7);
  REQUIRE(entropy_level_count(0.5) == 2);
  REQUIRE(entropy_level_count(std::log(2.0) + 0.01) == 3);
  REQUIRE(entropy_level_count(-std::numeric_limits<double>::infinity()) == 1);
  REQUIRE_THROWS_AS(entropy_level_count(-0.1), ConfigError);
}

TEST_CASE("energy at entropy inverts the counting function", "[manybody]") {
  Domain dom(Box::interval(0, 2));
  SpectrumResult s = diagonalize(assemble_one_body(dom, flat_field(dom)).matrix, true);
  double s2 = std::sqrt(2.0);
  REQUIRE_THAT(energy_at_entropy(s, 0.0), WithinAbs(2.0 - s2, 1e-12));
  REQUIRE_THAT(energy_at_entropy(s, std::log(2.0)), WithinAbs(2.0, 1e-12));
  REQUIRE_THAT(energy_at_entropy(s, std::log(3.0)), WithinAbs(2.0 + s2, 1e-12));
  REQUIRE_THROWS_AS(energy_at_entropy(s, std::log(3.0) + 0.1), GeometryError);

  REQUIRE(counting_function(s, 2.0 - s2 - 1.0) == 0);
  REQUIRE(counting_function(s, 2.0 - s2) == 1);
  REQUIRE(counting_function(s, 2.0) == 2);
  REQUIRE(counting_function(s, 10.0) == 3);
  REQUIRE(entropy(s, 0.0) == -std::numeric_limits<double>::infinity());
  REQUIRE_THAT(entropy(s, 2.0), WithinAbs(std::log(2.0), 1e-15));
}

TEST_CASE("interaction catalog values and ranges", "[manybody]") {
  auto none = InteractionSpec::none_interaction();
  REQUIRE(none.U_sq(1) == 0.0);
  REQUIRE(none.zero_range() == 0.0);
  REQUIRE(none.support_range() == 0.0);

  auto tp = InteractionSpec::tempered_power(2.0, 3.0, 2.0);
  REQUIRE(tp.U_sq(1) == 0.25);  // inside R0 the near-field plateau applies
  REQUIRE(tp.U_sq(4) == 0.25);
  REQUIRE_THAT(tp.U_sq(9), WithinAbs(2.0 / 27.0, 1e-15));
  REQUIRE(tp.zero_range() == -1.0);
  REQUIRE_THAT(tp.cross_term(2, 3, 4.0), WithinAbs(2.0 * 6.0 / 64.0, 1e-15));

  auto yk = InteractionSpec::yukawa(3.0, 2.0);
  REQUIRE_THAT(yk.U_sq(4), WithinAbs(1.5 * std::exp(-1.0), 1e-15));
  REQUIRE_THAT(yk.U_sq(0), WithinAbs(3.0 * std::exp(-0.5), 1e-15));
  REQUIRE(yk.zero_range() == -1.0);

  auto cp = InteractionSpec::compact({2.0, 1.0, 0.5});
  REQUIRE(cp.U_sq(0) == 2.0);
  REQUIRE(cp.U_sq(2) == 0.5);
  REQUIRE(cp.U_sq(3) == 0.0);
  REQUIRE_THAT(cp.zero_range(), WithinAbs(std::sqrt(3.0), 1e-15));
  REQUIRE_THAT(cp.support_range(), WithinAbs(std::sqrt(2.0), 1e-15));
  REQUIRE(InteractionSpec::compact({1.0, 0.0}).zero_range() == 1.0);
  REQUIRE(InteractionSpec::compact({0.0, 0.0}).zero_range() == 0.0);

  auto hc = InteractionSpec::hardcore(2.0);
  REQUIRE(hc.zero_range() == 2.0);
  REQUIRE(hc.U_sq(1) == 0.0);
  auto tail = std::make_shared<InteractionSpec>(InteractionSpec::compact({0.0, 0.0, 0.0, 7.0}));
  auto hct = InteractionSpec::hardcore(1.0, tail);
  REQUIRE_THAT(hct.zero_range(), WithinAbs(2.0, 1e-15));
  REQUIRE(hct.U_sq(3) == 7.0);
  auto yk_tail = std::make_shared<InteractionSpec>(yk);
  REQUIRE(InteractionSpec::hardcore(1.0, yk_tail).zero_range() == -1.0);
}

TEST_CASE("interaction constructors reject bad parameters", "[manybody]") {
  REQUIRE_THROWS_AS(InteractionSpec::tempered_power(-1.0, 2.0, 1.0), ConfigError);
  REQUIRE_THROWS_AS(InteractionSpec::tempered_power(1.0, 0.0, 1.0), ConfigError);
  REQUIRE_THROWS_AS(InteractionSpec::tempered_power(1.0, 2.0, 0.5), ConfigError);
  REQUIRE_THROWS_AS(InteractionSpec::yukawa(0.0, 1.0), ConfigError);
  REQUIRE_THROWS_AS(InteractionSpec::compact({}), ConfigError);
  REQUIRE_THROWS_AS(InteractionSpec::compact({0.0, -1.0}), ConfigError);
  REQUIRE_THROWS_AS(InteractionSpec::hardcore(0.0), ConfigError);
  auto inner = std::make_shared<InteractionSpec>(InteractionSpec::hardcore(1.0));
  REQUIRE_THROWS_AS(InteractionSpec::hardcore(1.0, inner), ConfigError);
}

TEST_CASE("declared class certificates survive spot validation", "[manybody]") {
  for (int d : {1, 2}) {
    REQUIRE_NOTHROW(validate_interaction(InteractionSpec::none_interaction(), d));
    REQUIRE_NOTHROW(validate_interaction(InteractionSpec::tempered_power(1.0, 3.0, 1.0), d));
    REQUIRE_NOTHROW(validate_interaction(InteractionSpec::compact({0.0, 1.0, 0.25}, 0.0, d + 1.0), d));
    REQUIRE_NOTHROW(validate_interaction(InteractionSpec::hardcore(1.5), d));
  }
  // the default power certificate for yukawa is lambda = 2, enough in d = 1
  // but not in d = 2 where a steeper declaration is required
  REQUIRE_NOTHROW(validate_interaction(InteractionSpec::yukawa(1.0, 1.0), 1));
  REQUIRE_THROWS_AS(validate_interaction(InteractionSpec::yukawa(1.0, 1.0), 2), ConfigError);
  REQUIRE_NOTHROW(validate_interaction(InteractionSpec::yukawa(1.0, 1.0, 3.0), 2));
}

TEST_CASE("spot validation catches tampered certificates", "[manybody]") {
  auto rep_lie = InteractionSpec::compact({0.0, -1.0}, 3.0);
  REQUIRE_FALSE(rep_lie.flags.Rep);
  rep_lie.flags.Rep = true;
  REQUIRE_THROWS_AS(validate_interaction(rep_lie, 1), ConfigError);

  auto weak_bound = InteractionSpec::compact({0.0, 5.0});
  weak_bound.pti_A = 0.1;
  REQUIRE_THROWS_AS(validate_interaction(weak_bound, 1), ConfigError);

  auto unstable = InteractionSpec::compact({0.0, -2.0}, 3.0);
  REQUIRE_NOTHROW(validate_interaction(unstable, 1));
  unstable.B = 0.01;
  REQUIRE_THROWS_AS(validate_interaction(unstable, 1), ConfigError);
}
