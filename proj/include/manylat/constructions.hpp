#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "manylat/manybody.hpp"
#include "manylat/oneparticle.hpp"

namespace manylat {

// Two-box product state over the joint sector. Coefficients live on the
// normalized configuration basis of the union domain; the squared norm equals
// C(n1+n2, n1) * ||phi1||^2 * ||phi2||^2 for bose/fermi and the plain product
// for boltzmann.
struct TestFunction {
  Statistics stat = Statistics::boltzmann;
  Eigen::VectorXd coeffs;  // over the joint basis
  double norm_sq = 0;
  double expected_norm_sq = 0;
};

namespace detail {

// parity of the interleave permutation that sorts (sites1, sites2) together
inline int merge_sign(const std::vector<long>& joint, const Domain& joint_dom,
                      const Domain& dom1) {
  int inversions = 0, seen2 = 0;
  for (long s : joint) {
    if (dom1.contains(joint_dom.sites[s])) {
      inversions += seen2;
    } else {
      ++seen2;
    }
  }
  return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace detail

inline TestFunction build_test_function(const BasisSet& b1, const Eigen::VectorXd& phi1,
                                        const BasisSet& b2, const Eigen::VectorXd& phi2,
                                        const BasisSet& joint) {
  if (b1.stat != b2.stat || b1.stat != joint.stat)
    throw ConfigError("test function requires one statistics for all sectors");
  if (joint.n != b1.n + b2.n) throw ConfigError("joint sector must hold n1 + n2 particles");
  if (phi1.size() != b1.dim() || phi2.size() != b2.dim())
    throw ConfigError("input vector length does not match its basis");
  if (phi1.norm() == 0 || phi2.norm() == 0) throw ConfigError("input vectors must be nonzero");
  for (const IVec& x : b1.domain.sites)
    if (b2.domain.contains(x)) throw GeometryError("test function boxes must be disjoint");

  const Domain& dj = joint.domain;
  Statistics stat = joint.stat;
  long n1 = b1.n, n2 = b2.n;
  double factor = stat == Statistics::boltzmann ? 1.0 : std::sqrt(binomial(n1 + n2, n1));

  TestFunction tf;
  tf.stat = stat;
  tf.coeffs = Eigen::VectorXd::Zero(joint.dim());

  std::vector<long> sub1, sub2;
  for (long row = 0; row < joint.dim(); ++row) {
    const std::vector<long>& c = joint.configs[row];
    sub1.clear();
    sub2.clear();
    bool split_ok = true;
    if (stat == Statistics::boltzmann) {
      // tensor order: the first n1 slots carry phi1, the rest phi2
      for (long k = 0; k < n1 + n2; ++k) {
        const IVec& x = dj.sites[c[k]];
        bool in1 = b1.domain.contains(x);
        if (k < n1 ? !in1 : in1) { split_ok = false; break; }
        (k < n1 ? sub1 : sub2).push_back(k < n1 ? b1.domain.index_of(x)
                                                : b2.domain.index_of(x));
      }
    } else {
      for (long s : c) {
        const IVec& x = dj.sites[s];
        if (b1.domain.contains(x)) sub1.push_back(b1.domain.index_of(x));
        else sub2.push_back(b2.domain.index_of(x));
      }
      split_ok = long(sub1.size()) == n1;
    }
    if (!split_ok) continue;
    auto i1 = b1.config_index.find(sub1);
    auto i2 = b2.config_index.find(sub2);
    if (i1 == b1.config_index.end() || i2 == b2.config_index.end()) continue;
    double v = factor * phi1(i1->second) * phi2(i2->second);
    if (stat == Statistics::fermi) v *= detail::merge_sign(c, dj, b1.domain);
    tf.coeffs(row) = v;
  }

  tf.norm_sq = tf.coeffs.squaredNorm();
  double base = phi1.squaredNorm() * phi2.squaredNorm();
  tf.expected_norm_sq = stat == Statistics::boltzmann ? base : binomial(n1 + n2, n1) * base;
  if (tf.norm_sq == 0) throw GeometryError("test function vanished");
  return tf;
}

struct BoundReport {
  double quotient = 0;
  double bound = 0;
  double margin = 0;  // bound - quotient
  bool pass = false;
};

inline BoundReport verify_energy_bound(const TestFunction& tf, const ManyBodyOperator& H,
                                       double E1, double E2, const InteractionSpec& inter,
                                       long n1, long n2, double r) {
  if (H.basis.dim() != tf.coeffs.size())
    throw ConfigError("test function does not match the operator basis");
  if (!inter.flags.PTI) throw ConfigError("energy bound needs the PTI flag");
  if (r < inter.pti_R0) throw GeometryError("separation r below the interaction range R0");
  BoundReport rep;
  rep.quotient = tf.coeffs.dot(H.matrix * tf.coeffs) / tf.norm_sq;
  rep.bound = E1 + E2 + inter.cross_term(n1, n2, r);
  rep.margin = rep.bound - rep.quotient;
  rep.pass = rep.quotient <= rep.bound + kIneqTol;
  return rep;
}

struct IneqRow {
  long seed_index = 0;
  std::string inequality;
  double lhs = 0, rhs = 0, margin = 0;
  bool pass = false;
};

namespace detail {

inline SpectrumResult sector_spectrum(const Domain& dom, long n, Statistics stat,
                                      const DisorderSpec& spec, const InteractionSpec& inter,
                                      uint64_t seed, uint64_t index) {
  BasisSet b = enumerate_basis(dom, n, stat, inter.hardcore_radius());
  PotentialField f = sample_potential(spec, dom, seed, index);
  return diagonalize(assemble_many_body(b, f, inter).matrix);
}

}  // namespace detail

// Per-realization checks of the counting, entropy and energy subadditivity
// estimates for a pair of separated boxes, at entropies S1, S2 (exp Si
// integer). The compact-support variant compares interior energies without
// any cross term; it is asserted only for compactly supported kinds and
// reported otherwise.
inline std::vector<IneqRow> check_subadditivity(const DisorderSpec& spec,
                                                const InteractionSpec& inter, const Box& L1,
                                                const Box& L2, long n1, long n2, double S1,
                                                double S2, Statistics stat, uint64_t seed,
                                                long M) {
  Domain d1(L1), d2(L2);
  Domain dj = domain_union(d1, d2);
  double r = box_distance(L1, L2);
  if (r < inter.pti_R0)
    throw GeometryError("box separation below the interaction range R0");
  if (r < inter.hardcore_radius())
    throw GeometryError("box separation below the hard-core radius");
  double cross = inter.cross_term(n1, n2, r);
  // the interior variant only applies to compactly supported interactions
  double range = inter.flags.Comp ? inter.zero_range() : -1;

  std::vector<IneqRow> rows;
  for (long m = 0; m < M; ++m) {
    SpectrumResult s1 = detail::sector_spectrum(d1, n1, stat, spec, inter, seed, m);
    SpectrumResult s2 = detail::sector_spectrum(d2, n2, stat, spec, inter, seed, m);
    SpectrumResult sj = detail::sector_spectrum(dj, n1 + n2, stat, spec, inter, seed, m);

    double E1 = energy_at_entropy(s1, S1);
    double E2 = energy_at_entropy(s2, S2);
    double shifted = E1 + E2 + cross;

    double lhsN = double(counting_function(sj, shifted));
    double rhsN = double(counting_function(s1, E1)) * double(counting_function(s2, E2));
    rows.push_back({m, "counting", lhsN, rhsN, lhsN - rhsN, lhsN >= rhsN});

    double lhsS = entropy(sj, shifted);
    double rhsS = entropy(s1, E1) + entropy(s2, E2);
    rows.push_back({m, "entropy", lhsS, rhsS, lhsS - rhsS, lhsS >= rhsS - kIneqTol});

    double lhsE = energy_at_entropy(sj, S1 + S2);
    double rhsE = E1 + E2 + cross;
    rows.push_back({m, "energy", lhsE, rhsE, rhsE - lhsE, lhsE <= rhsE + kIneqTol});

    if (range >= 0) {
      Domain i1 = d1.interior(range / 2), i2 = d2.interior(range / 2);
      Domain ij = dj.interior(range / 2);
      if (range > 0 && domain_distance(i1, i2) < range - 1e-12)
        throw GeometryError("interior separation collapsed below the support range");
      SpectrumResult f1 = detail::sector_spectrum(i1, n1, stat, spec, inter, seed, m);
      SpectrumResult f2 = detail::sector_spectrum(i2, n2, stat, spec, inter, seed, m);
      SpectrumResult fj = detail::sector_spectrum(ij, n1 + n2, stat, spec, inter, seed, m);
      double lhsC = energy_at_entropy(fj, S1 + S2);
      double rhsC = energy_at_entropy(f1, S1) + energy_at_entropy(f2, S2);
      rows.push_back({m, "compact", lhsC, rhsC, rhsC - lhsC, lhsC <= rhsC + kIneqTol});
    }
  }
  return rows;
}

// m-fold energy subadditivity with the (A/2)(sum n_i)^2 r^(-lambda) error term,
// r being the smallest pairwise separation.
inline std::vector<IneqRow> check_subadditivity_mfold(const DisorderSpec& spec,
                                                      const InteractionSpec& inter,
                                                      const std::vector<Box>& boxes,
                                                      const std::vector<long>& ns,
                                                      const std::vector<double>& Ss,
                                                      Statistics stat, uint64_t seed, long M) {
  size_t g = boxes.size();
  if (g < 2 || ns.size() != g || Ss.size() != g)
    throw ConfigError("m-fold check needs matching boxes, particle counts and entropies");
  double r = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < g; ++i)
    for (size_t j = i + 1; j < g; ++j) r = std::min(r, box_distance(boxes[i], boxes[j]));
  if (r < inter.pti_R0)
    throw GeometryError("box separation below the interaction range R0");

  std::vector<Domain> doms;
  std::vector<Box> all;
  long ntot = 0;
  double Stot = 0;
  for (size_t i = 0; i < g; ++i) {
    doms.emplace_back(boxes[i]);
    all.push_back(boxes[i]);
    ntot += ns[i];
    Stot += Ss[i];
  }
  Domain dj{all};
  double err = inter.pti_A == 0
                   ? 0
                   : inter.pti_A / 2.0 * double(ntot) * double(ntot) * std::pow(r, -inter.pti_lambda);

  std::vector<IneqRow> rows;
  for (long m = 0; m < M; ++m) {
    double rhs = err;
    for (size_t i = 0; i < g; ++i)
      rhs += energy_at_entropy(detail::sector_spectrum(doms[i], ns[i], stat, spec, inter, seed, m),
                               Ss[i]);
    double lhs =
        energy_at_entropy(detail::sector_spectrum(dj, ntot, stat, spec, inter, seed, m), Stot);
    rows.push_back({m, "energy_mfold", lhs, rhs, rhs - lhs, lhs <= rhs + kIneqTol});
  }
  return rows;
}

}  // namespace manylat
