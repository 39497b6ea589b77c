#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <queue>
#include <set>

#include "manylat/basis.hpp"
#include "manylat/disorder.hpp"
#include "manylat/interactions.hpp"
#include "manylat/spectrum.hpp"

namespace manylat {

struct ManyBodyOperator {
  BasisSet basis;
  Eigen::MatrixXd matrix;
};

inline double pair_energy(const InteractionSpec& inter, const Domain& dom,
                          const std::vector<long>& config) {
  double W = 0;
  for (size_t i = 0; i < config.size(); ++i)
    for (size_t j = i + 1; j < config.size(); ++j)
      W += inter.U_sq(sqdist(dom.sites[config[i]], dom.sites[config[j]]));
  return W;
}

namespace detail {

// occupied indices strictly between a and b in site order
inline int fermi_hop_parity(const std::vector<long>& config, long a, long b) {
  long lo = std::min(a, b), hi = std::max(a, b);
  int count = 0;
  for (long s : config)
    if (s > lo && s < hi) ++count;
  return count % 2 == 0 ? 1 : -1;
}

}  // namespace detail

inline ManyBodyOperator assemble_many_body(const BasisSet& basis, const PotentialField& field,
                                           const InteractionSpec& inter) {
  const Domain& dom = basis.domain;
  if (!(field.domain.sites == dom.sites))
    throw ConfigError("potential field domain does not match the basis domain");
  if (inter.hardcore_radius() > 0 && basis.hardcore_r0 != inter.hardcore_radius())
    throw ConfigError("hardcore interaction requires a basis with the same exclusion radius");

  long D = basis.dim();
  ManyBodyOperator op;
  op.basis = basis;
  op.matrix = Eigen::MatrixXd::Zero(D, D);

  for (long row = 0; row < D; ++row) {
    const std::vector<long>& c = basis.configs[row];
    double diag = 0;
    for (long s : c) diag += 2.0 * dom.d + field.values[s];
    diag += pair_energy(inter, dom, c);
    op.matrix(row, row) += diag;

    // one-particle hops; c -> nc and nc -> c are generated from their own
    // rows with equal amplitudes, so the matrix is symmetric by construction
    for (size_t k = 0; k < c.size(); ++k) {
      // bose amplitudes already carry the full sqrt(n_s (n_t + 1)) weight,
      // one transition per distinct occupied site
      if (basis.stat == Statistics::bose && k > 0 && c[k] == c[k - 1]) continue;
      for (int a = 0; a < dom.d; ++a) {
        for (int dir : {-1, +1}) {
          IVec y = dom.sites[c[k]];
          y[a] += dir;
          long t = dom.index_of(y);
          if (t < 0) continue;
          std::vector<long> nc = c;
          double amp = -1.0;
          if (basis.stat == Statistics::boltzmann) {
            nc[k] = t;
          } else if (basis.stat == Statistics::fermi) {
            bool occupied = std::binary_search(c.begin(), c.end(), t);
            if (occupied) continue;
            amp *= detail::fermi_hop_parity(c, c[k], t);
            nc[k] = t;
            std::sort(nc.begin(), nc.end());
          } else {
            long ns = std::count(c.begin(), c.end(), c[k]);
            long nt = std::count(c.begin(), c.end(), t);
            amp *= std::sqrt(double(ns) * double(nt + 1));
            nc[k] = t;
            std::sort(nc.begin(), nc.end());
          }
          auto it = basis.config_index.find(nc);
          if (it == basis.config_index.end()) continue;  // hard-core excluded
          op.matrix(it->second, row) += amp;
        }
      }
    }
  }

  return op;
}

// k lowest eigenvalue sums of a free n-particle sector, by best-first search
// over index multisets. For boltzmann, each multiset carries its permutation
// multiplicity. Returns the level_count-th smallest (1-based, multiplicity
// counted), i.e. the free-sector analogue of the entropy inverse.
inline double free_sector_energy(const std::vector<double>& evals, long n, Statistics stat,
                                 long level_count = 1) {
  long m = long(evals.size());
  if (n < 1) throw ConfigError("free sector needs n >= 1");
  if (stat == Statistics::fermi && n > m)
    throw GeometryError("no antisymmetric states: n exceeds the number of levels");
  if (level_count < 1) throw ConfigError("level count must be >= 1");

  std::vector<long> first(n);
  for (long i = 0; i < n; ++i) first[i] = stat == Statistics::fermi ? i : 0;
  auto sum_of = [&](const std::vector<long>& idx) {
    double s = 0;
    for (long i : idx) s += evals[i];
    return s;
  };
  auto multiplicity = [&](const std::vector<long>& idx) -> double {
    if (stat != Statistics::boltzmann) return 1;
    double mult = 1, run = 1;
    long seen = 1;
    for (size_t i = 1; i < idx.size(); ++i) {
      ++seen;
      mult *= double(seen);
      run = idx[i] == idx[i - 1] ? run + 1 : 1;
      mult /= run;
    }
    return mult;  // n! / prod(multiplicities!)
  };

  using Node = std::pair<double, std::vector<long>>;
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> heap;
  std::set<std::vector<long>> seen;
  heap.push({sum_of(first), first});
  seen.insert(first);
  double counted = 0;
  while (!heap.empty()) {
    auto [s, idx] = heap.top();
    heap.pop();
    counted += multiplicity(idx);
    if (counted >= double(level_count)) return s;
    for (long k = n - 1; k >= 0; --k) {
      if (idx[k] + 1 >= m) continue;
      if (k + 1 < n) {
        long cap = stat == Statistics::fermi ? idx[k + 1] - 1 : idx[k + 1];
        if (idx[k] + 1 > cap) continue;
      }
      std::vector<long> nx = idx;
      ++nx[k];
      if (seen.insert(nx).second) heap.push({sum_of(nx), nx});
    }
  }
  throw GeometryError("sector exhausted: entropy demands more levels than the sector holds");
}

}  // namespace manylat
