#pragma once

#include <map>
#include <string>
#include <vector>

#include "manylat/lattice.hpp"

namespace manylat {

enum class Statistics { boltzmann, bose, fermi };

inline std::string to_string(Statistics s) {
  switch (s) {
    case Statistics::boltzmann: return "boltzmann";
    case Statistics::bose: return "bose";
    case Statistics::fermi: break;
  }
  return "fermi";
}

inline Statistics statistics_from_string(const std::string& s) {
  if (s == "boltzmann") return Statistics::boltzmann;
  if (s == "bose") return Statistics::bose;
  if (s == "fermi") return Statistics::fermi;
  throw ConfigError("unknown statistics: " + s);
}

inline double binomial(long n, long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  double r = 1;
  for (long i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

// Configurations are index tuples into domain.sites: arbitrary tuples for
// boltzmann, nondecreasing for bose, strictly increasing for fermi. Hard cores
// drop every configuration holding a pair closer than r0.
struct BasisSet {
  Statistics stat = Statistics::boltzmann;
  Domain domain;
  long n = 1;
  double hardcore_r0 = 0;
  std::vector<std::vector<long>> configs;
  std::map<std::vector<long>, long> config_index;

  long dim() const { return long(configs.size()); }
};

namespace detail {

inline void enumerate_rec(const Domain& dom, long n, Statistics stat, double r0sq,
                          std::vector<long>& cur, std::vector<std::vector<long>>& out) {
  if (long(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  long start = 0;
  if (!cur.empty()) {
    if (stat == Statistics::bose) start = cur.back();
    if (stat == Statistics::fermi) start = cur.back() + 1;
  }
  for (long s = start; s < dom.size(); ++s) {
    if (r0sq > 0) {
      bool ok = true;
      for (long p : cur)
        if (double(sqdist(dom.sites[p], dom.sites[s])) < r0sq) { ok = false; break; }
      if (!ok) continue;
    }
    cur.push_back(s);
    enumerate_rec(dom, n, stat, r0sq, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline BasisSet enumerate_basis(const Domain& dom, long n, Statistics stat,
                                double hardcore_r0 = 0) {
  if (n < 1) throw ConfigError("basis needs n >= 1");
  if (stat == Statistics::fermi && n > dom.size())
    throw GeometryError("no antisymmetric states: n exceeds the number of sites");
  BasisSet b;
  b.stat = stat;
  b.domain = dom;
  b.n = n;
  b.hardcore_r0 = hardcore_r0;
  double r0sq = hardcore_r0 > 0 ? hardcore_r0 * hardcore_r0 : 0;
  // hard cores exclude coincident pairs for every statistics
  std::vector<long> cur;
  detail::enumerate_rec(dom, n, stat, r0sq, cur, b.configs);
  if (b.configs.empty())
    throw GeometryError("above closed packing: the hard-core basis is empty");
  for (long i = 0; i < b.dim(); ++i) b.config_index[b.configs[i]] = i;
  return b;
}

inline double basis_dimension_formula(long sites, long n, Statistics stat) {
  switch (stat) {
    case Statistics::boltzmann: return std::pow(double(sites), double(n));
    case Statistics::bose: return binomial(sites + n - 1, n);
    case Statistics::fermi: break;
  }
  return binomial(sites, n);
}

// Largest n admitting a hard-core configuration. Exact interval DP in d = 1,
// exhaustive branch-and-bound elsewhere (desk-scale domains only).
inline long max_hardcore_packing(const Domain& dom, double r0) {
  if (r0 <= 0) return dom.size();
  double r0sq = r0 * r0;
  if (dom.d == 1) {
    long m = dom.size();
    std::vector<long> dp(m + 1, 0);
    for (long i = m - 1; i >= 0; --i) {
      long j = i + 1;
      while (j < m && double(sqdist(dom.sites[i], dom.sites[j])) < r0sq) ++j;
      dp[i] = std::max(dp[i + 1], 1 + dp[j]);
    }
    return dp[0];
  }
  long best = 0;
  std::vector<long> cur;
  // branch over sites in order; bound by remaining site count
  auto rec = [&](auto&& self, long from) -> void {
    best = std::max(best, long(cur.size()));
    if (long(cur.size()) + (dom.size() - from) <= best) return;
    for (long s = from; s < dom.size(); ++s) {
      bool ok = true;
      for (long p : cur)
        if (double(sqdist(dom.sites[p], dom.sites[s])) < r0sq) { ok = false; break; }
      if (!ok) continue;
      cur.push_back(s);
      self(self, s + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return best;
}

}  // namespace manylat
