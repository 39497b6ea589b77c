#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "manylat/lattice.hpp"
#include "manylat/rng.hpp"

namespace manylat {

struct UniformDist {
  double a = 0, b = 1;
};
struct BernoulliDist {
  double p = 0.5;
  double v0 = 0, v1 = 1;
};
struct ConstantDist {
  double c = 0;
};

// Law of the i.i.d. site potential.
struct DisorderSpec {
  std::variant<UniformDist, BernoulliDist, ConstantDist> dist = ConstantDist{0};

  static DisorderSpec uniform(double a, double b) {
    if (!(a < b)) throw ConfigError("uniform disorder requires a < b");
    DisorderSpec s;
    s.dist = UniformDist{a, b};
    return s;
  }
  static DisorderSpec bernoulli(double p, double v0, double v1) {
    if (p < 0 || p > 1) throw ConfigError("bernoulli disorder requires 0 <= p <= 1");
    DisorderSpec s;
    s.dist = BernoulliDist{p, v0, v1};
    return s;
  }
  static DisorderSpec constant(double c) {
    DisorderSpec s;
    s.dist = ConstantDist{c};
    return s;
  }

  double inf_support() const {
    if (auto* u = std::get_if<UniformDist>(&dist)) return u->a;
    if (auto* b = std::get_if<BernoulliDist>(&dist)) {
      if (b->p == 0) return b->v0;
      if (b->p == 1) return b->v1;
      return std::min(b->v0, b->v1);
    }
    return std::get<ConstantDist>(dist).c;
  }

  double sup_support() const {
    if (auto* u = std::get_if<UniformDist>(&dist)) return u->b;
    if (auto* b = std::get_if<BernoulliDist>(&dist)) {
      if (b->p == 0) return b->v0;
      if (b->p == 1) return b->v1;
      return std::max(b->v0, b->v1);
    }
    return std::get<ConstantDist>(dist).c;
  }

  double mean() const {
    if (auto* u = std::get_if<UniformDist>(&dist)) return 0.5 * (u->a + u->b);
    if (auto* b = std::get_if<BernoulliDist>(&dist))
      return (1 - b->p) * b->v0 + b->p * b->v1;
    return std::get<ConstantDist>(dist).c;
  }

  double variance() const {
    if (auto* u = std::get_if<UniformDist>(&dist)) {
      double w = u->b - u->a;
      return w * w / 12.0;
    }
    if (auto* b = std::get_if<BernoulliDist>(&dist)) {
      double d = b->v1 - b->v0;
      return b->p * (1 - b->p) * d * d;
    }
    return 0;
  }

  double value_at(uint64_t master_seed, uint64_t index, const IVec& x) const {
    uint64_t h = rng::key(master_seed, index, x);
    if (auto* u = std::get_if<UniformDist>(&dist))
      return u->a + (u->b - u->a) * rng::uniform01(h);
    if (auto* b = std::get_if<BernoulliDist>(&dist))
      return rng::uniform01(h) < b->p ? b->v1 : b->v0;
    return std::get<ConstantDist>(dist).c;
  }

  std::string name() const {
    if (std::holds_alternative<UniformDist>(dist)) return "uniform";
    if (std::holds_alternative<BernoulliDist>(dist)) return "bernoulli";
    return "constant";
  }
};

// One disorder realization restricted to a domain.
struct PotentialField {
  Domain domain;
  std::vector<double> values;  // aligned with domain.sites
  DisorderSpec spec;
  uint64_t master_seed = 0;
  uint64_t index = 0;
};

inline PotentialField sample_potential(const DisorderSpec& spec, const Domain& dom,
                                       uint64_t master_seed, uint64_t index) {
  PotentialField f;
  f.domain = dom;
  f.spec = spec;
  f.master_seed = master_seed;
  f.index = index;
  f.values.reserve(dom.size());
  for (const IVec& x : dom.sites) f.values.push_back(spec.value_at(master_seed, index, x));
  return f;
}

inline PotentialField sample_potential(const DisorderSpec& spec, const Box& box,
                                       uint64_t master_seed, uint64_t index) {
  return sample_potential(spec, Domain(box), master_seed, index);
}

// Shifted environment on the same domain: value(x) = original value(x + g).
// Counter keying makes this exact for arbitrary g.
inline PotentialField translate_realization(const PotentialField& f, const IVec& g) {
  PotentialField out;
  out.domain = f.domain;
  out.spec = f.spec;
  out.master_seed = f.master_seed;
  out.index = f.index;
  out.values.reserve(f.domain.size());
  for (const IVec& x : f.domain.sites) {
    IVec y = x;
    for (int a = 0; a < f.domain.d; ++a) y[a] += g[a];
    out.values.push_back(f.spec.value_at(f.master_seed, f.index, y));
  }
  return out;
}

}  // namespace manylat
