#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "manylat/lattice.hpp"
#include "manylat/rng.hpp"

namespace manylat {

enum class InteractionKind { none, tempered_power, yukawa, compact, hardcore };

inline std::string to_string(InteractionKind k) {
  switch (k) {
    case InteractionKind::none: return "none";
    case InteractionKind::tempered_power: return "tempered_power";
    case InteractionKind::yukawa: return "yukawa";
    case InteractionKind::compact: return "compact";
    case InteractionKind::hardcore: break;
  }
  return "hardcore";
}

struct InteractionFlags {
  bool PI = true;    // translation invariant
  bool PTI = false;  // power-law tempered beyond R0
  bool Rep = false;  // repulsive
  bool SI = false;   // stable with constant B
  bool Comp = false; // compactly supported
};

// Pair potential U(|x - y|) plus its declared class certificates.
struct InteractionSpec {
  InteractionKind kind = InteractionKind::none;
  InteractionFlags flags;
  double B = 0;  // stability constant: W_n >= -nB

  // temperedness certificate |U(x)| <= pti_A |x|^(-pti_lambda) for |x| >= pti_R0
  double pti_A = 0, pti_lambda = 2, pti_R0 = 0;

  // tempered_power parameters
  double tp_A = 0, tp_lambda = 2, tp_R0 = 1, tp_near = 0;
  // yukawa parameters
  double yk_Q = 0, yk_screen = 1;
  // compact: value per squared integer distance, index 0 .. range^2
  std::vector<double> table;
  double comp_range = 0;
  // hardcore radius and optional tail potential
  double core_r0 = 0;
  std::shared_ptr<InteractionSpec> tail;

  static InteractionSpec none_interaction() {
    InteractionSpec s;
    s.kind = InteractionKind::none;
    s.flags = {true, true, true, true, true};
    return s;
  }

  static InteractionSpec tempered_power(double A, double lambda, double R0,
                                        double near_field = -1) {
    if (A < 0) throw ConfigError("tempered interaction requires A >= 0");
    if (R0 < 1) throw ConfigError("tempered interaction requires R0 >= 1");
    if (lambda <= 0) throw ConfigError("tempered interaction requires lambda > 0");
    InteractionSpec s;
    s.kind = InteractionKind::tempered_power;
    s.tp_A = A;
    s.tp_lambda = lambda;
    s.tp_R0 = R0;
    s.tp_near = near_field < 0 ? A * std::pow(R0, -lambda) : near_field;
    s.pti_A = std::max(A, s.tp_near * std::pow(R0, lambda));
    s.pti_lambda = lambda;
    s.pti_R0 = R0;
    s.flags = {true, true, s.tp_near >= 0, true, false};
    s.B = 0;  // repulsive
    return s;
  }

  static InteractionSpec yukawa(double Q, double screen, double pti_lambda_decl = -1) {
    if (Q <= 0 || screen <= 0) throw ConfigError("yukawa requires Q > 0 and screening > 0");
    InteractionSpec s;
    s.kind = InteractionKind::yukawa;
    s.yk_Q = Q;
    s.yk_screen = screen;
    s.pti_lambda = pti_lambda_decl > 0 ? pti_lambda_decl : 2;
    s.pti_R0 = 1;
    // max over r >= R0 of r^lambda U(r) = Q r^(lambda-1) e^(-r/screen),
    // unimodal with maximizer (lambda-1)*screen
    double rstar = std::max(s.pti_R0, (s.pti_lambda - 1) * screen);
    s.pti_A = Q * std::pow(rstar, s.pti_lambda - 1) * std::exp(-rstar / screen);
    s.flags = {true, true, true, true, false};
    s.B = 0;
    return s;
  }

  static InteractionSpec compact(std::vector<double> values_by_sqdist, double declared_B = 0,
                                 double pti_lambda_decl = 2) {
    if (values_by_sqdist.empty()) throw ConfigError("compact interaction needs a table");
    InteractionSpec s;
    s.kind = InteractionKind::compact;
    s.table = std::move(values_by_sqdist);
    s.comp_range = std::sqrt(double(s.table.size() - 1));
    bool rep = true;
    double a = 0;
    for (size_t r2 = 0; r2 < s.table.size(); ++r2) {
      if (s.table[r2] < 0) rep = false;
      if (r2 > 0)
        a = std::max(a, std::abs(s.table[r2]) * std::pow(double(r2), pti_lambda_decl / 2));
    }
    s.pti_lambda = pti_lambda_decl;
    s.pti_R0 = 1;
    s.pti_A = a;
    s.flags = {true, true, rep, true, true};
    if (!rep && declared_B <= 0)
      throw ConfigError("non-repulsive compact interaction needs a declared stability constant");
    s.B = rep ? std::max(0.0, declared_B) : declared_B;
    return s;
  }

  static InteractionSpec hardcore(double r0, std::shared_ptr<InteractionSpec> tail_spec = nullptr) {
    if (r0 <= 0) throw ConfigError("hardcore requires r0 > 0");
    InteractionSpec s;
    s.kind = InteractionKind::hardcore;
    s.core_r0 = r0;
    s.tail = std::move(tail_spec);
    if (s.tail && s.tail->kind == InteractionKind::hardcore)
      throw ConfigError("hardcore tail cannot be hardcore");
    if (s.tail) {
      s.flags = s.tail->flags;
      s.flags.Comp = s.tail->flags.Comp;
      s.B = s.tail->B;
      s.pti_A = s.tail->pti_A;
      s.pti_lambda = s.tail->pti_lambda;
      s.pti_R0 = s.tail->pti_R0;
    } else {
      s.flags = {true, true, true, true, true};
      s.B = 0;
      s.pti_A = 0;
      s.pti_lambda = 2;
      s.pti_R0 = 0;
    }
    return s;
  }

  // pair value from the squared Euclidean site distance
  double U_sq(long r2) const {
    switch (kind) {
      case InteractionKind::none:
        return 0;
      case InteractionKind::tempered_power: {
        double r = std::sqrt(double(r2));
        return r >= tp_R0 ? tp_A * std::pow(r, -tp_lambda) : tp_near;
      }
      case InteractionKind::yukawa: {
        double r = std::max(1.0, std::sqrt(double(r2)));
        return yk_Q / r * std::exp(-r / yk_screen);
      }
      case InteractionKind::compact:
        return r2 < long(table.size()) ? table[r2] : 0;
      case InteractionKind::hardcore:
        return tail ? tail->U_sq(r2) : 0;
    }
    return 0;
  }

  // support radius used for interior constructions; 0 when unsupported
  double support_range() const {
    switch (kind) {
      case InteractionKind::none: return 0;
      case InteractionKind::compact: return comp_range;
      case InteractionKind::hardcore:
        return std::max(core_r0, tail ? tail->support_range() : 0.0);
      default: return -1;  // unbounded support
    }
  }

  // smallest R with U(r) = 0 for every lattice distance r >= R, and no
  // hard-core exclusion at r >= R; -1 when U has unbounded support
  double zero_range() const {
    switch (kind) {
      case InteractionKind::none:
        return 0;
      case InteractionKind::compact: {
        long q = -1;
        for (long r2 = 0; r2 < long(table.size()); ++r2)
          if (table[r2] != 0) q = r2;
        return q < 0 ? 0 : std::sqrt(double(q + 1));
      }
      case InteractionKind::hardcore: {
        double t = tail ? tail->zero_range() : 0.0;
        return t < 0 ? -1 : std::max(core_r0, t);
      }
      default:
        return -1;
    }
  }

  double hardcore_radius() const { return kind == InteractionKind::hardcore ? core_r0 : 0; }

  // A n1 n2 r^(-lambda) cross term of the temperedness certificate
  double cross_term(long n1, long n2, double r) const {
    if (pti_A == 0) return 0;
    return pti_A * double(n1) * double(n2) * std::pow(r, -pti_lambda);
  }
};

// Spot validation of the declared class flags on sampled lattice vectors and
// configurations (necessary checks, not proofs).
inline void validate_interaction(const InteractionSpec& s, int d, uint64_t seed = 129,
                                 long samples = 500) {
  rng::Sequence seq(seed);
  for (long t = 0; t < samples; ++t) {
    IVec x(d);
    long r2 = 0;
    for (int a = 0; a < d; ++a) {
      x[a] = seq.below(41) - 20;
      r2 += x[a] * x[a];
    }
    IVec mx = x;
    for (long& c : mx) c = -c;
    long mr2 = 0;
    for (long c : mx) mr2 += c * c;
    if (s.U_sq(r2) != s.U_sq(mr2)) throw ConfigError("interaction is not symmetric");
    double r = std::sqrt(double(r2));
    if (s.flags.Rep && s.U_sq(r2) < 0)
      throw ConfigError("Rep flag declared but U < 0 at a sampled vector");
    if (s.flags.PTI && r >= std::max(1.0, s.pti_R0)) {
      if (std::abs(s.U_sq(r2)) > s.pti_A * std::pow(r, -s.pti_lambda) + 1e-12)
        throw ConfigError("PTI flag declared but the power bound fails at a sampled vector");
    }
    if (s.flags.Comp && s.support_range() >= 0 && r > s.support_range() && r2 > 0) {
      if (s.U_sq(r2) != 0)
        throw ConfigError("Comp flag declared but U != 0 beyond the declared range");
    }
  }
  // a zero certificate bounds nothing, so its exponent is unconstrained
  if (s.flags.PTI && s.pti_A > 0 && !(s.pti_lambda > d))
    throw ConfigError("PTI flag requires lambda > d");
  // SI necessary check: random configurations of up to 6 particles in a box
  if (s.flags.SI) {
    for (long t = 0; t < samples / 5; ++t) {
      long n = 2 + seq.below(5);
      std::vector<IVec> pts;
      for (long i = 0; i < n; ++i) {
        IVec x(d);
        for (int a = 0; a < d; ++a) x[a] = seq.below(11) - 5;
        pts.push_back(x);
      }
      double W = 0;
      bool excluded = false;
      for (long i = 0; i < n && !excluded; ++i)
        for (long j = i + 1; j < n; ++j) {
          long r2 = sqdist(pts[i], pts[j]);
          if (s.kind == InteractionKind::hardcore && double(r2) < s.core_r0 * s.core_r0) {
            excluded = true;  // configuration not in the hardcore space
            break;
          }
          W += s.U_sq(r2);
        }
      if (!excluded && W < -double(n) * s.B - 1e-9)
        throw ConfigError("SI flag declared but W_n < -nB at a sampled configuration");
    }
  }
}

}  // namespace manylat
