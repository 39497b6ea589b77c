#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "manylat/basis.hpp"
#include "manylat/constructions.hpp"
#include "manylat/disorder.hpp"
#include "manylat/errors.hpp"
#include "manylat/interactions.hpp"
#include "manylat/lattice.hpp"
#include "manylat/manybody.hpp"
#include "manylat/oneparticle.hpp"
#include "manylat/parallel.hpp"
#include "manylat/spectrum.hpp"

namespace manylat {

// ---------------------------------------------------------------------------
// Cube-sequence study of the energy per unit volume.
// ---------------------------------------------------------------------------

struct ThermoParams {
  CubeSequenceParams cube;
  int levels = 3;          // runs levels 0 .. levels-1
  double rho = 0.5;        // particles per site, snapped to m0 / Ltilde^d
  double sigma = 0.0;      // entropy per particle
  double B = 0.0;          // interaction stability constant
  double C = 0.0;          // one-body lower-bound shift; >= -inf spec(h)
  long realizations = 100;
  std::uint64_t seed = 1;
  long sector_cap = 5000;  // largest many-body dimension solved densely
  int threads = 1;
};

struct LevelStats {
  int level = 0;
  long side_sites = 0;      // L_N + 1
  long particles = 0;       // n_N
  double entropy = 0.0;     // S_N
  double sector_dim = 0.0;  // may overflow long; kept as double
  std::string route;        // "dense", "free", or "skipped"
  double mean = 0.0;        // mean of X_N over realizations
  double variance = 0.0;    // unbiased sample variance of X_N
  double se_mean = 0.0;
  double se_var = 0.0;      // large-sample standard error of the variance
  double correction = 0.0;  // G_N linking level N to N+1 (0 at the top level)
};

struct SequenceDiagnostics {
  ThermoParams params;
  double rho_snapped = 0.0;
  Statistics stat = Statistics::fermi;
  std::vector<LevelStats> levels;
  std::vector<std::vector<double>> samples;  // [level][realization] -> X_N
  double min_sample = 0.0;                   // smallest X_N observed
};

namespace detail {

inline void moments(const std::vector<double>& xs, LevelStats& out) {
  long m = long(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= double(m);
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    double d2 = (x - mean) * (x - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  double var = m > 1 ? m2 / double(m - 1) : 0.0;
  m4 /= double(m);
  out.mean = mean;
  out.variance = var;
  out.se_mean = m > 1 ? std::sqrt(var / double(m)) : 0.0;
  // Var(s^2) ~ (m4 - var^2 (m-3)/(m-1)) / m for large samples.
  double vv = m > 1 ? (m4 - var * var * double(m - 3) / double(m - 1)) / double(m) : 0.0;
  out.se_var = std::sqrt(std::max(0.0, vv));
}

// Energy of the lowest sector levels reached through the full many-body
// matrix. Valid for any interaction but limited by the sector dimension.
inline double dense_level_energy(const Domain& dom, long n, Statistics stat,
                                 const DisorderSpec& spec, const InteractionSpec& inter,
                                 std::uint64_t seed, std::uint64_t index, double entropy_target) {
  BasisSet basis = enumerate_basis(dom, n, stat, inter.hardcore_radius());
  PotentialField field = sample_potential(spec, dom, seed, index);
  ManyBodyOperator op = assemble_many_body(basis, field, inter);
  SpectrumResult spec_res = diagonalize(op.matrix);
  return energy_at_entropy(spec_res, entropy_target);
}

// Same quantity for W = 0, reached through sums of one-body levels.
inline double free_level_energy(const Domain& dom, long n, Statistics stat,
                                const DisorderSpec& spec, std::uint64_t seed,
                                std::uint64_t index, double entropy_target) {
  PotentialField field = sample_potential(spec, dom, seed, index);
  SpectrumResult one = diagonalize(assemble_one_body(dom, field).matrix);
  long want = entropy_level_count(entropy_target);
  return free_sector_energy(one.evals, n, stat, want);
}

}  // namespace detail

// Runs the doubling cube sequence and records X_N = 2^{-Nd} (E_N + (B+C) n_N)
// for every level and realization, together with summary statistics and the
// inter-level correction term.
inline SequenceDiagnostics run_cube_sequence(const ThermoParams& p, const DisorderSpec& spec,
                                             const InteractionSpec& inter, Statistics stat) {
  if (p.levels < 1) throw ConfigError("levels must be at least 1");
  if (p.realizations < 1) throw ConfigError("realizations must be at least 1");
  if (p.rho <= 0.0) throw ConfigError("rho must be positive");
  if (p.sigma < 0.0) throw ConfigError("sigma must be nonnegative");
  if (!inter.flags.PTI) throw ConfigError("cube-sequence study needs a PTI interaction");

  int d = p.cube.d;
  double cells = std::pow(double(p.cube.Ltilde), d);
  long m0 = std::llround(p.rho * cells);
  if (m0 < 1) throw ConfigError("rho too small: zero particles at level 0");
  double rho_snap = double(m0) / cells;

  CubeFamily seq = make_cube_sequence(p.cube, p.levels - 1);

  SequenceDiagnostics diag;
  diag.params = p;
  diag.rho_snapped = rho_snap;
  diag.stat = stat;
  diag.min_sample = std::numeric_limits<double>::infinity();

  for (int N = 0; N < p.levels; ++N) {
    const CubeLevel& lev = seq.levels[size_t(N)];
    Domain dom(lev.cube);
    long sites = lev.cube.volume();
    long n = m0;
    for (int k = 0; k < N; ++k) n *= 1L << d;  // m0 2^{Nd}
    double S = p.sigma * double(n);

    LevelStats st;
    st.level = N;
    st.side_sites = lev.cube.sides[0];
    st.particles = n;
    st.entropy = S;
    st.sector_dim = basis_dimension_formula(sites, n, stat);

    bool dense_ok = st.sector_dim <= double(p.sector_cap);
    bool free_ok = inter.kind == InteractionKind::none;
    if (!dense_ok && !free_ok) {
      st.route = "skipped";
      diag.levels.push_back(st);
      diag.samples.emplace_back();
      continue;
    }
    st.route = dense_ok ? "dense" : "free";

    std::vector<double> xs(size_t(p.realizations), 0.0);
    double scale = std::pow(2.0, -double(N) * d);
    std::exception_ptr failure;
    std::mutex fail_mx;
    parallel_for(p.realizations, p.threads, [&](long m) {
      try {
        double E = dense_ok ? detail::dense_level_energy(dom, n, stat, spec, inter, p.seed,
                                                         std::uint64_t(m), S)
                            : detail::free_level_energy(dom, n, stat, spec, p.seed,
                                                        std::uint64_t(m), S);
        xs[size_t(m)] = scale * (E + (p.B + p.C) * double(n));
      } catch (...) {
        std::lock_guard<std::mutex> lk(fail_mx);
        if (!failure) failure = std::current_exception();
      }
    });
    if (failure) std::rethrow_exception(failure);

    detail::moments(xs, st);
    for (double x : xs) diag.min_sample = std::min(diag.min_sample, x);

    if (N + 1 < p.levels) {
      double RN = lev.gap;
      st.correction = inter.pti_A * rho_snap * rho_snap *
                      std::pow(double(p.cube.Ltilde), 2.0 * d) *
                      std::pow(2.0, double((N + 2) * d - 1)) * std::pow(RN, -inter.pti_lambda);
    }

    diag.levels.push_back(st);
    diag.samples.push_back(std::move(xs));
  }
  return diag;
}

struct RecursionRow {
  int level = 0;
  double lhs = 0.0;       // mean at level N+1
  double rhs = 0.0;       // mean at level N plus correction
  double slack_se = 0.0;  // combined standard error of the comparison
  bool pass = false;
};

struct RecursionReport {
  std::vector<RecursionRow> mean_rows;
  std::vector<RecursionRow> var_rows;
  bool nonnegative = false;
  bool all_pass = false;
};

// Checks the level-to-level recursion: means decrease up to the correction
// term, variances do not grow, both within 3 combined standard errors, and
// every sample is nonnegative.
inline RecursionReport check_recursion(const SequenceDiagnostics& diag, double se_factor = 3.0) {
  RecursionReport rep;
  rep.nonnegative = diag.min_sample >= -kIneqTol;
  rep.all_pass = rep.nonnegative;
  for (size_t N = 0; N + 1 < diag.levels.size(); ++N) {
    const LevelStats& a = diag.levels[N];
    const LevelStats& b = diag.levels[N + 1];
    if (a.route == "skipped" || b.route == "skipped") continue;
    RecursionRow mr;
    mr.level = int(N);
    mr.lhs = b.mean;
    mr.rhs = a.mean + a.correction;
    mr.slack_se = se_factor * std::hypot(a.se_mean, b.se_mean);
    mr.pass = mr.lhs <= mr.rhs + mr.slack_se + kIneqTol;
    rep.mean_rows.push_back(mr);

    RecursionRow vr;
    vr.level = int(N);
    vr.lhs = b.variance;
    vr.rhs = a.variance;
    vr.slack_se = se_factor * std::hypot(a.se_var, b.se_var);
    vr.pass = vr.lhs <= vr.rhs + vr.slack_se + kIneqTol;
    rep.var_rows.push_back(vr);
    rep.all_pass = rep.all_pass && mr.pass && vr.pass;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Free tensor-sector limit on growing boxes.
// ---------------------------------------------------------------------------

struct BoltzmannBoxRow {
  long side = 0;
  double mean_energy_per_particle = 0.0;
  long subadd_pass = 0;
  long subadd_total = 0;
};

struct BoltzmannLimitReport {
  long n = 0;
  double entropy = 0.0;
  std::vector<BoltzmannBoxRow> rows;
  bool decreasing = false;   // per-particle means decrease along the boxes
  bool subadd_all = false;
};

// For W = 0 and ordered tuples the sector energy decomposes over splits of
// the particles and of the level count. Verifies the decomposition inequality
// per realization on each box of a growing family.
inline BoltzmannLimitReport boltzmann_limit_check(const DisorderSpec& spec, int d,
                                                  const std::vector<long>& sides, long n,
                                                  double entropy_target, long realizations,
                                                  std::uint64_t seed, int threads = 1) {
  if (n < 1) throw ConfigError("n must be at least 1");
  if (sides.empty()) throw ConfigError("need at least one box side");
  long want = entropy_level_count(entropy_target);

  BoltzmannLimitReport rep;
  rep.n = n;
  rep.entropy = entropy_target;

  for (long side : sides) {
    if (side < 1) throw ConfigError("box sides must be positive");
    Box box(d, IVec(size_t(d), 0), IVec(size_t(d), side));
    Domain dom(box);

    std::vector<double> energies(size_t(realizations), 0.0);
    std::vector<long> pass(size_t(realizations), 0), total(size_t(realizations), 0);
    std::exception_ptr failure;
    std::mutex fail_mx;
    parallel_for(realizations, threads, [&](long m) {
      try {
        PotentialField field = sample_potential(spec, dom, seed, std::uint64_t(m));
        SpectrumResult one = diagonalize(assemble_one_body(dom, field).matrix);
        double E = free_sector_energy(one.evals, n, Statistics::boltzmann, want);
        energies[size_t(m)] = E;
        for (long n1 = 1; n1 < n; ++n1) {
          long n2 = n - n1;
          for (long m1 = 1; m1 <= want; ++m1) {
            if (want % m1 != 0) continue;
            long m2 = want / m1;
            double E1 = free_sector_energy(one.evals, n1, Statistics::boltzmann, m1);
            double E2 = free_sector_energy(one.evals, n2, Statistics::boltzmann, m2);
            total[size_t(m)] += 1;
            if (E <= E1 + E2 + kIneqTol) pass[size_t(m)] += 1;
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lk(fail_mx);
        if (!failure) failure = std::current_exception();
      }
    });
    if (failure) std::rethrow_exception(failure);

    BoltzmannBoxRow row;
    row.side = side;
    double mean = 0.0;
    for (double e : energies) mean += e;
    row.mean_energy_per_particle = mean / double(realizations) / double(n);
    for (long m = 0; m < realizations; ++m) {
      row.subadd_pass += pass[size_t(m)];
      row.subadd_total += total[size_t(m)];
    }
    rep.rows.push_back(row);
  }

  rep.decreasing = true;
  for (size_t i = 0; i + 1 < rep.rows.size(); ++i)
    rep.decreasing = rep.decreasing && rep.rows[i + 1].mean_energy_per_particle <=
                                           rep.rows[i].mean_energy_per_particle + kIneqTol;
  rep.subadd_all = true;
  for (const auto& r : rep.rows) rep.subadd_all = rep.subadd_all && r.subadd_pass == r.subadd_total;
  return rep;
}

// ---------------------------------------------------------------------------
// Fermi energy and the integrated-density functional for free fermions.
// ---------------------------------------------------------------------------

struct FermiEnergy {
  double lo = 0.0;  // smallest grid energy with counting >= rho
  double hi = 0.0;  // largest grid energy with counting <= rho (at least lo)
};

// Generalized inverse of the averaged counting function at density rho. On a
// plateau exactly at rho the inverse is an interval; both ends are reported.
inline FermiEnergy fermi_energy(const EmpiricalIDS& ids, double rho) {
  if (rho <= 0.0) throw ConfigError("rho must be positive");
  if (ids.grid.empty()) throw ConfigError("empty grid");
  double top = ids.n_avg.back();
  if (rho > top)
    throw GeometryError("density exceeds the counting range on this grid");
  size_t lo_idx = ids.grid.size();
  for (size_t i = 0; i < ids.grid.size(); ++i)
    if (ids.n_avg[i] >= rho) {
      lo_idx = i;
      break;
    }
  FermiEnergy fe;
  fe.lo = ids.grid[lo_idx];
  size_t hi_idx = lo_idx;
  while (hi_idx + 1 < ids.grid.size() && ids.n_avg[hi_idx + 1] <= rho) ++hi_idx;
  fe.hi = std::max(fe.lo, ids.grid[hi_idx]);
  return fe;
}

// Energy per particle from the averaged counting function: the Stieltjes sum
// of E dN up to total mass rho, divided by rho. The last increment is clamped
// so the mass is exactly rho; the result is monotone in rho and bounded by
// the Fermi energy.
inline double fermion_energy_density(const EmpiricalIDS& ids, double rho) {
  fermi_energy(ids, rho);  // validates that the grid reaches density rho
  double acc = 0.0, prev = 0.0;
  for (size_t i = 0; i < ids.grid.size(); ++i) {
    double mass = std::min(ids.n_avg[i], rho) - prev;
    if (mass > 0.0) {
      acc += ids.grid[i] * mass;
      prev += mass;
    }
    if (prev >= rho) break;
  }
  return acc / rho;
}

// Ground-state energy per particle of n free fermions, averaged over
// realizations: the disorder average of (1/n) sum of the n lowest levels.
inline double direct_fermion_density(const DisorderSpec& spec, const Box& box, long n,
                                     long realizations, std::uint64_t seed, int threads = 1) {
  if (n < 1) throw ConfigError("n must be at least 1");
  Domain dom(box);
  if (n > box.volume()) throw GeometryError("more fermions than sites");
  std::vector<double> vals(size_t(realizations), 0.0);
  std::exception_ptr failure;
  std::mutex fail_mx;
  parallel_for(realizations, threads, [&](long m) {
    try {
      PotentialField field = sample_potential(spec, dom, seed, std::uint64_t(m));
      SpectrumResult one = diagonalize(assemble_one_body(dom, field).matrix);
      double sum = 0.0;
      for (long k = 0; k < n; ++k) sum += one.evals[size_t(k)];
      vals[size_t(m)] = sum / double(n);
    } catch (...) {
      std::lock_guard<std::mutex> lk(fail_mx);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  double mean = 0.0;
  for (double v : vals) mean += v;
  return mean / double(realizations);
}

struct FermionDensityReport {
  long side = 0;
  long n = 0;
  double rho = 0.0;       // realized filling n / |box|
  double fermi_lo = 0.0;
  double fermi_hi = 0.0;
  double formula = 0.0;   // from the averaged counting function
  double direct = 0.0;    // from summing the lowest levels
  double rel_gap = 0.0;
};

// Cross-checks the counting-function route against the direct sum of levels
// at the same filling on one box family member.
inline FermionDensityReport fermion_density_report(const DisorderSpec& spec, const Box& box,
                                                   double rho, long realizations,
                                                   std::uint64_t seed, long grid_points = 400,
                                                   int threads = 1) {
  long sites = box.volume();
  long n = std::llround(rho * double(sites));
  if (n < 1) throw ConfigError("rho too small: zero particles on this box");
  FermionDensityReport rep;
  rep.side = box.sides[0];
  rep.n = n;
  rep.rho = double(n) / double(sites);

  std::vector<double> grid = default_grid(spec, box.d, grid_points);
  EmpiricalIDS ids = empirical_ids(spec, box, grid, realizations, seed, threads);
  FermiEnergy fe = fermi_energy(ids, rep.rho);
  rep.fermi_lo = fe.lo;
  rep.fermi_hi = fe.hi;
  rep.formula = fermion_energy_density(ids, rep.rho);
  rep.direct = direct_fermion_density(spec, box, n, realizations, seed, threads);
  rep.rel_gap = std::abs(rep.formula - rep.direct) / std::max(1e-300, std::abs(rep.direct));
  return rep;
}

struct WeylReport {
  double rho = 0.0;
  double beta = 0.0;        // free-lattice energy density at rho, over rho^{2/d}
  double free_value = 0.0;  // beta rho^{2/d}
  double direct = 0.0;      // disordered direct value at the same filling
  bool pass = false;        // direct >= free_value - tol
};

// Calibrates the two-thirds-power lower bound on the clean lattice and checks
// that a nonnegative potential only raises the direct energy density.
inline WeylReport weyl_bound_check(const DisorderSpec& spec, const Box& box, double rho,
                                   long realizations, std::uint64_t seed, int threads = 1) {
  if (spec.inf_support() < 0.0)
    throw ConfigError("weyl check needs a nonnegative potential");
  long sites = box.volume();
  long n = std::llround(rho * double(sites));
  if (n < 1) throw ConfigError("rho too small: zero particles on this box");
  double rho_used = double(n) / double(sites);

  WeylReport rep;
  rep.rho = rho_used;
  DisorderSpec clean = DisorderSpec::constant(0.0);
  rep.free_value = direct_fermion_density(clean, box, n, 1, 0, threads);
  rep.beta = rep.free_value / std::pow(rho_used, 2.0 / double(box.d));
  rep.direct = direct_fermion_density(spec, box, n, realizations, seed, threads);
  rep.pass = rep.direct >= rep.free_value - kIneqTol;
  return rep;
}

// ---------------------------------------------------------------------------
// Finite-volume eigenvalue counts in fixed energy windows.
// ---------------------------------------------------------------------------

struct WegnerRow {
  long side = 0;
  double e_lo = 0.0;
  double e_hi = 0.0;
  double mean_count = 0.0;
  double se = 0.0;
  double per_site_per_energy = 0.0;  // mean / (|box| |I|)
};

struct WegnerReport {
  std::vector<WegnerRow> rows;
  double sup_constant = 0.0;    // largest per-site-per-energy cell value
  double max_variation = 0.0;   // worst relative spread across sides per window
};

// Measures E[card spec in I] / (|box| |I|) across box sides and windows. For
// a site distribution with a bounded density this ratio stays bounded and
// settles as the boxes grow.
inline WegnerReport wegner_scaling_check(const DisorderSpec& spec, int d,
                                         const std::vector<long>& sides,
                                         const std::vector<std::pair<double, double>>& windows,
                                         long realizations, std::uint64_t seed, int threads = 1) {
  if (!std::holds_alternative<UniformDist>(spec.dist))
    throw ConfigError("window-count scaling needs an absolutely continuous site distribution");
  if (sides.empty() || windows.empty()) throw ConfigError("need sides and windows");
  for (auto& w : windows)
    if (!(w.first < w.second)) throw ConfigError("windows must have positive length");

  WegnerReport rep;
  for (long side : sides) {
    Box box(d, IVec(size_t(d), 0), IVec(size_t(d), side));
    Domain dom(box);
    double vol = double(box.volume());
    for (auto& w : windows) {
      std::vector<double> counts(size_t(realizations), 0.0);
      std::exception_ptr failure;
      std::mutex fail_mx;
      parallel_for(realizations, threads, [&](long m) {
        try {
          PotentialField field = sample_potential(spec, dom, seed, std::uint64_t(m));
          SpectrumResult one = diagonalize(assemble_one_body(dom, field).matrix);
          long c = counting_function(one, w.second) - counting_function(one, w.first - 2 * kEigTol);
          counts[size_t(m)] = double(c);
        } catch (...) {
          std::lock_guard<std::mutex> lk(fail_mx);
          if (!failure) failure = std::current_exception();
        }
      });
      if (failure) std::rethrow_exception(failure);
      double mean = 0.0;
      for (double c : counts) mean += c;
      mean /= double(realizations);
      double var = 0.0;
      for (double c : counts) var += (c - mean) * (c - mean);
      var = realizations > 1 ? var / double(realizations - 1) : 0.0;
      WegnerRow row;
      row.side = side;
      row.e_lo = w.first;
      row.e_hi = w.second;
      row.mean_count = mean;
      row.se = realizations > 1 ? std::sqrt(var / double(realizations)) : 0.0;
      row.per_site_per_energy = mean / (vol * (w.second - w.first));
      rep.rows.push_back(row);
    }
  }
  for (auto& r : rep.rows) rep.sup_constant = std::max(rep.sup_constant, r.per_site_per_energy);
  for (size_t wi = 0; wi < windows.size(); ++wi) {
    double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
    for (size_t si = 0; si < sides.size(); ++si) {
      double v = rep.rows[si * windows.size() + wi].per_site_per_energy;
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    if (mx > 0.0) rep.max_variation = std::max(rep.max_variation, (mx - mn) / mx);
  }
  return rep;
}

}  // namespace manylat
