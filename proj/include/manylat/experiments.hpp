#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "manylat/config.hpp"
#include "manylat/constructions.hpp"
#include "manylat/csv.hpp"
#include "manylat/thermo.hpp"

namespace manylat {

struct RunOutcome {
  std::string dir;  // <out>/<experiment>/<label>
  json summary;
};

namespace detail {

inline std::pair<int, long> geom_single(const json& cfg) {
  const json& g = cfg.at("geometry");
  check_keys(g, "geometry", {"d", "side"});
  int d = int(get_req<long>(g, "geometry", "d"));
  long side = get_req<long>(g, "geometry", "side");
  if (d < 1 || side < 1) throw ConfigError("geometry requires d >= 1 and side >= 1");
  return {d, side};
}

inline std::pair<int, std::vector<long>> geom_sides(const json& cfg) {
  const json& g = cfg.at("geometry");
  check_keys(g, "geometry", {"d", "sides"});
  int d = int(get_req<long>(g, "geometry", "d"));
  auto sides = get_req<std::vector<long>>(g, "geometry", "sides");
  if (d < 1 || sides.empty()) throw ConfigError("geometry requires d >= 1 and nonempty sides");
  for (long s : sides)
    if (s < 1) throw ConfigError("geometry sides must be >= 1");
  return {d, sides};
}

struct PairGeometry {
  int d = 1;
  long side1 = 0, side2 = 0, gap = 0;
};

inline PairGeometry geom_pair(const json& cfg) {
  const json& g = cfg.at("geometry");
  check_keys(g, "geometry", {"d", "side1", "side2", "gap"});
  PairGeometry pg;
  pg.d = int(get_req<long>(g, "geometry", "d"));
  pg.side1 = get_req<long>(g, "geometry", "side1");
  pg.side2 = get_req<long>(g, "geometry", "side2");
  pg.gap = get_req<long>(g, "geometry", "gap");
  if (pg.d < 1 || pg.side1 < 1 || pg.side2 < 1 || pg.gap < 1)
    throw ConfigError("pair geometry requires d, side1, side2, gap all >= 1");
  return pg;
}

inline std::vector<double> parse_grid(const json& cfg, const DisorderSpec& spec, int d) {
  long points = 400;
  double lo = std::min(0.0, spec.inf_support()), hi = 4.0 * d + spec.sup_support();
  if (cfg.contains("grid")) {
    const json& g = cfg.at("grid");
    check_keys(g, "grid", {"points", "lo", "hi"});
    points = get_or<long>(g, "grid", "points", points);
    lo = get_or<double>(g, "grid", "lo", lo);
    hi = get_or<double>(g, "grid", "hi", hi);
  }
  return uniform_grid(lo, hi, points);
}

inline void write_ineq_rows(const std::string& dir, const std::vector<IneqRow>& rows) {
  std::map<std::string, std::vector<const IneqRow*>> groups;
  for (const IneqRow& r : rows) groups[r.inequality].push_back(&r);
  for (auto& [name, grp] : groups) {
    CsvWriter w(dir + "/" + name + ".csv", {"seed_index", "lhs", "rhs", "margin", "pass"});
    for (const IneqRow* r : grp)
      w.write_row({CsvWriter::cell(r->seed_index), CsvWriter::cell(r->lhs),
                   CsvWriter::cell(r->rhs), CsvWriter::cell(r->margin),
                   CsvWriter::cell(r->pass)});
  }
}

inline json ineq_summary(const std::vector<IneqRow>& rows) {
  std::map<std::string, std::pair<long, long>> tally;
  for (const IneqRow& r : rows) {
    tally[r.inequality].second += 1;
    if (r.pass) tally[r.inequality].first += 1;
  }
  json out = json::object();
  bool all = true;
  for (auto& [name, pt] : tally) {
    out[name] = {{"pass", pt.first}, {"total", pt.second}};
    all = all && pt.first == pt.second;
  }
  out["all_pass"] = all;
  return out;
}

// Ground state (value and vector) of one interacting sector.
inline std::pair<double, Eigen::VectorXd> sector_ground(const BasisSet& basis,
                                                        const PotentialField& field,
                                                        const InteractionSpec& inter) {
  ManyBodyOperator op = assemble_many_body(basis, field, inter);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix);
  if (solver.info() != Eigen::Success) throw SolverError("eigensolver failed to converge");
  return {solver.eigenvalues()(0), solver.eigenvectors().col(0)};
}

}  // namespace detail

// --------------------------------------------------------------------------
// Experiment drivers. Each writes its CSV files into dir and returns the
// experiment-specific summary payload.
// --------------------------------------------------------------------------

inline json run_spectrum(const RunConfig& rc, const std::string& dir) {
  auto [d, side] = detail::geom_single(rc.raw);
  DisorderSpec spec = parse_disorder(rc.raw.at("disorder"));
  long n = get_or<long>(rc.raw, "config", "n", 1);
  long index = get_or<long>(rc.raw, "config", "index", 0);
  Statistics stat = rc.raw.contains("statistics")
                        ? parse_statistics(rc.raw, "config")
                        : Statistics::boltzmann;
  InteractionSpec inter = rc.raw.contains("interaction")
                              ? parse_interaction(rc.raw.at("interaction"))
                              : InteractionSpec::none_interaction();
  Domain dom(origin_box(d, side));
  PotentialField field = sample_potential(spec, dom, rc.seed, uint64_t(index));

  SpectrumResult s;
  if (n == 1) {
    s = diagonalize(assemble_one_body(dom, field).matrix, true);
    CsvWriter w(dir + "/spectrum.csv", {"k", "E_k"});
    for (long k = 0; k < s.dim(); ++k)
      w.write_row({CsvWriter::cell(k + 1), CsvWriter::cell(s.evals[size_t(k)])});
  } else {
    BasisSet basis = enumerate_basis(dom, n, stat, inter.hardcore_radius());
    s = diagonalize(assemble_many_body(basis, field, inter).matrix, true);
    CsvWriter w(dir + "/spectrum.csv", {"k", "E_k", "S_k"});
    for (long k = 0; k < s.dim(); ++k)
      w.write_row({CsvWriter::cell(k + 1), CsvWriter::cell(s.evals[size_t(k)]),
                   CsvWriter::cell(entropy(s, s.evals[size_t(k)]))});
  }
  return json{{"dim", s.dim()},
              {"ground", s.ground()},
              {"residual_bound", s.residual_bound},
              {"files", {"spectrum.csv"}}};
}

inline json run_ids(const RunConfig& rc, const std::string& dir) {
  auto [d, side] = detail::geom_single(rc.raw);
  DisorderSpec spec = parse_disorder(rc.raw.at("disorder"));
  std::vector<double> grid = detail::parse_grid(rc.raw, spec, d);
  Box box = origin_box(d, side);
  EmpiricalIDS ids = empirical_ids(spec, box, grid, rc.realizations, rc.seed, rc.threads);
  CsvWriter w(dir + "/ids.csv", {"E", "N_avg", "M", "box_side", "seed"});
  for (size_t i = 0; i < grid.size(); ++i)
    w.write_row({CsvWriter::cell(ids.grid[i]), CsvWriter::cell(ids.n_avg[i]),
                 CsvWriter::cell(ids.M), CsvWriter::cell(side),
                 CsvWriter::cell((unsigned long long)rc.seed)});
  return json{{"points", grid.size()},
              {"grid_lo", grid.front()},
              {"grid_hi", grid.back()},
              {"n_avg_top", ids.n_avg.back()},
              {"files", {"ids.csv"}}};
}

inline json run_boltzmann_limit(const RunConfig& rc, const std::string& dir) {
  auto [d, sides] = detail::geom_sides(rc.raw);
  DisorderSpec spec = parse_disorder(rc.raw.at("disorder"));
  if (rc.raw.contains("statistics") && parse_statistics(rc.raw, "config") != Statistics::boltzmann)
    throw ConfigError("boltzmann-limit runs ordered tuples only");
  if (rc.raw.contains("interaction") &&
      parse_interaction(rc.raw.at("interaction")).kind != InteractionKind::none)
    throw ConfigError("boltzmann-limit requires the free interaction");
  long n = get_req<long>(rc.raw, "config", "n");
  double S = get_or<double>(rc.raw, "config", "S", 0.0);
  BoltzmannLimitReport rep =
      boltzmann_limit_check(spec, d, sides, n, S, rc.realizations, rc.seed, rc.threads);
  CsvWriter w(dir + "/trend.csv",
              {"side", "mean_energy_per_particle", "subadd_pass", "subadd_total"});
  for (const auto& r : rep.rows)
    w.write_row({CsvWriter::cell(r.side), CsvWriter::cell(r.mean_energy_per_particle),
                 CsvWriter::cell(r.subadd_pass), CsvWriter::cell(r.subadd_total)});
  return json{{"n", rep.n},
              {"entropy", rep.entropy},
              {"decreasing", rep.decreasing},
              {"subadd_all", rep.subadd_all},
              {"final_mean", rep.rows.back().mean_energy_per_particle},
              {"files", {"trend.csv"}}};
}

inline json run_fermion_density(const RunConfig& rc, const std::string& dir) {
  auto [d, side] = detail::geom_single(rc.raw);
  DisorderSpec spec = parse_disorder(rc.raw.at("disorder"));
  double rho = get_req<double>(rc.raw, "config", "rho");
  long points = 400;
  if (rc.raw.contains("grid")) {
    const json& g = rc.raw.at("grid");
    check_keys(g, "grid", {"points"});
    points = get_or<long>(g, "grid", "points", points);
  }
  FermionDensityReport rep = fermion_density_report(spec, origin_box(d, side), rho,
                                                    rc.realizations, rc.seed, points, rc.threads);
  CsvWriter w(dir + "/report.csv",
              {"rho", "fermi_lo", "fermi_hi", "formula", "direct", "rel_gap"});
  w.write_row({CsvWriter::cell(rep.rho), CsvWriter::cell(rep.fermi_lo),
               CsvWriter::cell(rep.fermi_hi), CsvWriter::cell(rep.formula),
               CsvWriter::cell(rep.direct), CsvWriter::cell(rep.rel_gap)});
  return json{{"rho", rep.rho},         {"n", rep.n},
              {"fermi_lo", rep.fermi_lo}, {"fermi_hi", rep.fermi_hi},
              {"formula", rep.formula}, {"direct", rep.direct},
              {"rel_gap", rep.rel_gap}, {"files", {"report.csv"}}};
}

inline json run_weyl_check(const RunConfig& rc, const std::string& dir) {
  auto [d, side] = detail::geom_single(rc.raw);
  DisorderSpec spec = parse_disorder(rc.raw.at("disorder"));
  std::vector<double> rhos;
  if (rc.raw.contains("rhos"))
    rhos = get_req<std::vector<double>>(rc.raw, "config", "rhos");
  else
    rhos.push_back(get_req<double>(rc.raw, "config", "rho"));
  if (rhos.empty()) throw ConfigError("rhos must be nonempty");
  Box box = origin_box(d, side);
  CsvWriter w(dir + "/weyl.csv", {"rho", "beta", "free_value", "direct", "pass"});
  bool all = true;
  json rows = json::array();
  for (double rho : rhos) {
    WeylReport rep = weyl_bound_check(spec, box, rho, rc.realizations, rc.seed, rc.threads);
    w.write_row({CsvWriter::cell(rep.rho), CsvWriter::cell(rep.beta),
                 CsvWriter::cell(rep.free_value), CsvWriter::cell(rep.direct),
                 CsvWriter::cell(rep.pass)});
    rows.push_back(json{{"rho", rep.rho},
                        {"beta", rep.beta},
                        {"free_value", rep.free_value},
                        {"direct", rep.direct},
                        {"pass", rep.pass}});
    all = all && rep.pass;
  }
  return json{{"rows", rows}, {"all_pass", all}, {"files", {"weyl.csv"}}};
}

inline json run_wegner_check(const RunConfig& rc, const std::string& dir) {
  auto [d, sides] = detail::geom_sides(rc.raw);
  DisorderSpec spec = parse_disorder(rc.raw.at("disorder"));
  auto raw_windows = get_req<std::vector<std::vector<double>>>(rc.raw, "config", "windows");
  std::vector<std::pair<double, double>> windows;
  for (const auto& w : raw_windows) {
    if (w.size() != 2) throw ConfigError("each window must be [lo, hi]");
    windows.emplace_back(w[0], w[1]);
  }
  WegnerReport rep =
      wegner_scaling_check(spec, d, sides, windows, rc.realizations, rc.seed, rc.threads);
  CsvWriter w(dir + "/wegner.csv",
              {"side", "E_lo", "E_hi", "mean_count", "se", "per_site_per_energy"});
  for (const auto& r : rep.rows)
    w.write_row({CsvWriter::cell(r.side), CsvWriter::cell(r.e_lo), CsvWriter::cell(r.e_hi),
                 CsvWriter::cell(r.mean_count), CsvWriter::cell(r.se),
                 CsvWriter::cell(r.per_site_per_energy)});
  return json{{"sup_constant", rep.sup_constant},
              {"max_variation", rep.max_variation},
              {"files", {"wegner.csv"}}};
}

inline json run_subadd_check(const RunConfig& rc, const std::string& dir) {
  detail::PairGeometry pg = detail::geom_pair(rc.raw);
  DisorderSpec spec = parse_disorder(rc.raw.at("disorder"));
  InteractionSpec inter = parse_interaction(rc.raw.at("interaction"));
  Statistics stat = parse_statistics(rc.raw, "config");
  long n1 = get_req<long>(rc.raw, "config", "n1");
  long n2 = get_req<long>(rc.raw, "config", "n2");
  double S1 = get_or<double>(rc.raw, "config", "S1", 0.0);
  double S2 = get_or<double>(rc.raw, "config", "S2", 0.0);
  auto [b1, b2] = gap_pair(pg.d, pg.side1, pg.side2, pg.gap);
  std::vector<IneqRow> rows =
      check_subadditivity(spec, inter, b1, b2, n1, n2, S1, S2, stat, rc.seed, rc.realizations);
  detail::write_ineq_rows(dir, rows);
  json out = detail::ineq_summary(rows);
  out["separation"] = box_distance(b1, b2);
  return out;
}

inline json run_testfn_check(const RunConfig& rc, const std::string& dir) {
  detail::PairGeometry pg = detail::geom_pair(rc.raw);
  DisorderSpec spec = parse_disorder(rc.raw.at("disorder"));
  InteractionSpec inter = parse_interaction(rc.raw.at("interaction"));
  Statistics stat = parse_statistics(rc.raw, "config");
  long n1 = get_req<long>(rc.raw, "config", "n1");
  long n2 = get_req<long>(rc.raw, "config", "n2");
  auto [box1, box2] = gap_pair(pg.d, pg.side1, pg.side2, pg.gap);
  Domain d1(box1), d2(box2);
  Domain dj = domain_union(d1, d2);
  double r = box_distance(box1, box2);

  BasisSet b1 = enumerate_basis(d1, n1, stat, inter.hardcore_radius());
  BasisSet b2 = enumerate_basis(d2, n2, stat, inter.hardcore_radius());
  BasisSet bj = enumerate_basis(dj, n1 + n2, stat, inter.hardcore_radius());

  CsvWriter wb(dir + "/bound.csv", {"seed_index", "lhs", "rhs", "margin", "pass"});
  CsvWriter wn(dir + "/norm.csv", {"seed_index", "lhs", "rhs", "margin", "pass"});
  const double norm_tol = 1e-10;
  long pass_bound = 0, pass_norm = 0;
  for (long m = 0; m < rc.realizations; ++m) {
    PotentialField f1 = sample_potential(spec, d1, rc.seed, uint64_t(m));
    PotentialField f2 = sample_potential(spec, d2, rc.seed, uint64_t(m));
    PotentialField fj = sample_potential(spec, dj, rc.seed, uint64_t(m));
    auto [E1, phi1] = detail::sector_ground(b1, f1, inter);
    auto [E2, phi2] = detail::sector_ground(b2, f2, inter);
    TestFunction tf = build_test_function(b1, phi1, b2, phi2, bj);
    ManyBodyOperator H = assemble_many_body(bj, fj, inter);
    BoundReport rep = verify_energy_bound(tf, H, E1, E2, inter, n1, n2, r);
    wb.write_row({CsvWriter::cell(m), CsvWriter::cell(rep.quotient), CsvWriter::cell(rep.bound),
                  CsvWriter::cell(rep.margin), CsvWriter::cell(rep.pass)});
    if (rep.pass) ++pass_bound;
    double nmargin = tf.expected_norm_sq - tf.norm_sq;
    bool npass = std::abs(nmargin) <= norm_tol;
    wn.write_row({CsvWriter::cell(m), CsvWriter::cell(tf.norm_sq),
                  CsvWriter::cell(tf.expected_norm_sq), CsvWriter::cell(nmargin),
                  CsvWriter::cell(npass)});
    if (npass) ++pass_norm;
  }
  return json{{"bound_pass", pass_bound},
              {"norm_pass", pass_norm},
              {"total", rc.realizations},
              {"separation", r},
              {"all_pass", pass_bound == rc.realizations && pass_norm == rc.realizations},
              {"files", {"bound.csv", "norm.csv"}}};
}

inline json run_cube_seq(const RunConfig& rc, const std::string& dir) {
  DisorderSpec spec = parse_disorder(rc.raw.at("disorder"));
  InteractionSpec inter = rc.raw.contains("interaction")
                              ? parse_interaction(rc.raw.at("interaction"))
                              : InteractionSpec::none_interaction();
  Statistics stat = parse_statistics(rc.raw, "config");
  ThermoParams p;
  p.cube = parse_cube(rc.raw.at("cube"));
  const json& t = rc.raw.at("thermo");
  check_keys(t, "thermo", {"rho", "sigma", "B", "C", "levels", "sector_cap"});
  p.rho = get_req<double>(t, "thermo", "rho");
  p.sigma = get_or<double>(t, "thermo", "sigma", 0.0);
  p.B = get_or<double>(t, "thermo", "B", inter.B);
  p.C = get_or<double>(t, "thermo", "C", std::max(0.0, -spec.inf_support()));
  p.levels = int(get_req<long>(t, "thermo", "levels"));
  p.sector_cap = get_or<long>(t, "thermo", "sector_cap", 5000);
  p.realizations = rc.realizations;
  p.seed = rc.seed;
  p.threads = rc.threads;

  SequenceDiagnostics diag = run_cube_sequence(p, spec, inter, stat);
  RecursionReport rec = check_recursion(diag);

  CsvWriter wl(dir + "/levels.csv",
               {"level", "side_sites", "particles", "entropy", "sector_dim", "route", "mean",
                "variance", "se_mean", "se_var", "correction"});
  for (const auto& st : diag.levels)
    wl.write_row({CsvWriter::cell(st.level), CsvWriter::cell(st.side_sites),
                  CsvWriter::cell(st.particles), CsvWriter::cell(st.entropy),
                  CsvWriter::cell(st.sector_dim), st.route, CsvWriter::cell(st.mean),
                  CsvWriter::cell(st.variance), CsvWriter::cell(st.se_mean),
                  CsvWriter::cell(st.se_var), CsvWriter::cell(st.correction)});
  CsvWriter ws(dir + "/samples.csv", {"level", "seed_index", "X"});
  for (size_t N = 0; N < diag.samples.size(); ++N)
    for (size_t m = 0; m < diag.samples[N].size(); ++m)
      ws.write_row({CsvWriter::cell(long(N)), CsvWriter::cell(long(m)),
                    CsvWriter::cell(diag.samples[N][m])});

  json mean_rows = json::array(), var_rows = json::array();
  for (const auto& r : rec.mean_rows)
    mean_rows.push_back(json{{"level", r.level}, {"lhs", r.lhs}, {"rhs", r.rhs},
                             {"slack_se", r.slack_se}, {"pass", r.pass}});
  for (const auto& r : rec.var_rows)
    var_rows.push_back(json{{"level", r.level}, {"lhs", r.lhs}, {"rhs", r.rhs},
                            {"slack_se", r.slack_se}, {"pass", r.pass}});
  return json{{"rho_snapped", diag.rho_snapped},
              {"min_sample", diag.min_sample},
              {"nonnegative", rec.nonnegative},
              {"mean_recursion", mean_rows},
              {"variance_trend", var_rows},
              {"all_pass", rec.all_pass},
              {"files", {"levels.csv", "samples.csv"}}};
}

inline json run_hardcore_packing(const RunConfig& rc, const std::string& dir) {
  auto [d, sides] = detail::geom_sides(rc.raw);
  double r0 = get_req<double>(rc.raw, "config", "r0");
  if (r0 <= 0) throw ConfigError("r0 must be positive");
  CsvWriter w(dir + "/packing.csv", {"side", "max_n", "rho_max"});
  json rows = json::array();
  for (long side : sides) {
    Domain dom(origin_box(d, side));
    long n = max_hardcore_packing(dom, r0);
    double rho = double(n) / double(dom.size());
    w.write_row({CsvWriter::cell(side), CsvWriter::cell(n), CsvWriter::cell(rho)});
    rows.push_back(json{{"side", side}, {"max_n", n}, {"rho_max", rho}});
  }
  json out{{"rows", rows}, {"files", {"packing.csv"}}};
  if (d == 1) out["rho_limit"] = 1.0 / r0;
  return out;
}

// --------------------------------------------------------------------------
// Dispatch.
// --------------------------------------------------------------------------

inline RunOutcome run_experiment(const json& cfg) {
  static const std::map<std::string, std::set<std::string>> extra = {
      {"spectrum", {"disorder", "geometry", "n", "index", "statistics", "interaction"}},
      {"ids", {"disorder", "geometry", "grid"}},
      {"boltzmann-limit", {"disorder", "geometry", "n", "S", "statistics", "interaction"}},
      {"fermion-density", {"disorder", "geometry", "rho", "grid"}},
      {"weyl-check", {"disorder", "geometry", "rho", "rhos"}},
      {"wegner-check", {"disorder", "geometry", "windows"}},
      {"subadd-check",
       {"disorder", "geometry", "interaction", "statistics", "n1", "n2", "S1", "S2"}},
      {"testfn-check", {"disorder", "geometry", "interaction", "statistics", "n1", "n2"}},
      {"cube-seq", {"disorder", "interaction", "statistics", "cube", "thermo"}},
      {"hardcore-packing", {"geometry", "r0"}},
  };
  if (!cfg.is_object() || !cfg.contains("experiment"))
    throw ConfigError("config must be a JSON object with an 'experiment' key");
  std::string name = cfg.at("experiment").is_string() ? cfg.at("experiment").get<std::string>() : "";
  auto it = extra.find(name);
  if (it == extra.end()) throw ConfigError("unknown experiment '" + name + "'");
  RunConfig rc = parse_run_config(cfg, it->second);

  std::filesystem::path dir =
      std::filesystem::path(rc.out) / rc.experiment / rc.label;
  std::filesystem::create_directories(dir);
  std::string dirs = dir.string();

  json results;
  if (name == "spectrum") results = run_spectrum(rc, dirs);
  else if (name == "ids") results = run_ids(rc, dirs);
  else if (name == "boltzmann-limit") results = run_boltzmann_limit(rc, dirs);
  else if (name == "fermion-density") results = run_fermion_density(rc, dirs);
  else if (name == "weyl-check") results = run_weyl_check(rc, dirs);
  else if (name == "wegner-check") results = run_wegner_check(rc, dirs);
  else if (name == "subadd-check") results = run_subadd_check(rc, dirs);
  else if (name == "testfn-check") results = run_testfn_check(rc, dirs);
  else if (name == "cube-seq") results = run_cube_seq(rc, dirs);
  else results = run_hardcore_packing(rc, dirs);

  RunOutcome out;
  out.dir = dirs;
  out.summary = json{{"experiment", rc.experiment},
                     {"label", rc.label},
                     {"seed", rc.seed},
                     {"realizations", rc.realizations},
                     {"config", rc.raw},
                     {"config_hash", config_hash(rc.raw)},
                     {"results", results}};
  std::ofstream sf(dir / "summary.json");
  if (!sf) throw ConfigError("cannot write summary.json under " + dirs);
  sf << out.summary.dump(2) << '\n';
  return out;
}

}  // namespace manylat
