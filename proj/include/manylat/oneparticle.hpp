#pragma once

#include <Eigen/Dense>
#include <mutex>
#include <vector>

#include "manylat/disorder.hpp"
#include "manylat/lattice.hpp"
#include "manylat/parallel.hpp"
#include "manylat/spectrum.hpp"

namespace manylat {

// H = 2d on the diagonal plus the potential, -1 between nearest neighbors
// inside the domain. Couplings to exterior sites are dropped, the diagonal is
// left unchanged (hard-wall restriction).
struct OneBodyOperator {
  Domain domain;
  Eigen::MatrixXd matrix;
};

inline OneBodyOperator assemble_one_body(const Domain& dom, const PotentialField& field) {
  if (!(field.domain.sites == dom.sites))
    throw ConfigError("potential field domain does not match the operator domain");
  long n = dom.size();
  OneBodyOperator op;
  op.domain = dom;
  op.matrix = Eigen::MatrixXd::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    op.matrix(i, i) = 2.0 * dom.d + field.values[i];
    for (int a = 0; a < dom.d; ++a) {
      IVec y = dom.sites[i];
      y[a] += 1;
      long j = dom.index_of(y);
      if (j >= 0) {
        op.matrix(i, j) = -1.0;
        op.matrix(j, i) = -1.0;
      }
    }
  }
  return op;
}

inline OneBodyOperator assemble_one_body(const Box& box, const PotentialField& field) {
  return assemble_one_body(Domain(box), field);
}

inline SpectrumResult one_body_spectrum(const DisorderSpec& spec, const Domain& dom,
                                        uint64_t seed, uint64_t index) {
  return diagonalize(assemble_one_body(dom, sample_potential(spec, dom, seed, index)).matrix);
}

// Disorder-averaged counting function per site on an energy grid.
struct EmpiricalIDS {
  std::vector<double> grid;   // strictly increasing
  std::vector<double> n_avg;  // mean of counting/|domain| per grid point
  long M = 0;
  Box box;
  uint64_t seed = 0;
};

inline EmpiricalIDS empirical_ids(const DisorderSpec& spec, const Box& box,
                                  const std::vector<double>& grid, long M, uint64_t seed,
                                  int threads = 1) {
  if (M < 1) throw ConfigError("empirical ids requires M >= 1");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i - 1] < grid[i])) throw ConfigError("energy grid must be strictly increasing");
  EmpiricalIDS ids;
  ids.grid = grid;
  ids.n_avg.assign(grid.size(), 0.0);
  ids.M = M;
  ids.box = box;
  ids.seed = seed;
  Domain dom(box);
  std::vector<std::vector<double>> rows(static_cast<size_t>(M));
  std::exception_ptr failure;
  std::mutex fail_mx;
  parallel_for(M, threads, [&](long m) {
    try {
      SpectrumResult s = one_body_spectrum(spec, dom, seed, m);
      std::vector<double>& row = rows[size_t(m)];
      row.resize(grid.size());
      for (size_t i = 0; i < grid.size(); ++i)
        row[i] = double(counting_function(s, grid[i]));
    } catch (...) {
      std::lock_guard<std::mutex> lk(fail_mx);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  for (const auto& row : rows)
    for (size_t i = 0; i < grid.size(); ++i) ids.n_avg[i] += row[i];
  double norm = 1.0 / (double(M) * double(dom.size()));
  for (double& v : ids.n_avg) v *= norm;
  return ids;
}

inline std::vector<double> uniform_grid(double lo, double hi, long points) {
  if (points < 2 || !(lo < hi)) throw ConfigError("grid requires lo < hi and >= 2 points");
  std::vector<double> g(points);
  for (long i = 0; i < points; ++i) g[i] = lo + (hi - lo) * double(i) / double(points - 1);
  return g;
}

// spectrum support [inf V, 4d + sup V] for the hard-wall model
inline std::vector<double> default_grid(const DisorderSpec& spec, int d, long points = 400) {
  return uniform_grid(std::min(0.0, spec.inf_support()), 4.0 * d + spec.sup_support(), points);
}

// Mean of E_k over disorder for a nested family of boxes. The per-realization
// monotone decrease of E_k along the nesting is asserted exactly.
inline std::vector<double> ground_level_trend(const DisorderSpec& spec,
                                              const std::vector<Box>& boxes, long k, long M,
                                              uint64_t seed) {
  if (boxes.empty()) throw ConfigError("ground level trend requires at least one box");
  for (size_t i = 1; i < boxes.size(); ++i) {
    Domain prev(boxes[i - 1]), cur(boxes[i]);
    if (!prev.is_subset_of(cur)) throw GeometryError("boxes must be nested increasing");
  }
  if (k < 1 || k > Domain(boxes.front()).size())
    throw ConfigError("level index k exceeds the smallest box dimension");
  std::vector<double> means(boxes.size(), 0.0);
  for (long m = 0; m < M; ++m) {
    double prev = std::numeric_limits<double>::infinity();
    for (size_t b = 0; b < boxes.size(); ++b) {
      SpectrumResult s = one_body_spectrum(spec, Domain(boxes[b]), seed, m);
      double Ek = s.evals[k - 1];
      if (Ek > prev + kEigTol)
        throw SolverError("Dirichlet monotonicity violated in ground level trend");
      prev = Ek;
      means[b] += Ek;
    }
  }
  for (double& v : means) v /= double(M);
  return means;
}

}  // namespace manylat
