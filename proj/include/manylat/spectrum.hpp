#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "manylat/errors.hpp"

namespace manylat {

// Absolute slack used everywhere an eigenvalue is compared or counted.
inline constexpr double kEigTol = 1e-9;
// Slack for inequality checks between computed energies.
inline constexpr double kIneqTol = 1e-8;

struct SpectrumResult {
  std::vector<double> evals;  // sorted ascending, multiplicity kept
  double residual_bound = 0;  // bound on ||Hv - Ev|| / ||v|| for every pair

  long dim() const { return long(evals.size()); }
  double ground() const {
    if (evals.empty()) throw GeometryError("spectrum of an empty sector");
    return evals.front();
  }
};

inline bool is_tridiagonal(const Eigen::MatrixXd& H) {
  long n = H.rows();
  for (long i = 0; i < n; ++i)
    for (long j = i + 2; j < n; ++j)
      if (H(i, j) != 0.0) return false;
  return true;
}

// Full spectrum of a symmetric matrix. check_residuals recomputes eigenvectors
// and verifies every residual against the documented bound.
inline SpectrumResult diagonalize(const Eigen::MatrixXd& H, bool check_residuals = false) {
  long n = H.rows();
  if (n == 0) throw GeometryError("cannot diagonalize an empty matrix");
  SpectrumResult out;
  double scale = 0;
  for (long i = 0; i < n; ++i) scale = std::max(scale, H.row(i).cwiseAbs().sum());
  out.residual_bound = 64.0 * double(n) * std::numeric_limits<double>::epsilon() * (1.0 + scale);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  auto mode = check_residuals ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
  if (is_tridiagonal(H)) {
    Eigen::VectorXd diag = H.diagonal();
    Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
    for (long i = 0; i + 1 < n; ++i) sub(i) = H(i + 1, i);
    solver.computeFromTridiagonal(diag, sub, mode);
  } else {
    solver.compute(H, mode);
  }
  if (solver.info() != Eigen::Success)
    throw SolverError("eigensolver failed to converge");

  out.evals.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(out.evals.begin(), out.evals.end());

  if (check_residuals) {
    const auto& V = solver.eigenvectors();
    const auto& E = solver.eigenvalues();
    for (long k = 0; k < n; ++k) {
      double res = (H * V.col(k) - E(k) * V.col(k)).norm() / V.col(k).norm();
      double tol = kEigTol * (1.0 + std::abs(E(k)));
      if (res > tol)
        throw SolverError("eigensolver residual " + std::to_string(res) +
                          " exceeds tolerance " + std::to_string(tol));
    }
  }
  return out;
}

// card{k : E_k <= E + tol}
inline long counting_function(const SpectrumResult& s, double E) {
  return long(std::upper_bound(s.evals.begin(), s.evals.end(), E + kEigTol) -
              s.evals.begin());
}

// log of the count; -inf below the ground state
inline double entropy(const SpectrumResult& s, double E) {
  long c = counting_function(s, E);
  return c == 0 ? -std::numeric_limits<double>::infinity() : std::log(double(c));
}

// Smallest integer m with log(m) >= S, with an exactness guard so that
// log-integer inputs are not pushed up by rounding noise.
inline long entropy_level_count(double S) {
  if (S == -std::numeric_limits<double>::infinity()) return 1;
  if (S < 0) throw ConfigError("entropy argument must be >= 0 or -inf");
  double e = std::exp(S);
  long m = long(std::llround(e));
  if (m >= 1 && std::abs(S - std::log(double(m))) <= 1e-12) return m;
  return long(std::ceil(e));
}

// E_m with m = exp(S*): the right inverse of the entropy.
inline double energy_at_entropy(const SpectrumResult& s, double S) {
  long m = entropy_level_count(S);
  if (m > s.dim())
    throw GeometryError("sector exhausted: entropy demands " + std::to_string(m) +
                        " levels, sector has " + std::to_string(s.dim()));
  return s.evals[m - 1];
}

}  // namespace manylat
