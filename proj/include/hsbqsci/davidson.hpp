#pragma once

// Davidson eigensolver for the lowest roots of a real symmetric sparse matrix.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rng.hpp"

namespace hsbqsci {

struct DavidsonOptions {
  std::size_t max_subspace = 20;    // per-root budget is max(max_subspace, 3 * n_roots)
  double residual_tol = 1e-8;
  std::size_t max_iterations = 2000;
};

struct DavidsonResult {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  std::size_t iterations = 0;
  double max_residual = 0.0;
};

class DavidsonNotConverged : public std::runtime_error {
 public:
  DavidsonNotConverged(std::size_t iters, double residual)
      : std::runtime_error("Davidson did not converge after " + std::to_string(iters) +
                           " iterations (max residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

namespace detail {

// Orthonormalizes v against the columns of basis (two passes); returns the
// remaining norm.
inline double orthogonalize(const Eigen::MatrixXd& basis, Eigen::Index cols, Eigen::VectorXd& v) {
  for (int pass = 0; pass < 2; ++pass)
    for (Eigen::Index j = 0; j < cols; ++j) v -= basis.col(j).dot(v) * basis.col(j);
  const double nrm = v.norm();
  if (nrm > 0.0) v /= nrm;
  return nrm;
}

}  // namespace detail

/// Block Davidson with diagonal (Jacobi) preconditioning and thick restart
/// onto the current Ritz vectors when the subspace reaches its limit.
template <class Matrix>
DavidsonResult davidson(const Matrix& h, std::size_t n_roots, const DavidsonOptions& opt = {}) {
  const Eigen::Index n = h.rows();
  const auto k = static_cast<Eigen::Index>(n_roots);
  if (n_roots == 0 || k > n) throw std::invalid_argument("davidson: need 1 <= n_roots <= dimension");
  const Eigen::VectorXd diag = h.diagonal();
  const Eigen::Index max_sub = std::min<Eigen::Index>(
      n, std::max<Eigen::Index>(static_cast<Eigen::Index>(opt.max_subspace), 3 * k));

  // Start from unit vectors on the smallest diagonal entries.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return diag(a) < diag(b); });

  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, max_sub);
  Eigen::MatrixXd HV = Eigen::MatrixXd::Zero(n, max_sub);
  Eigen::Index m = 0;
  // A small deterministic dense component keeps every symmetry block of h
  // reachable from the guesses.
  for (Eigen::Index r = 0; r < k; ++r) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
      v(i) = 1e-3 * (static_cast<double>(mix64(static_cast<std::uint64_t>(r * n + i)) >> 11) * 0x1.0p-53 - 0.5);
    v(order[static_cast<std::size_t>(r)]) += 1.0;
    if (detail::orthogonalize(V, m, v) < 1e-12) continue;
    V.col(m++) = v;
  }
  for (Eigen::Index j = 0; j < m; ++j) HV.col(j) = h * V.col(j);

  DavidsonResult res;
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    const Eigen::MatrixXd T = V.leftCols(m).transpose() * HV.leftCols(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (T + T.transpose()));
    const Eigen::VectorXd theta = es.eigenvalues().head(k);
    const Eigen::MatrixXd Y = es.eigenvectors().leftCols(k);
    const Eigen::MatrixXd X = V.leftCols(m) * Y;
    const Eigen::MatrixXd R = HV.leftCols(m) * Y - X * theta.asDiagonal();

    double max_res = 0.0;
    std::vector<Eigen::Index> unconverged;
    for (Eigen::Index r = 0; r < k; ++r) {
      const double rn = R.col(r).norm();
      max_res = std::max(max_res, rn);
      if (rn >= opt.residual_tol) unconverged.push_back(r);
    }
    res.max_residual = max_res;
    // Once the subspace spans the whole space the Ritz pairs are exact.
    if (unconverged.empty() || m == n) {
      res.eigenvalues = theta;
      res.eigenvectors = X;
      return res;
    }

    if (m + static_cast<Eigen::Index>(unconverged.size()) > max_sub) {
      // Restart on the Ritz vectors.
      Eigen::MatrixXd Vn = X;
      Eigen::MatrixXd HVn = HV.leftCols(m) * Y;
      V.setZero();
      HV.setZero();
      V.leftCols(k) = Vn;
      HV.leftCols(k) = HVn;
      m = k;
      // Re-orthonormalize (X is orthonormal up to rounding).
      for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::VectorXd v = V.col(j);
        detail::orthogonalize(V, j, v);
        V.col(j) = v;
        HV.col(j) = h * v;
      }
    }

    std::size_t added = 0;
    for (auto r : unconverged) {
      if (m >= max_sub) break;
      Eigen::VectorXd t = R.col(r);
      for (Eigen::Index i = 0; i < n; ++i) {
        double d = theta(r) - diag(i);
        if (std::abs(d) < 1e-8) d = d < 0 ? -1e-8 : 1e-8;
        t(i) /= d;
      }
      if (detail::orthogonalize(V, m, t) < 1e-12) {
        // Preconditioned residual collapsed; fall back to the raw residual.
        t = R.col(r);
        if (detail::orthogonalize(V, m, t) < 1e-12) continue;
      }
      V.col(m) = t;
      HV.col(m) = h * t;
      ++m;
      ++added;
    }
    if (added == 0) {
      // Nothing new to add: the subspace is invariant to working precision.
      res.eigenvalues = theta;
      res.eigenvectors = X;
      if (max_res < 1e-6) return res;
      throw DavidsonNotConverged(it, max_res);
    }
  }
  throw DavidsonNotConverged(opt.max_iterations, res.max_residual);
}

}  // namespace hsbqsci
