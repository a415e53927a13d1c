#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "sgcgen/error.hpp"
#include "sgcgen/random.hpp"

namespace sgcgen {

/// Anything that can apply a symmetric n x n matrix to a vector.
template <class Op>
concept SymmetricOperator = requires(const Op& op, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  { op.rows() } -> std::convertible_to<Eigen::Index>;
  op.apply(x, y);
};

enum class SpectrumEnd { smallest, largest };

struct EigshOptions {
  double tol = 1e-8;       // residual tolerance, scaled by max(1, |ritz value|)
  int max_matvecs = 5000;  // iteration budget; one matvec per basis vector
  int extra_ritz = 2;      // guard pairs solved alongside the request and discarded
  std::uint64_t seed = 1;
  SpectrumEnd which = SpectrumEnd::smallest;
};

struct EigshResult {
  /// Requested eigenvalues, ascending for `smallest`, descending for `largest`.
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;    // n x nev, orthonormal columns, matching order
  Eigen::VectorXd residuals;  // ||Op y - lambda y|| per returned pair
  int matvecs = 0;
};

namespace detail {

inline Eigen::VectorXd random_unit_vector(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  double norm = v.norm();
  if (norm == 0.0) v.setOnes(), norm = v.norm();
  return v / norm;
}

}  // namespace detail

/// Extremal eigenpairs of a symmetric operator by thick-restart Lanczos with
/// full reorthogonalization. Only matvecs with the operator are used, so each
/// iteration costs O(nnz) plus O(n * basis) orthogonalization work. The
/// projected problem is kept as an explicit dense matrix, which makes the
/// restart algebra exact and handles the post-restart bordered structure
/// without special cases. Deterministic for a fixed seed.
template <SymmetricOperator Op>
EigshResult eigsh(const Op& op, int nev, const EigshOptions& opts = {}) {
  const Eigen::Index n = op.rows();
  if (nev < 1 || static_cast<Eigen::Index>(nev) > n)
    throw Error(ErrorCode::validation, "eigsh: need 1 <= nev <= n");

  const Eigen::Index targets = std::min<Eigen::Index>(nev + opts.extra_ritz, n);
  const Eigen::Index max_basis =
      std::min<Eigen::Index>(n, std::max<Eigen::Index>(2 * targets + 10, 30));

  Eigen::MatrixXd V(n, max_basis);           // orthonormal basis
  Eigen::MatrixXd W(n, max_basis);           // W = Op * V, column by column
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(max_basis, max_basis);  // V^T Op V

  Rng rng(opts.seed);
  Eigen::Index j = 0;
  int matvecs = 0;

  auto append = [&](Eigen::VectorXd v) {
    // two-pass classical Gram-Schmidt against the current basis
    for (int pass = 0; pass < 2; ++pass)
      if (j > 0) v.noalias() -= V.leftCols(j) * (V.leftCols(j).transpose() * v);
    double norm = v.norm();
    int guard = 0;
    while (norm < 1e-12 && guard++ < 8) {
      // breakdown: the candidate lies in the span; continue from a fresh direction
      v = detail::random_unit_vector(n, rng);
      for (int pass = 0; pass < 2; ++pass)
        if (j > 0) v.noalias() -= V.leftCols(j) * (V.leftCols(j).transpose() * v);
      norm = v.norm();
    }
    if (norm < 1e-12)
      throw Error(ErrorCode::convergence, "eigsh: could not extend the Krylov basis");
    V.col(j) = v / norm;
    Eigen::VectorXd w(n);
    op.apply(V.col(j), w);
    ++matvecs;
    W.col(j) = w;
    Eigen::VectorXd h = V.leftCols(j + 1).transpose() * w;
    H.block(0, j, j + 1, 1) = h;
    H.block(j, 0, 1, j).noalias() = h.head(j).transpose();
    ++j;
  };

  append(detail::random_unit_vector(n, rng));

  std::vector<double> last_residuals;
  while (true) {
    while (j < max_basis && matvecs < opts.max_matvecs) append(W.col(j - 1));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.topLeftCorner(j, j));
    if (es.info() != Eigen::Success)
      throw Error(ErrorCode::convergence, "eigsh: projected eigensolve failed");

    const Eigen::Index nt = std::min(targets, j);
    // es returns ascending order; pick the requested end, target-first
    std::vector<Eigen::Index> sel(static_cast<std::size_t>(nt));
    for (Eigen::Index i = 0; i < nt; ++i)
      sel[static_cast<std::size_t>(i)] = (opts.which == SpectrumEnd::smallest) ? i : j - 1 - i;

    Eigen::MatrixXd S(j, nt);
    Eigen::VectorXd theta(nt);
    for (Eigen::Index i = 0; i < nt; ++i) {
      S.col(i) = es.eigenvectors().col(sel[static_cast<std::size_t>(i)]);
      theta[i] = es.eigenvalues()[sel[static_cast<std::size_t>(i)]];
    }
    Eigen::MatrixXd X = V.leftCols(j) * S;
    Eigen::MatrixXd R = W.leftCols(j) * S - X * theta.asDiagonal();

    const Eigen::Index nret = std::min<Eigen::Index>(nev, nt);
    last_residuals.assign(static_cast<std::size_t>(nret), 0.0);
    bool converged = true;
    for (Eigen::Index i = 0; i < nret; ++i) {
      const double r = R.col(i).norm();
      last_residuals[static_cast<std::size_t>(i)] = r;
      if (r > opts.tol * std::max(1.0, std::abs(theta[i]))) converged = false;
    }
    // a full-dimension basis makes the projection exact
    if (j == n) converged = true;

    if (converged) {
      EigshResult out;
      out.values = theta.head(nret);
      out.vectors = X.leftCols(nret);
      out.residuals.resize(nret);
      for (Eigen::Index i = 0; i < nret; ++i) out.residuals[i] = R.col(i).norm();
      out.matvecs = matvecs;
      return out;
    }
    if (matvecs >= opts.max_matvecs)
      throw ConvergenceError(
          "eigsh: no convergence within " + std::to_string(opts.max_matvecs) +
              " matvecs (worst residual " +
              std::to_string(*std::max_element(last_residuals.begin(), last_residuals.end())) + ")",
          last_residuals);

    // thick restart: keep the target-side Ritz pairs plus a few more
    const Eigen::Index keep = std::min(j - 1, nt + std::min<Eigen::Index>(nt, 10));
    Eigen::MatrixXd S_keep(j, keep);
    Eigen::VectorXd theta_keep(keep);
    for (Eigen::Index i = 0; i < keep; ++i) {
      const Eigen::Index src =
          (opts.which == SpectrumEnd::smallest) ? i : j - 1 - i;
      S_keep.col(i) = es.eigenvectors().col(src);
      theta_keep[i] = es.eigenvalues()[src];
    }
    Eigen::MatrixXd Vk = V.leftCols(j) * S_keep;
    Eigen::MatrixXd Wk = W.leftCols(j) * S_keep;
    V.leftCols(keep) = Vk;
    W.leftCols(keep) = Wk;
    H.setZero();
    H.topLeftCorner(keep, keep) = theta_keep.asDiagonal();
    j = keep;

    // continue from the residual of the first unconverged target
    Eigen::VectorXd cand;
    for (Eigen::Index i = 0; i < nret; ++i) {
      if (last_residuals[static_cast<std::size_t>(i)] >
          opts.tol * std::max(1.0, std::abs(theta[i]))) {
        cand = R.col(i);
        break;
      }
    }
    if (cand.size() == 0 || cand.norm() < 1e-12) cand = detail::random_unit_vector(n, rng);
    append(cand);
  }
}

/// Materializes a symmetric operator column by column (n matvecs).
template <SymmetricOperator Op>
Eigen::MatrixXd materialize(const Op& op) {
  const Eigen::Index n = op.rows();
  Eigen::MatrixXd dense(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd col(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    e[i] = 1.0;
    op.apply(e, col);
    dense.col(i) = col;
    e[i] = 0.0;
  }
  return 0.5 * (dense + dense.transpose());
}

/// Dense fallback: materializes the operator and solves with a dense
/// symmetric eigensolver. Intended for n <= a few hundred.
template <SymmetricOperator Op>
EigshResult eigsh_dense(const Op& op, int nev, SpectrumEnd which = SpectrumEnd::smallest) {
  const Eigen::Index n = op.rows();
  if (nev < 1 || static_cast<Eigen::Index>(nev) > n)
    throw Error(ErrorCode::validation, "eigsh_dense: need 1 <= nev <= n");
  Eigen::MatrixXd dense = materialize(op);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::convergence, "eigsh_dense: eigensolve failed");
  EigshResult out;
  out.values.resize(nev);
  out.vectors.resize(n, nev);
  for (int i = 0; i < nev; ++i) {
    const Eigen::Index src = (which == SpectrumEnd::smallest) ? i : n - 1 - i;
    out.values[i] = es.eigenvalues()[src];
    out.vectors.col(i) = es.eigenvectors().col(src);
  }
  out.residuals.resize(nev);
  for (int i = 0; i < nev; ++i) {
    Eigen::VectorXd r = dense * out.vectors.col(i) - out.values[i] * out.vectors.col(i);
    out.residuals[i] = r.norm();
  }
  out.matvecs = static_cast<int>(n);
  return out;
}

}  // namespace sgcgen
