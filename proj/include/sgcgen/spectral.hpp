#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "sgcgen/eigensolver.hpp"
#include "sgcgen/error.hpp"
#include "sgcgen/format.hpp"
#include "sgcgen/graph.hpp"
#include "sgcgen/kmeans.hpp"
#include "sgcgen/random.hpp"
#include "sgcgen/sbm.hpp"

namespace sgcgen {

enum class LaplacianMode { standard, regularized };

/// Matrix-free symmetric PSD operator x -> x - S A S x with
/// S = diag((d_i + tau)^{-1/2}); tau = 0 in standard mode (the normalized
/// Laplacian) and tau = mean degree in regularized mode, which replaces every
/// occurrence of D by D + dbar*I.
class LaplacianOperator {
public:
  LaplacianOperator(const Graph& g, LaplacianMode mode) : g_(&g), mode_(mode) {
    const std::size_t n = g.n();
    if (n < 2) throw Error(ErrorCode::validation, "Laplacian needs at least 2 nodes");
    tau_ = 0.0;
    if (mode == LaplacianMode::regularized) {
      if (g.m() == 0)
        throw Error(ErrorCode::validation, "regularized Laplacian needs at least one edge");
      tau_ = static_cast<double>(g.total_degree()) / static_cast<double>(n);
    }
    scale_.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double d = static_cast<double>(g.degree(static_cast<NodeId>(i)));
      if (mode == LaplacianMode::standard && d == 0.0)
        throw Error(ErrorCode::validation,
                    "isolated node " + std::to_string(i) +
                        " in standard mode; extract the largest connected component first");
      scale_[static_cast<Eigen::Index>(i)] = 1.0 / std::sqrt(d + tau_);
    }
  }

  Eigen::Index rows() const { return static_cast<Eigen::Index>(g_->n()); }

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    Eigen::VectorXd sx = scale_.cwiseProduct(x);
    Eigen::VectorXd asx;
    g_->adjacency_matvec(sx, asx);
    y = x - scale_.cwiseProduct(asx);
  }

  const Graph& graph() const { return *g_; }
  LaplacianMode mode() const { return mode_; }
  double tau() const { return tau_; }
  const Eigen::VectorXd& scale() const { return scale_; }

private:
  const Graph* g_;
  LaplacianMode mode_;
  double tau_;
  Eigen::VectorXd scale_;
};

inline LaplacianOperator build_laplacian(const Graph& g, LaplacianMode mode) {
  return LaplacianOperator(g, mode);
}

/// theta = sum_{k=2..K} (1 - lambda_k); positive exactly in the detectable
/// regime of the SBM.
inline double theta_statistic(const Eigen::VectorXd& eigenvalues) {
  if (eigenvalues.size() < 2)
    throw Error(ErrorCode::validation, "theta needs at least K = 2 eigenvalues");
  double theta = 0.0;
  for (Eigen::Index k = 1; k < eigenvalues.size(); ++k) theta += 1.0 - eigenvalues[k];
  return theta;
}

/// The K smallest eigenpairs of a Laplacian operator: ascending eigenvalues,
/// orthonormal columns, theta, and per-pair residual norms.
struct SpectralBasis {
  int K = 0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd vectors;  // n x K
  double theta = 0.0;
  Eigen::VectorXd residuals;
  LaplacianMode mode = LaplacianMode::standard;
  int matvecs = 0;
};

/// `dense` materializes the operator and uses a direct solver; intended for
/// cross-checks and small graphs. The iterative path is exact for tiny n too
/// (its basis may grow to the full dimension).
enum class EigMethod { iterative, dense };

inline double theta_statistic(const SpectralBasis& basis) { return basis.theta; }

inline SpectralBasis smallest_eigenpairs(const LaplacianOperator& op, int K,
                                         const EigshOptions& opts = {},
                                         EigMethod method = EigMethod::iterative) {
  const Eigen::Index n = op.rows();
  if (K < 2 || static_cast<Eigen::Index>(K) > n)
    throw Error(ErrorCode::validation, "smallest_eigenpairs: need 2 <= K <= n");
  EigshOptions o = opts;
  o.which = SpectrumEnd::smallest;
  const bool dense = (method == EigMethod::dense);
  EigshResult r = dense ? eigsh_dense(op, K, SpectrumEnd::smallest) : eigsh(op, K, o);
  SpectralBasis basis;
  basis.K = K;
  basis.eigenvalues = r.values;
  basis.vectors = r.vectors;
  basis.residuals = r.residuals;
  basis.theta = theta_statistic(r.values);
  basis.mode = op.mode();
  basis.matvecs = r.matvecs;
  return basis;
}

/// Debug export: eigenvalues, residuals and theta always; the dense
/// eigenvector matrix only while it stays small (n <= 10^4 rows).
inline nlohmann::json spectral_basis_to_json(const SpectralBasis& basis) {
  nlohmann::json j;
  j["K"] = basis.K;
  j["mode"] = basis.mode == LaplacianMode::standard ? "standard" : "regularized";
  j["theta"] = round12(basis.theta);
  std::vector<double> values(basis.eigenvalues.data(),
                             basis.eigenvalues.data() + basis.eigenvalues.size());
  for (double& v : values) v = round12(v);
  j["eigenvalues"] = values;
  std::vector<double> residuals(basis.residuals.data(),
                                basis.residuals.data() + basis.residuals.size());
  j["residuals"] = residuals;
  if (basis.vectors.rows() <= 10000) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < basis.vectors.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int k = 0; k < basis.K; ++k) row.push_back(round12(basis.vectors(i, k)));
      rows.push_back(std::move(row));
    }
    j["vectors"] = std::move(rows);
  }
  return j;
}

struct RowNormalized {
  Eigen::MatrixXd rows;
  std::vector<Eigen::Index> zero_rows;  // rows left at zero (norm < 1e-12)
};

/// Scales every row to unit Euclidean norm; numerically zero rows are left as
/// zeros and reported.
inline RowNormalized row_normalize(const Eigen::MatrixXd& basis) {
  RowNormalized out;
  out.rows = basis;
  for (Eigen::Index i = 0; i < basis.rows(); ++i) {
    const double norm = basis.row(i).norm();
    if (norm < 1e-12) {
      out.rows.row(i).setZero();
      out.zero_rows.push_back(i);
    } else {
      out.rows.row(i) /= norm;
    }
  }
  return out;
}

struct SgcOptions {
  EigshOptions eig;
  KmeansOptions kmeans;
  EigMethod method = EigMethod::iterative;
};

struct SgcResult {
  Partition partition;
  SpectralBasis basis;
  std::vector<Eigen::Index> zero_rows;
};

/// Standard spectral graph clustering: Laplacian operator, K smallest
/// eigenvectors, row normalization, then k-means on the rows. Returns the
/// partition together with the basis so eigenvalue-derived statistics are
/// reusable without recomputation.
inline SgcResult sgc_detect(const Graph& g, int K, LaplacianMode mode, std::uint64_t seed,
                            const SgcOptions& opts = {}) {
  if (!is_connected(g))
    throw Error(ErrorCode::validation,
                "sgc_detect requires a connected graph; extract the largest connected component");
  LaplacianOperator op(g, mode);
  EigshOptions eig = opts.eig;
  eig.seed = derive_seed(seed, 0x45494721ULL);
  SpectralBasis basis = smallest_eigenpairs(op, K, eig, opts.method);
  RowNormalized rn = row_normalize(basis.vectors);
  KmeansOptions km = opts.kmeans;
  km.seed = derive_seed(seed, 0x4b4d4541ULL);
  KmeansResult clusters = kmeans(rn.rows, K, km);
  SgcResult out{Partition::from_labels(g, clusters.labels), std::move(basis),
                std::move(rn.zero_rows)};
  return out;
}

}  // namespace sgcgen
