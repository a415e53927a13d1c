#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "sgcgen/eigensolver.hpp"
#include "sgcgen/error.hpp"
#include "sgcgen/format.hpp"
#include "sgcgen/graph.hpp"
#include "sgcgen/kmeans.hpp"
#include "sgcgen/sbm.hpp"
#include "sgcgen/spectral.hpp"

namespace sgcgen {

/// Exponential detection loss f = exp(-theta / (K - 1)). Lies in (0, 1] when
/// theta >= 0 and grows past 1 exactly when theta < 0, i.e. when the
/// eigenvalue sum signals an undetectable configuration.
inline double detection_loss(double theta, int K) {
  if (K < 2) throw Error(ErrorCode::validation, "detection_loss: K must be >= 2");
  return std::exp(-theta / static_cast<double>(K - 1));
}

/// Modular matrix B of a fitted block model: B_ij = A_ij - Phat(g_i, g_j) off
/// the diagonal and 0 on it. Applied matrix-free as
///   (Bx)_i = (Ax)_i - sum_l Phat(g_i, l) * S_l + Phat(g_i, g_i) * x_i,
/// with S_l the per-community sums of x, so a matvec costs O(m + nK).
class ModularOperator {
public:
  ModularOperator(const Graph& g, const Partition& part)
      : g_(&g), part_(&part), phat_(mle_block_probabilities(g, part)) {}

  Eigen::Index rows() const { return static_cast<Eigen::Index>(g_->n()); }

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    const int K = part_->k();
    g_->adjacency_matvec(x, y);
    Eigen::VectorXd block_sum = Eigen::VectorXd::Zero(K);
    for (std::size_t i = 0; i < g_->n(); ++i)
      block_sum[part_->label(static_cast<NodeId>(i))] += x[static_cast<Eigen::Index>(i)];
    Eigen::MatrixXd row_mix = phat_ * block_sum;  // K x 1: sum_l Phat(k, l) S_l
    for (std::size_t i = 0; i < g_->n(); ++i) {
      const int gi = part_->label(static_cast<NodeId>(i));
      y[static_cast<Eigen::Index>(i)] +=
          -row_mix(gi) + phat_(gi, gi) * x[static_cast<Eigen::Index>(i)];
    }
  }

  const Eigen::MatrixXd& phat() const { return phat_; }

private:
  const Graph* g_;
  const Partition* part_;
  Eigen::MatrixXd phat_;
};

struct R1Options {
  double tol = 1e-6;  // relative
  int max_matvecs = 5000;
  std::uint64_t seed = 1;
};

namespace detail {

template <class Op>
struct NegatedOperator {
  const Op* inner;
  Eigen::Index rows() const { return inner->rows(); }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    inner->apply(x, y);
    y = -y;
  }
};

}  // namespace detail

/// R1: spectral radius of the modular matrix, found matrix-free by iterating
/// on both extremal ends of the symmetric spectrum.
inline double mismatch_r1(const Graph& g, const Partition& part, const R1Options& opts = {}) {
  ModularOperator b(g, part);
  EigshOptions eo;
  eo.tol = opts.tol;
  eo.max_matvecs = opts.max_matvecs;
  eo.which = SpectrumEnd::largest;
  eo.seed = derive_seed(opts.seed, 0x5231AULL);
  const double hi = eigsh(b, 1, eo).values[0];
  detail::NegatedOperator<ModularOperator> nb{&b};
  eo.seed = derive_seed(opts.seed, 0x5231BULL);
  const double lo = eigsh(nb, 1, eo).values[0];  // = -lambda_min(B)
  return std::max(std::abs(hi), std::abs(lo));
}

/// Modularity Q = sum_k (e_kk - b_k^2) from the cached block edge counts.
inline double modularity_q(const Graph& g, const Partition& part) {
  if (part.n() != g.n())
    throw Error(ErrorCode::inconsistent, "partition does not match graph size");
  if (g.m() == 0) throw Error(ErrorCode::validation, "modularity needs at least one edge");
  const int K = part.k();
  const double m = static_cast<double>(g.m());
  double q = 0.0;
  for (int k = 0; k < K; ++k) {
    const double e_kk = static_cast<double>(part.block_edges(k, k)) / m;
    double b_k = e_kk;
    for (int l = 0; l < K; ++l)
      if (l != k) b_k += static_cast<double>(part.block_edges(k, l)) / (2.0 * m);
    q += e_kk - b_k * b_k;
  }
  return q;
}

/// R2: negative modularity.
inline double mismatch_r2(const Graph& g, const Partition& part) {
  return -modularity_q(g, part);
}

/// Profile log-likelihood of the graph under SBM(K, Phat) with the MLE
/// plugged in; 0 * ln 0 counts as 0, so the value is always <= 0.
inline double sbm_log_likelihood(const Graph& g, const Partition& part) {
  if (part.n() != g.n())
    throw Error(ErrorCode::inconsistent, "partition does not match graph size");
  const int K = part.k();
  const Eigen::MatrixXd phat = mle_block_probabilities(g, part);
  double ll = 0.0;
  for (int k = 0; k < K; ++k) {
    for (int l = k; l < K; ++l) {
      double pairs;
      if (k == l) {
        const double nk = static_cast<double>(part.size_of(k));
        pairs = nk * (nk - 1.0) / 2.0;
      } else {
        pairs = static_cast<double>(part.size_of(k)) * static_cast<double>(part.size_of(l));
      }
      const double edges = static_cast<double>(part.block_edges(k, l));
      const double p = phat(k, l);
      if (edges > 0.0) ll += edges * std::log(p);
      if (pairs - edges > 0.0) ll += (pairs - edges) * std::log1p(-p);
    }
  }
  return ll;
}

/// R3: AIC form K(K-1) - 2 phi.
inline double mismatch_r3(const Graph& g, const Partition& part) {
  const int K = part.k();
  return static_cast<double>(K) * (K - 1) - 2.0 * sbm_log_likelihood(g, part);
}

/// R4: BIC form (ln m)/2 * K(K-1) - 2 phi.
inline double mismatch_r4(const Graph& g, const Partition& part) {
  if (g.m() == 0) throw Error(ErrorCode::validation, "BIC mismatch needs at least one edge");
  const int K = part.k();
  return 0.5 * std::log(static_cast<double>(g.m())) * static_cast<double>(K) * (K - 1) -
         2.0 * sbm_log_likelihood(g, part);
}

enum class SgcMethod { standard, regularized };          // F1, F2
enum class MismatchMetric { spectral_radius, negative_modularity, aic, bic };  // R1..R4

inline const char* method_name(SgcMethod m) {
  return m == SgcMethod::standard ? "sgc" : "regsgc";
}

inline const char* mismatch_name(MismatchMetric r) {
  switch (r) {
    case MismatchMetric::spectral_radius: return "eig";
    case MismatchMetric::negative_modularity: return "mod";
    case MismatchMetric::aic: return "aic";
    case MismatchMetric::bic: return "bic";
  }
  return "?";
}

struct SelectionConfig {
  SgcMethod method = SgcMethod::standard;
  MismatchMetric mismatch = MismatchMetric::negative_modularity;
  std::optional<double> alpha;  // default depends on the method
  int k_max = 50;
  std::uint64_t seed = 1;
  EigshOptions eig;
  KmeansOptions kmeans;
  EigMethod eig_method = EigMethod::iterative;

  double alpha_or_default() const {
    if (alpha) {
      if (*alpha < 0.0) throw Error(ErrorCode::validation, "alpha must be >= 0");
      return *alpha;
    }
    return method == SgcMethod::standard ? 1e-4 : 1e-6;
  }
};

struct CandidateRecord {
  int K = 0;
  bool ok = false;
  double theta = 0.0;
  double loss = 0.0;
  double mismatch = 0.0;
  double objective = 0.0;
  std::vector<int> labels;
  std::string failure;
};

struct SelectionReport {
  std::vector<CandidateRecord> candidates;  // K = 2..k_max
  int k_star = 0;
  std::vector<int> labels;  // of the chosen K
  Eigen::VectorXd eigenvalues;  // the k_max smallest, shared by all candidates
  std::vector<std::string> notes;
};

/// Model-selection sweep: one eigendecomposition at k_max, then for every
/// K = 2..k_max a candidate partition by k-means on the first K row-normalized
/// eigenvector columns, scored by loss + alpha * mismatch. The minimizer wins;
/// ties go to the smaller K. Individual candidate failures are recorded and
/// skipped; only a sweep with no survivors throws.
inline SelectionReport select(const Graph& g, const SelectionConfig& cfg) {
  if (!is_connected(g))
    throw Error(ErrorCode::validation,
                "select requires a connected graph; extract the largest connected component");
  if (cfg.k_max < 2 || static_cast<std::size_t>(cfg.k_max) > g.n())
    throw Error(ErrorCode::validation, "select: need 2 <= k_max <= n");
  const double alpha = cfg.alpha_or_default();

  const LaplacianMode mode =
      cfg.method == SgcMethod::standard ? LaplacianMode::standard : LaplacianMode::regularized;
  LaplacianOperator op(g, mode);
  EigshOptions eig = cfg.eig;
  eig.seed = derive_seed(cfg.seed, 0x45494721ULL);
  SpectralBasis basis = smallest_eigenpairs(op, cfg.k_max, eig, cfg.eig_method);

  SelectionReport report;
  report.eigenvalues = basis.eigenvalues;
  if (cfg.method == SgcMethod::regularized)
    report.notes.push_back(
        "theta computed from the regularized operator's eigenvalues (framework extension)");

  for (int K = 2; K <= cfg.k_max; ++K) {
    CandidateRecord rec;
    rec.K = K;
    try {
      RowNormalized rn = row_normalize(basis.vectors.leftCols(K));
      KmeansOptions km = cfg.kmeans;
      km.seed = derive_seed(cfg.seed, 0x4b4d4541ULL, static_cast<std::uint64_t>(K));
      KmeansResult clusters = kmeans(rn.rows, K, km);
      Partition part = Partition::from_labels(g, clusters.labels);

      rec.theta = theta_statistic(basis.eigenvalues.head(K));
      rec.loss = detection_loss(rec.theta, K);
      switch (cfg.mismatch) {
        case MismatchMetric::spectral_radius: {
          R1Options r1;
          r1.seed = derive_seed(cfg.seed, 0x523141ULL, static_cast<std::uint64_t>(K));
          rec.mismatch = mismatch_r1(g, part, r1);
          break;
        }
        case MismatchMetric::negative_modularity:
          rec.mismatch = mismatch_r2(g, part);
          break;
        case MismatchMetric::aic:
          rec.mismatch = mismatch_r3(g, part);
          break;
        case MismatchMetric::bic:
          rec.mismatch = mismatch_r4(g, part);
          break;
      }
      rec.objective = rec.loss + alpha * rec.mismatch;
      rec.labels = std::move(clusters.labels);
      rec.ok = true;
    } catch (const Error& e) {
      rec.ok = false;
      rec.failure = e.what();
    }
    report.candidates.push_back(std::move(rec));
  }

  double best = std::numeric_limits<double>::infinity();
  for (const CandidateRecord& rec : report.candidates) {
    if (rec.ok && rec.objective < best) {
      best = rec.objective;
      report.k_star = rec.K;
    }
  }
  if (report.k_star == 0)
    throw Error(ErrorCode::convergence, "select: every candidate K failed");
  report.labels = report.candidates[static_cast<std::size_t>(report.k_star - 2)].labels;
  return report;
}

inline nlohmann::json selection_report_to_json(const SelectionReport& report,
                                               const SelectionConfig& cfg) {
  nlohmann::json j;
  j["config"] = {
      {"method", method_name(cfg.method)},
      {"mismatch", mismatch_name(cfg.mismatch)},
      {"alpha", round12(cfg.alpha_or_default())},
      {"k_max", cfg.k_max},
      {"seed", cfg.seed},
  };
  nlohmann::json cands = nlohmann::json::array();
  for (const CandidateRecord& rec : report.candidates) {
    nlohmann::json c;
    c["K"] = rec.K;
    if (rec.ok) {
      c["theta"] = round12(rec.theta);
      c["loss"] = round12(rec.loss);
      c["mismatch"] = round12(rec.mismatch);
      c["objective"] = round12(rec.objective);
    } else {
      c["failure"] = rec.failure;
    }
    cands.push_back(std::move(c));
  }
  j["candidates"] = std::move(cands);
  j["k_star"] = report.k_star;
  j["labels"] = report.labels;
  std::vector<double> eig(report.eigenvalues.data(),
                          report.eigenvalues.data() + report.eigenvalues.size());
  for (double& v : eig) v = round12(v);
  j["eigenvalues"] = eig;
  if (!report.notes.empty()) j["notes"] = report.notes;
  return j;
}

}  // namespace sgcgen
