#pragma once

// Shared builders and independent brute-force oracles for the test suites.
// Everything here recomputes from first principles (explicit matrices, pair
// enumeration, permutations) so that library results are checked against an
// implementation-independent route.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "sgcgen/graph.hpp"
#include "sgcgen/random.hpp"
#include "sgcgen/sbm.hpp"

namespace test_support {

using sgcgen::Graph;
using sgcgen::NodeId;

inline Graph graph_from_edges(std::size_t n,
                              std::vector<std::pair<NodeId, NodeId>> edges) {
  return Graph::from_edges(n, std::move(edges));
}

// triangles {0,1,2} and {3,4,5}
inline Graph two_triangles() {
  return graph_from_edges(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});
}

// the same plus a bridge 2-3
inline Graph two_triangles_bridge() {
  return graph_from_edges(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {2, 3}});
}

inline Graph complete_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return graph_from_edges(n, std::move(edges));
}

inline Graph path_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
  return graph_from_edges(n, std::move(edges));
}

// node 0 is the hub
inline Graph star_graph(std::size_t leaves) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId v = 1; v <= leaves; ++v) edges.emplace_back(0, v);
  return graph_from_edges(leaves + 1, std::move(edges));
}

// plain per-pair G(n, p) sampler, intentionally separate from the library's
// block sampler
inline Graph gnp(std::size_t n, double p, std::uint64_t seed) {
  sgcgen::Rng rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (rng.uniform() < p) edges.emplace_back(u, v);
  return graph_from_edges(n, std::move(edges));
}

inline Graph gnp_connected(std::size_t n, double p, std::uint64_t seed) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Graph g = gnp(n, p, seed + static_cast<std::uint64_t>(attempt) * 7919);
    if (g.m() > 0 && sgcgen::is_connected(g)) return g;
  }
  throw std::runtime_error("gnp_connected: no connected sample found");
}

inline Eigen::MatrixXd dense_adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.n());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (NodeId u = 0; u < g.n(); ++u)
    for (NodeId v : g.neighbors(u)) a(u, v) = 1.0;
  return a;
}

// explicit I - (D + tau I)^{-1/2} A (D + tau I)^{-1/2}
inline Eigen::MatrixXd dense_laplacian(const Graph& g, double tau) {
  const auto n = static_cast<Eigen::Index>(g.n());
  Eigen::MatrixXd a = dense_adjacency(g);
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i)
    s[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(static_cast<NodeId>(i))) + tau);
  return Eigen::MatrixXd::Identity(n, n) - s.asDiagonal() * a * s.asDiagonal();
}

inline Eigen::VectorXd dense_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues();
}

// explicit modular matrix B = A - Phat pattern, zero diagonal
inline Eigen::MatrixXd dense_modular_matrix(const Graph& g, const sgcgen::Partition& part) {
  const auto n = static_cast<Eigen::Index>(g.n());
  Eigen::MatrixXd phat = sgcgen::mle_block_probabilities(g, part);
  Eigen::MatrixXd b = dense_adjacency(g);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      b(i, j) -= phat(part.label(static_cast<NodeId>(i)), part.label(static_cast<NodeId>(j)));
  for (Eigen::Index i = 0; i < n; ++i) b(i, i) = 0.0;
  return b;
}

// --- brute-force clustering metric oracles (pair / permutation enumeration) ---

inline double oracle_rand_index(const std::vector<int>& x, const std::vector<int>& y) {
  const std::size_t n = x.size();
  std::uint64_t agree = 0, total = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      ++total;
      const bool cox = x[i] == x[j];
      const bool coy = y[i] == y[j];
      if (cox == coy) ++agree;
    }
  return static_cast<double>(agree) / static_cast<double>(total);
}

inline double oracle_f_measure(const std::vector<int>& pred, const std::vector<int>& truth) {
  const std::size_t n = pred.size();
  std::uint64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool cop = pred[i] == pred[j];
      const bool cot = truth[i] == truth[j];
      if (cop && cot) ++tp;
      if (cop && !cot) ++fp;
      if (!cop && cot) ++fn;
    }
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

inline double oracle_nmi(const std::vector<int>& x, const std::vector<int>& y) {
  const double n = static_cast<double>(x.size());
  const int kx = *std::max_element(x.begin(), x.end()) + 1;
  const int ky = *std::max_element(y.begin(), y.end()) + 1;
  std::vector<std::vector<long>> joint(static_cast<std::size_t>(kx),
                                       std::vector<long>(static_cast<std::size_t>(ky), 0));
  std::vector<long> cx(static_cast<std::size_t>(kx), 0), cy(static_cast<std::size_t>(ky), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++joint[static_cast<std::size_t>(x[i])][static_cast<std::size_t>(y[i])];
    ++cx[static_cast<std::size_t>(x[i])];
    ++cy[static_cast<std::size_t>(y[i])];
  }
  auto entropy = [n](const std::vector<long>& counts) {
    double h = 0.0;
    for (long c : counts)
      if (c > 0) h -= (c / n) * std::log(c / n);
    return h;
  };
  const double hx = entropy(cx);
  const double hy = entropy(cy);
  double mi = 0.0;
  for (int a = 0; a < kx; ++a)
    for (int b = 0; b < ky; ++b) {
      const long c = joint[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      if (c > 0)
        mi += (c / n) * std::log((c * n) /
                                 (static_cast<double>(cx[static_cast<std::size_t>(a)]) *
                                  static_cast<double>(cy[static_cast<std::size_t>(b)])));
    }
  if (hx == 0.0 && hy == 0.0) return 1.0;
  if (hx == 0.0 || hy == 0.0) return 0.0;
  return mi / std::sqrt(hx * hy);
}

inline double oracle_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  const int kx = *std::max_element(pred.begin(), pred.end()) + 1;
  const int ky = *std::max_element(truth.begin(), truth.end()) + 1;
  const int s = std::max(kx, ky);
  std::vector<int> perm(static_cast<std::size_t>(s));
  std::iota(perm.begin(), perm.end(), 0);
  std::uint64_t best = 0;
  do {
    std::uint64_t agree = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (perm[static_cast<std::size_t>(pred[i])] == truth[i]) ++agree;
    best = std::max(best, agree);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

// all set partitions of {0..n-1} as restricted-growth label vectors
inline std::vector<std::vector<int>> all_set_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int i, int maxl) -> void {
    if (i == n) {
      out.push_back(labels);
      return;
    }
    for (int l = 0; l <= maxl + 1; ++l) {
      labels[static_cast<std::size_t>(i)] = l;
      self(self, i + 1, std::max(maxl, l));
    }
  };
  rec(rec, 0, -1);
  return out;
}

// all 2-labelings with both sides non-empty, up to label swap
inline std::vector<std::vector<int>> all_bipartitions(int n) {
  std::vector<std::vector<int>> out;
  for (std::uint32_t mask = 1; mask < (1u << (n - 1)); ++mask) {
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) labels[static_cast<std::size_t>(i)] = 1;
    out.push_back(std::move(labels));
  }
  return out;
}

// modularity via the (A - d d^T / 2m) form, summed over ordered same-community pairs
inline double oracle_modularity(const Graph& g, const std::vector<int>& labels) {
  const double two_m = static_cast<double>(g.total_degree());
  double q = 0.0;
  for (NodeId i = 0; i < g.n(); ++i)
    for (NodeId j = 0; j < g.n(); ++j) {
      if (labels[i] != labels[j]) continue;
      const double a = g.has_edge(i, j) ? 1.0 : 0.0;
      q += a - static_cast<double>(g.degree(i)) * static_cast<double>(g.degree(j)) / two_m;
    }
  return q / two_m;
}

// Bernoulli product likelihood over every unordered pair
inline double oracle_log_likelihood(const Graph& g, const sgcgen::Partition& part) {
  Eigen::MatrixXd phat = sgcgen::mle_block_probabilities(g, part);
  double ll = 0.0;
  for (NodeId i = 0; i < g.n(); ++i)
    for (NodeId j = i + 1; j < g.n(); ++j) {
      const double p = phat(part.label(i), part.label(j));
      if (g.has_edge(i, j)) {
        if (p > 0.0) ll += std::log(p);
      } else {
        if (p < 1.0) ll += std::log1p(-p);
      }
    }
  return ll;
}

inline double bipartition_normalized_cut(const Graph& g, const std::vector<int>& labels) {
  double cut = 0.0, vol0 = 0.0, vol1 = 0.0;
  for (NodeId u = 0; u < g.n(); ++u) {
    (labels[u] == 0 ? vol0 : vol1) += static_cast<double>(g.degree(u));
    for (NodeId v : g.neighbors(u))
      if (v > u && labels[u] != labels[v]) cut += 1.0;
  }
  return cut / vol0 + cut / vol1;
}

}  // namespace test_support
