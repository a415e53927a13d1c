#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "sgcgen/error.hpp"
#include "sgcgen/graph.hpp"
#include "sgcgen/random.hpp"

namespace sgcgen {

/// Stochastic-block-model parameters: K communities of the given sizes and a
/// symmetric K x K edge-probability matrix.
struct SbmParams {
  int K = 0;
  std::vector<std::size_t> sizes;
  Eigen::MatrixXd P;

  std::size_t total_nodes() const {
    return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  }

  void validate() const {
    if (K < 2) throw Error(ErrorCode::validation, "SBM needs K >= 2 communities");
    if (sizes.size() != static_cast<std::size_t>(K))
      throw Error(ErrorCode::validation, "SBM sizes must have K entries");
    for (std::size_t s : sizes)
      if (s < 1) throw Error(ErrorCode::validation, "SBM community sizes must be >= 1");
    if (P.rows() != K || P.cols() != K)
      throw Error(ErrorCode::validation, "SBM P must be K x K");
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) {
        if (!(P(i, j) >= 0.0 && P(i, j) <= 1.0))
          throw Error(ErrorCode::validation, "SBM probabilities must lie in [0, 1]");
        if (P(i, j) != P(j, i))
          throw Error(ErrorCode::validation, "SBM P must be symmetric");
      }
    if (total_nodes() < 2) throw Error(ErrorCode::validation, "SBM needs at least 2 nodes");
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["K"] = K;
    j["sizes"] = sizes;
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(K) * K);
    for (int r = 0; r < K; ++r)
      for (int c = 0; c < K; ++c) flat.push_back(P(r, c));
    j["P"] = flat;  // row-major
    return j;
  }

  static SbmParams from_json(const nlohmann::json& j) {
    SbmParams p;
    try {
      p.K = j.at("K").get<int>();
      p.sizes = j.at("sizes").get<std::vector<std::size_t>>();
      const auto& jp = j.at("P");
      p.P.resize(p.K, p.K);
      if (jp.is_array() && !jp.empty() && jp.front().is_array()) {
        for (int r = 0; r < p.K; ++r)
          for (int c = 0; c < p.K; ++c) p.P(r, c) = jp.at(r).at(c).get<double>();
      } else {
        if (static_cast<int>(jp.size()) != p.K * p.K)
          throw Error(ErrorCode::parse, "P must hold K*K row-major entries");
        for (int r = 0; r < p.K; ++r)
          for (int c = 0; c < p.K; ++c)
            p.P(r, c) = jp.at(static_cast<std::size_t>(r) * p.K + c).get<double>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse, std::string("bad SBM parameter document: ") + e.what());
    }
    p.validate();
    return p;
  }
};

/// Node-to-community labeling with cached block edge counts. block_edges(k,k)
/// counts within-community edges once; the counts always match a recount on
/// the graph the partition was built from.
class Partition {
public:
  Partition() = default;

  static Partition from_labels(const Graph& g, std::vector<int> labels) {
    if (labels.size() != g.n())
      throw Error(ErrorCode::inconsistent, "label vector length differs from node count");
    int k = 0;
    for (int l : labels) {
      if (l < 0) throw Error(ErrorCode::validation, "community labels must be >= 0");
      k = std::max(k, l + 1);
    }
    if (k < 1) throw Error(ErrorCode::validation, "partition needs at least one community");

    Partition p;
    p.k_ = k;
    p.labels_ = std::move(labels);
    p.sizes_.assign(k, 0);
    for (int l : p.labels_) ++p.sizes_[static_cast<std::size_t>(l)];
    for (int c = 0; c < k; ++c)
      if (p.sizes_[static_cast<std::size_t>(c)] == 0)
        throw Error(ErrorCode::validation,
                    "community " + std::to_string(c) + " is empty");

    p.block_edges_.assign(static_cast<std::size_t>(k) * k, 0);
    for (NodeId u = 0; u < g.n(); ++u) {
      for (NodeId v : g.neighbors(u)) {
        if (v <= u) continue;
        int a = p.labels_[u], b = p.labels_[v];
        p.block_edges_[static_cast<std::size_t>(a) * k + b] += 1;
        if (a != b) p.block_edges_[static_cast<std::size_t>(b) * k + a] += 1;
      }
    }
    return p;
  }

  int k() const noexcept { return k_; }
  std::size_t n() const noexcept { return labels_.size(); }
  std::span<const int> labels() const noexcept { return labels_; }
  int label(NodeId i) const { return labels_[i]; }
  std::size_t size_of(int community) const { return sizes_[static_cast<std::size_t>(community)]; }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }

  std::uint64_t block_edges(int a, int b) const {
    return block_edges_[static_cast<std::size_t>(a) * k_ + b];
  }

private:
  int k_ = 0;
  std::vector<int> labels_;
  std::vector<std::size_t> sizes_;
  std::vector<std::uint64_t> block_edges_;
};

/// Compacts arbitrary integer labels to 0..K-1, ordered by label value.
inline std::vector<int> compact_labels(std::span<const long long> raw) {
  std::vector<long long> distinct(raw.begin(), raw.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> out;
  out.reserve(raw.size());
  for (long long l : raw) {
    auto it = std::lower_bound(distinct.begin(), distinct.end(), l);
    out.push_back(static_cast<int>(it - distinct.begin()));
  }
  return out;
}

inline void write_labels(std::ostream& out, std::span<const int> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ' ' << labels[i] << '\n';
}

struct SbmSample {
  Graph graph;
  Partition partition;  // planted ground truth
};

namespace detail {

// index -> (i, j), i < j, over the row-major upper triangle of an nk x nk block
inline std::pair<std::size_t, std::size_t> unrank_pair(std::size_t t, std::size_t nk) {
  double dn = static_cast<double>(nk);
  double disc = (2.0 * dn - 1.0) * (2.0 * dn - 1.0) - 8.0 * static_cast<double>(t);
  std::size_t i = static_cast<std::size_t>((2.0 * dn - 1.0 - std::sqrt(std::max(disc, 0.0))) / 2.0);
  if (i >= nk) i = nk - 1;
  auto row_base = [nk](std::size_t r) { return r * (2 * nk - r - 1) / 2; };
  while (i > 0 && row_base(i) > t) --i;
  while (row_base(i) + (nk - 1 - i) <= t) ++i;
  std::size_t j = i + 1 + (t - row_base(i));
  return {i, j};
}

}  // namespace detail

/// Samples a graph from SBM(K, P) together with its planted partition. Nodes
/// are laid out community by community. Each block pair gets its own RNG
/// sub-stream derived from (seed, k, l), so block sampling order (or a
/// parallel schedule) cannot change the result. Bernoulli pair sweeps use
/// geometric inter-arrival skipping, keeping the expected cost O(m + K^2).
inline SbmSample generate_sbm(const SbmParams& params, std::uint64_t seed) {
  params.validate();
  const std::size_t n = params.total_nodes();
  const int K = params.K;

  std::vector<std::size_t> offset(static_cast<std::size_t>(K) + 1, 0);
  for (int k = 0; k < K; ++k) offset[static_cast<std::size_t>(k) + 1] = offset[k] + params.sizes[k];

  std::vector<int> labels(n);
  for (int k = 0; k < K; ++k)
    for (std::size_t i = offset[k]; i < offset[static_cast<std::size_t>(k) + 1]; ++i)
      labels[i] = k;

  std::vector<std::pair<NodeId, NodeId>> edges;
  double expected = 0.0;
  for (int k = 0; k < K; ++k) {
    expected += params.P(k, k) * (params.sizes[k] * (params.sizes[k] - 1) / 2.0);
    for (int l = k + 1; l < K; ++l)
      expected += params.P(k, l) * static_cast<double>(params.sizes[k]) * params.sizes[l];
  }
  edges.reserve(static_cast<std::size_t>(expected * 1.1) + 64);

  for (int k = 0; k < K; ++k) {
    for (int l = k; l < K; ++l) {
      const double p = params.P(k, l);
      if (p <= 0.0) continue;
      const std::size_t nk = params.sizes[k];
      const std::size_t nl = params.sizes[l];
      const std::size_t npairs = (k == l) ? nk * (nk - 1) / 2 : nk * nl;
      if (npairs == 0) continue;

      auto emit = [&](std::size_t t) {
        std::size_t i, j;
        if (k == l) {
          auto [a, b] = detail::unrank_pair(t, nk);
          i = offset[k] + a;
          j = offset[k] + b;
        } else {
          i = offset[k] + t / nl;
          j = offset[l] + t % nl;
        }
        edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
      };

      if (p >= 1.0) {
        for (std::size_t t = 0; t < npairs; ++t) emit(t);
        continue;
      }

      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(l),
                          0x53424d00ULL));
      const double log_q = std::log1p(-p);
      double pos = -1.0;
      for (;;) {
        const double skip = std::floor(std::log(rng.uniform_open()) / log_q);
        pos += 1.0 + skip;
        if (pos >= static_cast<double>(npairs)) break;
        emit(static_cast<std::size_t>(pos));
      }
    }
  }

  SbmSample out;
  out.graph = Graph::from_edges(n, std::move(edges));
  out.partition = Partition::from_labels(out.graph, std::move(labels));
  return out;
}

/// Maximum-likelihood block probabilities given a partition:
/// Phat(k,l) = m_kl / (n_k n_l) off-diagonal, m_kk / C(n_k, 2) on it.
/// A size-1 community has no within pairs; its diagonal entry is 0.
inline Eigen::MatrixXd mle_block_probabilities(const Graph& g, const Partition& part) {
  if (part.n() != g.n())
    throw Error(ErrorCode::inconsistent, "partition does not match graph size");
  const int K = part.k();
  Eigen::MatrixXd phat(K, K);
  for (int k = 0; k < K; ++k) {
    for (int l = k; l < K; ++l) {
      double pairs;
      if (k == l) {
        const double nk = static_cast<double>(part.size_of(k));
        pairs = nk * (nk - 1.0) / 2.0;
      } else {
        pairs = static_cast<double>(part.size_of(k)) * static_cast<double>(part.size_of(l));
      }
      const double value = pairs > 0.0 ? static_cast<double>(part.block_edges(k, l)) / pairs : 0.0;
      phat(k, l) = value;
      phat(l, k) = value;
    }
  }
  return phat;
}

}  // namespace sgcgen
