#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgcgen/error.hpp"
#include "sgcgen/graph.hpp"
#include "sgcgen/model_selection.hpp"
#include "sgcgen/sbm.hpp"

namespace sgcgen {

namespace detail {

struct Contingency {
  std::size_t n = 0;
  std::vector<std::uint64_t> row_sum, col_sum;          // marginals
  std::map<std::pair<int, int>, std::uint64_t> joint;   // sparse joint counts
};

inline Contingency contingency(std::span<const int> x, std::span<const int> y) {
  if (x.size() != y.size())
    throw Error(ErrorCode::validation, "partitions have different node counts");
  Contingency c;
  c.n = x.size();
  int kx = 0, ky = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || y[i] < 0) throw Error(ErrorCode::validation, "labels must be >= 0");
    kx = std::max(kx, x[i] + 1);
    ky = std::max(ky, y[i] + 1);
  }
  c.row_sum.assign(static_cast<std::size_t>(kx), 0);
  c.col_sum.assign(static_cast<std::size_t>(ky), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++c.row_sum[static_cast<std::size_t>(x[i])];
    ++c.col_sum[static_cast<std::size_t>(y[i])];
    ++c.joint[{x[i], y[i]}];
  }
  return c;
}

inline double pairs2(double v) { return v * (v - 1.0) / 2.0; }

// max-weight perfect assignment on a square cost-to-maximize matrix
// (Hungarian algorithm with potentials, O(s^3))
inline std::uint64_t best_assignment_sum(const std::vector<std::vector<std::uint64_t>>& w) {
  const std::size_t s = w.size();
  const double INF = std::numeric_limits<double>::infinity();
  // minimize negated weights
  std::vector<double> u(s + 1, 0.0), v(s + 1, 0.0);
  std::vector<std::size_t> match(s + 1, 0);  // column -> row (1-based)
  for (std::size_t i = 1; i <= s; ++i) {
    std::vector<double> minv(s + 1, INF);
    std::vector<bool> used(s + 1, false);
    std::vector<std::size_t> way(s + 1, 0);
    match[0] = i;
    std::size_t j0 = 0;
    do {
      used[j0] = true;
      const std::size_t i0 = match[j0];
      double delta = INF;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= s; ++j) {
        if (used[j]) continue;
        const double cur = -static_cast<double>(w[i0 - 1][j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= s; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::uint64_t total = 0;
  for (std::size_t j = 1; j <= s; ++j)
    if (match[j] != 0) total += w[match[j] - 1][j - 1];
  return total;
}

}  // namespace detail

/// Normalized mutual information I(X;Y) / sqrt(H(X) H(Y)) with natural logs.
/// Two zero-entropy partitions are identical trivial partitions (NMI = 1); a
/// single zero-entropy side shares no information (NMI = 0).
inline double nmi(std::span<const int> x, std::span<const int> y) {
  const auto c = detail::contingency(x, y);
  const double n = static_cast<double>(c.n);
  auto entropy = [n](const std::vector<std::uint64_t>& marginal) {
    double h = 0.0;
    for (std::uint64_t v : marginal)
      if (v > 0) {
        const double p = static_cast<double>(v) / n;
        h -= p * std::log(p);
      }
    return h;
  };
  const double hx = entropy(c.row_sum);
  const double hy = entropy(c.col_sum);
  if (hx == 0.0 && hy == 0.0) return 1.0;
  if (hx == 0.0 || hy == 0.0) return 0.0;
  double mi = 0.0;
  for (const auto& [cell, count] : c.joint) {
    const double pxy = static_cast<double>(count) / n;
    const double px = static_cast<double>(c.row_sum[static_cast<std::size_t>(cell.first)]) / n;
    const double py = static_cast<double>(c.col_sum[static_cast<std::size_t>(cell.second)]) / n;
    mi += pxy * std::log(pxy / (px * py));
  }
  return std::clamp(mi / std::sqrt(hx * hy), 0.0, 1.0);
}

/// Rand index: the fraction of node pairs on which the two partitions agree
/// (co-clustered in both, or separated in both).
inline double rand_index(std::span<const int> x, std::span<const int> y) {
  const auto c = detail::contingency(x, y);
  if (c.n < 2) throw Error(ErrorCode::validation, "rand index needs n >= 2");
  double a = 0.0;
  for (const auto& [cell, count] : c.joint) a += detail::pairs2(static_cast<double>(count));
  double sx = 0.0, sy = 0.0;
  for (std::uint64_t v : c.row_sum) sx += detail::pairs2(static_cast<double>(v));
  for (std::uint64_t v : c.col_sum) sy += detail::pairs2(static_cast<double>(v));
  const double total = detail::pairs2(static_cast<double>(c.n));
  const double d = total - sx - sy + a;
  return (a + d) / total;
}

/// Pairwise F1 over co-clustering decisions: precision against the predicted
/// partition's co-clustered pairs, recall against the reference's.
inline double f_measure(std::span<const int> predicted, std::span<const int> truth) {
  const auto c = detail::contingency(predicted, truth);
  if (c.n < 2) throw Error(ErrorCode::validation, "F-measure needs n >= 2");
  double tp = 0.0;
  for (const auto& [cell, count] : c.joint) tp += detail::pairs2(static_cast<double>(count));
  double sx = 0.0, sy = 0.0;
  for (std::uint64_t v : c.row_sum) sx += detail::pairs2(static_cast<double>(v));
  for (std::uint64_t v : c.col_sum) sy += detail::pairs2(static_cast<double>(v));
  if (tp == 0.0) return 0.0;
  const double precision = tp / sx;
  const double recall = tp / sy;
  return 2.0 * precision * recall / (precision + recall);
}

/// Fraction of correctly detected nodes under the best label matching:
/// exhaustive over permutations for K <= 8, optimal assignment on the
/// confusion matrix otherwise. Handles unequal community counts by padding.
inline double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  const auto c = detail::contingency(predicted, truth);
  const std::size_t kx = c.row_sum.size();
  const std::size_t ky = c.col_sum.size();
  const std::size_t s = std::max(kx, ky);
  std::vector<std::vector<std::uint64_t>> confusion(s, std::vector<std::uint64_t>(s, 0));
  for (const auto& [cell, count] : c.joint)
    confusion[static_cast<std::size_t>(cell.first)][static_cast<std::size_t>(cell.second)] = count;

  std::uint64_t best = 0;
  if (s <= 8) {
    std::vector<std::size_t> perm(s);
    for (std::size_t i = 0; i < s; ++i) perm[i] = i;
    do {
      std::uint64_t sum = 0;
      for (std::size_t i = 0; i < s; ++i) sum += confusion[i][perm[i]];
      best = std::max(best, sum);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    best = detail::best_assignment_sum(confusion);
  }
  return static_cast<double>(best) / static_cast<double>(c.n);
}

namespace detail {

inline std::vector<std::uint64_t> community_cuts(const Graph& g, const Partition& part) {
  if (part.n() != g.n())
    throw Error(ErrorCode::inconsistent, "partition does not match graph size");
  std::vector<std::uint64_t> cut(static_cast<std::size_t>(part.k()), 0);
  for (NodeId u = 0; u < g.n(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (v <= u) continue;
      const int a = part.label(u), b = part.label(v);
      if (a != b) {
        ++cut[static_cast<std::size_t>(a)];
        ++cut[static_cast<std::size_t>(b)];
      }
    }
  }
  return cut;
}

inline std::vector<std::uint64_t> community_volumes(const Graph& g, const Partition& part) {
  std::vector<std::uint64_t> vol(static_cast<std::size_t>(part.k()), 0);
  for (NodeId u = 0; u < g.n(); ++u) vol[static_cast<std::size_t>(part.label(u))] += g.degree(u);
  return vol;
}

}  // namespace detail

/// Conductance cut(S) / min(vol(S), vol(V\S)), averaged uniformly over the
/// communities. Lower is better.
inline double conductance(const Graph& g, const Partition& part) {
  const auto cut = detail::community_cuts(g, part);
  const auto vol = detail::community_volumes(g, part);
  const std::uint64_t total = g.total_degree();
  double sum = 0.0;
  for (int k = 0; k < part.k(); ++k) {
    const std::uint64_t v = vol[static_cast<std::size_t>(k)];
    const std::uint64_t rest = total - v;
    if (v == 0 || rest == 0)
      throw Error(ErrorCode::validation, "conductance needs positive volume on both sides");
    sum += static_cast<double>(cut[static_cast<std::size_t>(k)]) /
           static_cast<double>(std::min(v, rest));
  }
  return sum / static_cast<double>(part.k());
}

/// Normalized cut cut(S)/vol(S) + cut(S)/vol(V\S), averaged over communities.
inline double normalized_cut(const Graph& g, const Partition& part) {
  const auto cut = detail::community_cuts(g, part);
  const auto vol = detail::community_volumes(g, part);
  const std::uint64_t total = g.total_degree();
  double sum = 0.0;
  for (int k = 0; k < part.k(); ++k) {
    const std::uint64_t v = vol[static_cast<std::size_t>(k)];
    const std::uint64_t rest = total - v;
    if (v == 0 || rest == 0)
      throw Error(ErrorCode::validation, "normalized cut needs positive volume on both sides");
    sum += static_cast<double>(cut[static_cast<std::size_t>(k)]) / static_cast<double>(v) +
           static_cast<double>(cut[static_cast<std::size_t>(k)]) / static_cast<double>(rest);
  }
  return sum / static_cast<double>(part.k());
}

/// Average out-degree fraction: per community, the mean over its nodes of the
/// fraction of incident edges that leave the community; then averaged over
/// communities. Degree-zero nodes contribute 0.
inline double avg_odf(const Graph& g, const Partition& part) {
  if (part.n() != g.n())
    throw Error(ErrorCode::inconsistent, "partition does not match graph size");
  std::vector<double> acc(static_cast<std::size_t>(part.k()), 0.0);
  for (NodeId u = 0; u < g.n(); ++u) {
    const std::size_t d = g.degree(u);
    if (d == 0) continue;
    std::size_t out = 0;
    for (NodeId v : g.neighbors(u))
      if (part.label(v) != part.label(u)) ++out;
    acc[static_cast<std::size_t>(part.label(u))] +=
        static_cast<double>(out) / static_cast<double>(d);
  }
  double sum = 0.0;
  for (int k = 0; k < part.k(); ++k)
    sum += acc[static_cast<std::size_t>(k)] / static_cast<double>(part.size_of(k));
  return sum / static_cast<double>(part.k());
}

/// Modularity; the negation of the R2 mismatch metric. Higher is better.
inline double modularity(const Graph& g, const Partition& part) {
  return -mismatch_r2(g, part);
}

/// Internal plus (when a reference labeling is known) external clustering
/// metrics for one partition of one graph.
struct MetricVector {
  std::optional<double> nmi, ri, fm;  // external; present only with ground truth
  double cond = 0.0, nc = 0.0, avg_odf = 0.0, mod = 0.0;

  std::vector<std::pair<std::string, double>> rows() const {
    std::vector<std::pair<std::string, double>> out;
    if (nmi) out.emplace_back("nmi", *nmi);
    if (ri) out.emplace_back("ri", *ri);
    if (fm) out.emplace_back("fm", *fm);
    out.emplace_back("cond", cond);
    out.emplace_back("nc", nc);
    out.emplace_back("avg_odf", avg_odf);
    out.emplace_back("mod", mod);
    return out;
  }
};

inline MetricVector evaluate_partition(const Graph& g, const Partition& predicted,
                                       const Partition* truth = nullptr) {
  MetricVector mv;
  if (truth) {
    mv.nmi = nmi(predicted.labels(), truth->labels());
    mv.ri = rand_index(predicted.labels(), truth->labels());
    mv.fm = f_measure(predicted.labels(), truth->labels());
  }
  mv.cond = conductance(g, predicted);
  mv.nc = normalized_cut(g, predicted);
  mv.avg_odf = avg_odf(g, predicted);
  mv.mod = modularity(g, predicted);
  return mv;
}

/// Method-by-metric score table with standard competition ranks ("1224": ties
/// share the best rank, the next rank skips) and the per-method average rank.
struct RankTable {
  std::vector<std::string> methods;
  std::vector<std::string> metrics;
  std::vector<bool> higher_is_better;                    // per metric column
  std::vector<std::vector<std::optional<double>>> values;  // methods x metrics
  std::vector<std::vector<std::optional<int>>> ranks;
  std::vector<double> avg_rank;  // mean over the columns a method has values in
};

inline RankTable average_rank(std::vector<std::string> methods, std::vector<std::string> metrics,
                              std::vector<bool> higher_is_better,
                              std::vector<std::vector<std::optional<double>>> values) {
  if (methods.size() < 2) throw Error(ErrorCode::validation, "ranking needs >= 2 methods");
  if (metrics.empty()) throw Error(ErrorCode::validation, "ranking needs >= 1 metric");
  if (higher_is_better.size() != metrics.size() || values.size() != methods.size())
    throw Error(ErrorCode::validation, "rank table shape mismatch");
  for (const auto& row : values)
    if (row.size() != metrics.size())
      throw Error(ErrorCode::validation, "rank table shape mismatch");

  RankTable t;
  t.methods = std::move(methods);
  t.metrics = std::move(metrics);
  t.higher_is_better = std::move(higher_is_better);
  t.values = std::move(values);
  t.ranks.assign(t.methods.size(),
                 std::vector<std::optional<int>>(t.metrics.size(), std::nullopt));

  for (std::size_t j = 0; j < t.metrics.size(); ++j) {
    bool any = false;
    for (std::size_t i = 0; i < t.methods.size(); ++i) any = any || t.values[i][j].has_value();
    if (!any)
      throw Error(ErrorCode::validation, "metric column '" + t.metrics[j] + "' has no values");
    for (std::size_t i = 0; i < t.methods.size(); ++i) {
      if (!t.values[i][j]) continue;
      int better = 0;
      for (std::size_t o = 0; o < t.methods.size(); ++o) {
        if (o == i || !t.values[o][j]) continue;
        const bool wins = t.higher_is_better[j] ? (*t.values[o][j] > *t.values[i][j])
                                                : (*t.values[o][j] < *t.values[i][j]);
        if (wins) ++better;
      }
      t.ranks[i][j] = better + 1;
    }
  }
  t.avg_rank.assign(t.methods.size(), 0.0);
  for (std::size_t i = 0; i < t.methods.size(); ++i) {
    double sum = 0.0;
    int present = 0;
    for (std::size_t j = 0; j < t.metrics.size(); ++j) {
      if (t.ranks[i][j]) {
        sum += *t.ranks[i][j];
        ++present;
      }
    }
    if (present == 0)
      throw Error(ErrorCode::validation, "method '" + t.methods[i] + "' has no values");
    t.avg_rank[i] = sum / present;
  }
  return t;
}

}  // namespace sgcgen
