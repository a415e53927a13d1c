#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "sgcgen/error.hpp"
#include "sgcgen/random.hpp"

namespace sgcgen {

struct KmeansOptions {
  int restarts = 10;
  int max_iterations = 100;
  double tol = 1e-9;  // stop when the objective improves by less than this
  std::uint64_t seed = 1;
};

struct KmeansResult {
  std::vector<int> labels;
  double objective = 0.0;  // within-cluster sum of squared distances
  Eigen::MatrixXd centroids;
  std::vector<double> objective_trace;  // per Lloyd iteration, best restart
};

namespace detail {

inline double sq_dist(const Eigen::MatrixXd& points, Eigen::Index i, const Eigen::MatrixXd& c,
                      Eigen::Index k) {
  return (points.row(i) - c.row(k)).squaredNorm();
}

// k-means++ seeding: first centroid uniform, then D^2 sampling
inline Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = sq_dist(points, i, centroids, 0);
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick;
    if (total <= 0.0) {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    } else {
      double target = rng.uniform() * total;
      pick = n - 1;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    }
    centroids.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], sq_dist(points, i, centroids, c));
  }
  return centroids;
}

}  // namespace detail

/// Best-of-restarts Lloyd's algorithm with k-means++ seeding. Ties in the
/// assignment step go to the lowest cluster index; a cluster that empties is
/// reseeded at the point farthest from its current centroid, so every
/// returned cluster is non-empty. Deterministic for a fixed seed.
inline KmeansResult kmeans(const Eigen::MatrixXd& points, int k, const KmeansOptions& opts = {}) {
  const Eigen::Index n = points.rows();
  if (k < 1) throw Error(ErrorCode::validation, "kmeans: k must be >= 1");
  if (n < k) throw Error(ErrorCode::validation, "kmeans: fewer points than clusters");

  KmeansResult best;
  best.objective = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(restart), 0x6b6dULL));
    Eigen::MatrixXd centroids = detail::kmeanspp_init(points, k, rng);
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    std::vector<double> trace;
    double objective = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
      // assignment
      std::fill(counts.begin(), counts.end(), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        int arg = 0;
        double bestd = detail::sq_dist(points, i, centroids, 0);
        for (int c = 1; c < k; ++c) {
          const double d = detail::sq_dist(points, i, centroids, c);
          if (d < bestd) {
            bestd = d;
            arg = c;
          }
        }
        labels[static_cast<std::size_t>(i)] = arg;
        ++counts[static_cast<std::size_t>(arg)];
      }
      // repair empty clusters: move the point farthest from its centroid
      for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) continue;
        Eigen::Index far = -1;
        double fard = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const int owner = labels[static_cast<std::size_t>(i)];
          if (counts[static_cast<std::size_t>(owner)] <= 1) continue;
          const double d = detail::sq_dist(points, i, centroids, owner);
          if (d > fard) {
            fard = d;
            far = i;
          }
        }
        if (far < 0) throw Error(ErrorCode::validation, "kmeans: cannot repair empty cluster");
        --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
        labels[static_cast<std::size_t>(far)] = c;
        counts[static_cast<std::size_t>(c)] = 1;
        centroids.row(c) = points.row(far);
      }
      // update
      centroids.setZero();
      for (Eigen::Index i = 0; i < n; ++i)
        centroids.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
      for (int c = 0; c < k; ++c)
        centroids.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

      double obj = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        obj += detail::sq_dist(points, i, centroids, labels[static_cast<std::size_t>(i)]);
      trace.push_back(obj);
      if (objective - obj < opts.tol) {
        objective = std::min(objective, obj);
        break;
      }
      objective = obj;
    }

    if (objective < best.objective) {
      best.labels = labels;
      best.objective = objective;
      best.centroids = centroids;
      best.objective_trace = trace;
    }
  }
  return best;
}

}  // namespace sgcgen
