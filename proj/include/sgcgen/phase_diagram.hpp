#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "sgcgen/error.hpp"
#include "sgcgen/format.hpp"
#include "sgcgen/graph.hpp"
#include "sgcgen/metrics.hpp"
#include "sgcgen/sbm.hpp"
#include "sgcgen/spectral.hpp"

namespace sgcgen {

/// Detectability sweep over SBM(2, P) parameters: p1 varies per row, q per
/// column, p2 stays fixed. Every cell averages detection accuracy and theta
/// over independent seeds.
struct PhaseDiagramConfig {
  std::vector<double> p1_values;
  std::vector<double> q_values;
  double p2 = 0.1;
  std::size_t n1 = 250;
  std::size_t n2 = 250;
  int seeds_per_cell = 10;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  SgcOptions sgc;
};

struct PhaseCell {
  double p1 = 0.0;
  double q = 0.0;
  double q_star = 0.0;  // theoretical boundary sqrt(p1 * p2)
  double mean_accuracy = 0.0;
  double mean_theta = 0.0;
  int seeds_ok = 0;
  bool failed = false;  // a sample stayed disconnected after 5 attempts
};

namespace detail {

inline PhaseCell run_phase_cell(const PhaseDiagramConfig& cfg, std::size_t cell_index, double p1,
                                double q) {
  PhaseCell cell;
  cell.p1 = p1;
  cell.q = q;
  cell.q_star = std::sqrt(p1 * cfg.p2);

  SbmParams params;
  params.K = 2;
  params.sizes = {cfg.n1, cfg.n2};
  params.P.resize(2, 2);
  params.P << p1, q, q, cfg.p2;

  double acc_sum = 0.0, theta_sum = 0.0;
  for (int s = 0; s < cfg.seeds_per_cell; ++s) {
    SbmSample sample;
    bool connected = false;
    for (int attempt = 0; attempt < 5 && !connected; ++attempt) {
      sample = generate_sbm(params, derive_seed(cfg.seed, cell_index,
                                                static_cast<std::uint64_t>(s),
                                                static_cast<std::uint64_t>(attempt)));
      connected = is_connected(sample.graph);
    }
    if (!connected) {
      cell.failed = true;
      return cell;
    }
    SgcResult det = sgc_detect(sample.graph, 2, LaplacianMode::standard,
                               derive_seed(cfg.seed, cell_index,
                                           static_cast<std::uint64_t>(s), 0x444554ULL),
                               cfg.sgc);
    acc_sum += accuracy(det.partition.labels(), sample.partition.labels());
    theta_sum += det.basis.theta;
    ++cell.seeds_ok;
  }
  cell.mean_accuracy = acc_sum / cell.seeds_ok;
  cell.mean_theta = theta_sum / cell.seeds_ok;
  return cell;
}

inline int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SGCGEN_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace detail

/// Runs all cells (in parallel across a worker pool) and returns them in grid
/// order: p1-major, q-minor. Per-cell seeds derive from the cell index, so
/// results do not depend on the worker count.
inline std::vector<PhaseCell> run_phase_diagram(const PhaseDiagramConfig& cfg) {
  if (cfg.p1_values.empty() || cfg.q_values.empty())
    throw Error(ErrorCode::validation, "phase diagram grid is empty");
  if (cfg.seeds_per_cell < 1)
    throw Error(ErrorCode::validation, "phase diagram needs >= 1 seed per cell");

  const std::size_t total = cfg.p1_values.size() * cfg.q_values.size();
  std::vector<PhaseCell> cells(total);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const double p1 = cfg.p1_values[idx / cfg.q_values.size()];
      const double q = cfg.q_values[idx % cfg.q_values.size()];
      cells[idx] = detail::run_phase_cell(cfg, idx, p1, q);
    }
  };

  const int workers = std::min<int>(detail::worker_count(cfg.workers), static_cast<int>(total));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  return cells;
}

/// One row per cell in grid order; the seed column echoes the base seed so
/// every stochastic output records how it was produced.
inline void write_phase_csv(std::ostream& out, const std::vector<PhaseCell>& cells,
                            std::uint64_t seed) {
  out << "p1,q,q_star,mean_accuracy,mean_theta,seeds_ok,status,seed\n";
  for (const PhaseCell& c : cells) {
    out << format_g12(c.p1) << ',' << format_g12(c.q) << ',' << format_g12(c.q_star) << ',';
    if (c.failed) {
      out << ",," << c.seeds_ok << ",failed," << seed << '\n';
    } else {
      out << format_g12(c.mean_accuracy) << ',' << format_g12(c.mean_theta) << ','
          << c.seeds_ok << ",ok," << seed << '\n';
    }
  }
}

}  // namespace sgcgen
