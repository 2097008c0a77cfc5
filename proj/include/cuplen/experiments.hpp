#pragma once

// Detection-rate experiments. Trial t of every grid cell uses derive_seed(base, t),
// so cells differ only in their parameters.

#include <atomic>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "cuplen/pipeline.hpp"
#include "cuplen/synth.hpp"

namespace cuplen {

struct TrialOutcome {
  bool cup = false;        // detect_toroidal verdict
  bool heuristic = false;  // h1_gap_heuristic
  double seconds = 0.0;
};

struct NoiseTrial {
  double sigma = 0.1;
  std::size_t landmarks = 150;
  std::size_t n = 2000;
  double major = 5.0;
  double minor = 2.0;
};

inline TrialOutcome run_noise_trial(const NoiseTrial& p, std::uint64_t seed) {
  auto pts = add_gaussian_noise(sample_torus_embedded(p.n, p.major, p.minor, derive_seed(seed, 1)), p.sigma, derive_seed(seed, 2));
  AnalysisOptions opt;
  opt.landmarks = p.landmarks;
  opt.seed = derive_seed(seed, 3);
  const auto a = analyze(pts, opt);
  return {a.evidence.verdict, a.h1_gap, a.seconds};
}

struct GridCellTrial {
  std::size_t cells = 20;
  double duration = 1000.0;
  double dt = 0.2;
  double scale = 40.0;
  double orientation = 0.0;
  double speed_cut = 5.0;
  std::size_t subsample = 1000;
  std::size_t landmarks = 250;
  WalkParams walk;
};

inline PointCloud simulate_gridcells(const GridCellTrial& p, std::uint64_t seed) {
  const auto tr = random_walk(p.duration, p.dt, p.walk, derive_seed(seed, 1));
  const auto module = make_grid_module(p.cells, p.scale, p.orientation, derive_seed(seed, 2));
  const std::size_t target = std::min(p.subsample, tr.positions.size());
  return preprocess_rates(grid_cell_rates(tr, module), tr.speeds, p.speed_cut, target, derive_seed(seed, 3));
}

inline TrialOutcome run_gridcell_trial(const GridCellTrial& p, std::uint64_t seed) {
  const auto pts = simulate_gridcells(p, seed);
  AnalysisOptions opt;
  opt.landmarks = std::min(p.landmarks, pts.size());
  opt.seed = derive_seed(seed, 4);
  const auto a = analyze(pts, opt);
  return {a.evidence.verdict, a.h1_gap, a.seconds};
}

// Runs fn(0..n-1) on up to `threads` workers; results keep index order.
template <class Fn>
auto parallel_map(std::size_t n, std::size_t threads, Fn&& fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(n);
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

struct RateRow {
  std::vector<std::pair<std::string, std::string>> params;
  std::size_t trials = 0;
  std::size_t cup_hits = 0;
  std::size_t heuristic_hits = 0;

  double cup_rate() const { return trials ? static_cast<double>(cup_hits) / static_cast<double>(trials) : 0.0; }
  double heuristic_rate() const { return trials ? static_cast<double>(heuristic_hits) / static_cast<double>(trials) : 0.0; }
};

struct RateTable {
  std::string name;
  std::vector<RateRow> rows;
};

// One task per (cell, trial); outcomes are tallied per cell.
template <class Cell, class Runner>
RateTable run_rate_experiment(std::string name, const std::vector<Cell>& cells,
                              std::vector<std::pair<std::string, std::string>> (*describe)(const Cell&), Runner&& run,
                              std::size_t trials, std::uint64_t seed, std::size_t threads = 1) {
  if (trials == 0) throw std::invalid_argument("experiment: trials must be at least 1");
  const auto outcomes = parallel_map(cells.size() * trials, threads, [&](std::size_t task) {
    return run(cells[task / trials], derive_seed(seed, task % trials));
  });
  RateTable table{std::move(name), {}};
  for (std::size_t c = 0; c < cells.size(); ++c) {
    RateRow row{describe(cells[c]), trials, 0, 0};
    for (std::size_t t = 0; t < trials; ++t) {
      row.cup_hits += outcomes[c * trials + t].cup;
      row.heuristic_hits += outcomes[c * trials + t].heuristic;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline std::vector<std::pair<std::string, std::string>> describe_noise(const NoiseTrial& p) {
  return {{"sigma", format_double(p.sigma)}, {"landmarks", std::to_string(p.landmarks)}};
}

inline std::vector<std::pair<std::string, std::string>> describe_gridcells(const GridCellTrial& p) {
  return {{"cells", std::to_string(p.cells)}, {"duration", format_double(p.duration)}, {"landmarks", std::to_string(p.landmarks)}};
}

inline RateTable noise_robustness(const std::vector<double>& sigmas, const std::vector<std::size_t>& landmarks,
                                  std::size_t trials, std::uint64_t seed, std::size_t threads = 1, NoiseTrial base = {}) {
  std::vector<NoiseTrial> cells;
  for (double s : sigmas)
    for (std::size_t l : landmarks) {
      NoiseTrial c = base;
      c.sigma = s;
      c.landmarks = l;
      cells.push_back(c);
    }
  return run_rate_experiment("noise-robustness", cells, &describe_noise, run_noise_trial, trials, seed, threads);
}

inline RateTable gridcell_sweep(std::string name, const std::vector<std::size_t>& cell_counts,
                                const std::vector<double>& durations, std::size_t trials, std::uint64_t seed,
                                std::size_t threads = 1, GridCellTrial base = {}) {
  std::vector<GridCellTrial> cells;
  for (double d : durations)
    for (std::size_t n : cell_counts) {
      GridCellTrial c = base;
      c.cells = n;
      c.duration = d;
      cells.push_back(c);
    }
  return run_rate_experiment(std::move(name), cells, &describe_gridcells, run_gridcell_trial, trials, seed, threads);
}

inline void write_rate_tsv(std::ostream& out, const RateTable& t) {
  if (t.rows.empty()) return;
  for (const auto& [k, v] : t.rows.front().params) out << k << '\t';
  out << "trials\tcup_rate\theuristic_rate\n";
  for (const auto& r : t.rows) {
    for (const auto& [k, v] : r.params) out << v << '\t';
    out << r.trials << '\t' << format_double(r.cup_rate()) << '\t' << format_double(r.heuristic_rate()) << '\n';
  }
}

}  // namespace cuplen
