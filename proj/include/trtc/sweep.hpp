// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seeded Monte-Carlo sweeps over the number of surface elements, plus the
// CSV / JSON result files.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "trtc/channel.hpp"
#include "trtc/config.hpp"
#include "trtc/dl_opt.hpp"
#include "trtc/rng.hpp"
#include "trtc/ul_opt.hpp"

namespace trtc {

struct SweepRow {
  std::string algorithm;
  int n_elements = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double sum_rate = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  bool feasible = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  void sort() {
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
      if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
      if (a.n_elements != b.n_elements) return a.n_elements < b.n_elements;
      return a.trial < b.trial;
    });
  }
};

struct SweepOptions {
  bool record_timing = false;  // wall_ms stays 0 unless set, keeping files reproducible
};

inline int algorithm_id(const std::string& name) {
  if (name == "proposed") return 0;
  if (name == "benchmark1") return 1;
  if (name == "benchmark2") return 2;
  if (name == "benchmark3") return 3;
  throw Error(ErrorCode::ConfigInvalid, "unknown algorithm '" + name + "'");
}

inline dl::DlSettings dl_settings(const ExperimentConfig& c) {
  dl::DlSettings s;
  s.outer_tol = c.dl.outer_tol;
  s.max_outer = c.dl.max_outer;
  s.inner.tol = c.dl.inner_tol;
  s.inner.max_steps = c.dl.inner_max;
  s.restarts = c.dl.restarts;
  return s;
}

inline ul::UlSettings ul_settings(const ExperimentConfig& c) {
  ul::UlSettings s;
  s.outer_tol = c.ul.outer_tol;
  s.max_outer = c.ul.max_outer;
  s.dual.max_iter = c.ul.dual_max_iter;
  s.dual.step_scale = c.ul.dual_step_scale;
  s.dual.tol = c.ul.dual_tol;
  s.user_starts = c.ul.user_starts;
  return s;
}

/// Channel stream key for one (N, trial) point.
inline std::uint64_t trial_seed(std::uint64_t base, int n, int trial) {
  return derive_key(base, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial),
                           static_cast<std::uint64_t>(Purpose::Channel)});
}

inline dl::DlProblem make_dl_problem(const ExperimentConfig& c, int n, std::uint64_t seed) {
  const channel::Geometry geom = c.geometry_for(n, c.dl.users);
  Rng rng(seed);
  const CVec g = channel::near_field_channel(geom);
  const CMat h = channel::dl_user_channels(geom, c.fading_params(), rng);
  dl::DlProblem pr;
  pr.channels.resize(n, c.dl.users);
  for (int k = 0; k < c.dl.users; ++k) pr.channels.col(k) = channel::effective_dl_channel(g, h.col(k));
  pr.noise_power = c.dl_noise();
  pr.power_budget = c.dl.power_budget;
  pr.amplitude_cap = c.dl_amplitude_cap();
  return pr;
}

inline ul::UlProblem make_ul_problem(const ExperimentConfig& c, int n, std::uint64_t seed) {
  const channel::Geometry geom = c.geometry_for(n, c.ul.users);
  Rng rng(seed);
  ul::UlProblem pr;
  pr.g = channel::near_field_channel(geom);
  pr.h = channel::ul_subcarrier_channels(geom, c.fading_params(), c.ul.subcarriers, c.ul.coherence_group, rng);
  pr.noise_power = c.ul_noise();
  pr.budgets = RVec::Constant(c.ul.users, c.ul.budget);
  return pr;
}

namespace detail {

/// Runs `task(i)` for i in [0, count) on `threads` workers. Results are
/// written by index, so completion order never affects the output.
inline void parallel_for(int count, int threads, const std::function<void(int)>& task) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next++; i < count; i = next++) task(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <typename Solve>
SweepResult run_sweep(const ExperimentConfig& c, const SweepOptions& opt, Solve&& solve) {
  c.validate();
  const int per_n = c.sweep.trials;
  const int points = static_cast<int>(c.sweep.elements.size()) * per_n;
  std::vector<std::vector<SweepRow>> slots(static_cast<std::size_t>(points));
  parallel_for(points, c.sweep.threads, [&](int i) {
    const int n = c.sweep.elements[static_cast<std::size_t>(i / per_n)];
    const int trial = i % per_n;
    const std::uint64_t seed = trial_seed(c.sweep.seed, n, trial);
    auto& out = slots[static_cast<std::size_t>(i)];
    for (const auto& alg : c.sweep.algorithms) {
      const auto t0 = std::chrono::steady_clock::now();
      SweepRow row = solve(alg, n, trial, seed);
      const auto t1 = std::chrono::steady_clock::now();
      row.algorithm = alg;
      row.n_elements = n;
      row.trial = trial;
      row.seed = seed;
      row.wall_ms = opt.record_timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
      out.push_back(std::move(row));
    }
  });
  SweepResult r;
  for (auto& s : slots)
    for (auto& row : s) r.rows.push_back(std::move(row));
  r.sort();
  return r;
}

}  // namespace detail

/// Downlink sweep: every algorithm sees the same channel draw per (N, trial).
inline SweepResult run_dl_sweep(const ExperimentConfig& c, const SweepOptions& opt = {}) {
  const dl::DlSettings settings = dl_settings(c);
  return detail::run_sweep(c, opt, [&](const std::string& alg, int n, int trial, std::uint64_t seed) {
    const dl::DlProblem pr = make_dl_problem(c, n, seed);
    Rng alg_rng = make_rng(c.sweep.seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial),
                                          static_cast<std::uint64_t>(Purpose::Benchmark),
                                          static_cast<std::uint64_t>(algorithm_id(alg))});
    const int id = algorithm_id(alg);
    const dl::DlSolution sol =
        id == 0 ? dl::alternating_optimize_dl(pr, settings, nullptr, &alg_rng) : dl::benchmark_dl(pr, id, alg_rng, settings);
    SweepRow row;
    row.sum_rate = sol.sum_rate;
    row.iterations = sol.iterations;
    row.feasible = dl::dl_feasible(sol.beams, sol.powers, pr);
    return row;
  });
}

inline SweepResult run_ul_sweep(const ExperimentConfig& c, const SweepOptions& opt = {}) {
  const ul::UlSettings settings = ul_settings(c);
  return detail::run_sweep(c, opt, [&](const std::string& alg, int n, int trial, std::uint64_t seed) {
    const ul::UlProblem pr = make_ul_problem(c, n, seed);
    Rng alg_rng = make_rng(c.sweep.seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial),
                                          static_cast<std::uint64_t>(Purpose::Benchmark),
                                          static_cast<std::uint64_t>(algorithm_id(alg))});
    const int id = algorithm_id(alg);
    const ul::UlSolution sol = id == 0 ? ul::alternating_optimize_ul(pr, settings) : ul::benchmark_ul(pr, id, alg_rng, settings);
    SweepRow row;
    row.sum_rate = sol.sum_rate;
    row.iterations = sol.iterations;
    row.feasible = ul::ul_violation(sol, pr) <= 1e-9;
    return row;
  });
}

// ---------------------------------------------------------------------------
// Result files

enum class ResultFormat { Csv, Json };

inline constexpr const char* kCsvHeader = "algorithm,n_elements,trial,seed,sum_rate_bps_hz,iterations,wall_ms,feasible";

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string to_csv(const SweepResult& r) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& row : r.rows) {
    out += row.algorithm + "," + std::to_string(row.n_elements) + "," + std::to_string(row.trial) + "," +
           std::to_string(row.seed) + "," + format_double(row.sum_rate) + "," + std::to_string(row.iterations) + "," +
           format_double(row.wall_ms) + "," + (row.feasible ? "1" : "0") + "\n";
  }
  return out;
}

inline nlohmann::json to_json(const SweepResult& r) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : r.rows) {
    arr.push_back({{"algorithm", row.algorithm},
                   {"n_elements", row.n_elements},
                   {"trial", row.trial},
                   {"seed", row.seed},
                   {"sum_rate_bps_hz", row.sum_rate},
                   {"iterations", row.iterations},
                   {"wall_ms", row.wall_ms},
                   {"feasible", row.feasible}});
  }
  return arr;
}

inline SweepResult from_json(const nlohmann::json& arr) {
  SweepResult r;
  for (const auto& o : arr) {
    SweepRow row;
    row.algorithm = o.at("algorithm").get<std::string>();
    row.n_elements = o.at("n_elements").get<int>();
    row.trial = o.at("trial").get<int>();
    row.seed = o.at("seed").get<std::uint64_t>();
    row.sum_rate = o.at("sum_rate_bps_hz").get<double>();
    row.iterations = o.at("iterations").get<int>();
    row.wall_ms = o.at("wall_ms").get<double>();
    row.feasible = o.at("feasible").get<bool>();
    r.rows.push_back(std::move(row));
  }
  return r;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(os), ErrorCode::IoError, "cannot open '" + path + "' for writing");
  os << text;
  os.flush();
  require(static_cast<bool>(os), ErrorCode::IoError, "write to '" + path + "' failed");
}

inline ResultFormat format_for_path(const std::string& path) {
  return path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? ResultFormat::Json : ResultFormat::Csv;
}

inline void write_results(const SweepResult& r, const std::string& path, ResultFormat fmt) {
  SweepResult sorted = r;
  sorted.sort();
  write_text(path, fmt == ResultFormat::Csv ? to_csv(sorted) : to_json(sorted).dump(2) + "\n");
}

inline SweepResult read_results_json(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorCode::IoError, "cannot open '" + path + "'");
  try {
    return from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("malformed result file: ") + e.what());
  }
}

/// Mean sum-rate per (algorithm, N), in sweep order.
struct PointMean {
  std::string algorithm;
  int n_elements;
  double mean;
  int count;
};

inline std::vector<PointMean> point_means(const SweepResult& r) {
  std::vector<PointMean> out;
  for (const auto& row : r.rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const PointMean& p) {
      return p.algorithm == row.algorithm && p.n_elements == row.n_elements;
    });
    if (it == out.end()) {
      out.push_back({row.algorithm, row.n_elements, 0.0, 0});
      it = out.end() - 1;
    }
    it->mean += row.sum_rate;
    ++it->count;
  }
  for (auto& p : out) p.mean /= p.count;
  return out;
}

}  // namespace trtc
