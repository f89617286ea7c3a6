// SPDX-License-Identifier: Apache-2.0
#pragma once

// Uplink OFDMA sum-rate maximization through a passive transmissive RIS:
// subcarrier assignment a, per-subcarrier powers p and one RIS setting f
// shared by all subcarriers. (a, p) come from Lagrangian dual decomposition
// with water-filling; f from minorize-maximize steps on the log-rates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "trtc/ascent.hpp"
#include "trtc/core.hpp"
#include "trtc/rng.hpp"

namespace trtc::ul {

using IMat = Eigen::MatrixXi;

struct UlProblem {
  CVec g;                  // RIS -> feed, N
  std::vector<CMat> h;     // per user: N x S
  double noise_power = 1.0;  // per subcarrier
  RVec budgets;            // per-user power budgets

  Eigen::Index elements() const { return g.size(); }
  Eigen::Index users() const { return static_cast<Eigen::Index>(h.size()); }
  Eigen::Index subcarriers() const { return h.empty() ? 0 : h.front().cols(); }

  void validate() const {
    require(!h.empty() && g.size() > 0, ErrorCode::DimensionMismatch, "empty uplink problem");
    require(budgets.size() == users(), ErrorCode::DimensionMismatch, "one budget per user");
    for (const auto& hk : h) {
      require(hk.rows() == g.size() && hk.cols() == subcarriers(), ErrorCode::DimensionMismatch,
              "every user needs an N x S channel");
    }
    require(noise_power > 0.0, ErrorCode::ConfigInvalid, "noise power must be positive");
    require((budgets.array() > 0.0).all(), ErrorCode::ConfigInvalid, "budgets must be positive");
  }
};

struct UlSolution {
  IMat assignment;  // K x S, 0/1
  RMat powers;      // K x S
  CVec ris;         // N
  double sum_rate = 0.0;
  RVec duals;       // mu_k
  std::vector<double> trace;
  int iterations = 0;
  bool converged = true;
};

struct DualSettings {
  double step_scale = 0.1;  // s0 relative to the initial normalized price
  int max_iter = 200;
  double tol = 1e-3;        // relative budget violation accepted as converged
};

struct UlSettings {
  double outer_tol = 1e-4;
  int max_outer = 50;
  double block_tol = 1e-6;
  int block_max = 30;
  AscentSettings inner{};
  DualSettings dual{};
  bool user_starts = true;  // extra runs from each user's dominant phases
};

/// gamma = |sum_n g_n f_n h_n|^2 / s2.
inline double effective_gain(const CVec& f, const CVec& g, const CVec& h, double noise_power) {
  require(f.size() == g.size() && g.size() == h.size(), ErrorCode::DimensionMismatch,
          "f, g and h must have equal length");
  cplx acc{0.0, 0.0};
  for (Eigen::Index n = 0; n < f.size(); ++n) acc += g(n) * f(n) * h(n);
  return std::norm(acc) / noise_power;
}

/// K x S matrix of effective gains for RIS setting f.
inline RMat gain_table(const CVec& f, const UlProblem& pr) {
  const CVec gf = pr.g.cwiseProduct(f);
  RMat out(pr.users(), pr.subcarriers());
  for (Eigen::Index k = 0; k < pr.users(); ++k)
    out.row(k) = (pr.h[static_cast<std::size_t>(k)].transpose() * gf).cwiseAbs2().transpose() / pr.noise_power;
  return out;
}

inline double rate_of(const IMat& a, const RMat& p, const RMat& gamma) {
  double r = 0.0;
  for (Eigen::Index k = 0; k < a.rows(); ++k)
    for (Eigen::Index s = 0; s < a.cols(); ++s)
      if (a(k, s) != 0) r += std::log2(1.0 + p(k, s) * gamma(k, s));
  return r;
}

inline double sum_rate_ul(const UlSolution& sol, const UlProblem& pr) {
  return rate_of(sol.assignment, sol.powers, gain_table(sol.ris, pr));
}

/// Largest violation of the UlSolution invariants (<= 0 when feasible).
inline double ul_violation(const UlSolution& sol, const UlProblem& pr) {
  double v = -std::numeric_limits<double>::infinity();
  for (Eigen::Index s = 0; s < sol.assignment.cols(); ++s) {
    v = std::max(v, static_cast<double>(sol.assignment.col(s).sum()) - 1.0);
    for (Eigen::Index k = 0; k < sol.assignment.rows(); ++k) {
      const int a = sol.assignment(k, s);
      if (a != 0 && a != 1) v = std::max(v, 1.0);
      if (a == 0) v = std::max(v, sol.powers(k, s));
      v = std::max(v, -sol.powers(k, s));
    }
  }
  for (Eigen::Index k = 0; k < sol.powers.rows(); ++k) v = std::max(v, sol.powers.row(k).sum() - pr.budgets(k));
  v = std::max(v, sol.ris.cwiseAbs().maxCoeff() - 1.0);
  return v;
}

/// Exact water-filling of a unit budget over `gains`.
/// Returns the water level W (p_i = max(0, W - 1/g_i)); W = 0 if no gain is positive.
inline double water_level(const std::vector<double>& gains) {
  std::vector<double> inv;
  for (double gval : gains)
    if (gval > 0.0) inv.push_back(1.0 / gval);
  if (inv.empty()) return 0.0;
  std::sort(inv.begin(), inv.end());
  double sum = 0.0, level = 0.0;
  for (std::size_t i = 0; i < inv.size(); ++i) {
    sum += inv[i];
    const double w = (1.0 + sum) / static_cast<double>(i + 1);
    if (i + 1 < inv.size() && w <= inv[i + 1]) return w;
    level = w;
  }
  return level;
}

struct DualResult {
  IMat assignment;
  RMat powers;
  RVec duals;
  double sum_rate = 0.0;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

/// Re-water-fills every user within its assigned subcarriers and drops
/// subcarriers left without power. Writes exact water-filling prices.
inline void refill(IMat& a, RMat& p, RVec& mu, const RMat& gamma, const RVec& budgets) {
  p.setZero();
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    std::vector<double> gains;
    for (Eigen::Index s = 0; s < a.cols(); ++s)
      if (a(k, s)) gains.push_back(gamma(k, s) * budgets(k));
    const double w = water_level(gains);
    if (w <= 0.0) {
      a.row(k).setZero();
      continue;
    }
    for (Eigen::Index s = 0; s < a.cols(); ++s) {
      if (!a(k, s)) continue;
      const double gn = gamma(k, s) * budgets(k);
      const double pn = gn > 0.0 ? std::max(0.0, w - 1.0 / gn) : 0.0;
      if (pn > 0.0) {
        p(k, s) = pn * budgets(k);
      } else {
        a(k, s) = 0;
      }
    }
    mu(k) = 1.0 / (w * kLn2 * budgets(k));
  }
}

/// Water-filled rate of one user over budget-normalized gains.
inline double filled_rate(const std::vector<double>& gains) {
  const double w = water_level(gains);
  double r = 0.0;
  for (double gval : gains)
    if (gval > 0.0) r += std::log2(1.0 + std::max(0.0, w - 1.0 / gval) * gval);
  return r;
}

/// Hands every unassigned subcarrier with a positive gain to the user whose
/// water-filled rate grows most by adding it. Never lowers the sum-rate.
inline void fill_idle(IMat& a, const RMat& gamma, const RVec& budgets) {
  std::vector<std::vector<double>> sets(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index k = 0; k < a.rows(); ++k)
    for (Eigen::Index s = 0; s < a.cols(); ++s)
      if (a(k, s)) sets[static_cast<std::size_t>(k)].push_back(gamma(k, s) * budgets(k));
  for (Eigen::Index s = 0; s < a.cols(); ++s) {
    if (a.col(s).sum() != 0) continue;
    Eigen::Index winner = -1;
    double best_gain = 0.0;
    for (Eigen::Index k = 0; k < a.rows(); ++k) {
      if (gamma(k, s) <= 0.0) continue;
      auto& set = sets[static_cast<std::size_t>(k)];
      const double before = filled_rate(set);
      set.push_back(gamma(k, s) * budgets(k));
      const double gain = filled_rate(set) - before;
      set.pop_back();
      if (gain > best_gain) best_gain = gain, winner = k;
    }
    if (winner >= 0) {
      a(winner, s) = 1;
      sets[static_cast<std::size_t>(winner)].push_back(gamma(winner, s) * budgets(winner));
    }
  }
}

/// Primal recovery: water-fill, then hand idle subcarriers out, until a
/// fill changes nothing. Each fill strictly raises the rate.
inline void recover(IMat& a, RMat& p, RVec& mu, const RMat& gamma, const RVec& budgets) {
  refill(a, p, mu, gamma, budgets);
  for (Eigen::Index round = 0; round < a.cols(); ++round) {
    const IMat before = a;
    fill_idle(a, gamma, budgets);
    if (a == before) return;
    refill(a, p, mu, gamma, budgets);
  }
}

}  // namespace detail

/// Lagrangian dual decomposition over the per-user budgets. Prices follow a
/// projected subgradient with steps s0 / sqrt(t); every iterate's assignment
/// is re-water-filled and the best primal point is returned, so the result
/// is always feasible. `converged` is false when the budget violation of
/// the dual iterate stayed above tol for all max_iter steps.
inline DualResult dual_subcarrier_power(const RMat& gamma, const RVec& budgets, const DualSettings& s = {}) {
  const Eigen::Index k_users = gamma.rows(), n_sub = gamma.cols();
  require(budgets.size() == k_users, ErrorCode::DimensionMismatch, "one budget per user");
  require((gamma.array() >= 0.0).all(), ErrorCode::DimensionMismatch, "gains must be >= 0");

  // Work in budget-normalized units: gain' = gain * P_k, power' = power / P_k.
  RMat gn(k_users, n_sub);
  for (Eigen::Index k = 0; k < k_users; ++k) gn.row(k) = gamma.row(k) * budgets(k);

  RVec price(k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    std::vector<double> row;
    for (Eigen::Index sc = 0; sc < n_sub; ++sc) row.push_back(gn(k, sc));
    const double w = water_level(row);
    price(k) = w > 0.0 ? 1.0 / (w * kLn2) : 1.0;
  }
  const double s0 = s.step_scale * price.mean();
  const double price_floor = 1e-9 * price.maxCoeff();

  DualResult best;
  best.assignment = IMat::Zero(k_users, n_sub);
  best.powers = RMat::Zero(k_users, n_sub);
  best.duals = price;
  best.sum_rate = -1.0;

  IMat a(k_users, n_sub);
  RMat cand(k_users, n_sub);
  for (int t = 1; t <= s.max_iter; ++t) {
    a.setZero();
    cand.setZero();
    for (Eigen::Index sc = 0; sc < n_sub; ++sc) {
      Eigen::Index winner = -1;
      double best_val = 0.0;
      for (Eigen::Index k = 0; k < k_users; ++k) {
        if (gn(k, sc) <= 0.0) continue;
        const double pw = std::max(0.0, 1.0 / (price(k) * kLn2) - 1.0 / gn(k, sc));
        cand(k, sc) = pw;
        const double val = std::log2(1.0 + pw * gn(k, sc)) - price(k) * pw;
        if (val > best_val) best_val = val, winner = k;
      }
      if (winner >= 0) a(winner, sc) = 1;
    }

    IMat a_fill = a;
    RMat p_fill(k_users, n_sub);
    RVec mu_fill = price;
    detail::recover(a_fill, p_fill, mu_fill, gamma, budgets);
    const double r = rate_of(a_fill, p_fill, gamma);
    if (r > best.sum_rate) {
      best.assignment = a_fill;
      best.powers = p_fill;
      best.duals = mu_fill;
      for (Eigen::Index k = 0; k < k_users; ++k)
        if (a_fill.row(k).sum() == 0) best.duals(k) = price(k) / budgets(k);
      best.sum_rate = r;
    }
    best.iterations = t;

    bool ok = true;
    RVec used(k_users);
    for (Eigen::Index k = 0; k < k_users; ++k) {
      used(k) = 0.0;
      for (Eigen::Index sc = 0; sc < n_sub; ++sc)
        if (a(k, sc)) used(k) += cand(k, sc);
      const bool over = used(k) > 1.0 + s.tol;
      const bool slack = used(k) < 1.0 - s.tol && price(k) > price_floor;
      if (over || slack) ok = false;
    }
    if (ok) {
      best.converged = true;
      break;
    }
    const double step = s0 / std::sqrt(static_cast<double>(t));
    for (Eigen::Index k = 0; k < k_users; ++k) price(k) = std::max(price_floor, price(k) - step * (1.0 - used(k)));
  }
  if (best.sum_rate < 0.0) best.sum_rate = 0.0;
  return best;
}

namespace detail {

/// Active (k, s) terms of the RIS objective: sum w log2(1 + |v^H f|^2 c).
struct RisTerms {
  CMat v;    // N x T, columns conj(g .* h_{k,s})
  RVec c;    // p_{k,s} / s2

  RisTerms(const IMat& a, const RMat& p, const UlProblem& pr) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> act;
    for (Eigen::Index k = 0; k < a.rows(); ++k)
      for (Eigen::Index s = 0; s < a.cols(); ++s)
        if (a(k, s) && p(k, s) > 0.0) act.emplace_back(k, s);
    v.resize(pr.elements(), static_cast<Eigen::Index>(act.size()));
    c.resize(static_cast<Eigen::Index>(act.size()));
    for (std::size_t i = 0; i < act.size(); ++i) {
      const auto [k, s] = act[i];
      v.col(static_cast<Eigen::Index>(i)) = pr.g.cwiseProduct(pr.h[static_cast<std::size_t>(k)].col(s)).conjugate();
      c(static_cast<Eigen::Index>(i)) = p(k, s) / pr.noise_power;
    }
  }

  bool empty() const { return c.size() == 0; }

  double objective(const CVec& f) const {
    const RVec q = (v.adjoint() * f).cwiseAbs2();
    double r = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) r += std::log2(1.0 + c(i) * q(i));
    return r;
  }
};

inline CVec clip_modulus(const CVec& z) {
  CVec out = z;
  for (Eigen::Index n = 0; n < z.size(); ++n) {
    const double m = std::abs(z(n));
    if (m > 1.0) out(n) = z(n) / m;
  }
  return out;
}

}  // namespace detail

/// One minorize-maximize step on the RIS setting with (a, p) fixed.
inline CVec sca_update_f_ul(const CVec& f, const IMat& a, const RMat& p, const UlProblem& pr,
                            const AscentSettings& inner = {}) {
  require(f.size() == pr.elements(), ErrorCode::DimensionMismatch, "f must have N entries");
  const detail::RisTerms terms(a, p, pr);
  if (terms.empty()) return f;

  const CVec t = terms.v.adjoint() * f;  // expansion point
  auto surrogate = [&](const CVec& x) {
    const CVec b = terms.v.adjoint() * x;
    double r = 0.0;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const double lin = 2.0 * std::real(std::conj(t(i)) * b(i)) - std::norm(t(i));
      const double arg = 1.0 + terms.c(i) * lin;
      if (arg <= 0.0) return -std::numeric_limits<double>::infinity();
      r += std::log2(arg);
    }
    return r;
  };
  auto gradient = [&](const CVec& x) {
    const CVec b = terms.v.adjoint() * x;
    CVec w(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const double lin = 2.0 * std::real(std::conj(t(i)) * b(i)) - std::norm(t(i));
      w(i) = terms.c(i) * t(i) / (1.0 + terms.c(i) * lin);
    }
    return CVec((2.0 / kLn2) * (terms.v * w));
  };

  CVec x = f;
  const double g_norm = gradient(x).norm();
  if (g_norm == 0.0) return f;
  projected_ascent(x, surrogate, gradient, detail::clip_modulus, inner,
                   std::sqrt(static_cast<double>(f.size())) / g_norm);

  const double before = terms.objective(f);
  const double after = terms.objective(x);
  require(after >= before - 1e-9, ErrorCode::SurrogateDivergence, "RIS update decreased the sum-rate");
  return after >= before ? x : f;
}

inline CVec solve_ris_block(CVec f, const IMat& a, const RMat& p, const UlProblem& pr, const UlSettings& s) {
  const detail::RisTerms terms(a, p, pr);
  if (terms.empty()) return f;
  double r = terms.objective(f);
  for (int i = 0; i < s.block_max; ++i) {
    f = sca_update_f_ul(f, a, p, pr, s.inner);
    const double next = terms.objective(f);
    const bool done = next - r <= s.block_tol * std::max(r, 1e-12);
    r = next;
    if (done) break;
  }
  return f;
}

/// Unit-modulus phases of the dominant eigenvector of sum v v^H over the
/// subcarriers of `user` (all users when negative): the surface setting
/// that maximizes that channel gain when relaxed to the sphere.
inline CVec dominant_phases(const UlProblem& pr, Eigen::Index user = -1) {
  CMat r = CMat::Zero(pr.elements(), pr.elements());
  for (Eigen::Index k = 0; k < pr.users(); ++k) {
    if (user >= 0 && k != user) continue;
    const CMat& hk = pr.h[static_cast<std::size_t>(k)];
    for (Eigen::Index s = 0; s < hk.cols(); ++s) {
      const CVec v = pr.g.cwiseProduct(hk.col(s)).conjugate();
      r.noalias() += v * v.adjoint();
    }
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(r);
  const CVec u = es.eigenvectors().col(pr.elements() - 1);
  CVec f(pr.elements());
  for (Eigen::Index n = 0; n < u.size(); ++n) f(n) = std::polar(1.0, std::arg(u(n)));
  return f;
}

inline CVec aggregate_init(const UlProblem& pr) { return dominant_phases(pr); }

namespace detail {

inline UlSolution with_allocation(const CVec& f, const DualResult& d) {
  UlSolution sol;
  sol.ris = f;
  sol.assignment = d.assignment;
  sol.powers = d.powers;
  sol.duals = d.duals;
  sol.sum_rate = d.sum_rate;
  sol.converged = d.converged;
  return sol;
}

/// Keeps the better of the incumbent assignment (re-water-filled under the
/// new gains) and a fresh dual solve.
inline DualResult reallocate(const UlSolution& current, const RMat& gamma, const UlProblem& pr,
                             const DualSettings& ds) {
  DualResult fresh = dual_subcarrier_power(gamma, pr.budgets, ds);
  DualResult kept;
  kept.assignment = current.assignment;
  kept.powers = RMat::Zero(gamma.rows(), gamma.cols());
  kept.duals = current.duals;
  recover(kept.assignment, kept.powers, kept.duals, gamma, pr.budgets);
  kept.sum_rate = rate_of(kept.assignment, kept.powers, gamma);
  kept.converged = current.converged;
  return kept.sum_rate > fresh.sum_rate ? kept : fresh;
}

}  // namespace detail

namespace detail {

inline UlSolution run_alternating_ul(const UlProblem& pr, const UlSettings& s, const CVec& f0) {
  UlSolution sol = detail::with_allocation(detail::clip_modulus(f0),
                                           dual_subcarrier_power(gain_table(f0, pr), pr.budgets, s.dual));
  sol.trace.push_back(sol.sum_rate);
  for (int it = 0; it < s.max_outer; ++it) {
    const CVec f = solve_ris_block(sol.ris, sol.assignment, sol.powers, pr, s);
    const DualResult d = detail::reallocate(sol, gain_table(f, pr), pr, s.dual);
    const double prev = sol.sum_rate;
    std::vector<double> trace = std::move(sol.trace);
    sol = detail::with_allocation(f, d);
    sol.trace = std::move(trace);
    sol.trace.push_back(sol.sum_rate);
    sol.iterations = it + 1;
    if (std::abs(sol.sum_rate - prev) <= s.outer_tol * std::max(prev, 1e-12)) break;
  }
  return sol;
}

}  // namespace detail

/// Alternates the RIS block and the (a, p) block. The sum-rate after every
/// outer pass is recorded in `trace` and never decreases. Without `init`
/// the run starts from the aggregate-gain phases and, if
/// `s.user_starts`, once more from each user's own dominant phases; the
/// best run is returned.
inline UlSolution alternating_optimize_ul(const UlProblem& pr, const UlSettings& s = {}, const CVec* init = nullptr) {
  pr.validate();
  if (init) {
    require(init->size() == pr.elements(), ErrorCode::DimensionMismatch, "init must have N entries");
    return detail::run_alternating_ul(pr, s, *init);
  }
  UlSolution best = detail::run_alternating_ul(pr, s, aggregate_init(pr));
  if (s.user_starts && pr.users() > 1) {
    for (Eigen::Index k = 0; k < pr.users(); ++k) {
      UlSolution cand = detail::run_alternating_ul(pr, s, dominant_phases(pr, k));
      if (cand.sum_rate > best.sum_rate) best = std::move(cand);
    }
  }
  return best;
}

/// Exhaustive search over quantized unit-modulus phases, all exclusive
/// assignments and quantized per-user power splits (levels j P_k / (L-1)).
inline UlSolution brute_force_ul(const UlProblem& pr, int phase_levels, int power_levels) {
  pr.validate();
  require(phase_levels >= 1 && power_levels >= 2, ErrorCode::SearchSpaceTooLarge, "need >= 1 phase, >= 2 power levels");
  const auto n = pr.elements(), k_users = pr.users(), n_sub = pr.subcarriers();
  double space = std::pow(phase_levels, static_cast<double>(n)) * std::pow(k_users + 1.0, static_cast<double>(n_sub)) *
                 std::pow(power_levels, static_cast<double>(n_sub));
  require(space <= 1e8, ErrorCode::SearchSpaceTooLarge, "quantized search space exceeds 1e8 points");

  UlSolution best;
  best.sum_rate = -1.0;
  std::vector<int> phase(static_cast<std::size_t>(n), 0);
  std::vector<int> owner(static_cast<std::size_t>(n_sub), 0);   // 0 = unused, else user + 1
  std::vector<int> level(static_cast<std::size_t>(n_sub), 0);
  auto advance = [](std::vector<int>& digits, int base) {
    for (auto& d : digits) {
      if (++d < base) return true;
      d = 0;
    }
    return false;
  };

  do {
    CVec f(n);
    for (Eigen::Index i = 0; i < n; ++i)
      f(i) = std::polar(1.0, 2.0 * kPi * phase[static_cast<std::size_t>(i)] / phase_levels);
    const RMat gamma = gain_table(f, pr);
    std::fill(owner.begin(), owner.end(), 0);
    do {
      std::fill(level.begin(), level.end(), 0);
      do {
        RVec spent = RVec::Zero(k_users);
        bool feasible = true;
        double r = 0.0;
        for (Eigen::Index sc = 0; sc < n_sub && feasible; ++sc) {
          const int o = owner[static_cast<std::size_t>(sc)];
          const int l = level[static_cast<std::size_t>(sc)];
          if (o == 0) {
            if (l != 0) feasible = false;
            continue;
          }
          const double pw = pr.budgets(o - 1) * l / (power_levels - 1);
          spent(o - 1) += pw;
          if (spent(o - 1) > pr.budgets(o - 1) * (1.0 + 1e-12)) feasible = false;
          r += std::log2(1.0 + pw * gamma(o - 1, sc));
        }
        if (feasible && r > best.sum_rate) {
          best.sum_rate = r;
          best.ris = f;
          best.assignment = IMat::Zero(k_users, n_sub);
          best.powers = RMat::Zero(k_users, n_sub);
          for (Eigen::Index sc = 0; sc < n_sub; ++sc) {
            const int o = owner[static_cast<std::size_t>(sc)];
            const int l = level[static_cast<std::size_t>(sc)];
            if (o > 0 && l > 0) {
              best.assignment(o - 1, sc) = 1;
              best.powers(o - 1, sc) = std::min(pr.budgets(o - 1), pr.budgets(o - 1) * l / (power_levels - 1));
            }
          }
        }
      } while (advance(level, power_levels));
    } while (advance(owner, static_cast<int>(k_users) + 1));
  } while (advance(phase, phase_levels));
  best.duals = RVec::Zero(k_users);
  best.trace.push_back(best.sum_rate);
  return best;
}

/// 1: one RIS pass then one allocation pass (no alternation);
/// 2: random unit-modulus RIS + dual allocation;
/// 3: random RIS, assignment and powers.
inline UlSolution benchmark_ul(const UlProblem& pr, int which, Rng& rng, const UlSettings& s = {}) {
  pr.validate();
  const auto n = pr.elements(), k_users = pr.users(), n_sub = pr.subcarriers();
  auto random_ris = [&] {
    CVec f(n);
    for (Eigen::Index i = 0; i < n; ++i) f(i) = std::polar(1.0, uniform(rng, 0.0, 2.0 * kPi));
    return f;
  };
  switch (which) {
    case 1: {
      UlSettings one = s;
      one.max_outer = 1;
      const CVec f0 = aggregate_init(pr);
      return alternating_optimize_ul(pr, one, &f0);
    }
    case 2: {
      const CVec f = random_ris();
      UlSolution sol = detail::with_allocation(f, dual_subcarrier_power(gain_table(f, pr), pr.budgets, s.dual));
      sol.trace.push_back(sol.sum_rate);
      return sol;
    }
    case 3: {
      UlSolution sol;
      sol.ris = random_ris();
      sol.assignment = IMat::Zero(k_users, n_sub);
      sol.powers = RMat::Zero(k_users, n_sub);
      std::uniform_int_distribution<Eigen::Index> pick(0, k_users - 1);
      for (Eigen::Index sc = 0; sc < n_sub; ++sc) {
        const Eigen::Index k = pick(rng);
        sol.assignment(k, sc) = 1;
        sol.powers(k, sc) = uniform(rng);
      }
      for (Eigen::Index k = 0; k < k_users; ++k) {
        const double total = sol.powers.row(k).sum();
        if (total > 0.0) sol.powers.row(k) *= pr.budgets(k) / total;
      }
      sol.duals = RVec::Zero(k_users);
      sol.sum_rate = sum_rate_ul(sol, pr);
      sol.trace.push_back(sol.sum_rate);
      return sol;
    }
    default:
      throw Error(ErrorCode::ConfigInvalid, "benchmark index must be 1, 2 or 3");
  }
}

}  // namespace trtc::ul
