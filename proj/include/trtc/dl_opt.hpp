// SPDX-License-Identifier: Apache-2.0
#pragma once

// Downlink sum-rate maximization for the TMA transceiver: the beamforming
// matrix F (N x K) and the user powers p (K) are optimized in alternation.
// Each block is handled by minorize-maximize steps: the rate is split into
// a difference of concave terms, the convex part is linearized at the
// current point, and the resulting concave surrogate is maximized by
// projected gradient ascent.
//
// Feasible set:
//   sum_k p_k <= P
//   sum_k |f_{n,k}|^2 p_k <= eta^2   for each element n (harmonic cap)
//   |f_{n,k}| <= 1                   (passive transmissive coefficient)

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "trtc/ascent.hpp"
#include "trtc/core.hpp"
#include "trtc/rng.hpp"

namespace trtc::dl {

struct DlProblem {
  CMat channels;               // N x K, column k is the effective channel of user k
  double noise_power = 1.0;
  double power_budget = 1.0;
  double amplitude_cap = 1.0;  // eta, per-element harmonic amplitude ceiling

  Eigen::Index elements() const { return channels.rows(); }
  Eigen::Index users() const { return channels.cols(); }

  void validate() const {
    require(noise_power > 0.0, ErrorCode::ConfigInvalid, "noise power must be positive");
    require(power_budget > 0.0, ErrorCode::ConfigInvalid, "power budget must be positive");
    require(amplitude_cap > 0.0 && amplitude_cap <= 1.0, ErrorCode::ConfigInvalid, "eta must be in (0, 1]");
    require(channels.cols() >= 1 && channels.rows() >= 1, ErrorCode::DimensionMismatch, "empty channel matrix");
  }
};

struct DlSolution {
  CMat beams;
  RVec powers;
  double sum_rate = 0.0;
  std::vector<double> trace;  // objective after each outer iteration (entry 0: init)
  int iterations = 0;
};

struct DlSettings {
  double outer_tol = 1e-4;
  int max_outer = 100;
  double block_tol = 1e-6;  // relative change that ends an F or p block
  int block_max = 30;       // MM steps per block
  AscentSettings inner{};
  int projection_rounds = 50;
  double projection_tol = 1e-9;
  int restarts = 0;
};

inline void check_dims(const CMat& beams, const RVec& powers, const DlProblem& pr) {
  require(beams.rows() == pr.elements() && beams.cols() == pr.users() && powers.size() == pr.users(),
          ErrorCode::DimensionMismatch, "F must be N x K and p must have K entries");
}

/// sum_k log2(1 + SINR_k) from the K x K gain matrix |h_k^H f_j|^2 / s2.
inline double rate_from_gains(const RMat& gain, const RVec& p) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < gain.rows(); ++k) {
    const double signal = gain(k, k) * p(k);
    const double interference = gain.row(k).dot(p) - signal;
    total += std::log2(1.0 + signal / (1.0 + interference));
  }
  return total;
}

/// K x K matrix of |h_k^H f_j|^2 / s2.
inline RMat gain_matrix(const CMat& beams, const DlProblem& pr) {
  return (pr.channels.adjoint() * beams).cwiseAbs2() / pr.noise_power;
}

inline double sum_rate_dl(const CMat& beams, const RVec& powers, const DlProblem& pr) {
  check_dims(beams, powers, pr);
  return rate_from_gains(gain_matrix(beams, pr), powers);
}

/// Largest violation of the feasible set (<= 0 when feasible).
inline double dl_violation(const CMat& beams, const RVec& powers, const DlProblem& pr) {
  double v = powers.sum() - pr.power_budget;
  v = std::max(v, -powers.minCoeff());
  const RVec row_power = beams.cwiseAbs2() * powers;
  v = std::max(v, row_power.maxCoeff() - pr.amplitude_cap * pr.amplitude_cap);
  v = std::max(v, beams.cwiseAbs().maxCoeff() - 1.0);
  return v;
}

inline bool dl_feasible(const CMat& beams, const RVec& powers, const DlProblem& pr, double tol = 1e-9) {
  return dl_violation(beams, powers, pr) <= tol;
}

/// Euclidean projection of F onto {sum_k p_k |f_nk|^2 <= eta^2, |f_nk| <= 1}
/// for fixed p. Rows decouple; each keeps its phases and solves for the
/// magnitude multiplier lambda by bisection.
inline CMat project_beams(const CMat& z, const RVec& p, double cap) {
  const double cap2 = cap * cap;
  CMat out(z.rows(), z.cols());
  for (Eigen::Index n = 0; n < z.rows(); ++n) {
    auto radii = [&](double lambda, RVec& r) {
      for (Eigen::Index k = 0; k < z.cols(); ++k) r(k) = std::min(1.0, std::abs(z(n, k)) / (1.0 + lambda * p(k)));
    };
    RVec r(z.cols());
    radii(0.0, r);
    auto load = [&](const RVec& rr) { return rr.cwiseAbs2().dot(p); };
    if (load(r) > cap2) {
      double lo = 0.0, hi = 1.0;
      radii(hi, r);
      while (load(r) > cap2) {
        hi *= 2.0;
        radii(hi, r);
      }
      for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        radii(mid, r);
        (load(r) > cap2 ? lo : hi) = mid;
      }
      radii(hi, r);
    }
    for (Eigen::Index k = 0; k < z.cols(); ++k) {
      const double mag = std::abs(z(n, k));
      out(n, k) = mag > 0.0 ? z(n, k) * (r(k) / mag) : cplx{0.0, 0.0};
    }
  }
  return out;
}

/// Projection of p onto {p >= 0, sum p <= P, sum_k |f_nk|^2 p_k <= eta^2}
/// by Dykstra's alternating projections over the halfspaces, followed by a
/// scale-down toward the origin so the result is exactly feasible.
inline RVec project_powers(const RVec& z, const RMat& row_weights, double budget, double cap, int rounds,
                           double tol) {
  const double cap2 = cap * cap;
  const Eigen::Index k = z.size();
  const Eigen::Index m = row_weights.rows();
  // constraint set: rows of row_weights (<= cap2), the budget row, p >= 0
  std::vector<RVec> normals;
  std::vector<double> bounds;
  for (Eigen::Index n = 0; n < m; ++n) {
    if (row_weights.row(n).squaredNorm() > 0.0) {
      normals.emplace_back(row_weights.row(n).transpose());
      bounds.push_back(cap2);
    }
  }
  normals.emplace_back(RVec::Ones(k));
  bounds.push_back(budget);

  RVec x = z;
  std::vector<RVec> corr(normals.size() + 1, RVec::Zero(k));
  for (int round = 0; round < rounds; ++round) {
    const RVec before = x;
    for (std::size_t i = 0; i < normals.size(); ++i) {
      const RVec y = x + corr[i];
      const double excess = normals[i].dot(y) - bounds[i];
      RVec proj = y;
      if (excess > 0.0) proj -= (excess / normals[i].squaredNorm()) * normals[i];
      corr[i] = y - proj;
      x = proj;
    }
    const RVec y = x + corr.back();
    const RVec proj = y.cwiseMax(0.0);
    corr.back() = y - proj;
    x = proj;
    if ((x - before).norm() <= tol * std::max(1.0, x.norm())) break;
  }

  x = x.cwiseMax(0.0);
  double scale = 1.0;
  if (x.sum() > budget) scale = std::min(scale, budget / x.sum());
  for (std::size_t i = 0; i + 1 < normals.size(); ++i) {
    const double load = normals[i].dot(x);
    if (load > bounds[i]) scale = std::min(scale, bounds[i] / load);
  }
  return scale * x;
}

namespace detail {

/// Channels whitened by the noise, so internal arithmetic runs at unit noise.
inline CMat whitened(const DlProblem& pr) { return pr.channels / std::sqrt(pr.noise_power); }

struct BeamSurrogate {
  const CMat& h;   // whitened N x K
  const RVec& p;
  CMat a;          // K x K, h_k^H f_j at the expansion point
  RVec denom;      // interference-plus-noise at the expansion point
  double offset;   // sum_k log2(denom_k)

  BeamSurrogate(const CMat& h_, const RVec& p_, const CMat& f0) : h(h_), p(p_) {
    a = h.adjoint() * f0;
    const Eigen::Index k = a.rows();
    denom.resize(k);
    offset = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      double d = 1.0;
      for (Eigen::Index j = 0; j < k; ++j)
        if (j != i) d += p(j) * std::norm(a(i, j));
      denom(i) = d;
      offset += std::log2(d);
    }
  }

  double value(const CMat& f) const {
    const CMat b = h.adjoint() * f;
    const Eigen::Index k = b.rows();
    double total = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      double u = 1.0, d = 1.0;
      for (Eigen::Index j = 0; j < k; ++j) {
        const double tangent = 2.0 * std::real(std::conj(a(i, j)) * b(i, j)) - std::norm(a(i, j));
        u += p(j) * tangent;
        if (j != i) d += p(j) * std::norm(b(i, j));
      }
      if (u <= 0.0) return -std::numeric_limits<double>::infinity();
      total += std::log2(u) - (d - denom(i)) / (denom(i) * kLn2);
    }
    return total - offset;
  }

  CMat gradient(const CMat& f) const {
    const CMat b = h.adjoint() * f;
    const Eigen::Index k = b.rows();
    CMat m(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      double u = 1.0;
      for (Eigen::Index j = 0; j < k; ++j)
        u += p(j) * (2.0 * std::real(std::conj(a(i, j)) * b(i, j)) - std::norm(a(i, j)));
      for (Eigen::Index j = 0; j < k; ++j) {
        cplx v = p(j) * a(i, j) / u;
        if (j != i) v -= p(j) * b(i, j) / denom(i);
        m(i, j) = v;
      }
    }
    return (2.0 / kLn2) * (h * m);
  }
};

struct PowerSurrogate {
  const RMat& gain;  // whitened |h_k^H f_j|^2
  RVec denom;
  double offset;

  PowerSurrogate(const RMat& g, const RVec& p0) : gain(g) {
    const Eigen::Index k = g.rows();
    denom.resize(k);
    offset = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      denom(i) = 1.0 + g.row(i).dot(p0) - g(i, i) * p0(i);
      offset += std::log2(denom(i));
    }
  }

  double value(const RVec& p) const {
    double total = 0.0;
    for (Eigen::Index i = 0; i < gain.rows(); ++i) {
      const double all = 1.0 + gain.row(i).dot(p);
      const double d = all - gain(i, i) * p(i);
      total += std::log2(all) - (d - denom(i)) / (denom(i) * kLn2);
    }
    return total - offset;
  }

  RVec gradient(const RVec& p) const {
    RVec g = RVec::Zero(p.size());
    for (Eigen::Index i = 0; i < gain.rows(); ++i) {
      const double all = 1.0 + gain.row(i).dot(p);
      for (Eigen::Index j = 0; j < p.size(); ++j) {
        g(j) += gain(i, j) / all;
        if (j != i) g(j) -= gain(i, j) / denom(i);
      }
    }
    return g / kLn2;
  }
};

}  // namespace detail

/// Value of the beam surrogate built at `expansion`, evaluated at `beams`.
inline double beam_surrogate_value(const CMat& expansion, const CMat& beams, const RVec& powers,
                                   const DlProblem& pr) {
  const CMat h = detail::whitened(pr);
  return detail::BeamSurrogate(h, powers, expansion).value(beams);
}

/// One minorize-maximize step on F with p fixed.
inline CMat sca_update_F(const CMat& beams, const RVec& powers, const DlProblem& pr,
                         const DlSettings& settings = {}) {
  check_dims(beams, powers, pr);
  const CMat h = detail::whitened(pr);
  const detail::BeamSurrogate sur(h, powers, beams);
  const double cap = pr.amplitude_cap;

  CMat f = beams;
  const CMat g0 = sur.gradient(f);
  const double g_norm = g0.norm();
  if (g_norm == 0.0) return f;
  projected_ascent(
      f, [&](const CMat& x) { return sur.value(x); }, [&](const CMat& x) { return sur.gradient(x); },
      [&](const CMat& x) { return project_beams(x, powers, cap); }, settings.inner,
      std::max(1.0, f.norm()) / g_norm);

  const RMat gain_old = gain_matrix(beams, pr);
  const RMat gain_new = gain_matrix(f, pr);
  const double before = rate_from_gains(gain_old, powers);
  const double after = rate_from_gains(gain_new, powers);
  require(after >= before - 1e-9, ErrorCode::SurrogateDivergence, "beam update decreased the sum-rate");
  return after >= before ? f : beams;
}

/// One minorize-maximize step on p with F fixed.
inline RVec sca_update_p(const CMat& beams, const RVec& powers, const DlProblem& pr,
                         const DlSettings& settings = {}) {
  check_dims(beams, powers, pr);
  const RMat gain = gain_matrix(beams, pr);
  const detail::PowerSurrogate sur(gain, powers);
  const RMat weights = beams.cwiseAbs2();

  RVec p = powers;
  const RVec g0 = sur.gradient(p);
  const double g_norm = g0.norm();
  if (g_norm == 0.0) return p;
  projected_ascent(
      p, [&](const RVec& x) { return sur.value(x); }, [&](const RVec& x) { return sur.gradient(x); },
      [&](const RVec& x) {
        return project_powers(x, weights, pr.power_budget, pr.amplitude_cap, settings.projection_rounds,
                              settings.projection_tol);
      },
      settings.inner, std::max(pr.power_budget, p.norm()) / g_norm);

  const double before = rate_from_gains(gain, powers);
  const double after = rate_from_gains(gain, p);
  require(after >= before - 1e-9, ErrorCode::SurrogateDivergence, "power update decreased the sum-rate");
  return after >= before ? p : powers;
}

/// Repeats MM steps on F until the relative rate change falls below block_tol.
inline CMat solve_beam_block(CMat beams, const RVec& powers, const DlProblem& pr, const DlSettings& s) {
  double rate = sum_rate_dl(beams, powers, pr);
  for (int i = 0; i < s.block_max; ++i) {
    beams = sca_update_F(beams, powers, pr, s);
    const double next = sum_rate_dl(beams, powers, pr);
    const bool done = next - rate <= s.block_tol * std::max(rate, 1e-12);
    rate = next;
    if (done) break;
  }
  return beams;
}

inline RVec solve_power_block(const CMat& beams, RVec powers, const DlProblem& pr, const DlSettings& s) {
  double rate = sum_rate_dl(beams, powers, pr);
  for (int i = 0; i < s.block_max; ++i) {
    powers = sca_update_p(beams, powers, pr, s);
    const double next = sum_rate_dl(beams, powers, pr);
    const bool done = next - rate <= s.block_tol * std::max(rate, 1e-12);
    rate = next;
    if (done) break;
  }
  return powers;
}

/// F0 = H (H^H H)^{-1}, scaled by the largest common factor that keeps
/// every element within its caps under equal power P / K.
inline CMat zf_beamforming(const CMat& channels, double power_budget = 1.0, double amplitude_cap = 1.0) {
  const Eigen::Index n = channels.rows(), k = channels.cols();
  require(n >= k, ErrorCode::RankDeficient, "zero forcing needs N >= K");
  const CMat gram = channels.adjoint() * channels;
  Eigen::FullPivLU<CMat> lu(gram);
  lu.setThreshold(1e-12);
  require(lu.rank() == k, ErrorCode::RankDeficient, "channel matrix is rank deficient");
  const CMat f0 = channels * lu.inverse();

  const double p_each = power_budget / static_cast<double>(k);
  const RVec row_power = f0.cwiseAbs2().rowwise().sum() * p_each;
  double scale = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    if (row_power(i) > 0.0) scale = std::min(scale, amplitude_cap / std::sqrt(row_power(i)));
  const double peak = f0.cwiseAbs().maxCoeff();
  if (peak > 0.0) scale = std::min(scale, 1.0 / peak);
  return scale * f0;
}

inline RVec equal_powers(const DlProblem& pr) {
  return RVec::Constant(pr.users(), pr.power_budget / static_cast<double>(pr.users()));
}

struct DlInit {
  CMat beams;
  RVec powers;
};

inline DlInit default_init(const DlProblem& pr) {
  return {zf_beamforming(pr.channels, pr.power_budget, pr.amplitude_cap), equal_powers(pr)};
}

inline DlInit random_feasible(const DlProblem& pr, Rng& rng) {
  const Eigen::Index n = pr.elements(), k = pr.users();
  RVec p(k);
  for (Eigen::Index i = 0; i < k; ++i) p(i) = uniform(rng);
  p *= pr.power_budget / std::max(p.sum(), 1e-300);
  CMat f(n, k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) f(i, j) = std::polar(uniform(rng), uniform(rng, 0.0, 2.0 * kPi));
  // shrink rows that exceed the harmonic cap
  const double cap2 = pr.amplitude_cap * pr.amplitude_cap;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double load = f.row(i).cwiseAbs2().dot(p.transpose());
    if (load > cap2) f.row(i) *= std::sqrt(cap2 / load);
  }
  return {f, p};
}

namespace detail {

inline DlSolution run_alternating(const DlProblem& pr, DlInit init, const DlSettings& s) {
  DlSolution sol;
  sol.beams = std::move(init.beams);
  sol.powers = std::move(init.powers);
  double rate = sum_rate_dl(sol.beams, sol.powers, pr);
  sol.trace.push_back(rate);
  for (int it = 0; it < s.max_outer; ++it) {
    sol.beams = solve_beam_block(sol.beams, sol.powers, pr, s);
    sol.powers = solve_power_block(sol.beams, sol.powers, pr, s);
    const double next = sum_rate_dl(sol.beams, sol.powers, pr);
    sol.trace.push_back(next);
    sol.iterations = it + 1;
    const bool done = std::abs(next - rate) <= s.outer_tol * std::max(rate, 1e-12);
    rate = next;
    if (done) break;
  }
  sol.sum_rate = rate;
  return sol;
}

}  // namespace detail

/// Alternating F / p optimization from `init` (ZF + equal power by default).
/// With restarts > 0, extra random feasible starts are tried and the best
/// run is returned.
inline DlSolution alternating_optimize_dl(const DlProblem& pr, const DlSettings& s = {},
                                          const DlInit* init = nullptr, Rng* restart_rng = nullptr) {
  pr.validate();
  DlSolution best = detail::run_alternating(pr, init ? *init : default_init(pr), s);
  if (s.restarts > 0) {
    require(restart_rng != nullptr, ErrorCode::ConfigInvalid, "random restarts need an rng");
    for (int r = 0; r < s.restarts; ++r) {
      DlSolution cand = detail::run_alternating(pr, random_feasible(pr, *restart_rng), s);
      if (cand.sum_rate > best.sum_rate) best = std::move(cand);
    }
  }
  return best;
}

/// 1: proposed beam design with equal power; 2: ZF with equal power;
/// 3: random feasible beams and powers.
inline DlSolution benchmark_dl(const DlProblem& pr, int which, Rng& rng, const DlSettings& s = {}) {
  pr.validate();
  DlSolution sol;
  switch (which) {
    case 1: {
      const DlInit init = default_init(pr);
      sol.powers = init.powers;
      sol.trace.push_back(sum_rate_dl(init.beams, init.powers, pr));
      sol.beams = solve_beam_block(init.beams, init.powers, pr, s);
      sol.iterations = 1;
      break;
    }
    case 2: {
      const DlInit init = default_init(pr);
      sol.beams = init.beams;
      sol.powers = init.powers;
      break;
    }
    case 3: {
      const DlInit init = random_feasible(pr, rng);
      sol.beams = init.beams;
      sol.powers = init.powers;
      break;
    }
    default:
      throw Error(ErrorCode::ConfigInvalid, "benchmark index must be 1, 2 or 3");
  }
  sol.sum_rate = sum_rate_dl(sol.beams, sol.powers, pr);
  sol.trace.push_back(sol.sum_rate);
  return sol;
}

}  // namespace trtc::dl
