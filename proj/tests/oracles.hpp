// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reference computations written independently of the library code paths
// they check: direct loops, quadrature, exhaustive search.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "trtc/trtc.hpp"

namespace oracle {

using trtc::cplx;
using trtc::kPi;

/// (1/T) * integral of U(t) e^{-j 2 pi l t / T} over one period, by adaptive
/// Gauss-Kronrod on each smooth piece of the on-interval.
inline cplx harmonic_by_quadrature(double t_on, double tau, double period, int l) {
  const double w = 2.0 * kPi * l / period;
  auto piece = [&](double a, double b) {
    if (b <= a) return cplx{0.0, 0.0};
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double re = GK::integrate([&](double t) { return std::cos(w * t); }, a, b, 10, 1e-15);
    const double im = GK::integrate([&](double t) { return -std::sin(w * t); }, a, b, 10, 1e-15);
    return cplx{re, im};
  };
  const double end = t_on + tau;
  cplx acc = end <= period ? piece(t_on, end) : piece(t_on, period) + piece(0.0, end - period);
  return acc / period;
}

/// Composite trapezoid rule on [t_on, t_on + tau] with `points` nodes;
/// the integrand is periodic so no wrap handling is needed.
inline cplx harmonic_by_trapezoid(double t_on, double tau, double period, int l, int points) {
  const double w = 2.0 * kPi * l / period;
  const double h = tau / (points - 1);
  cplx acc{0.0, 0.0};
  for (int i = 0; i < points; ++i) {
    const double t = t_on + i * h;
    const double weight = (i == 0 || i == points - 1) ? 0.5 : 1.0;
    acc += weight * std::polar(1.0, -w * t);
  }
  return acc * h / period;
}

/// Sum-rate straight from the SINR definition, no matrix algebra.
inline double dl_rate(const trtc::CMat& h, const trtc::CMat& f, const trtc::RVec& p, double noise) {
  const auto k_users = h.cols();
  double total = 0.0;
  for (Eigen::Index k = 0; k < k_users; ++k) {
    double sig = 0.0, intf = 0.0;
    for (Eigen::Index j = 0; j < k_users; ++j) {
      cplx inner{0.0, 0.0};
      for (Eigen::Index n = 0; n < h.rows(); ++n) inner += std::conj(h(n, k)) * f(n, j);
      const double v = p(j) * std::norm(inner);
      (j == k ? sig : intf) += v;
    }
    total += std::log2(1.0 + sig / (intf + noise));
  }
  return total;
}

/// Water-filling over `gains` with total `budget`, by bisection on the
/// water level (independent of the sorted closed form in the library).
inline std::vector<double> water_fill(const std::vector<double>& gains, double budget) {
  std::vector<double> p(gains.size(), 0.0);
  double g_max = 0.0;
  for (double g : gains) g_max = std::max(g_max, g);
  if (g_max <= 0.0) return p;
  auto used = [&](double level) {
    double s = 0.0;
    for (double g : gains)
      if (g > 0.0) s += std::max(0.0, level - 1.0 / g);
    return s;
  };
  double lo = 0.0, hi = budget + 1.0 / g_max;
  while (used(hi) < budget) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (used(mid) < budget ? lo : hi) = mid;
  }
  for (std::size_t i = 0; i < gains.size(); ++i)
    if (gains[i] > 0.0) p[i] = std::max(0.0, hi - 1.0 / gains[i]);
  return p;
}

inline double water_fill_rate(const std::vector<double>& gains, double budget) {
  const auto p = water_fill(gains, budget);
  double r = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) r += std::log2(1.0 + p[i] * gains[i]);
  return r;
}

/// Dominant eigenvector of a Hermitian PSD matrix by power iteration.
inline trtc::CVec power_iteration(const trtc::CMat& a, int iters = 5000) {
  trtc::CVec v = trtc::CVec::Ones(a.rows()).normalized();
  for (int i = 0; i < iters; ++i) v = (a * v).normalized();
  return v;
}

/// Exhaustive quantized downlink search for N = 2, K = 2: every entry of F
/// takes `amp_levels` amplitudes j/amp_levels (j = 1..amp_levels) and
/// `phase_levels` phases, powers take levels j P / (power_levels - 1).
/// The first entry of each column is held at phase 0, which loses nothing
/// because rates depend on each column only up to a common phase.
inline double dl_brute_force(const trtc::dl::DlProblem& pr, int amp_levels, int phase_levels, int power_levels) {
  const double cap2 = pr.amplitude_cap * pr.amplitude_cap;
  std::vector<cplx> entry;
  for (int a = 1; a <= amp_levels; ++a)
    for (int ph = 0; ph < phase_levels; ++ph)
      entry.push_back(std::polar(static_cast<double>(a) / amp_levels, 2.0 * kPi * ph / phase_levels));
  std::vector<double> lead;
  for (int a = 1; a <= amp_levels; ++a) lead.push_back(static_cast<double>(a) / amp_levels);

  const trtc::CMat h = pr.channels;
  double best = 0.0;
  trtc::CMat f(2, 2);
  trtc::RVec p(2);
  for (int i0 = 0; i0 < power_levels; ++i0) {
    for (int i1 = 0; i0 + i1 < power_levels; ++i1) {
      p << pr.power_budget * i0 / (power_levels - 1), pr.power_budget * i1 / (power_levels - 1);
      for (double a00 : lead) {
        for (double a01 : lead) {
          if (a00 * a00 * p(0) + a01 * a01 * p(1) > cap2 * (1.0 + 1e-12)) continue;
          // cross terms <h_k, f_j> split into the fixed lead part and the varying second entry
          for (const cplx& e10 : entry) {
            for (const cplx& e11 : entry) {
              if (std::norm(e10) * p(0) + std::norm(e11) * p(1) > cap2 * (1.0 + 1e-12)) continue;
              f << a00, a01, e10, e11;
              best = std::max(best, dl_rate(h, f, p, pr.noise_power));
            }
          }
        }
      }
    }
  }
  return best;
}

/// Nearest constellation point by exhaustive distance scan.
inline int nearest_psk(cplx y, int m) {
  int best = 0;
  double d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k) {
    const double dk = std::norm(y - trtc::tma::psk_point(k, m));
    if (dk < d) d = dk, best = k;
  }
  return best;
}

}  // namespace oracle
