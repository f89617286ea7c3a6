// SPDX-License-Identifier: Apache-2.0
#pragma once

// Channel estimation: Lloyd codebooks with index feedback for the downlink,
// LS / MMSE pilot estimation, and cascaded-channel recovery for the uplink
// through a fully passive surface.

#include <algorithm>
#include <numeric>
#include <vector>

#include "trtc/core.hpp"
#include "trtc/rng.hpp"

namespace trtc::chanest {

/// B unit-norm codewords stored as the columns of an N x B matrix.
struct Codebook {
  CMat entries;

  Eigen::Index size() const { return entries.cols(); }
  Eigen::Index dimension() const { return entries.rows(); }
};

struct LloydResult {
  Codebook codebook;
  std::vector<double> distortion;  // mean chordal distance^2, one per iteration
  int iterations = 0;
};

/// Chordal distance squared: 1 - |u^H v|^2 / (|u|^2 |v|^2).
inline double chordal_distance_sq(const CVec& u, const CVec& v) {
  const double nu = u.squaredNorm(), nv = v.squaredNorm();
  if (nu == 0.0 || nv == 0.0) return 1.0;
  return 1.0 - std::norm(u.dot(v)) / (nu * nv);
}

inline CVec principal_eigenvector(const CMat& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian);
  return es.eigenvectors().col(hermitian.rows() - 1);
}

/// Generalized Lloyd iteration under the chordal distance. Training
/// samples are the columns of `training`.
inline LloydResult lloyd_codebook(const CMat& training, int entries, int max_iter, double tol, Rng& rng) {
  const Eigen::Index m = training.cols();
  require(m >= 1, ErrorCode::EmptyTraining, "training set is empty");
  require(entries >= 1 && m >= entries, ErrorCode::EmptyTraining, "training set smaller than codebook");

  CMat samples(training.rows(), m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double nrm = training.col(i).norm();
    require(nrm > 0.0, ErrorCode::EmptyTraining, "training contains a zero vector");
    samples.col(i) = training.col(i) / nrm;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  LloydResult out;
  CMat& cb = out.codebook.entries;
  cb.resize(training.rows(), entries);
  for (int b = 0; b < entries; ++b) cb.col(b) = samples.col(order[static_cast<std::size_t>(b)]);

  std::vector<int> assignment(static_cast<std::size_t>(m));
  RVec fit(m);
  for (int it = 0; it < max_iter; ++it) {
    // nearest-codeword assignment
    const CMat corr = cb.adjoint() * samples;  // B x M
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::Index best = 0;
      double best_val = -1.0;
      for (Eigen::Index b = 0; b < entries; ++b) {
        const double v = std::norm(corr(b, i));
        if (v > best_val) best_val = v, best = b;
      }
      assignment[static_cast<std::size_t>(i)] = static_cast<int>(best);
      fit(i) = std::max(0.0, 1.0 - best_val);
      total += fit(i);
    }
    const double d = total / static_cast<double>(m);
    out.distortion.push_back(d);
    out.iterations = it + 1;
    if (d == 0.0) break;
    if (it > 0) {
      const double prev = out.distortion[out.distortion.size() - 2];
      if ((prev - d) <= tol * prev) break;
    }

    // centroid update: principal eigenvector of each cluster's scatter
    std::vector<CMat> scatter(static_cast<std::size_t>(entries), CMat::Zero(cb.rows(), cb.rows()));
    std::vector<int> count(static_cast<std::size_t>(entries), 0);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto b = static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)]);
      scatter[b].noalias() += samples.col(i) * samples.col(i).adjoint();
      ++count[b];
    }
    std::vector<Eigen::Index> worst(static_cast<std::size_t>(m));
    std::iota(worst.begin(), worst.end(), Eigen::Index{0});
    std::stable_sort(worst.begin(), worst.end(), [&](auto a, auto b) { return fit(a) > fit(b); });
    std::size_t next_worst = 0;
    for (int b = 0; b < entries; ++b) {
      if (count[static_cast<std::size_t>(b)] > 0) {
        cb.col(b) = principal_eigenvector(scatter[static_cast<std::size_t>(b)]);
      } else {
        cb.col(b) = samples.col(worst[next_worst++]);
      }
    }
  }
  return out;
}

/// Index of the codeword with the largest |c^H h|; ties go to the lowest index.
inline Eigen::Index quantize_channel(const CVec& h, const Codebook& cb) {
  require(h.size() == cb.dimension(), ErrorCode::DimensionMismatch, "channel/codebook dimension mismatch");
  require(h.squaredNorm() > 0.0, ErrorCode::ZeroChannel, "cannot quantize a zero channel");
  Eigen::Index best = 0;
  double best_val = -1.0;
  for (Eigen::Index b = 0; b < cb.size(); ++b) {
    const double v = std::abs(cb.entries.col(b).dot(h));
    if (v > best_val) best_val = v, best = b;
  }
  return best;
}

/// Pilots X (T x N) and observations Y = X H + noise (T x M).
struct PilotBlock {
  CMat pilots;
  CMat received;
  double noise_power = 0.0;
};

inline void check_pilots(const PilotBlock& p) {
  require(p.pilots.rows() == p.received.rows(), ErrorCode::DimensionMismatch, "X and Y need equal row counts");
}

/// Least squares: (X^H X)^{-1} X^H Y.
inline CMat ls_estimate(const PilotBlock& p) {
  check_pilots(p);
  require(p.pilots.rows() >= p.pilots.cols(), ErrorCode::RankDeficient, "need T >= N pilots");
  Eigen::ColPivHouseholderQR<CMat> qr(p.pilots);
  require(qr.rank() == p.pilots.cols(), ErrorCode::RankDeficient, "pilot matrix is rank deficient");
  return qr.solve(p.received);
}

/// Linear MMSE for columns with prior covariance R: R X^H (X R X^H + s2 I)^{-1} Y.
inline CMat mmse_estimate(const PilotBlock& p, const CMat& prior) {
  check_pilots(p);
  require(prior.rows() == p.pilots.cols() && prior.cols() == p.pilots.cols(), ErrorCode::DimensionMismatch,
          "prior covariance must be N x N");
  require(prior.isApprox(prior.adjoint(), 1e-9) || prior.isZero(), ErrorCode::SingularSystem,
          "prior covariance must be Hermitian");
  if (prior.rows() > 0 && !prior.isZero()) {
    Eigen::SelfAdjointEigenSolver<CMat> es(prior, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -1e-9 * std::max(1.0, es.eigenvalues().maxCoeff()),
            ErrorCode::SingularSystem, "prior covariance is not positive semidefinite");
  }
  const Eigen::Index t = p.pilots.rows();
  const CMat a = p.pilots * prior * p.pilots.adjoint() + p.noise_power * CMat::Identity(t, t);
  Eigen::FullPivLU<CMat> lu(a);
  require(lu.isInvertible(), ErrorCode::SingularSystem, "X R X^H + s2 I is singular");
  return prior * p.pilots.adjoint() * lu.solve(p.received);
}

/// Unit-modulus DFT patterns: row t is the surface setting during pilot t,
/// entry (t, n) = e^{-j 2 pi t n / T}. Columns are orthogonal for T >= N.
inline CMat dft_patterns(int t, int n) {
  CMat phi(t, n);
  for (int r = 0; r < t; ++r)
    for (int c = 0; c < n; ++c)
      phi(r, c) = std::polar(1.0, -2.0 * kPi * static_cast<double>((static_cast<long>(r) * c) % t) / t);
  return phi;
}

/// LS estimate of the cascaded vector c (c_n = g_n h_n) from
/// y_t = pilot_t * sum_n phi(t, n) c_n + noise.
inline CVec cascaded_ul_estimate(const CVec& received, const CVec& pilot, const CMat& patterns) {
  require(received.size() == patterns.rows() && pilot.size() == patterns.rows(), ErrorCode::DimensionMismatch,
          "received, pilot and pattern rows must agree");
  PilotBlock block{pilot.asDiagonal() * patterns, received, 0.0};
  return ls_estimate(block).col(0);
}

struct SeparatedChannel {
  CVec h;                      // zero where not recoverable
  std::vector<bool> recovered;
};

/// h_n = c_n / g_n wherever |g_n| >= floor.
inline SeparatedChannel separate_cascaded(const CVec& cascaded, const CVec& g, double floor) {
  require(cascaded.size() == g.size(), ErrorCode::DimensionMismatch, "cascaded and g lengths differ");
  SeparatedChannel out{CVec::Zero(g.size()), std::vector<bool>(static_cast<std::size_t>(g.size()), false)};
  bool any = false;
  for (Eigen::Index n = 0; n < g.size(); ++n) {
    if (std::abs(g(n)) >= floor && std::abs(g(n)) > 0.0) {
      out.h(n) = cascaded(n) / g(n);
      out.recovered[static_cast<std::size_t>(n)] = true;
      any = true;
    }
  }
  require(any, ErrorCode::AllBelowFloor, "no element of g clears the recovery floor");
  return out;
}

inline double default_recovery_floor(const CVec& g) { return 1e-3 * g.cwiseAbs().maxCoeff(); }

}  // namespace trtc::chanest
