// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>

#include "trtc/core.hpp"

namespace trtc {

struct AscentSettings {
  double armijo_beta = 0.5;
  double armijo_c = 1e-4;
  double tol = 1e-6;  // stop when the accepted step is this small relative to |x|
  int max_steps = 500;
  int max_backtracks = 60;
};

struct AscentResult {
  double value = 0.0;
  int steps = 0;
  double step_size = 1.0;
};

/// Real inner product <a, b> = Re tr(a^H b), for real or complex Eigen types.
template <typename A, typename B>
double real_inner(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return std::real(a.conjugate().cwiseProduct(b).sum());
}

/// Projected gradient ascent with Armijo backtracking on a concave
/// objective over a convex set. `x` must be feasible on entry and stays
/// feasible; only steps that pass the Armijo test are taken, so the
/// objective never decreases.
///
/// `objective(x)` may return -inf outside its domain. `gradient(x)` returns
/// the real gradient in the same shape as x (for complex x, 2 d/dx*).
template <typename Mat, typename Obj, typename Grad, typename Proj>
AscentResult projected_ascent(Mat& x, Obj&& objective, Grad&& gradient, Proj&& project,
                              const AscentSettings& s, double initial_step = 1.0) {
  AscentResult out;
  double fx = objective(x);
  double alpha = initial_step;
  for (int it = 0; it < s.max_steps; ++it) {
    const Mat g = gradient(x);
    if (g.squaredNorm() == 0.0) break;
    bool accepted = false;
    Mat x_new;
    double f_new = -std::numeric_limits<double>::infinity();
    for (int bt = 0; bt < s.max_backtracks; ++bt) {
      x_new = project(Mat(x + alpha * g));
      const double decrease = real_inner(g, x_new - x);
      f_new = objective(x_new);
      if (std::isfinite(f_new) && f_new >= fx + s.armijo_c * decrease && f_new >= fx) {
        accepted = true;
        break;
      }
      alpha *= s.armijo_beta;
    }
    if (!accepted) break;
    const double moved = (x_new - x).norm();
    x = std::move(x_new);
    fx = f_new;
    ++out.steps;
    if (moved <= s.tol * std::max(1.0, x.norm())) break;
    alpha /= s.armijo_beta;  // let the step grow back after a success
  }
  out.value = fx;
  out.step_size = alpha;
  return out;
}

}  // namespace trtc
