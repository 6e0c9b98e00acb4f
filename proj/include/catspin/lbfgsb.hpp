//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Limited-memory BFGS with simple bounds. The search direction is the
// two-loop L-BFGS direction restricted to the free variables (those not
// pinned at a bound by the gradient); steps are projected onto the box and
// accepted with a backtracking Armijo test along the projected path.

#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "catspin/errors.hpp"

namespace catspin::optim {

struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Bounds unbounded(Eigen::Index n) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf)};
  }

  Eigen::VectorXd project(const Eigen::VectorXd &x) const {
    return x.cwiseMax(lower).cwiseMin(upper);
  }
};

struct Options {
  int memory = 10;
  int max_iterations = 500;
  /// infinity norm of the projected gradient
  double gtol = 1e-9;
  /// |f_k - f_{k+1}| below ftol for `stall_window` consecutive iterations
  double ftol = 1e-12;
  int stall_window = 5;
  int max_backtracks = 40;
  double armijo = 1e-4;
};

enum class StopReason { GradientTolerance, Stalled, LineSearchFailed, MaxIterations };

struct Result {
  Eigen::VectorXd x;
  double f = 0;
  int iterations = 0;
  bool converged = false;
  StopReason reason = StopReason::MaxIterations;
  /// f at the start and after every accepted iteration (non-increasing)
  std::vector<double> history;
};

namespace detail {
  inline double projected_gradient_norm(const Eigen::VectorXd &x, const Eigen::VectorXd &g,
                                        const Bounds &b) {
    return (b.project(x - g) - x).lpNorm<Eigen::Infinity>();
  }

  /// 1 for variables free to move, 0 for those held at a bound.
  inline Eigen::VectorXd free_mask(const Eigen::VectorXd &x, const Eigen::VectorXd &g,
                                   const Bounds &b) {
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if ((x[i] <= b.lower[i] && g[i] > 0) || (x[i] >= b.upper[i] && g[i] < 0))
        mask[i] = 0;
    }
    return mask;
  }

  struct Pair {
    Eigen::VectorXd s, y;
    double rho;
  };

  inline Eigen::VectorXd two_loop(const Eigen::VectorXd &g, const std::deque<Pair> &memory,
                                  const Eigen::VectorXd &mask) {
    Eigen::VectorXd q = g.cwiseProduct(mask);
    std::vector<double> alpha(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      alpha[k] = memory[k].rho * memory[k].s.cwiseProduct(mask).dot(q);
      q -= alpha[k] * memory[k].y.cwiseProduct(mask);
    }
    if (!memory.empty()) {
      const auto &last = memory.back();
      const double yy = last.y.cwiseProduct(mask).squaredNorm();
      const double sy = last.s.cwiseProduct(mask).dot(last.y.cwiseProduct(mask));
      if (yy > 0 && sy > 0)
        q *= sy / yy;
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const double beta = memory[k].rho * memory[k].y.cwiseProduct(mask).dot(q);
      q += (alpha[k] - beta) * memory[k].s.cwiseProduct(mask);
    }
    return -q.cwiseProduct(mask);
  }
}  // namespace detail

/// Minimizes `f` over the box. `grad(x, fx)` returns the gradient at x.
template <typename Objective, typename Gradient>
Result minimize(Objective &&f, Gradient &&grad, Eigen::VectorXd x0, const Bounds &bounds,
                const Options &opt = {}) {
  if (bounds.lower.size() != x0.size() || bounds.upper.size() != x0.size())
    throw ArgumentError("minimize: bounds and x0 sizes differ");

  Result r;
  Eigen::VectorXd x = bounds.project(x0);
  double fx = f(x);
  r.history.push_back(fx);
  if (x.size() == 0) {
    r.x = x;
    r.f = fx;
    r.converged = true;
    r.reason = StopReason::GradientTolerance;
    return r;
  }
  Eigen::VectorXd g = grad(x, fx);
  std::deque<detail::Pair> memory;
  int stall = 0;

  for (r.iterations = 0; r.iterations < opt.max_iterations; ++r.iterations) {
    if (detail::projected_gradient_norm(x, g, bounds) < opt.gtol) {
      r.converged = true;
      r.reason = StopReason::GradientTolerance;
      break;
    }

    const Eigen::VectorXd mask = detail::free_mask(x, g, bounds);
    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = fx;

    // Quasi-Newton direction first; on failure fall back to steepest descent.
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) {
        if (memory.empty())
          break;
        memory.clear();
      }
      Eigen::VectorXd d = detail::two_loop(g, memory, mask);
      if (g.dot(d) >= 0) {
        memory.clear();
        d = -g.cwiseProduct(mask);
      }
      double t = 1.0;
      if (memory.empty())
        t = std::min(1.0, 1.0 / std::max(1e-12, d.lpNorm<Eigen::Infinity>()));
      for (int bt = 0; bt < opt.max_backtracks; ++bt, t *= 0.5) {
        x_new = bounds.project(x + t * d);
        const double decrease = g.dot(x_new - x);
        if (decrease >= 0)
          continue;
        f_new = f(x_new);
        if (f_new <= fx + opt.armijo * decrease) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      // no descent left at floating-point resolution
      r.converged = true;
      r.reason = StopReason::LineSearchFailed;
      break;
    }

    const Eigen::VectorXd g_new = grad(x_new, f_new);
    detail::Pair p{x_new - x, g_new - g, 0.0};
    const double sy = p.s.dot(p.y);
    if (sy > 1e-12 * p.y.squaredNorm() && sy > 0) {
      p.rho = 1.0 / sy;
      memory.push_back(std::move(p));
      if (static_cast<int>(memory.size()) > opt.memory)
        memory.pop_front();
    }

    stall = (std::abs(fx - f_new) < opt.ftol) ? stall + 1 : 0;
    x = std::move(x_new);
    g = g_new;
    fx = f_new;
    r.history.push_back(fx);
    if (stall >= opt.stall_window) {
      ++r.iterations;
      r.converged = true;
      r.reason = StopReason::Stalled;
      break;
    }
  }
  r.x = x;
  r.f = fx;
  return r;
}

/// Central differences with step h_i = rel_step * max(1, |x_i|).
template <typename Objective>
Eigen::VectorXd central_difference_gradient(Objective &&f, const Eigen::VectorXd &x,
                                            double rel_step = 1e-6) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

}  // namespace catspin::optim
