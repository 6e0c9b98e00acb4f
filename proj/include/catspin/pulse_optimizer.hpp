//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Search for (Q_k, mu_k) sequences that drive the x-polarized coherent spin
// state |pi/2, 0> onto a target cat state.
//
// Two parametrizations:
//   Free         x = (Q_1..Q_n, mu_1..mu_n), Q_k >= 0, mu_k in [-pi, pi]
//   FixedBudget  x = (w_1..w_{n-1}, mu_1..mu_n), Q_k = (Q~/sqrt(N)) softmax(w, 0)_k
// so the normalized shearing strength sqrt(N) sum Q_k equals Q~ by
// construction.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catspin/dynamics.hpp"
#include "catspin/errors.hpp"
#include "catspin/lbfgsb.hpp"
#include "catspin/parallel.hpp"
#include "catspin/spin_core.hpp"

namespace catspin {

enum class BudgetMode { Free, FixedBudget };

inline const char *to_string(BudgetMode mode) {
  return mode == BudgetMode::Free ? "free" : "fixed_budget";
}

struct OptimizationProblem {
  int n_atoms = 20;
  CatSpec target = CatSpec::symmetric(std::numbers::pi / 2);
  int n_pulses = 3;
  BudgetMode mode = BudgetMode::Free;
  /// normalized budget Q~, used in FixedBudget mode
  double q_tilde = 1.0;
  std::uint64_t seed = 1;
  int max_iterations = 1000;
  int restarts = 8;
  /// extra starting points, front-padded with zero pulses to n_pulses
  std::vector<PulseSequence> warm_starts;
  /// threads for concurrent restarts, <= 0 for one per hardware thread
  int workers = 0;
  double fd_step = 1e-6;
};

struct OptimizationResult {
  PulseSequence sequence;
  double infidelity = 1.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
  int best_restart = 0;
  /// final infidelity of every restart, warm starts last
  std::vector<double> restart_infidelities;
};

/// Initial state of every preparation: all spins along +x.
inline DickeState initial_css(int n_atoms) {
  return make_css(n_atoms, std::numbers::pi / 2, 0.0);
}

/// eps = 1 - |<target| U(seq) |pi/2, 0>|^2, computed in the full Dicke space.
inline double infidelity(int n_atoms, const CatSpec &target, const PulseSequence &seq) {
  const DickeState goal = make_cat(n_atoms, target);
  const DickeState reached = propagate_sequence(initial_css(n_atoms), seq);
  return std::clamp(1.0 - fidelity(goal, reached), 0.0, 1.0);
}

namespace detail {
  inline constexpr double kSoftmaxBound = 50.0;

  /// Maps optimizer coordinates to pulse sequences for one problem.
  class ParameterMap {
  public:
    ParameterMap(int n_atoms, int n_pulses, BudgetMode mode, double q_tilde)
        : n_(n_pulses), mode_(mode), budget_(q_tilde / std::sqrt(double(n_atoms))) {
      if (mode == BudgetMode::FixedBudget && !(q_tilde > 0))
        throw ArgumentError("FixedBudget mode requires q_tilde > 0");
    }

    int n_pulses() const { return n_; }
    int n_shear_coords() const { return mode_ == BudgetMode::Free ? n_ : std::max(0, n_ - 1); }
    int size() const { return n_shear_coords() + n_; }

    optim::Bounds bounds() const {
      optim::Bounds b = optim::Bounds::unbounded(size());
      for (int k = 0; k < n_shear_coords(); ++k) {
        if (mode_ == BudgetMode::Free) {
          b.lower[k] = 0.0;
        } else {
          b.lower[k] = -kSoftmaxBound;
          b.upper[k] = kSoftmaxBound;
        }
      }
      for (int k = 0; k < n_; ++k) {
        b.lower[n_shear_coords() + k] = -std::numbers::pi;
        b.upper[n_shear_coords() + k] = std::numbers::pi;
      }
      return b;
    }

    PulseSequence to_sequence(const Eigen::VectorXd &x) const {
      std::vector<Pulse> pulses(n_);
      const int shift = n_shear_coords();
      for (int k = 0; k < n_; ++k)
        pulses[k].mu = x[shift + k];
      if (mode_ == BudgetMode::Free) {
        for (int k = 0; k < n_; ++k)
          pulses[k].q = x[k];
      } else if (n_ > 0) {
        // w_n = 0; shift by the max for a stable softmax
        double w_max = 0.0;
        for (int k = 0; k < n_ - 1; ++k)
          w_max = std::max(w_max, x[k]);
        std::vector<double> e(n_);
        double total = 0;
        for (int k = 0; k < n_; ++k) {
          e[k] = std::exp((k < n_ - 1 ? x[k] : 0.0) - w_max);
          total += e[k];
        }
        for (int k = 0; k < n_; ++k)
          pulses[k].q = budget_ * e[k] / total;
      }
      return PulseSequence(std::move(pulses));
    }

    /// Inverse of to_sequence where representable; zero shears in fixed
    /// mode map to the softmax floor.
    Eigen::VectorXd from_sequence(const PulseSequence &seq) const {
      Eigen::VectorXd x(size());
      const int shift = n_shear_coords();
      for (int k = 0; k < n_; ++k)
        x[shift + k] = std::remainder(seq[k].mu, 2 * std::numbers::pi);
      if (mode_ == BudgetMode::Free) {
        for (int k = 0; k < n_; ++k)
          x[k] = std::max(0.0, seq[k].q);
      } else if (n_ > 0) {
        const double last = std::max(seq[n_ - 1].q, 1e-300);
        for (int k = 0; k < n_ - 1; ++k) {
          const double w = std::log(std::max(seq[k].q, 1e-300)) - std::log(last);
          x[k] = std::clamp(w, -kSoftmaxBound, kSoftmaxBound);
        }
      }
      return x;
    }

  private:
    int n_;
    BudgetMode mode_;
    double budget_;
  };

  /// Infidelity evaluated in the symmetric sector when the target allows it.
  class InfidelityEvaluator {
  public:
    InfidelityEvaluator(int n_atoms, const CatSpec &target)
        : n_atoms_(n_atoms), target_(make_cat(n_atoms, target)) {
      const DickeState start = initial_css(n_atoms);
      if (target_.symmetry_defect() <= kSymmetryInputTolerance) {
        sym_start_ = symmetric_roundtrip(start);
        sym_target_ = symmetric_roundtrip(target_);
      }
    }

    double operator()(const PulseSequence &seq) const {
      double f;
      if (sym_start_) {
        f = fidelity(*sym_target_, propagate_sequence(*sym_start_, seq));
      } else {
        f = fidelity(target_, propagate_sequence(initial_css(n_atoms_), seq));
      }
      return std::clamp(1.0 - f, 0.0, 1.0);
    }

  private:
    int n_atoms_;
    DickeState target_;
    std::optional<SymmetricState> sym_start_;
    std::optional<SymmetricState> sym_target_;
  };
}  // namespace detail

/// Central-difference gradient of eps in the problem's coordinates (length
/// 2n for Free, 2n-1 for FixedBudget).
inline Eigen::VectorXd gradient_fd(const OptimizationProblem &problem, const PulseSequence &seq) {
  const detail::ParameterMap map(problem.n_atoms, problem.n_pulses, problem.mode, problem.q_tilde);
  const detail::InfidelityEvaluator eval(problem.n_atoms, problem.target);
  if (static_cast<int>(seq.size()) != problem.n_pulses)
    throw ArgumentError("gradient_fd: sequence length differs from n_pulses");
  auto f = [&](const Eigen::VectorXd &x) { return eval(map.to_sequence(x)); };
  return optim::central_difference_gradient(f, map.from_sequence(seq), problem.fd_step);
}

namespace detail {
  inline Eigen::VectorXd initial_point(const OptimizationProblem &problem, const ParameterMap &map,
                                       int restart) {
    const int n = problem.n_pulses;
    const double sqrt_n = std::sqrt(double(problem.n_atoms));
    std::vector<Pulse> pulses(n);
    if (restart == 0) {
      // shear once, then a quarter turn to stand the anti-squeezed axis along z
      const double q_tilde = problem.mode == BudgetMode::FixedBudget
                                 ? problem.q_tilde
                                 : std::max(0.5, problem.target.theta2 - problem.target.theta1);
      if (problem.mode == BudgetMode::FixedBudget) {
        for (int k = 0; k < n; ++k)
          pulses[k].q = (k == 0 ? 0.99 : 0.01 / std::max(1, n - 1)) * q_tilde / sqrt_n;
      } else {
        pulses[0].q = q_tilde / sqrt_n;
      }
      pulses[0].mu = std::numbers::pi / 2;
      return map.from_sequence(PulseSequence(std::move(pulses)));
    }

    std::seed_seq seq{problem.seed, static_cast<std::uint64_t>(restart)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::exponential_distribution<double> simplex(1.0);
    std::uniform_real_distribution<double> budget(0.5, 3.0);
    std::vector<double> weights(n);
    double total = 0;
    for (auto &w : weights)
      total += (w = simplex(rng));
    const double q_tilde =
        problem.mode == BudgetMode::FixedBudget ? problem.q_tilde : budget(rng);
    for (int k = 0; k < n; ++k) {
      pulses[k].q = q_tilde / sqrt_n * weights[k] / total;
      pulses[k].mu = angle(rng);
    }
    return map.from_sequence(PulseSequence(std::move(pulses)));
  }
}  // namespace detail

inline OptimizationResult optimize(const OptimizationProblem &problem) {
  if (problem.n_pulses < 0)
    throw ArgumentError("optimize: n_pulses must be >= 0");
  if (problem.restarts < 1)
    throw ArgumentError("optimize: restarts must be >= 1");
  if (problem.max_iterations < 0)
    throw ArgumentError("optimize: max_iterations must be >= 0");

  const detail::ParameterMap map(problem.n_atoms, problem.n_pulses, problem.mode, problem.q_tilde);
  const detail::InfidelityEvaluator eval(problem.n_atoms, problem.target);

  OptimizationResult best;
  if (problem.n_pulses == 0) {
    best.infidelity = eval(PulseSequence{});
    best.history = {best.infidelity};
    best.converged = true;
    best.restart_infidelities = {best.infidelity};
    return best;
  }

  std::vector<Eigen::VectorXd> starts;
  for (int r = 0; r < problem.restarts; ++r)
    starts.push_back(detail::initial_point(problem, map, r));
  for (const auto &warm : problem.warm_starts) {
    if (static_cast<int>(warm.size()) > problem.n_pulses)
      throw ArgumentError("optimize: warm start longer than n_pulses");
    starts.push_back(map.from_sequence(warm.padded_front(problem.n_pulses)));
  }

  optim::Options opts;
  opts.max_iterations = problem.max_iterations;
  const optim::Bounds bounds = map.bounds();
  auto objective = [&](const Eigen::VectorXd &x) { return eval(map.to_sequence(x)); };
  auto gradient = [&](const Eigen::VectorXd &x, double) {
    return optim::central_difference_gradient(objective, x, problem.fd_step);
  };

  std::vector<optim::Result> runs(starts.size());
  parallel_for(static_cast<int>(starts.size()), problem.workers, [&](int i) {
    runs[i] = optim::minimize(objective, gradient, starts[i], bounds, opts);
  });

  std::size_t winner = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    best.restart_infidelities.push_back(runs[i].f);
    if (runs[i].f < runs[winner].f)
      winner = i;
  }
  const optim::Result &run = runs[winner];
  best.sequence = map.to_sequence(run.x);
  best.infidelity = run.f;
  best.iterations = run.iterations;
  best.converged = run.converged;
  best.history = run.history;
  best.best_restart = static_cast<int>(winner);
  return best;
}

}  // namespace catspin
