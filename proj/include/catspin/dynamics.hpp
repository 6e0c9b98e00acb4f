//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Piecewise unitary evolution under one-axis twisting exp(-i Q S_z^2) and
// collective rotations exp(-i mu S_x), in the full Dicke space and in the
// sector of states with a_m = a_{-m}.

#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "catspin/errors.hpp"
#include "catspin/spin_core.hpp"

namespace catspin {

/// One (OAT, rotation) step: exp(-i mu S_x) exp(-i Q S_z^2).
struct Pulse {
  double q = 0.0;   // shearing strength chi * t
  double mu = 0.0;  // rotation angle about x

  bool operator==(const Pulse &) const = default;
};

class PulseSequence {
public:
  PulseSequence() = default;
  explicit PulseSequence(std::vector<Pulse> pulses) : pulses_(std::move(pulses)) {}

  const std::vector<Pulse> &pulses() const noexcept { return pulses_; }
  std::size_t size() const noexcept { return pulses_.size(); }
  bool empty() const noexcept { return pulses_.empty(); }
  const Pulse &operator[](std::size_t k) const { return pulses_[k]; }

  double total_q() const {
    return std::accumulate(pulses_.begin(), pulses_.end(), 0.0,
                           [](double acc, const Pulse &p) { return acc + p.q; });
  }
  /// Q~ = sqrt(N) * sum Q_k
  double normalized_q(int n_atoms) const { return std::sqrt(double(n_atoms)) * total_q(); }

  /// Exact inverse written as a sequence of steps of the same form:
  /// U^-1 = O(-Q_1) R(-mu_1) ... O(-Q_n) R(-mu_n), which regrouped into
  /// (OAT, rotation) steps is (0, -mu_n), (-Q_n, -mu_{n-1}), ..., (-Q_1, 0).
  PulseSequence inverse() const {
    if (pulses_.empty())
      return {};
    const std::size_t n = pulses_.size();
    std::vector<Pulse> out;
    out.reserve(n + 1);
    out.push_back({0.0, -pulses_[n - 1].mu});
    for (std::size_t k = n; k-- > 1;)
      out.push_back({-pulses_[k].q, -pulses_[k - 1].mu});
    out.push_back({-pulses_[0].q, 0.0});
    return PulseSequence(std::move(out));
  }

  /// Prepends zero pulses so that the unitary is unchanged and size() == n.
  PulseSequence padded_front(std::size_t n) const {
    if (n <= pulses_.size())
      return *this;
    std::vector<Pulse> out(n - pulses_.size(), Pulse{});
    out.insert(out.end(), pulses_.begin(), pulses_.end());
    return PulseSequence(std::move(out));
  }

  bool operator==(const PulseSequence &) const = default;

private:
  std::vector<Pulse> pulses_;
};

/// State in the symmetrized basis |S,m>_s, m = S, S-1, ..., down to 0 or 1/2:
///   |S,m>_s = (|S,m> + |S,-m>)/sqrt(2) for m != 0, |S,0>_s = |S,0>.
class SymmetricState {
public:
  SymmetricState(int n_atoms, Eigen::VectorXcd amplitudes)
      : n_atoms_(n_atoms), amplitudes_(std::move(amplitudes)) {
    detail::require_atoms(n_atoms_);
    if (amplitudes_.size() != dim_for(n_atoms_))
      throw ArgumentError("SymmetricState needs floor(S)+1 amplitudes");
  }

  /// floor(N/2) + 1
  static int dim_for(int n_atoms) noexcept { return n_atoms / 2 + 1; }

  int n_atoms() const noexcept { return n_atoms_; }
  int dim() const noexcept { return static_cast<int>(amplitudes_.size()); }
  double spin() const noexcept { return 0.5 * n_atoms_; }
  double m_of(int j) const noexcept { return spin() - j; }
  const Eigen::VectorXcd &amplitudes() const noexcept { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }

private:
  int n_atoms_;
  Eigen::VectorXcd amplitudes_;
};

inline double fidelity(const SymmetricState &a, const SymmetricState &b) {
  if (a.n_atoms() != b.n_atoms())
    throw ArgumentError("fidelity: atom numbers differ");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

namespace detail {
  /// Isometry from the symmetric sector into the full Dicke space (columns
  /// are |S,m>_s written in the |S,m> basis).
  inline Eigen::MatrixXd symmetric_embedding(int n_atoms) {
    const int full = n_atoms + 1;
    const int sym = SymmetricState::dim_for(n_atoms);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(full, sym);
    const double r = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < sym; ++j) {
      const int mirror = n_atoms - j;
      if (mirror == j) {
        p(j, j) = 1.0;
      } else {
        p(j, j) = r;
        p(mirror, j) = r;
      }
    }
    return p;
  }

  inline Eigen::MatrixXd spin_x_real(int n_atoms) {
    const double s = 0.5 * n_atoms;
    Eigen::MatrixXd sx = Eigen::MatrixXd::Zero(n_atoms + 1, n_atoms + 1);
    for (int i = 1; i <= n_atoms; ++i) {
      const double e = 0.5 * raising_element(s, s - i);
      sx(i - 1, i) = e;
      sx(i, i - 1) = e;
    }
    return sx;
  }
}  // namespace detail

/// Eigendecomposition S_x = V diag(w) V^T in one basis, real and orthogonal.
struct RotationGenerator {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;

  Eigen::VectorXcd apply(const Eigen::VectorXcd &psi, double mu) const {
    // real and imaginary parts separately: V is real
    Eigen::VectorXd re = vectors.transpose() * psi.real();
    Eigen::VectorXd im = vectors.transpose() * psi.imag();
    for (Eigen::Index k = 0; k < re.size(); ++k) {
      const cplx c = cplx(re[k], im[k]) * std::polar(1.0, -mu * values[k]);
      re[k] = c.real();
      im[k] = c.imag();
    }
    Eigen::VectorXcd out(psi.size());
    out.real() = vectors * re;
    out.imag() = vectors * im;
    return out;
  }
};

enum class Basis { Full, Symmetric };

/// Process-wide write-once cache of S_x eigensystems keyed by (N, basis).
/// Entries are immutable once inserted; readers share them.
class RotationCache {
public:
  static std::shared_ptr<const RotationGenerator> get(int n_atoms, Basis basis) {
    static RotationCache cache;
    return cache.lookup(n_atoms, basis);
  }

private:
  std::shared_ptr<const RotationGenerator> lookup(int n_atoms, Basis basis) {
    const auto key = std::pair{n_atoms, basis};
    {
      std::shared_lock lock(mutex_);
      if (auto it = entries_.find(key); it != entries_.end())
        return it->second;
    }
    auto built = build(n_atoms, basis);
    std::unique_lock lock(mutex_);
    auto [it, inserted] = entries_.emplace(key, std::move(built));
    return it->second;
  }

  static std::shared_ptr<const RotationGenerator> build(int n_atoms, Basis basis) {
    Eigen::MatrixXd sx = detail::spin_x_real(n_atoms);
    if (basis == Basis::Symmetric) {
      const Eigen::MatrixXd p = detail::symmetric_embedding(n_atoms);
      sx = p.transpose() * sx * p;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sx);
    return std::make_shared<const RotationGenerator>(
        RotationGenerator{eig.eigenvectors(), eig.eigenvalues()});
  }

  std::shared_mutex mutex_;
  std::map<std::pair<int, Basis>, std::shared_ptr<const RotationGenerator>> entries_;
};

// ---------------------------------------------------------------------------
// Propagators

inline DickeState propagate_oat(const DickeState &state, double q) {
  Eigen::VectorXcd a = state.amplitudes();
  for (int i = 0; i < state.dim(); ++i) {
    const double m = state.m_of(i);
    a[i] *= std::polar(1.0, -q * m * m);
  }
  return {state.n_atoms(), std::move(a)};
}

inline SymmetricState propagate_oat(const SymmetricState &state, double q) {
  Eigen::VectorXcd a = state.amplitudes();
  for (int j = 0; j < state.dim(); ++j) {
    const double m = state.m_of(j);
    a[j] *= std::polar(1.0, -q * m * m);
  }
  return {state.n_atoms(), std::move(a)};
}

inline DickeState propagate_rotation(const DickeState &state, double mu) {
  if (mu == 0.0)
    return state;
  const auto gen = RotationCache::get(state.n_atoms(), Basis::Full);
  return {state.n_atoms(), gen->apply(state.amplitudes(), mu)};
}

inline SymmetricState propagate_rotation(const SymmetricState &state, double mu) {
  if (mu == 0.0)
    return state;
  const auto gen = RotationCache::get(state.n_atoms(), Basis::Symmetric);
  return {state.n_atoms(), gen->apply(state.amplitudes(), mu)};
}

/// exp(-i phi S_z), the free-evolution phase.
inline DickeState propagate_phase(const DickeState &state, double phi) {
  Eigen::VectorXcd a = state.amplitudes();
  for (int i = 0; i < state.dim(); ++i)
    a[i] *= std::polar(1.0, -phi * state.m_of(i));
  return {state.n_atoms(), std::move(a)};
}

/// Applies each step k = 1..n as OAT(Q_k) followed by rotation(mu_k).
template <typename State>
State propagate_sequence(State state, const PulseSequence &seq) {
  for (const Pulse &p : seq.pulses()) {
    state = propagate_oat(state, p.q);
    state = propagate_rotation(state, p.mu);
  }
  return state;
}

// ---------------------------------------------------------------------------
// Symmetric sector

inline constexpr double kSymmetryInputTolerance = 1e-8;

/// Projects a mirror-symmetric Dicke state onto the symmetrized basis.
inline SymmetricState symmetric_roundtrip(const DickeState &state) {
  if (state.symmetry_defect() > kSymmetryInputTolerance)
    throw SymmetryViolationError("state is not symmetric under m -> -m (defect " +
                                 std::to_string(state.symmetry_defect()) + ")");
  const int n = state.n_atoms();
  const auto &a = state.amplitudes();
  Eigen::VectorXcd b(SymmetricState::dim_for(n));
  for (int j = 0; j < b.size(); ++j) {
    const int mirror = n - j;
    b[j] = (mirror == j) ? a[j] : (a[j] + a[mirror]) / std::sqrt(2.0);
  }
  return {n, std::move(b)};
}

inline DickeState embed(const SymmetricState &state) {
  const int n = state.n_atoms();
  const auto &b = state.amplitudes();
  Eigen::VectorXcd a(n + 1);
  for (int j = 0; j < b.size(); ++j) {
    const int mirror = n - j;
    if (mirror == j) {
      a[j] = b[j];
    } else {
      a[j] = b[j] / std::sqrt(2.0);
      a[mirror] = b[j] / std::sqrt(2.0);
    }
  }
  return {n, std::move(a)};
}

/// S_z^2 level spacing between neighbouring symmetric states.
struct TransitionLine {
  double m;
  double omega;  // m^2 - (m-1)^2 = 2m - 1
};

struct TransitionSpectrum {
  int n_atoms = 0;
  std::vector<TransitionLine> lines;
  bool all_distinct = false;
  /// Reduced fractions omega_{k+1} / omega_k for neighbouring gaps.
  std::vector<std::pair<long, long>> neighbor_ratios;
  bool ratios_rational = false;
};

inline TransitionSpectrum transition_spectrum(int n_atoms) {
  if (n_atoms < 2)
    throw ArgumentError("transition_spectrum needs N >= 2");
  TransitionSpectrum out;
  out.n_atoms = n_atoms;
  const double s = 0.5 * n_atoms;
  // lowest symmetric level is m = 0 (integer S) or m = 1/2
  const double m_min = (n_atoms % 2 == 0) ? 0.0 : 0.5;
  for (double m = m_min + 1; m <= s + 1e-9; m += 1.0)
    out.lines.push_back({m, m * m - (m - 1) * (m - 1)});

  out.all_distinct = true;
  for (std::size_t a = 0; a < out.lines.size(); ++a)
    for (std::size_t b = a + 1; b < out.lines.size(); ++b)
      if (out.lines[a].omega == out.lines[b].omega)
        out.all_distinct = false;

  out.ratios_rational = true;
  for (std::size_t k = 0; k + 1 < out.lines.size(); ++k) {
    const double num = out.lines[k + 1].omega, den = out.lines[k].omega;
    // gaps are integers for both integer and half-integer S
    if (num != std::round(num) || den != std::round(den) || den == 0) {
      out.ratios_rational = false;
      continue;
    }
    const long p = std::lround(num), q = std::lround(den);
    const long g = std::gcd(p, q);
    out.neighbor_ratios.emplace_back(p / g, q / g);
  }
  return out;
}

}  // namespace catspin
