//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Collective spin states of N two-level atoms in the maximal-spin Dicke
// sector S = N/2, coherent spin states (CSS), two-CSS cat states, their
// moments and the quantum Fisher information for phase shifts about z.
//
// Basis convention: amplitude index i corresponds to m = S - i, so index 0
// is |S, S> (all spins up) and index N is |S, -S>.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "catspin/errors.hpp"

namespace catspin {

using cplx = std::complex<double>;

namespace tolerance {
  inline constexpr double kNorm = 1e-12;
  /// Minimum C^2 for a cat superposition to be considered well defined.
  inline constexpr double kDegenerateNorm = 1e-14;
  /// Largest imaginary part tolerated in <psi|H|psi> for Hermitian H.
  inline constexpr double kHermiticity = 1e-10;
  /// Closed-form vs oracle agreement, scaled by N^2.
  inline constexpr double kMomentScaled = 1e-9;
}  // namespace tolerance

namespace detail {
  inline void require_atoms(int n_atoms) {
    if (n_atoms < 1)
      throw ArgumentError("n_atoms must be >= 1, got " + std::to_string(n_atoms));
  }

  inline double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  }

  /// z^k for k >= 0 by repeated squaring (z^0 == 1 even for z == 0).
  inline cplx int_pow(cplx z, int k) {
    cplx result{1.0, 0.0};
    while (k > 0) {
      if (k & 1)
        result *= z;
      z *= z;
      k >>= 1;
    }
    return result;
  }
}  // namespace detail

/// Pure state in the Dicke basis {|S, m>}, m = S, S-1, ..., -S.
class DickeState {
public:
  DickeState(int n_atoms, Eigen::VectorXcd amplitudes)
      : n_atoms_(n_atoms), amplitudes_(std::move(amplitudes)) {
    detail::require_atoms(n_atoms_);
    if (amplitudes_.size() != n_atoms_ + 1)
      throw ArgumentError("DickeState needs N+1 amplitudes");
  }

  int n_atoms() const noexcept { return n_atoms_; }
  int dim() const noexcept { return n_atoms_ + 1; }
  double spin() const noexcept { return 0.5 * n_atoms_; }
  /// Magnetic quantum number of amplitude index i.
  double m_of(int i) const noexcept { return spin() - i; }

  const Eigen::VectorXcd &amplitudes() const noexcept { return amplitudes_; }
  cplx operator[](int i) const { return amplitudes_[i]; }

  double norm() const { return amplitudes_.norm(); }

  /// max |a_m - a_{-m}|
  double symmetry_defect() const {
    double worst = 0.0;
    for (int i = 0; i <= n_atoms_; ++i)
      worst = std::max(worst, std::abs(amplitudes_[i] - amplitudes_[n_atoms_ - i]));
    return worst;
  }

private:
  int n_atoms_;
  Eigen::VectorXcd amplitudes_;
};

inline cplx inner_product(const DickeState &bra, const DickeState &ket) {
  if (bra.n_atoms() != ket.n_atoms())
    throw ArgumentError("inner_product: atom numbers differ");
  return bra.amplitudes().dot(ket.amplitudes());  // conjugates the left operand
}

inline double fidelity(const DickeState &a, const DickeState &b) {
  return std::norm(inner_product(a, b));
}

/// Two coherent-spin-state directions defining a cat superposition.
struct CatSpec {
  double theta1 = 0.0;
  double phi1 = 0.0;
  double theta2 = 0.0;
  double phi2 = 0.0;

  /// Cat symmetric about the xy and xz planes: lobes at (pi/2 -/+ theta/2, 0).
  static CatSpec symmetric(double theta) {
    constexpr double half_pi = std::numbers::pi / 2;
    return {half_pi - theta / 2, 0.0, half_pi + theta / 2, 0.0};
  }

  double delta_phi() const noexcept { return phi2 - phi1; }

  /// Same directions with theta in [0, pi] and phi in [-pi, pi).
  /// Note the CSS built from canonical angles may differ by a global sign,
  /// which changes the relative phase inside a superposition.
  CatSpec canonical() const {
    auto canon = [](double theta, double phi) {
      constexpr double two_pi = 2 * std::numbers::pi;
      theta = std::fmod(theta, two_pi);
      if (theta < 0)
        theta += two_pi;
      if (theta > std::numbers::pi) {
        theta = two_pi - theta;
        phi += std::numbers::pi;
      }
      phi = std::fmod(phi + std::numbers::pi, two_pi);
      if (phi < 0)
        phi += two_pi;
      return std::pair{theta, phi - std::numbers::pi};
    };
    auto [t1, p1] = canon(theta1, phi1);
    auto [t2, p2] = canon(theta2, phi2);
    return {t1, p1, t2, p2};
  }
};

/// Collective spin operator as a dense matrix in the Dicke basis (hbar = 1).
struct SpinOperator {
  int n_atoms;
  Eigen::MatrixXcd matrix;
};

namespace detail {
  /// <m+1| S_+ |m>
  inline double raising_element(double spin, double m) {
    return std::sqrt(std::max(0.0, spin * (spin + 1) - m * (m + 1)));
  }

  inline Eigen::MatrixXcd raising_matrix(int n_atoms) {
    const double s = 0.5 * n_atoms;
    Eigen::MatrixXcd sp = Eigen::MatrixXcd::Zero(n_atoms + 1, n_atoms + 1);
    for (int i = 1; i <= n_atoms; ++i)
      sp(i - 1, i) = raising_element(s, s - i);
    return sp;
  }
}  // namespace detail

inline SpinOperator spin_x(int n_atoms) {
  detail::require_atoms(n_atoms);
  const Eigen::MatrixXcd sp = detail::raising_matrix(n_atoms);
  return {n_atoms, 0.5 * (sp + sp.adjoint())};
}

inline SpinOperator spin_y(int n_atoms) {
  detail::require_atoms(n_atoms);
  const Eigen::MatrixXcd sp = detail::raising_matrix(n_atoms);
  return {n_atoms, (sp - sp.adjoint()) / cplx(0.0, 2.0)};
}

inline SpinOperator spin_z(int n_atoms) {
  detail::require_atoms(n_atoms);
  Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(n_atoms + 1, n_atoms + 1);
  for (int i = 0; i <= n_atoms; ++i)
    sz(i, i) = 0.5 * n_atoms - i;
  return {n_atoms, sz};
}

inline SpinOperator spin_z_squared(int n_atoms) {
  SpinOperator sz = spin_z(n_atoms);
  return {n_atoms, sz.matrix * sz.matrix};
}

struct Moments {
  double sx = 0, sy = 0, sz = 0;
  double sx2 = 0, sy2 = 0, sz2 = 0;

  double var_x() const { return sx2 - sx * sx; }
  double var_y() const { return sy2 - sy * sy; }
  double var_z() const { return sz2 - sz * sz; }

  std::array<double, 6> as_array() const { return {sx, sy, sz, sx2, sy2, sz2}; }
};

inline constexpr std::array<const char *, 6> kMomentNames = {"<Sx>",   "<Sy>",   "<Sz>",
                                                             "<Sx^2>", "<Sy^2>", "<Sz^2>"};

// ---------------------------------------------------------------------------
// State constructors

/// Coherent spin state with every spin along (theta, phi):
///   a_m = sqrt(binom(N, S+m)) cos^{S+m}(theta/2) [sin(theta/2) e^{i phi}]^{S-m}.
/// The phase sits on the spin-down component, so that
///   <theta1 phi1 | theta2 phi2> = (c1 c2 + e^{i(phi2-phi1)} s1 s2)^N.
inline DickeState make_css(int n_atoms, double theta, double phi) {
  detail::require_atoms(n_atoms);
  if (!std::isfinite(theta) || !std::isfinite(phi))
    throw ArgumentError("make_css: angles must be finite");

  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  const double log_c = std::log(std::abs(c));
  const double log_s = std::log(std::abs(s));

  Eigen::VectorXcd amps(n_atoms + 1);
  for (int i = 0; i <= n_atoms; ++i) {
    const int n_up = n_atoms - i;  // S + m
    const int n_down = i;          // S - m
    if ((n_up > 0 && c == 0.0) || (n_down > 0 && s == 0.0)) {
      amps[i] = 0.0;
      continue;
    }
    // log-space keeps sqrt(binom) finite for a few hundred atoms
    double log_mag = 0.5 * detail::log_binomial(n_atoms, n_up);
    if (n_up > 0)
      log_mag += n_up * log_c;
    if (n_down > 0)
      log_mag += n_down * log_s;
    double sign = 1.0;
    if (c < 0 && (n_up % 2))
      sign = -sign;
    if (s < 0 && (n_down % 2))
      sign = -sign;
    amps[i] = sign * std::exp(log_mag) * std::polar(1.0, n_down * phi);
  }
  return {n_atoms, std::move(amps)};
}

/// Single-spin overlap <theta1 phi1|theta2 phi2>, the base of C_k = base^k.
inline cplx css_overlap_base(const CatSpec &spec) {
  const double c1 = std::cos(spec.theta1 / 2), s1 = std::sin(spec.theta1 / 2);
  const double c2 = std::cos(spec.theta2 / 2), s2 = std::sin(spec.theta2 / 2);
  return c1 * c2 + std::polar(1.0, spec.delta_phi()) * (s1 * s2);
}

/// C^2 = 2 Re(1 + C_N)
inline double cat_norm_squared(int n_atoms, const CatSpec &spec) {
  return 2.0 * (1.0 + detail::int_pow(css_overlap_base(spec), n_atoms).real());
}

/// (|css1> + |css2>) / C
inline DickeState make_cat(int n_atoms, const CatSpec &spec) {
  detail::require_atoms(n_atoms);
  const double norm2 = cat_norm_squared(n_atoms, spec);
  if (!(norm2 >= tolerance::kDegenerateNorm))
    throw DegenerateSuperpositionError("make_cat: C^2 = " + std::to_string(norm2) +
                                       " below degeneracy threshold");
  const DickeState a = make_css(n_atoms, spec.theta1, spec.phi1);
  const DickeState b = make_css(n_atoms, spec.theta2, spec.phi2);
  return {n_atoms, (a.amplitudes() + b.amplitudes()) / std::sqrt(norm2)};
}

// ---------------------------------------------------------------------------
// Moments

namespace detail {
  inline double hermitian_expectation(const Eigen::MatrixXcd &op, const Eigen::VectorXcd &psi) {
    const cplx value = psi.dot(op * psi);
    if (std::abs(value.imag()) > tolerance::kHermiticity)
      throw std::logic_error("expectation of Hermitian operator has imaginary part " +
                             std::to_string(value.imag()));
    return value.real();
  }
}  // namespace detail

/// Oracle: every moment as <psi|O|psi> with dense operator matrices.
inline Moments moments_bruteforce(const DickeState &state) {
  const int n = state.n_atoms();
  const Eigen::MatrixXcd sx = spin_x(n).matrix;
  const Eigen::MatrixXcd sy = spin_y(n).matrix;
  const Eigen::MatrixXcd sz = spin_z(n).matrix;
  const auto &psi = state.amplitudes();
  Moments m;
  m.sx = detail::hermitian_expectation(sx, psi);
  m.sy = detail::hermitian_expectation(sy, psi);
  m.sz = detail::hermitian_expectation(sz, psi);
  m.sx2 = detail::hermitian_expectation(sx * sx, psi);
  m.sy2 = detail::hermitian_expectation(sy * sy, psi);
  m.sz2 = detail::hermitian_expectation(sz * sz, psi);
  return m;
}

/// O(N) moments using the tridiagonal structure of S_+.
inline Moments moments_fast(const DickeState &state) {
  const int n = state.n_atoms();
  const double s = state.spin();
  const auto &a = state.amplitudes();

  double sz = 0, sz2 = 0;
  for (int i = 0; i <= n; ++i) {
    const double m = s - i;
    const double p = std::norm(a[i]);
    sz += p * m;
    sz2 += p * m * m;
  }
  cplx sp{0, 0}, sp2{0, 0};
  for (int i = 1; i <= n; ++i)
    sp += std::conj(a[i - 1]) * a[i] * detail::raising_element(s, s - i);
  for (int i = 2; i <= n; ++i) {
    const double m = s - i;
    sp2 += std::conj(a[i - 2]) * a[i] * detail::raising_element(s, m) *
           detail::raising_element(s, m + 1);
  }
  const double casimir = s * (s + 1);
  Moments out;
  out.sx = sp.real();
  out.sy = sp.imag();
  out.sz = sz;
  out.sz2 = sz2;
  out.sx2 = 0.5 * (sp2.real() + casimir - sz2);
  out.sy2 = 0.5 * (-sp2.real() + casimir - sz2);
  return out;
}

namespace detail {
  struct CatScalars {
    double c1, s1, c2, s2;
    cplx base;  // C_1
    double norm2;
  };

  inline CatScalars cat_scalars(int n_atoms, const CatSpec &spec) {
    CatScalars k;
    k.c1 = std::cos(spec.theta1 / 2);
    k.s1 = std::sin(spec.theta1 / 2);
    k.c2 = std::cos(spec.theta2 / 2);
    k.s2 = std::sin(spec.theta2 / 2);
    k.base = css_overlap_base(spec);
    k.norm2 = cat_norm_squared(n_atoms, spec);
    if (!(k.norm2 >= tolerance::kDegenerateNorm))
      throw DegenerateSuperpositionError("closed-form moments: degenerate cat");
    return k;
  }

  inline cplx power_or_zero(cplx base, int k) { return k < 0 ? cplx{0, 0} : int_pow(base, k); }
}  // namespace detail

/// Closed-form moments for the cat of `spec`, all six entries derived from
/// product-state matrix elements and cross-validated against the oracle.
/// <Sz> and <Sz^2> use the literal published expressions; the x/y entries use
/// single-spin transition elements
///   x_x = c1 s2 e^{i phi2} + s1 c2 e^{-i phi1},
///   x_y = -i c1 s2 e^{i phi2} + i s1 c2 e^{-i phi1},
/// in <S_a> = N/(2C^2) Re[n1a + n2a + 2 C_{N-1} x_a] and
///    <S_a^2> = N/4 + N(N-1)/(4C^2) Re[n1a^2 + n2a^2 + 2 C_{N-2} x_a^2].
inline Moments moments_closed_form(int n_atoms, const CatSpec &spec) {
  detail::require_atoms(n_atoms);
  const auto k = detail::cat_scalars(n_atoms, spec);
  const double n = n_atoms;
  const cplx cn1 = detail::power_or_zero(k.base, n_atoms - 1);
  const cplx cn2 = detail::power_or_zero(k.base, n_atoms - 2);
  const cplx e1m = std::polar(1.0, -spec.phi1);
  const cplx e2 = std::polar(1.0, spec.phi2);
  const cplx i{0, 1};

  const double c_plus = std::cos((spec.theta1 + spec.theta2) / 2);
  const double c_minus = std::cos((spec.theta1 - spec.theta2) / 2);
  const cplx xz = k.c1 * k.c2 - std::polar(1.0, spec.delta_phi()) * (k.s1 * k.s2);
  const cplx xx = k.c1 * k.s2 * e2 + k.s1 * k.c2 * e1m;
  const cplx xy = -i * k.c1 * k.s2 * e2 + i * k.s1 * k.c2 * e1m;

  const double nx1 = std::sin(spec.theta1) * std::cos(spec.phi1);
  const double nx2 = std::sin(spec.theta2) * std::cos(spec.phi2);
  const double ny1 = std::sin(spec.theta1) * std::sin(spec.phi1);
  const double ny2 = std::sin(spec.theta2) * std::sin(spec.phi2);
  const double nz1 = std::cos(spec.theta1);
  const double nz2 = std::cos(spec.theta2);

  const double pre1 = n / (2 * k.norm2);
  const double pre2 = n * (n - 1) / (4 * k.norm2);

  Moments m;
  m.sz = (n / k.norm2) * (c_plus * c_minus + cn1 * xz).real();
  m.sz2 = n / 4 + pre2 * (nz1 * nz1 + nz2 * nz2 + 2.0 * cn2 * xz * xz).real();
  m.sx = pre1 * (nx1 + nx2 + 2.0 * cn1 * xx).real();
  m.sy = pre1 * (ny1 + ny2 + 2.0 * cn1 * xy).real();
  m.sx2 = n / 4 + pre2 * (nx1 * nx1 + nx2 * nx2 + 2.0 * cn2 * xx * xx).real();
  m.sy2 = n / 4 + pre2 * (ny1 * ny1 + ny2 * ny2 + 2.0 * cn2 * xy * xy).real();
  return m;
}

/// The four x/y expressions exactly as typeset in the published appendix,
/// kept for diagnostics. <Sz>, <Sz^2> are the same as moments_closed_form.
inline Moments moments_closed_form_as_printed(int n_atoms, const CatSpec &spec) {
  detail::require_atoms(n_atoms);
  const auto k = detail::cat_scalars(n_atoms, spec);
  const double n = n_atoms;
  const cplx cn1 = detail::power_or_zero(k.base, n_atoms - 1);
  const cplx i{0, 1};
  const cplx e1 = std::polar(1.0, spec.phi1);
  const cplx e1m = std::polar(1.0, -spec.phi1);
  const cplx e2 = std::polar(1.0, spec.phi2);

  const double st1 = std::sin(spec.theta1), st2 = std::sin(spec.theta2);
  const double cp1 = std::cos(spec.phi1), cp2 = std::cos(spec.phi2);
  const double sp1 = std::sin(spec.phi1), sp2 = std::sin(spec.phi2);

  const cplx first_cross = e1 * k.s1 * k.c2 + e2 * k.c1 * k.s2;
  const cplx second_cross = e1m * k.s1 * k.c2 + e2 * k.c1 * k.s2;
  const double pre1 = n / (2 * k.norm2);
  const double pre2 = n * (n - 1) / (4 * k.norm2);

  Moments m = moments_closed_form(n_atoms, spec);
  m.sx = pre1 * (st1 * cp1 + st2 * cp2 + 2.0 * cn1 * first_cross).real();
  m.sy = pre1 * (st1 * cp1 + st2 * cp2 - 2.0 * i * cn1 * first_cross).real();
  m.sx2 = n / 4 +
          pre2 * (st1 * st1 * cp1 * cp1 + st2 * st2 * cp2 * cp2 + 2.0 * cn1 * second_cross).real();
  m.sy2 = n / 4 +
          pre2 * (st1 * st1 * sp1 * sp1 + st2 * st2 * sp2 * sp2 + 2.0 * cn1 * second_cross).real();
  return m;
}

/// Per-entry comparison of the closed forms with the brute-force oracle.
struct ClosedFormReport {
  int n_atoms = 0;
  CatSpec spec;
  Moments oracle;
  Moments closed_form;
  Moments as_printed;
  double tolerance = 0;
  std::array<double, 6> closed_form_error{};
  std::array<double, 6> as_printed_error{};

  bool closed_form_matches() const {
    return std::all_of(closed_form_error.begin(), closed_form_error.end(),
                       [&](double e) { return e <= tolerance; });
  }
  bool printed_matches(int entry) const { return as_printed_error[entry] <= tolerance; }
};

inline ClosedFormReport closed_form_report(int n_atoms, const CatSpec &spec) {
  ClosedFormReport r;
  r.n_atoms = n_atoms;
  r.spec = spec;
  r.oracle = moments_bruteforce(make_cat(n_atoms, spec));
  r.closed_form = moments_closed_form(n_atoms, spec);
  r.as_printed = moments_closed_form_as_printed(n_atoms, spec);
  r.tolerance = tolerance::kMomentScaled * n_atoms * n_atoms;
  const auto o = r.oracle.as_array();
  const auto c = r.closed_form.as_array();
  const auto p = r.as_printed.as_array();
  for (int e = 0; e < 6; ++e) {
    r.closed_form_error[e] = std::abs(c[e] - o[e]);
    r.as_printed_error[e] = std::abs(p[e] - o[e]);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Quantum Fisher information

/// F_Q = 4 Var(S_z) for a pure state.
inline double qfi_z(const DickeState &state) {
  const double s = state.spin();
  const auto &a = state.amplitudes();
  double mean = 0, second = 0;
  for (int i = 0; i < state.dim(); ++i) {
    const double m = s - i;
    const double p = std::norm(a[i]);
    mean += p * m;
    second += p * m * m;
  }
  return std::max(0.0, 4.0 * (second - mean * mean));
}

/// F_Q of the symmetric cat: N + N(N-1) sin^2(theta/2) / (1 + cos^N(theta/2)).
inline double qfi_symmetric_closed_form(int n_atoms, double theta) {
  detail::require_atoms(n_atoms);
  const double n = n_atoms;
  const double half_sin = std::sin(theta / 2);
  return n + n * (n - 1) * half_sin * half_sin / (1.0 + std::pow(std::cos(theta / 2), n_atoms));
}

/// exp(-i(alpha S_x + beta S_y)) |psi>
inline DickeState rotate_transverse(const DickeState &state, double alpha, double beta) {
  const int n = state.n_atoms();
  const Eigen::MatrixXcd h = alpha * spin_x(n).matrix + beta * spin_y(n).matrix;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const Eigen::VectorXcd phases =
      eig.eigenvalues().unaryExpr([](double w) { return std::polar(1.0, -w); });
  const Eigen::MatrixXcd &v = eig.eigenvectors();
  return {n, v * phases.asDiagonal() * (v.adjoint() * state.amplitudes())};
}

inline double qfi_after_rotation(const DickeState &state, double alpha, double beta) {
  return qfi_z(rotate_transverse(state, alpha, beta));
}

/// Second-order expansion of F_Q under a small transverse rotation of a
/// state with vanishing anticommutator cross terms:
///   4(1 - a^2 - b^2)<Sz^2> + 4 a^2 <Sy^2> + 4 b^2 <Sx^2>.
/// It neglects the rotated mean b<Sx> - a<Sy>, which enters at the same order.
inline double rotation_quadratic_form(const Moments &m, double alpha, double beta) {
  return 4 * (1 - alpha * alpha - beta * beta) * m.sz2 + 4 * alpha * alpha * m.sy2 +
         4 * beta * beta * m.sx2;
}

/// The same expansion with the squared rotated mean subtracted.
inline double rotation_quadratic_form_centered(const Moments &m, double alpha, double beta) {
  const double mean = m.sz + beta * m.sx - alpha * m.sy;
  return rotation_quadratic_form(m, alpha, beta) - 4 * mean * mean;
}

struct StationarityReport {
  int n_atoms = 0;
  double theta = 0;
  double delta = 0;
  double qfi = 0;
  double d_alpha = 0, d_beta = 0;
  double d2_alpha = 0, d2_beta = 0, d2_mixed = 0;
  /// max |numeric F_Q - quadratic form| over the {-delta, 0, delta}^2 grid
  double quadratic_form_deviation = 0;
  double tolerance = 0;

  double gradient_norm() const { return std::hypot(d_alpha, d_beta); }
  bool stationary() const { return std::abs(d_alpha) <= tolerance && std::abs(d_beta) <= tolerance; }
  bool concave() const { return d2_alpha <= tolerance && d2_beta <= tolerance; }
};

/// Central finite differences of F_Q for the symmetric cat under
/// exp(-i(alpha S_x + beta S_y)), alpha, beta in {-delta, 0, delta}.
inline StationarityReport verify_qfi_stationarity(int n_atoms, double theta, double delta = 1e-3) {
  detail::require_atoms(n_atoms);
  if (!(delta > 0.0 && delta <= 0.05))
    throw ArgumentError("verify_qfi_stationarity: delta must lie in (0, 0.05]");
  if (!(theta > 0.0 && theta <= std::numbers::pi))
    throw ArgumentError("verify_qfi_stationarity: theta must lie in (0, pi]");

  const DickeState cat = make_cat(n_atoms, CatSpec::symmetric(theta));
  const Moments moments = moments_bruteforce(cat);

  double f[3][3];
  StationarityReport r;
  for (int ia = 0; ia < 3; ++ia)
    for (int ib = 0; ib < 3; ++ib) {
      const double a = (ia - 1) * delta, b = (ib - 1) * delta;
      f[ia][ib] = qfi_after_rotation(cat, a, b);
      r.quadratic_form_deviation = std::max(
          r.quadratic_form_deviation, std::abs(f[ia][ib] - rotation_quadratic_form(moments, a, b)));
    }

  r.n_atoms = n_atoms;
  r.theta = theta;
  r.delta = delta;
  r.qfi = f[1][1];
  r.tolerance = 1e-6 * n_atoms * n_atoms;
  r.d_alpha = (f[2][1] - f[0][1]) / (2 * delta);
  r.d_beta = (f[1][2] - f[1][0]) / (2 * delta);
  r.d2_alpha = (f[2][1] - 2 * f[1][1] + f[0][1]) / (delta * delta);
  r.d2_beta = (f[1][2] - 2 * f[1][1] + f[1][0]) / (delta * delta);
  r.d2_mixed = (f[2][2] - f[2][0] - f[0][2] + f[0][0]) / (4 * delta * delta);
  return r;
}

}  // namespace catspin
