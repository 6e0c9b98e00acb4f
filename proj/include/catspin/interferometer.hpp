//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Time-reversal interferometry: prepare with U, imprint exp(-i phi S_z),
// undo with U^-1, read out <S_y>. An empty sequence is plain Ramsey.

#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "catspin/dynamics.hpp"
#include "catspin/errors.hpp"
#include "catspin/pulse_optimizer.hpp"
#include "catspin/spin_core.hpp"

namespace catspin {

inline constexpr double kDefaultGamma = 0.36;

struct ProtocolConfig {
  int n_atoms = 10;
  PulseSequence sequence;
  /// phase step for the slope; <= 0 selects 1e-4 / N
  double phase_step = 0.0;
  double gamma = kDefaultGamma;
  bool loss_enabled = false;

  double effective_phase_step() const { return phase_step > 0 ? phase_step : 1e-4 / n_atoms; }

  void validate() const {
    detail::require_atoms(n_atoms);
    const double step = effective_phase_step();
    if (!(step > 0 && step <= 0.1 / n_atoms))
      throw ArgumentError("phase_step must lie in (0, 0.1/N]");
    if (!(gamma >= 0))
      throw ArgumentError("gamma must be >= 0");
  }
};

struct ProtocolResult {
  /// d<S_y>/dphi at phi = 0, including contrast when loss is enabled
  double signal_slope = 0;
  /// Delta S_y at phi = 0
  double noise = 0;
  double delta_phi = 0;
  double gain_db = 0;
  /// slope / S
  double amplification = 0;
  double qfi_prepared = 0;
  double contrast = 1;
};

/// Contrast factor for a preparation + reversal pair: exp(-2 gamma Q~).
inline double contrast_factor(double gamma, double q_tilde) { return std::exp(-2 * gamma * q_tilde); }

/// Gain penalty in dB of the two-pass contrast model: 40 gamma Q~ / ln 10.
inline double loss_db(double gamma, double q_tilde) {
  if (!(gamma >= 0) || !(q_tilde >= 0))
    throw ArgumentError("loss_db: gamma and q_tilde must be >= 0");
  return -20.0 * std::log10(contrast_factor(gamma, q_tilde));
}

/// Final state U^-1 exp(-i phi S_z) U |pi/2, 0>.
inline DickeState run_protocol(const ProtocolConfig &config, double phi) {
  const DickeState prepared = propagate_sequence(initial_css(config.n_atoms), config.sequence);
  return propagate_sequence(propagate_phase(prepared, phi), config.sequence.inverse());
}

inline ProtocolResult sensitivity(const ProtocolConfig &config) {
  config.validate();
  const int n = config.n_atoms;
  const double step = config.effective_phase_step();
  const PulseSequence reverse = config.sequence.inverse();

  const DickeState prepared = propagate_sequence(initial_css(n), config.sequence);
  auto readout = [&](double phi) {
    return propagate_sequence(propagate_phase(prepared, phi), reverse);
  };

  const double sy_plus = moments_fast(readout(step)).sy;
  const double sy_minus = moments_fast(readout(-step)).sy;
  const Moments at_zero = moments_fast(readout(0.0));

  ProtocolResult r;
  r.contrast = config.loss_enabled
                   ? contrast_factor(config.gamma, config.sequence.normalized_q(n))
                   : 1.0;
  r.signal_slope = r.contrast * (sy_plus - sy_minus) / (2 * step);
  if (std::abs(r.signal_slope) < 1e-12)
    throw DegenerateSignalError("protocol has no first-order response to phi");
  r.noise = std::sqrt(std::max(0.0, at_zero.var_y()));
  r.delta_phi = std::abs(r.noise / r.signal_slope);
  const double gain = 1.0 / (n * r.delta_phi * r.delta_phi);
  r.gain_db = 10.0 * std::log10(gain);
  r.amplification = r.signal_slope / (0.5 * n);
  r.qfi_prepared = qfi_z(prepared);
  return r;
}

}  // namespace catspin
