//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <vector>

#include "catspin/errors.hpp"
#include "catspin/spin_core.hpp"

namespace catspin {

/// Q(theta, phi) = |<theta, phi|psi>|^2 on a latitude-longitude grid with
/// theta in [0, pi] and phi in [-pi, pi], both endpoints included.
struct HusimiGrid {
  int n_atoms = 0;
  std::vector<double> theta;
  std::vector<double> phi;
  /// row-major, q[i * phi.size() + j]
  std::vector<double> q;

  double at(std::size_t i, std::size_t j) const { return q[i * phi.size() + j]; }

  /// Trapezoidal estimate of (N+1)/(4 pi) * integral of Q over the sphere (ideally 1).
  double normalization() const {
    const std::size_t nt = theta.size(), np = phi.size();
    const double dt = theta[1] - theta[0];
    const double dp = phi[1] - phi[0];
    double total = 0;
    for (std::size_t i = 0; i < nt; ++i) {
      const double wt = (i == 0 || i + 1 == nt) ? 0.5 : 1.0;
      double row = 0;
      for (std::size_t j = 0; j < np; ++j)
        row += ((j == 0 || j + 1 == np) ? 0.5 : 1.0) * at(i, j);
      total += wt * std::sin(theta[i]) * row;
    }
    return total * dt * dp * (n_atoms + 1) / (4 * std::numbers::pi);
  }

  void write_csv(std::ostream &os) const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g", normalization());
    os << "# husimi n_atoms=" << n_atoms << " n_theta=" << theta.size() << " n_phi=" << phi.size()
       << "\n# quadrature_normalization=" << buf << "\n"
       << "theta,phi,q\n";
    for (std::size_t i = 0; i < theta.size(); ++i)
      for (std::size_t j = 0; j < phi.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", theta[i], phi[j], at(i, j));
        os << buf;
      }
  }
};

inline HusimiGrid husimi_grid(const DickeState &state, int n_theta = 181, int n_phi = 361) {
  if (n_theta < 2 || n_phi < 2)
    throw ArgumentError("husimi_grid: resolution must be at least 2x2");
  const int n = state.n_atoms();
  HusimiGrid g;
  g.n_atoms = n;
  for (int i = 0; i < n_theta; ++i)
    g.theta.push_back(std::numbers::pi * i / (n_theta - 1));
  for (int j = 0; j < n_phi; ++j)
    g.phi.push_back(-std::numbers::pi + 2 * std::numbers::pi * j / (n_phi - 1));
  g.q.resize(static_cast<std::size_t>(n_theta) * n_phi);

  const auto &a = state.amplitudes();
  for (int i = 0; i < n_theta; ++i) {
    // phi enters the CSS only as e^{i phi (S-m)} on index i, so
    // <theta phi|psi> = sum_k r_k e^{-i phi k} a_k with real r_k
    const DickeState probe = make_css(n, g.theta[i], 0.0);
    Eigen::VectorXcd weighted(n + 1);
    for (int k = 0; k <= n; ++k)
      weighted[k] = probe[k].real() * a[k];
    for (int j = 0; j < n_phi; ++j) {
      const cplx step = std::polar(1.0, -g.phi[j]);
      cplx acc{0, 0};
      cplx power{1, 0};
      for (int k = 0; k <= n; ++k) {
        acc += power * weighted[k];
        power *= step;
      }
      g.q[static_cast<std::size_t>(i) * n_phi + j] = std::norm(acc);
    }
  }
  return g;
}

}  // namespace catspin
