//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "test_util.hpp"

namespace catspin {
namespace {

using testing::Gen;
using testing::kPi;

// exp(-i t H) from a dense Hermitian eigensolve of the complex operator
Eigen::MatrixXcd dense_exp(const Eigen::MatrixXcd &h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(h.rows());
  for (int i = 0; i < h.rows(); ++i)
    phases[i] = std::polar(1.0, -t * es.eigenvalues()[i]);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

DickeState dense_sequence(DickeState s, const PulseSequence &seq) {
  const int n = s.n_atoms();
  Eigen::VectorXcd v = s.amplitudes();
  for (const Pulse &p : seq.pulses()) {
    v = dense_exp(spin_z_squared(n).matrix, p.q) * v;
    v = dense_exp(spin_x(n).matrix, p.mu) * v;
  }
  return {n, v};
}

double state_diff(const DickeState &a, const DickeState &b) {
  return (a.amplitudes() - b.amplitudes()).norm();
}

TEST(PulseSequence, NormalizedBudget) {
  const PulseSequence seq({{0.1, 0.2}, {0.3, -0.4}});
  EXPECT_NEAR(seq.total_q(), 0.4, 1e-15);
  EXPECT_NEAR(seq.normalized_q(25), 2.0, 1e-14);
}

TEST(PulseSequence, InverseShape) {
  const PulseSequence seq({{0.1, 0.2}, {0.3, -0.4}, {0.5, 0.6}});
  const PulseSequence inv = seq.inverse();
  ASSERT_EQ(inv.size(), 4u);
  EXPECT_EQ(inv[0], (Pulse{0.0, -0.6}));
  EXPECT_EQ(inv[1], (Pulse{-0.5, 0.4}));
  EXPECT_EQ(inv[2], (Pulse{-0.3, -0.2}));
  EXPECT_EQ(inv[3], (Pulse{-0.1, 0.0}));
  EXPECT_TRUE(PulseSequence().inverse().empty());
}

TEST(PulseSequence, PaddingKeepsUnitary) {
  Gen gen(1);
  const PulseSequence seq = gen.sequence(2);
  const PulseSequence padded = seq.padded_front(5);
  ASSERT_EQ(padded.size(), 5u);
  const DickeState s = make_css(9, kPi / 2, 0);
  EXPECT_LT(state_diff(propagate_sequence(s, seq), propagate_sequence(s, padded)), 1e-12);
  EXPECT_EQ(seq.padded_front(1), seq);
}

TEST(Propagation, OatMatchesDenseExponential) {
  Gen gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = gen.integer(1, 20);
    const double q = gen.uniform(-2, 2);
    const DickeState s = gen.random_state(n);
    const DickeState dense{n, dense_exp(spin_z_squared(n).matrix, q) * s.amplitudes()};
    EXPECT_LT(state_diff(propagate_oat(s, q), dense), 1e-11);
  }
}

TEST(Propagation, RotationMatchesDenseExponential) {
  Gen gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = gen.integer(1, 25);
    const double mu = gen.uniform(-kPi, kPi);
    const DickeState s = gen.random_state(n);
    const DickeState dense{n, dense_exp(spin_x(n).matrix, mu) * s.amplitudes()};
    EXPECT_LT(state_diff(propagate_rotation(s, mu), dense), 1e-10);
  }
}

TEST(Propagation, RotationOfNorthPoleIsCss) {
  for (int n : {1, 6, 40})
    for (double mu : {0.3, 1.2, 2.9}) {
      const DickeState rotated = propagate_rotation(make_css(n, 0, 0), mu);
      EXPECT_NEAR(testing::overlap_abs(rotated, make_css(n, mu, -kPi / 2)), 1.0, 1e-10);
    }
}

TEST(Propagation, FullTurnIsIdentityUpToSign) {
  const DickeState s = Gen(3).random_state(7);
  const DickeState r = propagate_rotation(s, 2 * kPi);
  // 2 pi rotation of a half-integer spin gives -1
  EXPECT_LT((r.amplitudes() + s.amplitudes()).norm(), 1e-10);
}

TEST(Propagation, PhaseIsDiagonalRotationAboutZ) {
  const int n = 8;
  const DickeState s = make_css(n, 1.0, 0.2);
  const DickeState r = propagate_phase(s, 0.5);
  // e^{-i phi Sz} maps (theta, phi0) to (theta, phi0 + phi) up to global phase
  EXPECT_NEAR(testing::overlap_abs(r, make_css(n, 1.0, 0.7)), 1.0, 1e-12);
}

TEST(Propagation, PreservesNorm) {
  Gen gen(6);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = gen.integer(1, 60);
    const DickeState out = propagate_sequence(gen.random_state(n), gen.sequence(gen.integer(0, 6)));
    ASSERT_NEAR(out.norm(), 1.0, 1e-10);
  }
}

TEST(Propagation, SequenceMatchesDenseOracle) {
  Gen gen(7);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = gen.integer(1, 16);
    const PulseSequence seq = gen.sequence(gen.integer(1, 4));
    const DickeState s = gen.random_state(n);
    EXPECT_LT(state_diff(propagate_sequence(s, seq), dense_sequence(s, seq)), 1e-9);
  }
}

TEST(Propagation, InverseUndoesSequence) {
  Gen gen(8);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = gen.integer(1, 50);
    const PulseSequence seq = gen.sequence(gen.integer(1, 6), 0.5);
    const DickeState s = gen.random_state(n);
    const DickeState back = propagate_sequence(propagate_sequence(s, seq), seq.inverse());
    ASSERT_LT(state_diff(back, s), 1e-9) << "N=" << n;
  }
}

TEST(Propagation, InverseOfInverseActsLikeOriginal) {
  Gen gen(9);
  const PulseSequence seq = gen.sequence(3);
  const DickeState s = gen.random_state(12);
  EXPECT_LT(state_diff(propagate_sequence(s, seq), propagate_sequence(s, seq.inverse().inverse())), 1e-10);
}

TEST(SymmetricSector, Dimension) {
  EXPECT_EQ(SymmetricState::dim_for(1), 1);
  EXPECT_EQ(SymmetricState::dim_for(2), 2);
  EXPECT_EQ(SymmetricState::dim_for(3), 2);
  EXPECT_EQ(SymmetricState::dim_for(20), 11);
  EXPECT_EQ(SymmetricState::dim_for(201), 101);
}

TEST(SymmetricSector, RoundtripIsLossless) {
  Gen gen(10);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.integer(1, 60);
    const DickeState s = gen.random_symmetric_state(n);
    const SymmetricState sym = symmetric_roundtrip(s);
    ASSERT_NEAR(sym.norm(), 1.0, 1e-12);
    ASSERT_LT(state_diff(embed(sym), s), 1e-12);
  }
}

TEST(SymmetricSector, RejectsAsymmetricInput) {
  EXPECT_THROW(symmetric_roundtrip(make_css(4, 0.3, 0.0)), SymmetryViolationError);
  EXPECT_NO_THROW(symmetric_roundtrip(make_cat(4, CatSpec::symmetric(1.0))));
}

TEST(SymmetricSector, PropagationCommutesWithEmbedding) {
  Gen gen(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = gen.integer(1, 80);
    const PulseSequence seq = gen.sequence(gen.integer(1, 5));
    const DickeState full = gen.random_symmetric_state(n);
    const DickeState via_full = propagate_sequence(full, seq);
    const DickeState via_sym = embed(propagate_sequence(symmetric_roundtrip(full), seq));
    ASSERT_LT(state_diff(via_full, via_sym), 1e-10) << "N=" << n;
    ASSERT_LT(via_full.symmetry_defect(), 1e-10);
  }
}

TEST(SymmetricSector, FidelityMatchesFullSpace) {
  Gen gen(13);
  const int n = 15;
  const DickeState a = gen.random_symmetric_state(n), b = gen.random_symmetric_state(n);
  EXPECT_NEAR(fidelity(symmetric_roundtrip(a), symmetric_roundtrip(b)), fidelity(a, b), 1e-12);
}

TEST(RotationCache, ReturnsSameGeneratorInstance) {
  const auto a = RotationCache::get(17, Basis::Full);
  const auto b = RotationCache::get(17, Basis::Full);
  EXPECT_EQ(a.get(), b.get());
  const auto c = RotationCache::get(17, Basis::Symmetric);
  EXPECT_NE(a.get(), c.get());
  EXPECT_EQ(c->values.size(), SymmetricState::dim_for(17));
}

TEST(RotationCache, GeneratorReconstructsSpinX) {
  const int n = 11;
  const auto g = RotationCache::get(n, Basis::Full);
  const Eigen::MatrixXd rebuilt = g->vectors * g->values.asDiagonal() * g->vectors.transpose();
  EXPECT_LT((rebuilt.cast<cplx>() - spin_x(n).matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TransitionSpectrum, IntegerSpin) {
  const TransitionSpectrum t = transition_spectrum(6);
  ASSERT_EQ(t.lines.size(), 3u);
  EXPECT_EQ(t.lines[0].omega, 1.0);
  EXPECT_EQ(t.lines[1].omega, 3.0);
  EXPECT_EQ(t.lines[2].omega, 5.0);
  EXPECT_TRUE(t.all_distinct);
  EXPECT_TRUE(t.ratios_rational);
  EXPECT_EQ(t.neighbor_ratios[0], (std::pair<long, long>{3, 1}));
  EXPECT_EQ(t.neighbor_ratios[1], (std::pair<long, long>{5, 3}));
}

TEST(TransitionSpectrum, HalfIntegerSpin) {
  const TransitionSpectrum t = transition_spectrum(5);
  ASSERT_EQ(t.lines.size(), 2u);
  EXPECT_EQ(t.lines[0].m, 1.5);
  EXPECT_EQ(t.lines[0].omega, 2.0);
  EXPECT_EQ(t.lines[1].omega, 4.0);
  EXPECT_EQ(t.neighbor_ratios[0], (std::pair<long, long>{2, 1}));
}

TEST(TransitionSpectrum, DistinctForAllSizes) {
  for (int n = 2; n <= 200; ++n) {
    const TransitionSpectrum t = transition_spectrum(n);
    ASSERT_EQ(static_cast<int>(t.lines.size()), SymmetricState::dim_for(n) - 1);
    ASSERT_TRUE(t.all_distinct);
    ASSERT_TRUE(t.ratios_rational);
  }
  EXPECT_THROW(transition_spectrum(1), ArgumentError);
}

TEST(Squeezing, SmallTwistReducesMinimumTransverseVariance) {
  const int n = 40;
  const DickeState twisted = propagate_oat(make_css(n, kPi / 2, 0), 0.05);
  double min_var = 1e9;
  for (int k = 0; k < 720; ++k) {
    const double a = k * kPi / 720;
    const Eigen::MatrixXcd op = std::cos(a) * spin_y(n).matrix + std::sin(a) * spin_z(n).matrix;
    const Eigen::VectorXcd v = op * twisted.amplitudes();
    const double mean = twisted.amplitudes().dot(v).real();
    min_var = std::min(min_var, v.squaredNorm() - mean * mean);
  }
  EXPECT_LT(min_var, n / 4.0);
}

}  // namespace
}  // namespace catspin
