//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

namespace catspin {
namespace {

using testing::kPi;

TEST(Husimi, GridShapeAndEndpoints) {
  const HusimiGrid g = husimi_grid(make_css(3, 0.5, 0.0), 5, 9);
  ASSERT_EQ(g.theta.size(), 5u);
  ASSERT_EQ(g.phi.size(), 9u);
  ASSERT_EQ(g.q.size(), 45u);
  EXPECT_EQ(g.theta.front(), 0.0);
  EXPECT_DOUBLE_EQ(g.theta.back(), kPi);
  EXPECT_DOUBLE_EQ(g.phi.front(), -kPi);
  EXPECT_DOUBLE_EQ(g.phi.back(), kPi);
}

TEST(Husimi, MatchesDirectOverlap) {
  const DickeState cat = make_cat(7, CatSpec{0.4, 0.3, 2.1, -1.0});
  const HusimiGrid g = husimi_grid(cat, 13, 17);
  for (std::size_t i = 0; i < g.theta.size(); ++i)
    for (std::size_t j = 0; j < g.phi.size(); ++j) {
      const double direct = fidelity(make_css(7, g.theta[i], g.phi[j]), cat);
      ASSERT_NEAR(g.at(i, j), direct, 1e-12);
    }
}

TEST(Husimi, CssPeaksAtItsDirection) {
  const HusimiGrid g = husimi_grid(make_css(20, kPi / 2, 0.0), 91, 181);
  std::size_t best = 0;
  for (std::size_t k = 0; k < g.q.size(); ++k)
    if (g.q[k] > g.q[best])
      best = k;
  EXPECT_NEAR(g.theta[best / g.phi.size()], kPi / 2, 1e-12);
  EXPECT_NEAR(g.phi[best % g.phi.size()], 0.0, 1e-12);
  EXPECT_NEAR(g.q[best], 1.0, 1e-12);
}

TEST(Husimi, NormalizationNearOne) {
  for (int n : {1, 10, 40}) {
    const HusimiGrid g = husimi_grid(make_cat(n, CatSpec::symmetric(2.0)));
    EXPECT_NEAR(g.normalization(), 1.0, 1e-3) << "N=" << n;
  }
}

TEST(Husimi, ValuesAreProbabilities) {
  const HusimiGrid g = husimi_grid(testing::Gen(1).random_state(9), 31, 61);
  for (double v : g.q) {
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0 + 1e-12);
  }
}

TEST(Husimi, CsvLayout) {
  const HusimiGrid g = husimi_grid(make_css(2, 1.0, 1.0), 3, 4);
  std::ostringstream os;
  g.write_csv(os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# husimi n_atoms=2 n_theta=3 n_phi=4");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# quadrature_normalization=", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "theta,phi,q");
  int rows = 0;
  while (std::getline(in, line))
    ++rows;
  EXPECT_EQ(rows, 12);
}

TEST(Husimi, RejectsTinyGrids) {
  EXPECT_THROW(husimi_grid(make_css(2, 0, 0), 1, 10), ArgumentError);
  EXPECT_THROW(husimi_grid(make_css(2, 0, 0), 10, 1), ArgumentError);
}

}  // namespace
}  // namespace catspin
