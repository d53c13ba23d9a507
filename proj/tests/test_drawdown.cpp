#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "gsdd/drawdown.hpp"

using namespace gsdd;

TEST(Drawdown, ZeroIsRuin) {
  auto d = DrawdownSpec::zero();
  EXPECT_EQ(d.xi(5.0), 0.0);
  EXPECT_EQ(d.xi_bar(5.0), 5.0);
  EXPECT_EQ(d.varsigma_bar(5.0), 5.0);
  EXPECT_EQ(d.asymptotic_slope(), 1.0);
}

TEST(Drawdown, LinearExample) {
  auto d = DrawdownSpec::linear(0.6, 0.5);
  EXPECT_NEAR(d.xi(2.0), 0.7, 1e-15);
  EXPECT_NEAR(d.xi_bar(2.0), 1.3, 1e-15);
  EXPECT_NEAR(d.asymptotic_slope(), 0.4, 1e-15);
}

TEST(Drawdown, LinearValidation) {
  EXPECT_THROW(DrawdownSpec::linear(1.0, 0.5), InvalidArgument);
  EXPECT_THROW(DrawdownSpec::linear(0.5, -0.1), InvalidArgument);
  EXPECT_THROW(DrawdownSpec::linear(0.5, 0.0), InvalidArgument);
  EXPECT_NO_THROW(DrawdownSpec::linear(-0.5, 0.0));
  EXPECT_NO_THROW(DrawdownSpec::linear(0.0, 0.0));
}

TEST(Drawdown, TaxExample) {
  auto d = DrawdownSpec::tax(0.3, 1.0);
  EXPECT_NEAR(d.xi(3.0), 0.6, 1e-15);
  EXPECT_NEAR(d.xi_bar(3.0), 2.4, 1e-15);
  EXPECT_NEAR(d.xi_bar_inverse(2.4), 3.0, 1e-14);
  EXPECT_THROW(d.xi_bar(0.5), DomainError);
  EXPECT_THROW(d.xi_bar_inverse(0.5), DomainError);
}

TEST(Drawdown, TaxInverseExamples) {
  EXPECT_NEAR(DrawdownSpec::tax(0.0, 1.0).xi_bar_inverse(3.7), 3.7, 1e-15);
  // x0 must be positive here; the inverse formula is x0 + (s - x0)/(1 - gamma)
  auto d = DrawdownSpec::tax(0.5, 1e-300);
  EXPECT_NEAR(d.xi_bar_inverse(1.0), 2.0, 1e-14);
  EXPECT_THROW(DrawdownSpec::linear(0.1, 0.2).xi_bar_inverse(1.0), InvalidArgument);
}

TEST(Drawdown, TaxZeroRateIsRuin) {
  auto d = DrawdownSpec::tax(0.0, 2.0);
  for (double z = 2.0; z < 20.0; z += 0.7) EXPECT_EQ(d.xi(z), 0.0);
}

TEST(Drawdown, PiecewiseTaxRoundTrip) {
  PiecewiseConstant g{{2.0, 4.0}, {0.1, 0.5, 0.3}};
  auto d = DrawdownSpec::tax(g, 1.0);
  // xi(z) = 0.1 (2-1) + 0.5 (4-2) + 0.3 (z-4) for z > 4
  EXPECT_NEAR(d.xi(5.0), 0.1 + 1.0 + 0.3, 1e-14);
  EXPECT_NEAR(d.asymptotic_slope(), 0.7, 1e-15);
  EXPECT_EQ(d.kinks(1.0, 10.0), (std::vector<double>{2.0, 4.0}));
  for (double z = 1.0; z < 12.0; z += 0.173) EXPECT_NEAR(d.xi_bar_inverse(d.xi_bar(z)), z, 1e-10);
}

TEST(Drawdown, TaxValidation) {
  EXPECT_THROW(DrawdownSpec::tax(1.0, 1.0), InvalidArgument);
  EXPECT_THROW(DrawdownSpec::tax(-0.1, 1.0), InvalidArgument);
  EXPECT_THROW(DrawdownSpec::tax(0.2, 0.0), InvalidArgument);
  EXPECT_THROW(DrawdownSpec::tax(PiecewiseConstant{{3.0, 2.0}, {0.1, 0.2, 0.3}}, 1.0), InvalidArgument);
}

TEST(Drawdown, Barrier) {
  auto d = DrawdownSpec::barrier(3.0);
  for (double z = 0.1; z < 10.0; z += 0.1) {
    EXPECT_EQ(d.xi_bar(z), std::min(z, 3.0));
    EXPECT_EQ(d.xi(z), std::max(z - 3.0, 0.0));
  }
  EXPECT_EQ(d.asymptotic_slope(), 0.0);
  EXPECT_EQ(d.kinks(1.0, 5.0), (std::vector<double>{3.0}));
  EXPECT_THROW(DrawdownSpec::barrier(0.0), InvalidArgument);
}

TEST(Drawdown, DistancesPositiveAndOrdered) {
  std::vector<DrawdownSpec> specs = {
      DrawdownSpec::zero(), DrawdownSpec::linear(0.3, 0.5), DrawdownSpec::linear(-0.4, 0.0),
      DrawdownSpec::tax(0.3, 0.5), DrawdownSpec::barrier(3.0),
      DrawdownSpec::linear(0.6, 0.5).with_min_capital(MinCapital::constant(0.2))};
  for (auto& d : specs)
    for (double z = 0.5; z < 30.0; z += 0.25) {
      EXPECT_GT(d.xi_bar(z), 0.0);
      EXPECT_GT(d.varsigma_bar(z), 0.0);
      EXPECT_LE(d.varsigma_bar(z), d.xi_bar(z));
    }
}

TEST(Drawdown, MinCapital) {
  auto d = DrawdownSpec::linear(0.6, 0.5).with_min_capital(MinCapital::constant(0.3));
  EXPECT_TRUE(d.constrained());
  EXPECT_NEAR(d.varsigma(2.0), 0.7 + 0.3, 1e-15);
  EXPECT_NEAR(d.varsigma_bar(2.0), 1.0, 1e-15);
  auto pieces = d.varsigma_bar_pieces(1.0, 5.0);
  ASSERT_EQ(pieces.size(), 1u);
  EXPECT_NEAR(pieces[0].at(2.0), 1.0, 1e-15);
  // theta exceeding the drawdown distance is rejected where it happens
  auto bad = DrawdownSpec::zero().with_min_capital(MinCapital::constant(2.0));
  EXPECT_THROW(bad.varsigma_bar(1.5), DomainError);
  EXPECT_THROW(bad.check_start(1.5), DomainError);
  EXPECT_NO_THROW(bad.check_start(2.5));
  EXPECT_THROW(MinCapital::constant(-1.0), InvalidArgument);
}

TEST(Drawdown, FunctionMinCapital) {
  auto d = DrawdownSpec::zero().with_min_capital(MinCapital::function([](double z) { return 0.1 * z; }));
  EXPECT_NEAR(d.varsigma_bar(4.0), 3.6, 1e-15);
  EXPECT_TRUE(d.varsigma_bar_pieces(1.0, 2.0).empty());
}

TEST(Drawdown, PiecesCoverRange) {
  auto d = DrawdownSpec::barrier(3.0);
  auto p = d.xi_bar_pieces(1.0, std::numeric_limits<double>::infinity());
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].lo, 1.0);
  EXPECT_EQ(p[0].hi, 3.0);
  EXPECT_EQ(p[1].slope, 0.0);
  EXPECT_EQ(p[1].at(100.0), 3.0);
}
