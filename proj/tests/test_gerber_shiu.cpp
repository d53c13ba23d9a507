#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "gsdd/gerber_shiu.hpp"
#include "gsdd/mc_oracle.hpp"

using namespace gsdd;

namespace {

LevyModel cl() { return LevyModel(CramerLundberg{1.1, 2.0, 2.0}); }
LevyModel bm() { return LevyModel(BrownianDrift{0.3, 1.0}); }
LevyModel jd() { return LevyModel(JumpDiffusion{3.0, 0.5, 2.0, 2.0}); }

std::vector<DrawdownSpec> table1() {
  return {DrawdownSpec::zero(), DrawdownSpec::linear(0.3, 0.5), DrawdownSpec::linear(0.5, 0.5),
          DrawdownSpec::linear(0.6, 0.5)};
}

template <class F>
double gk(F f, double a, double b, double tol = 1e-11) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  return GK::integrate(f, a, b, 12, tol);
}

}  // namespace

TEST(GerberShiu, ClassicalRuinClosedForms) {
  const double c = 1.1, l = 2.0, mu = 2.0;
  double exact = l / (c * mu) * std::exp(-(mu - l / c));
  EXPECT_NEAR(drawdown_probability(cl(), DrawdownSpec::zero(), 1.0), exact, 1e-7);
  EXPECT_NEAR(drawdown_probability(bm(), DrawdownSpec::zero(), 1.0), std::exp(-0.6), 1e-6);
  for (double x : {0.5, 2.0, 5.0}) {
    EXPECT_NEAR(drawdown_probability(cl(), DrawdownSpec::zero(), x),
                l / (c * mu) * std::exp(-(mu - l / c) * x), 1e-7);
    EXPECT_NEAR(drawdown_probability(bm(), DrawdownSpec::zero(), x), std::exp(-0.6 * x), 1e-6);
  }
}

TEST(GerberShiu, CertainDrawdownWithoutNetProfit) {
  LevyModel m(JumpDiffusion{1.9, 0.5, 2.0, 2.0});
  EXPECT_NEAR(drawdown_probability(m, DrawdownSpec::zero(), 1.0), 1.0, 1e-6);
  EXPECT_NEAR(drawdown_probability(m, DrawdownSpec::linear(0.5, 0.5), 1.0), 1.0, 1e-6);
}

TEST(GerberShiu, TripleIntegralOfClDensities) {
  // integrate the pointwise densities directly; the engine uses the
  // pre-integrated kernel, so this checks both assemblies at once
  LevyModel m = cl();
  auto spec = DrawdownSpec::zero();
  DrawdownEngine<double> e(m, spec, 0.0, 0.0, 1.0);
  auto in_s = [&](double s) {
    // z-integral of nu(y + z) over z > 0 is the Levy tail at y
    double atom = e.exit(s) * e.scale_lambda().w0_plus() * m.levy_tail(s);
    auto fy = [&](double y) {
      return gk([&](double z) { return e.jump_continuous(s, y, z); }, 0.0, 60.0, 1e-12);
    };
    return atom + gk(fy, 0.0, s, 1e-10);
  };
  double total = gk(in_s, 1.0, 40.0, 1e-9) + gk(in_s, 40.0, 250.0, 1e-9);
  double exact = 2.0 / 2.2 * std::exp(-(2.0 - 2.0 / 1.1));
  EXPECT_NEAR(total, exact, 1e-6);
}

TEST(GerberShiu, ExitReducesToScaleRatio) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(0.1, 5.0), ud(0.01, 5.0), uq(0.0, 2.0);
  for (auto m : {cl(), bm(), jd()}) {
    for (int k = 0; k < 30; ++k) {
      double x = ux(rng), s = x + ud(rng), q = uq(rng);
      ScaleSet<double> w(m, q);
      double ref = w.w(x) / w.w(s);
      EXPECT_NEAR(exit_prob_drawdown(m, DrawdownSpec::zero(), q, x, s), ref, 1e-8 * ref);
    }
  }
}

TEST(GerberShiu, ExitLimitsAndDomain) {
  EXPECT_NEAR(exit_prob_drawdown(bm(), DrawdownSpec::linear(0.5, 0.5), 0.0, 1.0, 1.0 + 1e-12), 1.0, 1e-9);
  EXPECT_THROW(exit_prob_drawdown(bm(), DrawdownSpec::zero(), 0.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(exit_prob_drawdown(bm(), DrawdownSpec::zero(), 0.0, 1.0, 0.5), DomainError);
}

TEST(GerberShiu, ExitAffineShortcutMatchesQuadrature) {
  // integrate the hazard of W_q(xi_bar(z)) numerically as an oracle
  for (auto m : {cl(), bm(), jd()})
    for (auto spec : {DrawdownSpec::linear(0.5, 0.5), DrawdownSpec::barrier(2.0), DrawdownSpec::tax(0.3, 1.0)})
      for (double q : {0.0, 0.4}) {
        ScaleSet<double> w(m, q);
        const double x = 1.0, s = 3.5;
        auto f = [&](double z) { return w.w1(spec.xi_bar(z)) / w.w(spec.xi_bar(z)); };
        double ref = std::exp(-(gk(f, x, 2.0) + gk(f, 2.0, s)));
        EXPECT_NEAR(exit_prob_drawdown(m, spec, q, x, s), ref, 1e-10);
      }
}

TEST(GerberShiu, ExitAgainstMonteCarlo) {
  auto spec = DrawdownSpec::linear(0.5, 0.5);
  SimConfig cfg;
  cfg.n_paths = 40000;
  auto recs = simulate_drawdown(bm(), spec, 1.0, cfg);
  auto e = estimate(recs, [](const SimRecord& r) { return (!r.hit || r.s_max >= 2.0) ? 1.0 : 0.0; });
  double a = exit_prob_drawdown(bm(), spec, 0.0, 1.0, 2.0);
  EXPECT_LE(std::abs(a - e.mean), 3.0 * e.stderr_ + 2e-3) << a << " mc " << e.mean;
}

TEST(GerberShiu, CreepingVanishesWithoutGaussian) {
  for (double s : {1.1, 2.0, 6.0}) EXPECT_EQ(creeping_density(cl(), DrawdownSpec::zero(), 0.1, 0.2, 1.0, s), 0.0);
}

TEST(GerberShiu, CreepingAtStart) {
  auto spec = DrawdownSpec::linear(0.5, 0.5);
  for (auto m : {bm(), jd()}) {
    ScaleSet<double> w(m, 0.3);
    const double u = spec.xi_bar(1.0), sg = m.sigma();
    double ref = 0.5 * sg * sg * (w.w1(u) * w.w1(u) / w.w(u) - w.w2(u));
    EXPECT_NEAR(creeping_density(m, spec, 0.1, 0.3, 1.0, 1.0 + 1e-13), ref, 1e-9 * ref);
  }
}

TEST(GerberShiu, BrownianRuinIsAllCreeping) {
  auto spec = DrawdownSpec::zero();
  auto f = [&](double s) { return creeping_density(bm(), spec, 0.0, 0.0, 1.0, s); };
  double total = gk(f, 1.0 + 1e-12, 10.0) + gk(f, 10.0, 80.0);
  EXPECT_NEAR(total, std::exp(-0.6), 1e-8);
}

TEST(GerberShiu, RuinDensitiesReduceToClassicalForm) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (auto m : {cl(), jd()})
    for (int k = 0; k < 40; ++k) {
      double x = 0.2 + 3 * u01(rng), s = x + 4 * u01(rng) + 1e-3, y = s * u01(rng), z = 3 * u01(rng) + 1e-6;
      double q = 2 * u01(rng);
      ScaleSet<double> w(m, q);
      double ref = w.w(x) / w.w(s) * (w.w1(s - y) - w.w(s - y) * w.w1(s) / w.w(s)) * m.levy_density(y + z);
      double v = jump_density_continuous(m, DrawdownSpec::zero(), q, q, x, s, y, z);
      EXPECT_NEAR(v, ref, 1e-10 * std::max(std::abs(ref), 1e-3));
      if (m.family() == Family::CramerLundberg) {
        double ra = w.w(x) / w.w(s) * w.w0_plus() * m.levy_density(s + z);
        EXPECT_NEAR(jump_density_atom(m, DrawdownSpec::zero(), q, q, x, s, z), ra, 1e-12);
      }
    }
}

TEST(GerberShiu, JumpDensityDomain) {
  auto spec = DrawdownSpec::linear(0.5, 0.5);
  // y >= s and y below xi(s) are outside the support
  EXPECT_EQ(jump_density_continuous(cl(), spec, 0, 0, 1.0, 2.0, 2.0, 0.3), 0.0);
  EXPECT_EQ(jump_density_continuous(cl(), spec, 0, 0, 1.0, 2.0, 0.4, 0.3), 0.0);
  EXPECT_GT(jump_density_continuous(cl(), spec, 0, 0, 1.0, 2.0, 0.6, 0.3), 0.0);
  EXPECT_EQ(jump_density_continuous(bm(), spec, 0, 0, 1.0, 2.0, 0.6, 0.3), 0.0);
  // a negative z is allowed down to -xi(s)
  EXPECT_GT(jump_density_continuous(cl(), spec, 0, 0, 1.0, 2.0, 0.6, -0.4), 0.0);
  EXPECT_EQ(jump_density_continuous(cl(), spec, 0, 0, 1.0, 2.0, 0.6, -0.6), 0.0);
}

TEST(GerberShiu, AtomExamples) {
  EXPECT_EQ(jump_density_atom(bm(), DrawdownSpec::zero(), 0, 0, 1.0, 2.0, 0.5), 0.0);
  EXPECT_EQ(jump_density_atom(jd(), DrawdownSpec::zero(), 0, 0, 1.0, 2.0, 0.5), 0.0);
  ScaleSet<double> w(cl(), 0.0);
  EXPECT_NEAR(jump_density_atom(cl(), DrawdownSpec::zero(), 0, 0, 1.0, 2.0, 0.5),
              w.w(1.0) / w.w(2.0) / 1.1 * 4.0 * std::exp(-5.0), 1e-14);
  EXPECT_THROW(jump_density_atom(cl(), DrawdownSpec::zero(), 0, 0, 1.0, 1.0, 0.5), DomainError);
}

TEST(GerberShiu, PenaltyIndicatorExamples) {
  auto one = PenaltySpec::indicator();
  EXPECT_NEAR(penalty_at_drawdown(bm(), DrawdownSpec::zero(), one, 1.0), std::exp(-0.6), 1e-6);
  EXPECT_NEAR(penalty_at_drawdown(cl(), DrawdownSpec::zero(), one, 1.0), 0.75795720, 1e-6);
  // the explicit omega path agrees with the pre-integrated kernel
  PenaltySpec explicit_one{[](double, double) { return 1.0; }, 0.2, 0.2, 1.0};
  for (auto m : {cl(), bm(), jd()})
    EXPECT_NEAR(penalty_at_drawdown(m, DrawdownSpec::linear(0.5, 0.5), explicit_one, 1.0),
                joint_laplace(m, DrawdownSpec::linear(0.5, 0.5), 0.2, 0.2, 1.0), 1e-6);
}

TEST(GerberShiu, BrownianRuinTransform) {
  for (double rho : {0.05, 0.3, 1.0}) {
    double ref = std::exp(-(0.3 + std::sqrt(0.09 + 2 * rho)) * 1.0);
    EXPECT_NEAR(joint_laplace(bm(), DrawdownSpec::zero(), rho, rho, 1.0), ref, 1e-6 * ref);
  }
}

TEST(GerberShiu, JointLaplaceAtZeroIsProbability) {
  for (auto m : {cl(), bm(), jd()})
    for (auto& spec : table1())
      EXPECT_NEAR(joint_laplace(m, spec, 0.0, 0.0, 1.0), drawdown_probability(m, spec, 1.0), 1e-12);
}

TEST(GerberShiu, TableOneOrdering) {
  for (auto m : {cl(), bm(), jd()})
    for (double x : {1.0, 3.0, 7.0}) {
      std::vector<double> p;
      for (auto& spec : table1()) p.push_back(drawdown_probability(m, spec, x));
      EXPECT_GE(p[3], p[2]);
      EXPECT_GE(p[2], std::max(p[0], p[1]));
      for (double v : p) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
}

TEST(GerberShiu, DiscountMonotonicity) {
  auto spec = DrawdownSpec::linear(0.6, 0.5);
  for (auto m : {cl(), bm(), jd()}) {
    double prev = 2.0;
    for (double q : {0.0, 0.1, 0.5, 2.0}) {
      double v = joint_laplace(m, spec, q, 0.3, 1.0);
      EXPECT_LE(v, prev + 1e-9);
      prev = v;
    }
    prev = 2.0;
    for (double l : {0.0, 0.1, 0.5, 2.0}) {
      double v = joint_laplace(m, spec, 0.3, l, 1.0);
      EXPECT_LE(v, prev + 1e-9);
      prev = v;
    }
  }
}

TEST(GerberShiu, ComplexEvaluationMatchesRealAxis) {
  auto spec = DrawdownSpec::linear(0.5, 0.5);
  for (auto m : {cl(), bm(), jd()}) {
    cplx v = joint_laplace(m, spec, cplx(0.3), cplx(0.7), 1.0);
    EXPECT_NEAR(v.real(), joint_laplace(m, spec, 0.3, 0.7, 1.0), 1e-8);
    EXPECT_NEAR(v.imag(), 0.0, 1e-12);
  }
}

TEST(GerberShiu, BiffisKyprianouLaw) {
  // constant minimum capital v with xi = 0: s-integrated densities give the
  // triple law with the pre-ruin infimum above v
  for (auto m : {cl(), jd()})
    for (double v : {0.0, 0.3, 0.7}) {
      const double x = 1.0, q = 0.25;
      auto spec = DrawdownSpec::zero().with_min_capital(MinCapital::constant(v));
      DrawdownEngine<double> e(m, spec, q, q, x);
      ScaleSet<double> w(m, q);
      const double phi = m.phi(q);
      const double smax = e.truncation_point();
      for (double y : {0.5, 0.9, 1.4, 2.5})
        for (double z : {0.2, 1.0}) {
          if (y < v) continue;
          auto f = [&](double s) { return e.jump_continuous(s, y, z); };
          double lo = std::max(x, y);
          double val = gk(f, lo, lo + 5.0, 1e-12) + gk(f, lo + 5.0, smax, 1e-12);
          if (y > x) val += e.jump_atom(y, z);
          double ref = std::exp(-phi * y) * m.levy_density(y + z) *
                       (std::exp(phi * v) * w.w(x - v) - (y < x ? std::exp(phi * y) * w.w(x - y) : 0.0));
          EXPECT_NEAR(val, ref, 1e-7 * ref + 1e-12) << family_name(m.family()) << " v=" << v << " y=" << y;
        }
    }
}

TEST(GerberShiu, TruncationIsConservative) {
  // the truncated integral is nondecreasing in the cutoff and already at its limit
  for (auto m : {cl(), bm(), jd()}) {
    auto spec = DrawdownSpec::linear(0.5, 0.5);
    DrawdownEngine<double> e(m, spec, 0.0, 0.0, 1.0);
    const double smax = e.truncation_point();
    auto f = [&](double s) { return e.s_integrand(s); };
    double a = integrate(f, e.s_breakpoints(0.5 * (1.0 + smax)), {1e-10, 0, 4000}).value;
    double b = integrate(f, e.s_breakpoints(smax), {1e-10, 0, 4000}).value;
    double c = integrate(f, e.s_breakpoints(2.0 * smax), {1e-10, 0, 4000}).value;
    EXPECT_LE(a, b + 1e-12);
    EXPECT_LE(b, c + 1e-12);
    EXPECT_NEAR(b, c, 1e-7 * c);
  }
}

TEST(GerberShiu, ConstraintMonotonicity) {
  for (auto m : {cl(), jd()}) {
    double prev = 2.0;
    for (double v : {0.0, 0.1, 0.3, 0.6}) {
      auto spec = DrawdownSpec::linear(0.3, 0.5).with_min_capital(MinCapital::constant(v));
      double p = joint_laplace(m, spec, 0.1, 0.1, 1.0);
      EXPECT_LE(p, prev + 1e-9);
      prev = p;
    }
  }
}

TEST(GerberShiu, FunctionMinCapitalMatchesConstant) {
  auto base = DrawdownSpec::linear(0.3, 0.5);
  auto a = base.with_min_capital(MinCapital::constant(0.25));
  auto b = base.with_min_capital(MinCapital::function([](double) { return 0.25; }));
  for (auto m : {cl(), jd()}) {
    DrawdownEngine<double> ea(m, a, 0.2, 0.2, 1.0), eb(m, b, 0.2, 0.2, 1.0);
    for (double s : {1.5, 3.0, 6.0}) EXPECT_NEAR(ea.exit_constrained(s), eb.exit_constrained(s), 1e-9);
    EXPECT_NEAR(ea.total(), eb.total(), 1e-6);
  }
}

TEST(GerberShiu, ConstrainedAgainstMonteCarlo) {
  auto spec = DrawdownSpec::zero().with_min_capital(MinCapital::constant(0.4));
  SimConfig cfg;
  cfg.n_paths = 40000;
  for (auto m : {cl(), jd()}) {
    auto recs = simulate_drawdown(m, spec, 1.0, cfg);
    auto e = estimate(recs, [](const SimRecord& r) { return r.hit && r.constraint_ok ? 1.0 : 0.0; });
    double a = joint_laplace(m, spec, 0.0, 0.0, 1.0);
    EXPECT_LE(std::abs(a - e.mean), 3.0 * e.stderr_ + 2e-3) << family_name(m.family()) << " " << a << " mc " << e.mean;
  }
}

TEST(GerberShiu, AmericanPutBoundedAndSimulated) {
  const double K = 1.0, a = 0.0, q = 0.05;
  auto put = PenaltySpec::american_put(K, a, q);
  auto spec = DrawdownSpec::linear(0.5, 0.5);
  for (auto m : {cl(), jd()}) {
    double v = penalty_at_drawdown(m, spec, put, 1.0);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, K * joint_laplace(m, spec, q, q, 1.0) * (1 + 1e-7));
    SimConfig cfg;
    cfg.n_paths = 40000;
    auto recs = simulate_drawdown(m, spec, 1.0, cfg);
    auto e = estimate(recs, [&](const SimRecord& r) {
      return r.hit ? std::exp(-q * r.tau) * std::max(K - std::exp(a + r.w_at), 0.0) : 0.0;
    });
    EXPECT_LE(std::abs(v - e.mean), 3.0 * e.stderr_ + 2e-3) << family_name(m.family()) << " " << v << " mc " << e.mean;
  }
}

TEST(GerberShiu, TaxWithoutRateIsRuin) {
  auto g = PiecewiseConstant::constant(0.0);
  for (auto m : {cl(), bm(), jd()}) {
    const double x = 1.0, q = 0.2, l = 0.4;
    for (double s : {1.2, 2.0, 5.0}) {
      for (double y : {0.3, 1.1})
        for (double z : {0.2, 0.8}) {
          double r = jump_density_continuous(m, DrawdownSpec::zero(), q, l, x, s, y, z);
          EXPECT_NEAR(gs_tax_density(m, g, q, l, x, s, y, z), r, 1e-10 * std::max(r, 1.0));
        }
      EXPECT_NEAR(gs_tax_atom(m, g, q, l, x, s, 0.3), jump_density_atom(m, DrawdownSpec::zero(), q, l, x, s, 0.3),
                  1e-12);
      double c = creeping_density(m, DrawdownSpec::zero(), q, l, x, s);
      EXPECT_NEAR(gs_tax_creeping(m, g, q, l, x, s), c, 1e-10 * std::max(c, 1.0));
    }
  }
}

TEST(GerberShiu, TaxCreepingVanishesForCompoundPoisson) {
  EXPECT_EQ(gs_tax_creeping(cl(), PiecewiseConstant::constant(0.3), 0.1, 0.1, 1.0, 2.0), 0.0);
}

TEST(GerberShiu, TaxTotalAgainstMonteCarlo) {
  auto g = PiecewiseConstant::constant(0.3);
  SimConfig cfg;
  cfg.n_paths = 40000;
  for (auto m : {cl(), bm(), jd()}) {
    double a = TaxTransform<double>(m, g, 0.0, 0.0, 1.0).total();
    auto recs = simulate_tax(m, g, 1.0, cfg);
    auto e = estimate(recs, [](const TransformedRecord& r) { return r.process.hit ? 1.0 : 0.0; });
    EXPECT_LE(std::abs(a - e.mean), 3.0 * e.stderr_ + 2e-3) << family_name(m.family()) << " " << a << " mc " << e.mean;
    // the taxed ruin probability equals the xi_gamma-drawdown probability of X
    EXPECT_NEAR(a, drawdown_probability(m, DrawdownSpec::tax(g, 1.0), 1.0), 1e-6);
  }
}

TEST(GerberShiu, DividendBarrierMass) {
  for (auto m : {cl(), bm(), jd()})
    for (double q : {0.0, 0.1, 0.7}) {
      const double x = 1.0, b = 3.0;
      DividendTransform<double> dv(m, b, q, q, x);
      ScaleSet<double> w(m, q);
      double ref = w.w(x) / w.w1(b);
      EXPECT_NEAR(dv.barrier_mass(), ref, 1e-8 * ref);
    }
}

TEST(GerberShiu, DividendTotalMatchesBarrierRuinTransform) {
  for (auto m : {cl(), bm(), jd()})
    for (double q : {0.0, 0.1, 0.5}) {
      const double x = 1.0, b = 3.0;
      ScaleSet<double> w(m, q);
      auto Z = [&](double u) { return 1.0 + q * gk([&](double t) { return w.w(t); }, 0.0, u, 1e-13); };
      double ref = Z(x) - q * w.w(x) * w.w(b) / w.w1(b);
      EXPECT_NEAR(DividendTransform<double>(m, b, q, q, x).total(), ref, 1e-8);
    }
}

TEST(GerberShiu, DividendBelowBarrierIsRuinDensity) {
  for (auto m : {cl(), bm(), jd()}) {
    DividendTransform<double> dv(m, 50.0, 0.2, 0.3, 1.0);
    for (double s : {1.5, 4.0}) {
      EXPECT_NEAR(dv.density_below(s, 0.7, 0.4), jump_density_continuous(m, DrawdownSpec::zero(), 0.2, 0.3, 1.0, s, 0.7, 0.4),
                  1e-12);
      EXPECT_NEAR(dv.creeping_below(s), creeping_density(m, DrawdownSpec::zero(), 0.2, 0.3, 1.0, s), 1e-12);
    }
  }
  EXPECT_THROW(DividendTransform<double>(bm(), 1.0, 0.0, 0.0, 1.0), DomainError);
}

TEST(GerberShiu, DividendCreepingAtBarrierTail) {
  // for s > b the survival factor is geometric with rate W'(b)/W(b)
  LevyModel m = bm();
  const double x = 1.0, b = 2.0, q = 0.2;
  DividendTransform<double> dv(m, b, q, q, x);
  ScaleSet<double> w(m, q);
  double rate = w.w1(b) / w.w(b);
  double ref = w.w(x) / w.w(b) / rate * 0.5 * (w.w1(b) * w.w1(b) / w.w(b) - w.w2(b));
  EXPECT_NEAR(dv.creeping_at_barrier(), ref, 1e-8 * ref);
}

TEST(GerberShiu, FiniteBarrierReduction) {
  LevyModel m = cl();
  const double x = 1.0, b = 3.0, q = 0.3;
  EXPECT_EQ(finite_barrier_reduction(m, q, x, b, 3.5, 0.2), 0.0);
  ScaleSet<double> w(m, q);
  for (double y : {0.3, 0.9, 1.5, 2.5})
    for (double z : {0.1, 0.7}) {
      double closed = finite_barrier_reduction(m, q, x, b, y, z);
      double ref = w.w(x) * m.levy_density(y + z) * (w.w(b - y) / w.w(b) - w.w(x - y) / w.w(x));
      EXPECT_NEAR(closed, ref, 1e-14);
      auto f = [&](double s) { return jump_density_continuous(m, DrawdownSpec::zero(), q, q, x, s, y, z); };
      double lo = std::max(x, y);
      double num = gk(f, lo, b, 1e-13);
      if (y > x) num += jump_density_atom(m, DrawdownSpec::zero(), q, q, x, y, z);
      EXPECT_NEAR(num, closed, 1e-7 * closed);
    }
  EXPECT_THROW(finite_barrier_reduction(bm(), q, x, b, 0.5, 0.5), InvalidArgument);
  EXPECT_THROW(finite_barrier_reduction(m, q, 3.0, b, 0.5, 0.5), DomainError);
}

TEST(GerberShiu, ProbabilityClampAndReport) {
  auto r = drawdown_probability_detailed(LevyModel(JumpDiffusion{1.9, 0.5, 2.0, 2.0}), DrawdownSpec::zero(), 1.0);
  EXPECT_LE(r.value, 1.0);
  EXPECT_FALSE(r.out_of_range);
  EXPECT_GT(r.abs_error, 0.0);
}

TEST(GerberShiu, QuadratureConfigValidation) {
  QuadratureConfig c;
  c.rel_tol = 0.0;
  EXPECT_THROW(drawdown_probability(bm(), DrawdownSpec::zero(), 1.0, c), InvalidArgument);
  EXPECT_THROW(drawdown_probability(bm(), DrawdownSpec::zero(), 0.0), InvalidArgument);
}
