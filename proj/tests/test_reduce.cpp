#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ermakov/error.hpp"
#include "ermakov/reduce.hpp"

using namespace ermakov;

namespace {

Expr P(const char* s) { return parse_expr(s); }

double max_abs_diff_on_grid(const Expr& a, const Expr& b, double t0, double t1, int n = 101) {
  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = t0 + (t1 - t0) * i / n;
    worst = std::max(worst, std::abs(a.eval(t) - b.eval(t)));
  }
  return worst;
}

NamedParams params(const char* p, const char* q, double k) {
  NamedParams np;
  np.p = P(p);
  np.q = P(q);
  np.k = k;
  return np;
}

}  // namespace

TEST(ZetaFactor, ZeroDamping) {
  const ZetaFactor z = zeta_factor(P("0"), 1.7, 0.0, 2.0);
  for (double t : {0.0, 0.3337, 1.0, 2.0}) EXPECT_EQ(z(t), 1.7);
}

TEST(ZetaFactor, ConstantDamping) {
  const ZetaFactor z = zeta_factor(P("2"), 1.0, 0.0, 1.0);
  EXPECT_EQ(z(0.0), 1.0);
  // e^-1 (mpmath: 0.367879441171442321595523770161)
  EXPECT_NEAR(z(1.0), 0.3678794411714423, 1e-9);
  EXPECT_NEAR(z.derivative(1.0), -0.3678794411714423, 1e-9);
}

TEST(ZetaFactor, HarmonicDamping) {
  // integral_0^3 dt/(1+t) = log 4, so zeta(3) = 4^-1/2.
  const ZetaFactor z = zeta_factor(P("1/(1+t)"), 1.0, 0.0, 3.0);
  EXPECT_NEAR(z(3.0), 0.5, 1e-8);
  // Off-grid points use the Hermite interpolant.
  EXPECT_NEAR(z(1.23456), 1.0 / std::sqrt(2.23456), 1e-10);
  EXPECT_THROW(z(3.5), DomainError);
}

TEST(ZetaFactor, RejectsZeroScale) { EXPECT_THROW(zeta_factor(P("1"), 0.0, 0.0, 1.0), DomainError); }

TEST(OmegaReduced, Cases) {
  EXPECT_NEAR(max_abs_diff_on_grid(omega_reduced(P("1+t"), P("0")), P("(1+t)^2"), 0, 3), 0.0, 1e-14);
  EXPECT_NEAR(max_abs_diff_on_grid(omega_reduced(P("cos(t)"), P("0.6")), P("cos(t)^2 - 0.09"), 0, 3), 0.0, 1e-14);
  const Expr o = omega_reduced(P("2"), P("2*t"));
  EXPECT_DOUBLE_EQ(o.eval(1.0), 2.0);
  EXPECT_NEAR(max_abs_diff_on_grid(o, P("3 - t^2"), -2, 2), 0.0, 1e-14);
}

TEST(RemoveDamping, CaldirolaKanaiCouplingIsConstant) {
  const double gamma0 = 0.5;
  const double k0 = 2.0;
  const ReducedPinney r = remove_damping(caldirola_kanai(gamma0, P("1"), k0), 0.0, 5.0, 1e-3);
  for (int i = 0; i <= 5000; ++i) ASSERT_NEAR(r.coupling(i * 1e-3), k0, 1e-12 * k0) << i;
  EXPECT_DOUBLE_EQ(r.omega2().eval(0.0), 1.0 - gamma0 * gamma0 / 4.0);
}

TEST(RemoveDamping, ZeroDampingIsIdentity) {
  const DampedPinney sys{P("0"), P("1+0.5*t"), P("2")};
  const ReducedPinney r = remove_damping(sys, 0.0, 2.0, 1e-3, 1.0);
  for (double t : {0.0, 0.5, 2.0}) {
    EXPECT_EQ(r.zeta()(t), 1.0);
    EXPECT_EQ(r.coupling(t), 2.0);
    EXPECT_DOUBLE_EQ(r.omega2().eval(t), std::pow(1 + 0.5 * t, 2));
  }
  const ReducedPinney scaled = remove_damping(sys, 0.0, 2.0, 1e-3, 2.0);
  EXPECT_DOUBLE_EQ(scaled.coupling(1.0), 2.0 / 16.0);
}

TEST(RemoveDamping, CrossIntegration) {
  const DampedPinney sys{P("1"), P("1"), P("1")};
  const double t0 = 0.0, t1 = 5.0, h = 1e-3;
  const Trajectory direct = integrate_system(sys.as_system(), t0, t1, h, 1.0, 0.0);

  const ReducedPinney r = remove_damping(sys, t0, t1, h);
  const auto [y0, w0] = r.push_forward(t0, 1.0, 0.0);
  EXPECT_EQ(y0, 1.0);
  EXPECT_EQ(w0, 0.5);  // (xdot - zeta' y)/zeta with zeta' = -1/2
  IntegrateOptions opts;
  opts.singular_components = {0};
  const double init[] = {y0, w0};
  const Trajectory reduced = rk4_integrate(r.field(), t0, t1, h, init, opts);

  ASSERT_EQ(direct.size(), reduced.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < direct.size(); ++i) {
    const auto [x, xdot] = r.pull_back(direct.time(i), reduced.value(i, 0), reduced.value(i, 1));
    worst = std::max(worst, std::abs(x - direct.value(i, 0)));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Reparametrize, IdentityAlpha) {
  const SecondOrderSystem sys{P("0.3"), P("-1"), P("2")};
  const ReparametrizedSystem r = reparametrize(sys, P("1"), 0.5, 2.0);
  EXPECT_TRUE(r.coefficients_in_t().a == sys.a);
  EXPECT_TRUE(r.coefficients_in_t().b == sys.b);
  EXPECT_TRUE(r.coefficients_in_t().c == sys.c);
  for (double t : {0.5, 1.0, 1.7, 2.0}) EXPECT_NEAR(r.s_of_t(t), t - 0.5, 1e-14);
  EXPECT_NEAR(r.t_of_s(1.0), 1.5, 1e-12);
}

TEST(Reparametrize, VelocityKillingAlpha) {
  const SecondOrderSystem sys{P("1"), P("-1 - 0.2*t"), P("1")};
  const ReparametrizedSystem r = reparametrize(sys, P("exp(t)"), 0.0, 2.0);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(r.s_begin(), r.s_end());
  for (int i = 0; i < 20; ++i) {
    const double s = dist(rng);
    EXPECT_LE(std::abs(r.A(s)), 1e-13);
    const double t = r.t_of_s(s);
    EXPECT_NEAR(r.B(s), (-1 - 0.2 * t) * std::exp(-2 * t), 1e-14);
  }
  // s = e^t - 1 in closed form.
  EXPECT_NEAR(r.t_of_s(std::exp(1.5) - 1.0), 1.5, 1e-8);
}

TEST(Reparametrize, ChiniTau) {
  // tau = integral dt/sqrt(p) with p = (1+t)^2 is log(1+t).
  const NamedParams np = params("(1+t)^2", "1", 1.0);
  const SecondOrderSystem chini = named_system("chini", np);
  const ReparametrizedSystem r = reparametrize(chini, Expr::constant(1.0) / sqrt(np.p), 0.0, 2.0);
  EXPECT_NEAR(r.t_of_s(std::log(2.0)), 1.0, 1e-8);
  EXPECT_NEAR(r.s_of_t(2.0), std::log(3.0), 1e-10);
}

TEST(Reparametrize, SignChangeRejected) {
  const SecondOrderSystem sys{P("0"), P("-1"), P("1")};
  EXPECT_THROW(reparametrize(sys, P("cos(t)"), 0.0, 3.0), DomainError);
  EXPECT_THROW(reparametrize(sys, P("t"), 0.0, 1.0), DomainError);
  EXPECT_NO_THROW(reparametrize(sys, P("-1 - t"), 0.0, 1.0));
}

TEST(Reparametrize, SolutionTransport) {
  const SecondOrderSystem sys{P("1"), P("-1"), P("1")};
  const double t0 = 0.0, t1 = 2.0, h = 1e-3;
  const Trajectory direct = integrate_system(sys, t0, t1, h, 1.0, 0.5);
  const ReparametrizedSystem r = reparametrize(sys, P("exp(t)"), t0, t1, h);
  const double init[] = {1.0, r.to_s_velocity(t0, 0.5)};
  IntegrateOptions opts;
  opts.singular_components = {0};
  const Trajectory in_s = rk4_integrate(r.field(), r.s_begin(), r.s_end(), h, init, opts);
  double worst = 0.0;
  for (std::size_t i = 0; i < direct.size(); i += 10) {
    worst = std::max(worst, std::abs(in_s.hermite(r.s_of_t(direct.time(i)), 0, 1) - direct.value(i, 0)));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(QuasiLie, IdentityGauge) {
  const SecondOrderSystem sys{P("sin(t)"), P("-1-t"), P("2+t")};
  const TransformedCoefficients tc = quasi_lie_transform(sys, {P("1"), P("0")});
  EXPECT_TRUE(tc.a == sys.a);
  EXPECT_TRUE(tc.b == sys.b);
  EXPECT_TRUE(tc.c == sys.c);
  EXPECT_TRUE(tc.d.is_constant(1.0));
  EXPECT_TRUE(tc.e.is_constant(0.0));
}

TEST(QuasiLie, DAndEAreAlphaAndBeta) {
  const SecondOrderSystem sys{P("sin(t)"), P("-1-t"), P("2+t")};
  const GaugeTransform g{P("2+cos(t)"), P("t^2")};
  const TransformedCoefficients tc = quasi_lie_transform(sys, g);
  EXPECT_TRUE(tc.d == g.alpha);
  EXPECT_TRUE(tc.e == g.beta);
}

TEST(QuasiLie, CaldirolaKanaiGauge) {
  const double gamma0 = 0.4, k0 = 3.0;
  const SecondOrderSystem ck = caldirola_kanai(gamma0, P("1.5"), k0).as_system();
  const Expr alpha = exp(Expr::constant(-gamma0) * Expr::variable());
  const TransformedCoefficients tc = quasi_lie_transform(ck, {alpha, Expr()});
  for (double t : {0.0, 0.7, 2.5, 5.0}) {
    EXPECT_NEAR(tc.a.eval(t), 0.0, 1e-15);
    EXPECT_NEAR(tc.c.eval(t), k0 * std::exp(-gamma0 * t), 1e-14);
    EXPECT_NEAR(tc.c.eval(t) / alpha.eval(t), k0, 1e-13);
  }
}

TEST(QuasiLie, ZeroBeta) {
  const SecondOrderSystem sys{P("sin(t)"), P("-1-t"), P("2+t")};
  const Expr alpha = P("1+t^2");
  const TransformedCoefficients tc = quasi_lie_transform(sys, {alpha, Expr()});
  EXPECT_LE(max_abs_diff_on_grid(tc.a, P("sin(t) - 2*t/(1+t^2)"), 0, 3), 1e-14);
  EXPECT_LE(max_abs_diff_on_grid(tc.b, P("(-1-t)/(1+t^2)"), 0, 3), 1e-14);
  EXPECT_LE(max_abs_diff_on_grid(tc.c, P("(2+t)/(1+t^2)"), 0, 3), 1e-14);
}

TEST(QuasiLieProperty, GaugeRoundTrip) {
  const std::vector<std::pair<const char*, const char*>> gauges{
      {"1+t^2", "t"}, {"exp(0.3*t)", "sin(t)"}, {"2+cos(3*t)", "-0.5"}, {"-1-t", "t^2 - 1"}, {"sqrt(1+t)", "0"}};
  const SecondOrderSystem sys{P("sin(t) - 0.2"), P("-1-t"), P("2+t")};
  const TransformedCoefficients original = TransformedCoefficients::from_system(sys);
  for (const auto& [a, b] : gauges) {
    const GaugeTransform g{P(a), P(b)};
    const TransformedCoefficients back = quasi_lie_transform(quasi_lie_transform(original, g), g.inverse());
    for (int i = 0; i <= 200; ++i) {
      const double t = 3.0 * i / 200;
      auto close = [&](const Expr& x, const Expr& y) {
        const double vx = x.eval(t);
        const double vy = y.eval(t);
        return std::abs(vx - vy) <= 1e-12 * (1.0 + std::abs(vy));
      };
      ASSERT_TRUE(close(back.a, original.a)) << a << "," << b << " t=" << t;
      ASSERT_TRUE(close(back.b, original.b)) << a << "," << b << " t=" << t;
      ASSERT_TRUE(close(back.c, original.c)) << a << "," << b << " t=" << t;
      ASSERT_TRUE(close(back.d, original.d)) << a << "," << b << " t=" << t;
      ASSERT_TRUE(close(back.e, original.e)) << a << "," << b << " t=" << t;
    }
  }
}

TEST(Reducibility, Chini) {
  const NamedParams np = params("(1+t)^2", "1", 1.0);
  const SecondOrderSystem sys = named_system("chini", np);
  const ReducibilityReport r = reducibility_check(sys, 0.0, 5.0);
  ASSERT_TRUE(r.pass);
  EXPECT_TRUE(r.symbolic_zero);
  EXPECT_EQ(*r.k, 1.0);
  EXPECT_TRUE(r.gauge->beta.is_constant(0.0));
  EXPECT_LE(max_abs_diff_on_grid(r.gauge->alpha, P("1/sqrt((1+t)^2)"), 0, 5), 1e-12);
}

TEST(Reducibility, Walter) {
  const SecondOrderSystem sys = named_system("walter", params("1+t^2", "1", 1.0));
  const ReducibilityReport r = reducibility_check(sys, 0.0, 5.0);
  ASSERT_TRUE(r.pass);
  EXPECT_LE(max_abs_diff_on_grid(r.gauge->alpha, P("1/(1+t^2)"), 0, 5), 1e-12);
}

TEST(Reducibility, ColegraveAbdalla) {
  const SecondOrderSystem sys = named_system("colegrave-abdalla", params("exp(t)", "1", 1.0));
  for (double t : {0.0, 1.0, 2.5}) {
    EXPECT_NEAR(sys.a.eval(t), 2.0, 1e-15);
    EXPECT_NEAR(sys.b.eval(t), -std::exp(2 * t), 1e-13 * std::exp(2 * t));
    EXPECT_NEAR(sys.c.eval(t), std::exp(4 * t), 1e-13 * std::exp(4 * t));
  }
  const ReducibilityReport r = reducibility_check(sys, 0.0, 5.0);
  ASSERT_TRUE(r.pass);
  for (double t : {0.0, 1.0, 3.0, 5.0}) {
    EXPECT_NEAR(r.gauge->alpha.eval(t), std::exp(2 * t), 1e-12 * std::exp(2 * t));
  }
}

TEST(Reducibility, ControlFails) {
  const SecondOrderSystem sys{P("1"), P("-1"), P("1")};
  const ReducibilityReport r = reducibility_check(sys, 0.0, 5.0);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.symbolic_zero);
  EXPECT_EQ(r.max_residual, 1.0);
  EXPECT_FALSE(r.k.has_value());
  EXPECT_FALSE(r.gauge.has_value());
}

TEST(Reducibility, NegativeCoupling) {
  const SecondOrderSystem sys = named_system("chini", params("(1+t)^2", "1", -2.0));
  const ReducibilityReport r = reducibility_check(sys, 0.0, 2.0);
  ASSERT_TRUE(r.pass);
  EXPECT_EQ(*r.k, -2.0);
  EXPECT_NEAR(r.gauge->alpha.eval(0.0), 1.0, 1e-15);
}

TEST(Reducibility, SignChangeOfC) {
  const SecondOrderSystem sys{P("0"), P("-1"), P("cos(t)")};
  EXPECT_THROW(reducibility_check(sys, 0.0, 3.0), DomainError);
}

TEST(NamedSystem, ChiniWithConstantP) {
  const SecondOrderSystem sys = named_system("chini", params("1", "2+sin(t)", 3.0));
  EXPECT_TRUE(sys.a.is_constant(0.0));
  EXPECT_DOUBLE_EQ(sys.b.eval(1.0), -(2 + std::sin(1.0)));
  EXPECT_DOUBLE_EQ(sys.c.eval(1.0), 3.0);
}

TEST(NamedSystem, WalterResidual) {
  const SecondOrderSystem sys = named_system("walter", params("1+t^2", "1", 2.0));
  const ReducibilityReport r = reducibility_check(sys, 0.0, 5.0);
  EXPECT_LE(r.max_residual, 1e-12);
  EXPECT_EQ(*r.k, 2.0);
}

TEST(NamedSystem, UnknownName) { EXPECT_THROW(named_system("riccati", {}), ConfigError); }

TEST(ErmakovForm, NamedSystemsMatch) {
  const std::vector<std::pair<const char*, NamedParams>> cases{
      {"chini", params("(1+t)^2", "1", 1.0)},
      {"walter", params("1+t^2", "1", 1.0)},
      {"colegrave-abdalla", params("exp(t)", "1", 1.0)},
  };
  for (const auto& [name, np] : cases) {
    const SecondOrderSystem sys = named_system(name, np);
    const ReducibilityReport r = reducibility_check(sys, 0.0, 5.0);
    ASSERT_TRUE(r.pass) << name;
    EXPECT_LE(ermakov_coupling_deviation(sys, r, 0.0, 5.0), 1e-10 * std::abs(*r.k)) << name;
    const ErmakovSystem e = ermakov_form(sys, r);
    EXPECT_EQ(e.k, *r.k);
    // omega^2 = -sqrt(k/c) b
    for (double t : {0.0, 1.0, 4.0}) {
      const double expected = -std::sqrt(*r.k / sys.c.eval(t)) * sys.b.eval(t);
      EXPECT_NEAR(e.omega2.eval(t), expected, 1e-12 * (1 + std::abs(expected))) << name;
    }
  }
}

TEST(ErmakovForm, RequiresPass) {
  const SecondOrderSystem sys{P("1"), P("-1"), P("1")};
  const ReducibilityReport r = reducibility_check(sys, 0.0, 1.0);
  EXPECT_THROW(ermakov_form(sys, r), VerificationError);
}
