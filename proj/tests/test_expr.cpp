#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ermakov/error.hpp"
#include "ermakov/expr.hpp"

using namespace ermakov;

namespace {

double central_difference(const Expr& e, double t, double h = 1e-6) {
  return (e.eval(t + h) - e.eval(t - h)) / (2.0 * h);
}

// Random grammar-valid sources that stay finite and in-domain on [-1, 1].
class SourceGenerator {
 public:
  explicit SourceGenerator(unsigned seed) : rng_(seed) {}

  std::string make(int depth) {
    if (depth == 0) return leaf();
    switch (pick(9)) {
      case 0: return "(" + make(depth - 1) + " + " + make(depth - 1) + ")";
      case 1: return "(" + make(depth - 1) + " - " + make(depth - 1) + ")";
      case 2: return make(depth - 1) + " * " + make(depth - 1);
      case 3: return "(" + make(depth - 1) + ") / (2 + cos(" + make(depth - 1) + "))";
      case 4: return "sin(" + make(depth - 1) + ")";
      case 5: return "exp(0.3*" + make(depth - 1) + ")";
      case 6: return "log(2 + tanh(" + make(depth - 1) + "))";
      case 7: return "sqrt(1 + (" + make(depth - 1) + ")^2)";
      default: return "(" + make(depth - 1) + ")^" + std::to_string(1 + pick(3));
    }
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  std::string leaf() {
    switch (pick(5)) {
      case 0:
      case 1: return "t";
      case 2: return "pi";
      case 3: return "-t";
      default: {
        std::uniform_real_distribution<double> d(0.25, 2.0);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", d(rng_));
        return buf;
      }
    }
  }

  std::mt19937 rng_;
};

}  // namespace

TEST(ParseExpr, ZeroConstant) {
  const Expr e = parse_expr("0");
  EXPECT_EQ(e.kind(), Expr::Kind::Constant);
  EXPECT_EQ(e.eval(0.0), 0.0);
  EXPECT_EQ(e.eval(123.0), 0.0);
}

TEST(ParseExpr, LinearPlusSine) { EXPECT_EQ(parse_expr("2*t + sin(t)").eval(0.0), 0.0); }

TEST(ParseExpr, DecayingExponential) {
  // exp(-0.5*2) = e^-1 (mpmath, 30 digits: 0.367879441171442321595523770161)
  EXPECT_NEAR(parse_expr("exp(-0.5*t)").eval(2.0), 0.36787944117144233, 1e-15);
}

TEST(ParseExpr, Precedence) {
  EXPECT_DOUBLE_EQ(parse_expr("-t^2").eval(3.0), -9.0);
  EXPECT_DOUBLE_EQ(parse_expr("2^3^2").eval(0.0), 512.0);
  EXPECT_DOUBLE_EQ(parse_expr("1 - 2 - 3").eval(0.0), -4.0);
  EXPECT_DOUBLE_EQ(parse_expr("8 / 4 / 2").eval(0.0), 1.0);
  EXPECT_DOUBLE_EQ(parse_expr("2 * -3").eval(0.0), -6.0);
  EXPECT_DOUBLE_EQ(parse_expr("t^-2").eval(2.0), 0.25);
  EXPECT_DOUBLE_EQ(parse_expr(" ( 1 + t ) * 2 ").eval(1.0), 4.0);
  EXPECT_DOUBLE_EQ(parse_expr("1.5e2 + 2E-1").eval(0.0), 150.2);
  EXPECT_DOUBLE_EQ(parse_expr("e").eval(0.0), std::exp(1.0));
}

TEST(ParseExpr, Errors) {
  try {
    parse_expr("1 + * 2");
    FAIL() << "expected ParseError";
  } catch (const ParseError& err) {
    EXPECT_EQ(err.offset(), 4u);
  }
  EXPECT_THROW(parse_expr("x + 1"), ParseError);  // single variable only
  EXPECT_THROW(parse_expr("foo(t)"), ParseError);
  EXPECT_THROW(parse_expr("sin(t, t)"), ParseError);
  EXPECT_THROW(parse_expr("sin()"), ParseError);
  EXPECT_THROW(parse_expr("sin"), ParseError);
  EXPECT_THROW(parse_expr("(1 + t"), ParseError);
  EXPECT_THROW(parse_expr(""), ParseError);
  EXPECT_THROW(parse_expr("0x10"), ParseError);
  EXPECT_THROW(parse_expr("1_000"), ParseError);
  EXPECT_THROW(parse_expr("t(2)"), ParseError);
  EXPECT_THROW(parse_expr("1e999"), ParseError);
}

TEST(Eval, Basics) {
  EXPECT_EQ(parse_expr("t^2").eval(3.0), 9.0);
  // mpmath: sqrt(pi) = 1.77245385090551602729816748334
  EXPECT_NEAR(parse_expr("sqrt(pi)").eval(0.0), 1.7724538509055159, 1e-15);
}

TEST(Eval, DomainViolations) {
  EXPECT_THROW(parse_expr("1/t").eval(0.0), DomainError);
  EXPECT_THROW(parse_expr("log(t)").eval(0.0), DomainError);
  EXPECT_THROW(parse_expr("log(t)").eval(-1.0), DomainError);
  EXPECT_THROW(parse_expr("sqrt(t)").eval(-1e-3), DomainError);
  EXPECT_THROW(parse_expr("t^-1").eval(0.0), DomainError);
  EXPECT_THROW(parse_expr("t^0.5").eval(-2.0), DomainError);
  EXPECT_THROW(parse_expr("exp(t)").eval(1000.0), DomainError);
  EXPECT_NO_THROW(parse_expr("sqrt(t)").eval(0.0));
  EXPECT_DOUBLE_EQ(parse_expr("t^3").eval(-2.0), -8.0);
  try {
    parse_expr("1 + 1/(t - 1)").eval(1.0);
    FAIL();
  } catch (const DomainError& err) {
    EXPECT_NE(std::string(err.what()).find("(1/(t-1))"), std::string::npos) << err.what();
  }
}

TEST(Derivative, PowerRule) { EXPECT_DOUBLE_EQ(derivative(parse_expr("t^2")).eval(3.0), 6.0); }

TEST(Derivative, ConstantExpressionsGiveZeroConstant) {
  for (const char* src : {"2", "pi", "e^2 + sqrt(pi)", "sin(3)*4"}) {
    const Expr d = derivative(parse_expr(src));
    EXPECT_TRUE(d.is_constant(0.0)) << src;
  }
}

TEST(Derivative, Gaussian) {
  const Expr e = parse_expr("exp(-0.5*t^2)");
  const double d = derivative(e).eval(1.0);
  // mpmath: -exp(-0.5) = -0.606530659712633423603799534991
  EXPECT_NEAR(d, -0.6065306597126334, 1e-12);
  EXPECT_NEAR(d, central_difference(e, 1.0), 1e-8);
}

TEST(Derivative, AllFunctions) {
  const double t = 0.37;
  for (const char* src : {"sin(t)", "cos(2*t)", "tan(t)", "exp(t^2)", "log(1+t)", "sqrt(1+t)", "tanh(t)", "sinh(t)",
                          "cosh(t)", "t^t", "2^t", "t^(-3)", "(1+t)/(2-t)", "-t^2"}) {
    const Expr e = parse_expr(src);
    const double fd = central_difference(e, t);
    EXPECT_NEAR(derivative(e).eval(t), fd, 1e-7 * (1.0 + std::abs(fd))) << src;
  }
}

TEST(ExprProperty, DerivativeMatchesFiniteDifference) {
  SourceGenerator gen(20240611);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> tdist(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const std::string src = gen.make(3);
    const Expr e = parse_expr(src);
    const Expr d = derivative(e);
    for (int j = 0; j < 10; ++j) {
      const double t = tdist(rng);
      const double fd = central_difference(e, t);
      ASSERT_LE(std::abs(d.eval(t) - fd), 1e-6 * (1.0 + std::abs(fd))) << src << " at t=" << t;
    }
  }
}

TEST(ExprProperty, PrintReparseIsStructurallyIdentical) {
  SourceGenerator gen(99);
  for (int i = 0; i < 200; ++i) {
    const std::string src = gen.make(3);
    const Expr e = parse_expr(src);
    const Expr again = parse_expr(e.to_string());
    ASSERT_TRUE(e == again) << src << " -> " << e.to_string();
  }
}

TEST(ExprProperty, DerivativeIsLinear) {
  SourceGenerator gen(5);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> tdist(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Expr a = parse_expr(gen.make(2));
    const Expr b = parse_expr(gen.make(2));
    const Expr lhs = derivative(Expr::binary(BinaryOp::Add, a, b));
    const Expr rhs = derivative(a) + derivative(b);
    for (int j = 0; j < 10; ++j) {
      const double t = tdist(rng);
      ASSERT_EQ(lhs.eval(t), rhs.eval(t));
    }
  }
}

TEST(Expr, StructuralEquality) {
  EXPECT_TRUE(parse_expr("1 + t") == parse_expr("(1+t)"));
  EXPECT_FALSE(parse_expr("1 + t") == parse_expr("t + 1"));
  EXPECT_TRUE(Expr() == parse_expr("0"));
}

TEST(Expr, FoldingOperators) {
  const Expr t = Expr::variable();
  EXPECT_TRUE((Expr::constant(1.0) * t) == t);
  EXPECT_TRUE((t + Expr()) == t);
  EXPECT_TRUE((t / Expr::constant(1.0)) == t);
  EXPECT_TRUE((Expr() * t).is_constant(0.0));
  EXPECT_TRUE((-(-t)) == t);
}
