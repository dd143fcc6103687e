#include "equimid/expr.hpp"
#include "equimid/scalar_field.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <string>

namespace equimid {
namespace {

using testing::Sampler;

TEST(Parse, HyperboloidUnivariate) {
  const auto f = ScalarField::parse("sqrt(t1^2+1)", 1);
  EXPECT_DOUBLE_EQ(f(vec({1.0})), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(f(vec({0.0})), 1.0);
  EXPECT_EQ(f.gradient_kind(), Derivative::Exact);
}

TEST(Parse, ConstantField) {
  const auto f = ScalarField::parse("2", 3);
  EXPECT_EQ(f.dimension(), 3);
  EXPECT_EQ(f(vec({1.0, -4.0, 9.0})), 2.0);
  EXPECT_EQ(f.gradient(vec({1.0, 2.0, 3.0})), Vector::Zero(3));
  EXPECT_EQ(f.hess_vec(vec({1.0, 2.0, 3.0}), vec({0.3, 0.1, 1.0})), Vector::Zero(3));
}

TEST(Parse, MinCombinatorEvaluatesPointwiseMinimum) {
  const auto f = ScalarField::parse("min(sqrt(t1^2+1), sqrt((t1-3)^2+1))", 1);
  const auto a = ScalarField::parse("sqrt(t1^2+1)", 1);
  const auto b = ScalarField::parse("sqrt((t1-3)^2+1)", 1);
  for (double t = -5.0; t <= 8.0; t += 0.25) {
    const Vector v = vec({t});
    EXPECT_EQ(f(v), std::min(a(v), b(v))) << t;
  }
  EXPECT_EQ(f.gradient_kind(), Derivative::None);
  EXPECT_THROW(f.gradient(vec({0.0})), NonDifferentiable);
  EXPECT_THROW(f.hess_vec(vec({0.0}), vec({1.0})), NonDifferentiable);
}

TEST(Parse, AbsAndMaxAreNonDifferentiable) {
  EXPECT_EQ(ScalarField::parse("abs(t1) + 1", 1).gradient_kind(), Derivative::None);
  EXPECT_EQ(ScalarField::parse("max(t1, 1)", 1).gradient_kind(), Derivative::None);
  EXPECT_EQ(ScalarField::parse("exp(t1) + log(2 + t1^2)", 1).gradient_kind(), Derivative::Exact);
}

TEST(Parse, PrecedenceAndAssociativity) {
  const Vector t = vec({3.0, 2.0});
  EXPECT_EQ(ScalarField::parse("1 + 2*3", 2)(t), 7.0);
  EXPECT_EQ(ScalarField::parse("2^3^2", 2)(t), 512.0);   // right associative
  EXPECT_EQ(ScalarField::parse("-t1^2", 2)(t), 9.0);     // unary binds tighter than ^
  EXPECT_EQ(ScalarField::parse("-(t1^2)", 2)(t), -9.0);
  EXPECT_EQ(ScalarField::parse("8/4/2", 2)(t), 1.0);     // left associative
  EXPECT_EQ(ScalarField::parse("t1 - t2 - 1", 2)(t), 0.0);
  EXPECT_EQ(ScalarField::parse("2^-1", 2)(t), 0.5);
  EXPECT_EQ(ScalarField::parse("t1 \xE2\x88\x92 t2", 2)(t), 1.0);  // unicode minus
  EXPECT_EQ(ScalarField::parse("1.5e1 + .5", 2)(t), 15.5);
}

TEST(Parse, Norm2) {
  const Vector t = vec({3.0, 4.0});
  EXPECT_EQ(ScalarField::parse("norm2()", 2)(t), 25.0);
  EXPECT_EQ(ScalarField::parse("norm2(t1, 1)", 2)(t), 10.0);
  const auto f = ScalarField::parse("sqrt(norm2() + 1)", 2);
  EXPECT_NEAR(f.gradient(t)[1], 4.0 / std::sqrt(26.0), 1e-15);
}

TEST(ParseErrors, SyntaxErrorsCarryPosition) {
  auto position_of = [](const char* src) -> long {
    try {
      Expr::parse(src, 2);
    } catch (const SyntaxError& e) {
      return static_cast<long>(e.position());
    }
    return -1;
  };
  EXPECT_EQ(position_of("1 +"), 3);
  EXPECT_EQ(position_of("(t1"), 3);
  EXPECT_EQ(position_of("t1 t2"), 3);
  EXPECT_EQ(position_of("foo(t1)"), 0);
  EXPECT_EQ(position_of("sqrt(1, 2)"), 0);
  EXPECT_EQ(position_of("min()"), 0);
  EXPECT_EQ(position_of("t0"), 0);
  EXPECT_EQ(position_of("sqrt t1"), 5);
  EXPECT_EQ(position_of("2 * # 3"), 4);
  EXPECT_THROW(Expr::parse("", 1), SyntaxError);
  EXPECT_THROW(Expr::parse("   ", 1), SyntaxError);
}

TEST(ParseErrors, ExpectedSetIsReported) {
  try {
    Expr::parse("(t1 + 1", 1);
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.expected(), "')'");
    EXPECT_NE(std::string(e.what()).find("position 7"), std::string::npos);
  }
}

TEST(ParseErrors, VariableBeyondDimension) {
  EXPECT_THROW(Expr::parse("t1 + t3", 2), DimensionError);
  EXPECT_NO_THROW(Expr::parse("t1 + t3", 3));
  EXPECT_THROW(ScalarField::parse("t1", 1)(vec({1.0, 2.0})), DimensionError);
}

TEST(Derivatives, HyperboloidGradientByHand) {
  const auto f = ScalarField::parse("sqrt(t1^2+1)", 1);
  EXPECT_NEAR(f(vec({1.0})), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(f.gradient(vec({1.0}))[0], 1.0 / std::sqrt(2.0), 1e-15);
  // f'' = (t^2+1)^{-3/2}
  EXPECT_NEAR(f.hess_vec(vec({1.0}), vec({1.0}))[0], std::pow(2.0, -1.5), 1e-15);
}

TEST(Derivatives, PowWithNegativeBaseAndIntegerExponent) {
  const auto f = ScalarField::parse("t1^3", 1);
  EXPECT_DOUBLE_EQ(f.gradient(vec({-2.0}))[0], 12.0);
  EXPECT_DOUBLE_EQ(f.hess_vec(vec({-2.0}), vec({1.0}))[0], -12.0);
  const auto g = ScalarField::parse("2^t1", 1);
  EXPECT_NEAR(g.gradient(vec({3.0}))[0], 8.0 * std::log(2.0), 1e-14);
}

const char* const kSmoothFields[] = {
    "sqrt(norm2() + 1)",
    "exp(0.3*t1 - 0.2*t2) + t1^2*t2^2/10 + 1",
    "log(1 + t1^2 + 2*t2^2) + sqrt(1 + (t1 - t2)^2)",
    "(t1^2 + 1)^1.5 / (2 + t2^2)",
    "t1*t2 + (1 + t1^2)^0.5 + 2^t2",
};

TEST(Derivatives, GradientMatchesCentralDifferences) {
  Sampler s(11);
  for (const char* src : kSmoothFields) {
    const auto f = ScalarField::parse(src, 2);
    for (int k = 0; k < 100; ++k) {
      const Vector t = s.point(2, -2.0, 2.0);
      const Vector exact = f.gradient(t);
      const Vector fd = numeric::fd_gradient([&](const Vector& p) { return f(p); }, t);
      EXPECT_LE((exact - fd).norm(), 1e-6 * std::max(1.0, exact.norm())) << src;
    }
  }
}

TEST(Derivatives, HessianVectorProductIsSymmetric) {
  Sampler s(12);
  for (const char* src : kSmoothFields) {
    const auto f = ScalarField::parse(src, 2);
    for (int k = 0; k < 50; ++k) {
      const Vector t = s.point(2, -2.0, 2.0);
      const Vector v = s.point(2, -1.0, 1.0);
      const Vector w = s.point(2, -1.0, 1.0);
      const double a = f.hess_vec(t, v).dot(w);
      const double b = f.hess_vec(t, w).dot(v);
      EXPECT_NEAR(a, b, 1e-6 * std::max(1.0, std::abs(a))) << src;
    }
  }
}

TEST(Derivatives, HessianVectorMatchesDifferencedGradient) {
  Sampler s(13);
  const auto f = ScalarField::parse(kSmoothFields[1], 2);
  for (int k = 0; k < 50; ++k) {
    const Vector t = s.point(2, -2.0, 2.0);
    const Vector v = s.point(2, -1.0, 1.0);
    const Vector fd = numeric::fd_directional([&](const Vector& p) { return f.gradient(p); }, t, v, 1e-6);
    EXPECT_LE((f.hess_vec(t, v) - fd).norm(), 1e-6 * std::max(1.0, fd.norm()));
  }
}

TEST(Derivatives, BuiltinFieldsUseFiniteDifferences) {
  const auto f = ScalarField::builtin(1, [](const Vector& t) { return std::sqrt(t[0] * t[0] + 1.0); });
  EXPECT_EQ(f.gradient_kind(), Derivative::FiniteDifference);
  EXPECT_NEAR(f.gradient(vec({1.0}))[0], 1.0 / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(f.hess_vec(vec({1.0}), vec({1.0}))[0], std::pow(2.0, -1.5), 1e-6);
}

// Printing then re-parsing gives an expression with bit-identical values.
TEST(Roundtrip, PrintReparseIsBitIdentical) {
  const char* sources[] = {
      "sqrt(t1^2+1)", "-t1^2", "-(t1^2)", "2^3^2", "(2^3)^2", "t1 - (t2 - 1)", "t1/(t2*3)", "(t1 + t2)*(t1 - t2)",
      "--t1", "2^-t1", "min(t1, t2, 0.1) + max(abs(t1), 1e-3)", "norm2() + norm2(t1 - 1, 2*t2)",
      "exp(-0.5*norm2())/log(3 + t2^2)", "1/3 + 0.1*t1", "(-t1)^2 - -t2",
  };
  Sampler s(14);
  for (const char* src : sources) {
    const Expr a = Expr::parse(src, 2);
    const std::string printed = a.to_string();
    const Expr b = Expr::parse(printed, 2);
    EXPECT_EQ(printed, b.to_string()) << src;
    for (int k = 0; k < 50; ++k) {
      const Vector t = s.point(2, -3.0, 3.0);
      const double va = a.evaluate<double>(std::span<const double>(t.data(), 2));
      const double vb = b.evaluate<double>(std::span<const double>(t.data(), 2));
      if (std::isnan(va)) {
        EXPECT_TRUE(std::isnan(vb)) << src << " -> " << printed;
      } else {
        EXPECT_EQ(std::memcmp(&va, &vb, sizeof va), 0) << src << " -> " << printed;
      }
    }
  }
}

TEST(Combinator, PointwiseMinOfParsedFieldsStaysAnExpression) {
  const ScalarField parts[] = {ScalarField::parse("sqrt(t1^2+1)", 1), ScalarField::parse("sqrt((t1-3)^2+1)", 1)};
  const auto m = ScalarField::pointwise_min(parts);
  ASSERT_NE(m.expression(), nullptr);
  EXPECT_EQ(m.describe(), "min(sqrt(t1^2 + 1), sqrt((t1 - 3)^2 + 1))");
  EXPECT_EQ(m(vec({1.4})), parts[0](vec({1.4})));
  EXPECT_EQ(m(vec({1.6})), parts[1](vec({1.6})));
  EXPECT_THROW(ScalarField::pointwise_min(std::span<const ScalarField>{}), EmptyFamily);
}

}  // namespace
}  // namespace equimid
