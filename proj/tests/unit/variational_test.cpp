#include <gtest/gtest.h>

#include "lanchor/variational.hpp"
#include "support.hpp"

namespace lanchor {
namespace {

class VariationalTest : public ::testing::Test {
 protected:
  std::shared_ptr<const JetSpace> s = JetSpace::create({"t"}, {"x1", "x2", "x3"});
  Atom ta = s->indep_atom(0);
  Expr t = s->indep(0);
  Expr x(std::size_t i, int k = 0) { return s->jet(i, MultiIndex({k})); }
};

TEST_F(VariationalTest, EulerDerivativeExamples) {
  EXPECT_EQ(euler_derivative(Rational(1, 2) * x(0, 1) * x(0, 1), 0, *s), -x(0, 2));
  EXPECT_EQ(euler_derivative(x(0) * x(1, 1) - x(1) * x(0, 1), 0, *s), 2 * x(1, 1));
  EXPECT_EQ(euler_derivative(x(0) * x(1, 1) - x(1) * x(0, 1), 1, *s), -2 * x(0, 1));
}

TEST_F(VariationalTest, EulerAnnihilatesTotalDerivatives) {
  testing::Gen g(21);
  for (int k = 0; k < 40; ++k) {
    Expr j = g.polynomial(*s, 2, 4, 3);
    Expr dj = total_derivative(j, ta);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(euler_derivative(dj, i, *s).is_zero()) << j.str();
  }
}

TEST_F(VariationalTest, EulerAnnihilatesDivergencesInTwoVariables) {
  auto s2 = JetSpace::create({"x0", "x1"}, {"u", "w"});
  testing::Gen g(22);
  for (int k = 0; k < 20; ++k) {
    Expr j0 = g.polynomial(*s2, 2, 3, 3), j1 = g.polynomial(*s2, 2, 3, 3);
    Expr div = total_derivative(j0, s2->indep_atom(0)) + total_derivative(j1, s2->indep_atom(1));
    for (std::size_t i = 0; i < 2; ++i) EXPECT_TRUE(euler_derivative(div, i, *s2).is_zero());
  }
}

TEST_F(VariationalTest, DivergenceSplitExamples) {
  EXPECT_EQ(divergence_split(x(0, 1), *s), x(0));
  EXPECT_EQ(divergence_split(2 * x(0) * x(0, 1), *s), x(0) * x(0));
  EXPECT_FALSE(divergence_split(x(0) * x(0, 1) * x(0, 1), *s).has_value());
  EXPECT_EQ(divergence_split(3 * t * t, *s), t * t * t);
  EXPECT_EQ(divergence_split(Expr(), *s), Expr());
}

TEST_F(VariationalTest, DivergenceSplitRecoversPotentials) {
  testing::Gen g(23);
  for (int k = 0; k < 40; ++k) {
    Expr j = g.polynomial(*s, 2, 4, 3);
    auto got = divergence_split(total_derivative(j, ta), *s);
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(total_derivative(*got, ta), total_derivative(j, ta));
    EXPECT_TRUE((*got - j).is_constant());
  }
}

TEST_F(VariationalTest, DivergenceSplitUnsupportedInputs) {
  EXPECT_THROW(divergence_split(pow(t, -1), *s), UnsupportedInput);
  EXPECT_THROW(divergence_split(sin(t), *s), UnsupportedInput);
  EXPECT_THROW(divergence_split(sin(x(0)) * x(0, 1), *s), UnsupportedInput);
}

TEST_F(VariationalTest, IntegrateLaurent) {
  Expr c = param("c");
  EXPECT_EQ(integrate_laurent(c * t * t + pow(t, -2), ta), Rational(1, 3) * c * t * t * t - pow(t, -1));
  EXPECT_THROW(integrate_laurent(pow(t, -1), ta), UnsupportedInput);
  EXPECT_THROW(integrate_laurent(x(0), ta), UnsupportedInput);
}

}  // namespace
}  // namespace lanchor
