#include <gtest/gtest.h>

#include <cmath>

#include "lanchor/numeric.hpp"

namespace lanchor {
namespace {

OdeSystem oscillator() {
  auto s = ode_space(2);
  return OdeSystem(s, {-s->jet(1), s->jet(0)});
}

TEST(Numeric, CompiledExpressionMatchesExactValue) {
  OdeSystem osc = oscillator();
  Expr e = Rational(1, 3) * osc.x(0) * osc.x(0) * osc.x(1) - osc.t() + pow(osc.x(1), -2) + sin(osc.x(0));
  CompiledExpr c(e, osc);
  double got = c(0.5, {0.25, -2.0});
  double want = 1.0 / 3 * 0.0625 * -2.0 - 0.5 + 0.25 + std::sin(0.25);
  EXPECT_NEAR(got, want, 1e-14);
}

TEST(Numeric, InitialPointsAreSeededAndBounded) {
  auto a = oracle_initial_points(3, 5, 4);
  auto b = oracle_initial_points(3, 5, 4);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, oracle_initial_points(3, 6, 4));
  ASSERT_EQ(a.size(), 4u);
  for (const auto& p : a) {
    ASSERT_EQ(p.size(), 3u);
    for (const auto& q : p) {
      EXPECT_LE(abs(q), 1);
      EXPECT_LE(q.get_den(), 1000);
    }
  }
}

TEST(Numeric, OscillatorEnergyDrift) {
  OdeSystem osc = oscillator();
  Expr energy = Rational(1, 2) * (osc.x(0) * osc.x(0) + osc.x(1) * osc.x(1));
  OracleResult r = numeric_oracle(osc, {{"f", energy}, {"bad", osc.x(0)}}, OracleOptions{});
  ASSERT_EQ(r.drifts.size(), 2u);
  EXPECT_LT(r.drifts[0].max_drift, 1e-6);
  EXPECT_TRUE(r.drifts[0].within_tolerance);
  EXPECT_GT(r.drifts[1].max_drift, 1e-2);
  EXPECT_FALSE(r.drifts[1].within_tolerance);
  EXPECT_FALSE(r.blew_up);
  OracleResult again = numeric_oracle(osc, {{"f", energy}, {"bad", osc.x(0)}}, OracleOptions{});
  EXPECT_EQ(again.drifts[0].max_drift, r.drifts[0].max_drift);
}

TEST(Numeric, FreeSystemHasNoDrift) {
  OdeSystem free3 = OdeSystem::free(3);
  OracleOptions o;
  o.t_end = 10;
  OracleResult r = numeric_oracle(free3, {{"f", free3.x(0) * free3.x(1) + free3.x(2)}}, o);
  EXPECT_EQ(r.drifts[0].max_drift, 0.0);
}

TEST(Numeric, BlowUpIsFlagged) {
  auto s = ode_space(1);
  OdeSystem grow(s, {-s->jet(0) * s->jet(0)});
  OracleOptions o;
  o.t_end = 1000;
  o.step = 1e-2;
  OracleResult r = numeric_oracle(grow, {{"f", s->jet(0)}}, o);
  EXPECT_TRUE(r.blew_up);
  EXPECT_GT(r.blowup_time, 0.0);
}

}  // namespace
}  // namespace lanchor
