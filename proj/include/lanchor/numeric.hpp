// RK4 drift oracle: integrates x' = -v(t, x) and measures how far declared
// characteristics move along the trajectory.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lanchor/ode_anchor.hpp"

namespace lanchor {

struct OracleOptions {
  double t_end = 100.0;
  double step = 1e-3;
  std::uint64_t seed = 0;
  int points = 3;
  double tolerance = 1e-6;
  double blowup_norm = 1e12;
};

struct DriftReport {
  std::string name;
  double max_drift = 0.0;  // over all initial points
  bool within_tolerance = true;
};

struct OracleResult {
  std::vector<DriftReport> drifts;
  std::vector<std::vector<Rational>> initial_points;
  bool blew_up = false;
  double blowup_time = 0.0;  // first time the norm exceeded the limit
};

/// Compiled evaluator for expressions over (t, x1..xn) in double precision.
class CompiledExpr {
 public:
  CompiledExpr(const Expr& e, const OdeSystem& sys);
  double operator()(double t, const std::vector<double>& x) const;

 private:
  struct Slot {
    int var = 0;  // -1 for t, i for x_{i+1}; unused for opaque atoms
    Func func = Func::Sin;
    bool opaque = false;
    bool is_func = false;
    std::shared_ptr<CompiledExpr> arg;
  };
  struct CTerm {
    double coef;
    std::vector<std::pair<std::size_t, int>> factors;  // slot, exponent
  };
  std::vector<Slot> slots_;
  std::vector<CTerm> terms_;
};

/// Seeded rational initial points p/q with 1 <= q <= 1000 and |p| <= q.
std::vector<std::vector<Rational>> oracle_initial_points(std::size_t n, std::uint64_t seed, int count);

OracleResult numeric_oracle(const OdeSystem& sys, const std::vector<std::pair<std::string, Expr>>& characteristics,
                            const OracleOptions& options);

}  // namespace lanchor
