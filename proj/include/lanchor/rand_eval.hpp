// Randomized evaluation oracle for zero testing outside the exact class.
#pragma once

#include <cstdint>
#include <stdexcept>

#include "lanchor/expr.hpp"

namespace lanchor {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleSettings {
  int seeds = 32;
  int max_bound = 1000;       // |numerator|, denominator <= max_bound
  long precision_bits = 256;  // elementary function evaluation
  int resample_limit = 16;
};

const OracleSettings& oracle_settings();

/// Value assigned to a symbol under (seed, attempt). Depends only on the
/// symbol's name, so one symbol gets the same value across expressions.
Rational sample_value(Atom symbol, std::uint64_t seed, int attempt = 0);

/// Exact evaluation at a sampled point; elementary functions are evaluated
/// with MPFR at the configured precision and converted exactly to rationals.
/// Resamples the point when a denominator vanishes or log meets a
/// non-positive argument.
Rational rand_eval(const Expr& e, std::uint64_t seed);

/// Evaluation at a caller-provided assignment of symbols (missing symbols
/// raise EvalError).
Rational eval_at(const Expr& e, const std::function<std::optional<Rational>(Atom)>& values);

/// Zero test: exact for expressions built only from symbols; expressions
/// with function or reciprocal atoms fall back to the randomized oracle
/// (|value| < 1e-40 at every seed).
bool is_zero(const Expr& e);

}  // namespace lanchor
