// Seeded generators shared by the unit and acceptance tests.
#pragma once

#include <ostream>
#include <random>
#include <vector>

#include "lanchor/expr.hpp"
#include "lanchor/linop.hpp"

namespace lanchor {

inline void PrintTo(const Expr& e, std::ostream* os) { *os << e.str(); }

}  // namespace lanchor

namespace lanchor::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Rational rational(int bound = 9) {
    int num = uniform(-bound, bound);
    int den = uniform(1, bound);
    return Rational(num, den);
  }

  MultiIndex multi_index(std::size_t indep, int max_order) {
    std::vector<int> counts(indep, 0);
    int order = uniform(0, max_order);
    for (int k = 0; k < order; ++k) counts[static_cast<std::size_t>(uniform(0, static_cast<int>(indep) - 1))]++;
    return MultiIndex(counts);
  }

  /// Random jet or independent-variable symbol.
  Expr symbol(const JetSpace& s, int max_order, bool with_indep = true) {
    if (with_indep && uniform(0, 5) == 0) {
      return s.indep(static_cast<std::size_t>(uniform(0, static_cast<int>(s.num_indep()) - 1)));
    }
    std::size_t field = static_cast<std::size_t>(uniform(0, static_cast<int>(s.num_fields()) - 1));
    return s.jet(field, multi_index(s.num_indep(), max_order));
  }

  /// Polynomial with up to `terms` monomials of degree <= `degree`.
  Expr polynomial(const JetSpace& s, int max_order, int terms, int degree, bool with_indep = true) {
    Expr out;
    for (int k = 0; k < terms; ++k) {
      Expr mono = rational();
      int d = uniform(0, degree);
      for (int j = 0; j < d; ++j) mono *= symbol(s, max_order, with_indep);
      out += mono;
    }
    return out;
  }

  /// Random polynomial in the given atoms only.
  Expr polynomial_in(const std::vector<Expr>& vars, int terms, int degree) {
    Expr out;
    for (int k = 0; k < terms; ++k) {
      Expr mono = rational();
      int d = uniform(0, degree);
      for (int j = 0; j < d; ++j) mono *= vars[static_cast<std::size_t>(uniform(0, static_cast<int>(vars.size()) - 1))];
      out += mono;
    }
    return out;
  }

  /// Random rows x cols operator of order <= max_order with polynomial coefficients.
  LinDiffOp op(std::shared_ptr<const JetSpace> s, std::size_t rows, std::size_t cols, int max_order,
               int entries = 4) {
    LinDiffOp a(rows, cols, s);
    for (int k = 0; k < entries; ++k) {
      std::size_t r = static_cast<std::size_t>(uniform(0, static_cast<int>(rows) - 1));
      std::size_t c = static_cast<std::size_t>(uniform(0, static_cast<int>(cols) - 1));
      a.add(r, c, multi_index(s->num_indep(), max_order), polynomial(*s, 1, 2, 2));
    }
    return a;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace lanchor::testing
