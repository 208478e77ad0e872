// Variational calculus on a jet space: Euler operator and inversion of
// total time derivatives.
#pragma once

#include <optional>

#include "lanchor/expr.hpp"

namespace lanchor {

/// E_i(L) = sum_alpha (-1)^|alpha| D^alpha (dL / du^i_alpha).
Expr euler_derivative(const Expr& density, std::size_t field, const JetSpace& space);

/// For a jet space with one independent variable, returns j with D j equal
/// to `density`, or nullopt when some Euler derivative of the density is
/// nonzero. Throws UnsupportedInput when the density is not polynomial in
/// the jets or its jet-free part cannot be integrated (e.g. 1/t, sin(t)).
std::optional<Expr> divergence_split(const Expr& density, const JetSpace& space);

/// Antiderivative in the single variable `var` of a Laurent polynomial in
/// var (other symbols may appear only in coefficients and must not depend
/// on var). Throws UnsupportedInput outside that class.
Expr integrate_laurent(const Expr& e, Atom var);

}  // namespace lanchor
