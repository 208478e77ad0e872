// First-order normal-form ODE systems  x'^i + v^i(t,x) = 0  with their
// characteristics, symmetries, bivector anchors, brackets and twists.
#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lanchor/expr.hpp"
#include "lanchor/linop.hpp"

namespace lanchor {

/// Jet space with independent variable t and fields x1..xn.
std::shared_ptr<const JetSpace> ode_space(std::size_t n);

struct OdeSystem {
  std::shared_ptr<const JetSpace> space;
  std::vector<Expr> v;

  /// Validates that v has n entries over (t, x) without derivatives.
  OdeSystem(std::shared_ptr<const JetSpace> space, std::vector<Expr> v);
  static OdeSystem free(std::size_t n);

  std::size_t n() const { return v.size(); }
  Expr t() const { return space->indep(0); }
  Expr x(std::size_t i) const { return space->jet(i); }
  Atom t_atom() const { return space->indep_atom(0); }
  Atom x_atom(std::size_t i) const { return space->jet_atom(i); }

  /// Equations of motion T^i = x^i_t + v^i.
  std::vector<Expr> residuals() const;
  ShellRules shell() const;
  bool operator==(const OdeSystem& o) const;
};

class Bivector {
 public:
  explicit Bivector(std::size_t n);
  static Bivector canonical(std::size_t n);  // sum of dx_{2k-1} ^ dx_{2k}
  /// so(3) Lie-Poisson structure alpha^{ij} = eps^{ijk} x_k.
  static Bivector lie_poisson_so3(const OdeSystem& sys);

  std::size_t n() const { return n_; }
  Expr operator()(std::size_t i, std::size_t j) const;
  /// Sets alpha^{ij} (and alpha^{ji} = -alpha^{ij}); i == j is rejected.
  void set(std::size_t i, std::size_t j, const Expr& value);
  /// Upper-triangular entries keyed (i, j) with i < j.
  const std::map<std::pair<std::size_t, std::size_t>, Expr>& entries() const { return upper_; }

 private:
  std::size_t n_;
  std::map<std::pair<std::size_t, std::size_t>, Expr> upper_;
};

class Trivector {
 public:
  explicit Trivector(std::size_t n) : n_(n) {}
  std::size_t n() const { return n_; }
  Expr operator()(std::size_t i, std::size_t j, std::size_t k) const;
  void set_sorted(std::size_t i, std::size_t j, std::size_t k, const Expr& value);
  bool is_zero() const { return comps_.empty(); }
  const std::map<std::array<std::size_t, 3>, Expr>& entries() const { return comps_; }

 private:
  std::size_t n_;
  std::map<std::array<std::size_t, 3>, Expr> comps_;
};

struct ExprCheck {
  bool ok;
  std::vector<Expr> residual;  // empty entries are zero
};

/// Rejects expressions containing derivative symbols of the system's fields.
void require_zeroth_order(const Expr& e, const char* what);

ExprCheck check_characteristic(const OdeSystem& sys, const Expr& f);
ExprCheck check_symmetry(const OdeSystem& sys, const std::vector<Expr>& w);
/// Residual entries are listed for i < j in row-major order.
ExprCheck check_anchor(const OdeSystem& sys, const Bivector& alpha);
std::vector<Expr> anchor_apply(const OdeSystem& sys, const Bivector& alpha, const Expr& f);
Trivector schouten_square(const OdeSystem& sys, const Bivector& alpha);
Expr poisson_bracket(const OdeSystem& sys, const Bivector& alpha, const Expr& f, const Expr& g);
/// Vector-field commutator [X, Y]^i = X^k d_k Y^i - Y^k d_k X^i over x.
std::vector<Expr> vector_commutator(const OdeSystem& sys, const std::vector<Expr>& x,
                                    const std::vector<Expr>& y);

/// Global sign in [X_f, X_g] = sigma X_{f,g} (X_f = anchor_apply(alpha, f)).
inline constexpr int kHomomorphismSign = -1;

/// Twisted system v'^i = v^i - alpha^{ij} d_j H; the free system goes to
/// Hamilton's equations x'^i = {x^i, H}.
OdeSystem deform(const OdeSystem& sys, const Bivector& alpha, const Expr& h);

struct TwistCheck {
  bool ok;
  Expr g;  // pure-time antiderivative of {f, H} when applicable
  std::string diagnostic;
};
TwistCheck twist_invariance_check(const OdeSystem& sys, const Bivector& alpha, const Expr& f,
                                  const Expr& h);

/// d~f: the covector of x-partials.
std::vector<Expr> vertical_differential(const OdeSystem& sys, const Expr& f);

/// Proper-symmetry conditions for the symmetry alpha(psi):
///   (i)  alpha^{li} (d_i psi_k - d_k psi_i) = 0   for all l, k
///   (ii) alpha^{li} (d_i (psi_k v^k) - d_t psi_i) = 0   for all l
/// Residual lists (i) row-major in (l, k), then (ii) by l.
ExprCheck proper_symmetry_conditions(const OdeSystem& sys, const Bivector& alpha,
                                     const std::vector<Expr>& psi);

/// Rank at `point` = (t, x1..xn) of the alpha columns together with their
/// iterated brackets up to `depth`, in exact arithmetic.
int transitivity_rank(const OdeSystem& sys, const Bivector& alpha, const std::vector<Rational>& point,
                      int depth);

struct CharacteristicSearch {
  std::vector<Expr> basis;
  std::string diagnostic;
};
inline constexpr int kMaxSearchDegree = 12;
/// Polynomial characteristics of degree <= max_degree in (t, x), constants
/// excluded, echelon-reduced with leading coefficient 1 in graded-lex order.
CharacteristicSearch search_characteristics(const OdeSystem& sys, int max_degree);

}  // namespace lanchor
