// Exterior calculus on flat R^n with a constant diagonal metric. Form
// coefficients are expressions over the coordinates x0..x{n-1} and the
// jets of field components.
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lanchor/expr.hpp"
#include "lanchor/linop.hpp"

namespace lanchor {

class FlatSpace {
 public:
  /// `signature` lists eta_{mu mu} = +-1; fields name the field components.
  FlatSpace(std::vector<int> signature, std::vector<std::string> fields);
  static FlatSpace euclidean(std::size_t n, std::vector<std::string> fields = {});
  /// eta = diag(-1, +1, ..., +1).
  static FlatSpace lorentzian(std::size_t n, std::vector<std::string> fields = {});

  std::size_t n() const { return signature_.size(); }
  int eta(std::size_t mu) const { return signature_.at(mu); }
  const std::vector<int>& signature() const { return signature_; }
  /// det(eta) = +-1.
  int det() const;
  bool is_lorentzian() const;
  const std::shared_ptr<const JetSpace>& jets() const { return jets_; }
  Expr coord(std::size_t mu) const { return jets_->indep(mu); }

 private:
  std::vector<int> signature_;
  std::shared_ptr<const JetSpace> jets_;
};

/// k-subsets of {0..n-1} as bit masks, in lexicographic order of the
/// increasing index tuples; component storage follows this order.
const std::vector<std::uint32_t>& basis_masks(std::size_t n, std::size_t k);
std::size_t basis_rank(std::size_t n, std::uint32_t mask);
std::vector<std::size_t> mask_indices(std::uint32_t mask);
/// Sign of the permutation sorting the concatenation (I, J) of disjoint sets.
int merge_sign(std::uint32_t i, std::uint32_t j);
/// Product of eta over the indices of the mask.
int eta_product(const FlatSpace& s, std::uint32_t mask);
std::size_t binomial(std::size_t n, std::size_t k);

class Form {
 public:
  Form(const FlatSpace& space, std::size_t grade);
  Form(const FlatSpace& space, std::size_t grade, std::vector<Expr> components);
  /// Scalar (grade 0) form.
  static Form scalar(const FlatSpace& space, const Expr& value);
  /// dx^{i1} ^ ... ^ dx^{ik} for increasing indices.
  static Form basis(const FlatSpace& space, const std::vector<std::size_t>& indices);
  static Form volume(const FlatSpace& space);
  /// Form whose components are the undifferentiated fields
  /// first_field, first_field + 1, ... in basis order.
  static Form from_fields(const FlatSpace& space, std::size_t grade, std::size_t first_field);

  const FlatSpace& space() const { return *space_; }
  std::size_t grade() const { return grade_; }
  std::size_t n() const { return space_->n(); }
  std::size_t size() const { return comps_.size(); }
  const std::vector<Expr>& components() const { return comps_; }
  const Expr& operator[](std::size_t r) const { return comps_.at(r); }
  Expr& operator[](std::size_t r) { return comps_.at(r); }
  /// Component for an increasing index tuple.
  const Expr& component(const std::vector<std::size_t>& indices) const;

  bool is_zero() const;
  Form operator+(const Form& o) const;
  Form operator-(const Form& o) const;
  Form operator-() const;
  friend Form operator*(const Expr& c, const Form& f);
  Form map(const std::function<Expr(const Expr&)>& fn) const;
  bool operator==(const Form& o) const;

  /// e.g. "F01*dx0^dx2 - F12*dx1^dx2"; "0" for the zero form.
  std::string str() const;

 private:
  void check_compatible(const Form& o) const;
  std::shared_ptr<const FlatSpace> space_;
  std::size_t grade_;
  std::vector<Expr> comps_;
};

class SpacetimeVector {
 public:
  explicit SpacetimeVector(std::vector<Expr> components) : comps_(std::move(components)) {}
  static SpacetimeVector zero(const FlatSpace& s);
  /// d/dx^mu.
  static SpacetimeVector translation(const FlatSpace& s, std::size_t mu);
  /// Generator of the (mu, nu) plane: xi^mu = eta^{mu mu} x^nu, xi^nu = -eta^{nu nu} x^mu.
  static SpacetimeVector rotation(const FlatSpace& s, std::size_t mu, std::size_t nu);
  /// xi^mu = x^mu.
  static SpacetimeVector dilation(const FlatSpace& s);
  /// Parses "translation:MU", "rotation:MU,NU" or "dilation".
  static SpacetimeVector from_selector(const FlatSpace& s, const std::string& selector);

  std::size_t size() const { return comps_.size(); }
  const Expr& operator[](std::size_t mu) const { return comps_.at(mu); }
  const std::vector<Expr>& components() const { return comps_; }
  SpacetimeVector operator+(const SpacetimeVector& o) const;
  bool is_zero() const;

 private:
  std::vector<Expr> comps_;
};

Form wedge(const Form& a, const Form& b);
/// Exterior derivative with total derivatives; grade n is rejected.
Form exterior_d(const Form& a);
/// (*a)_J = sum_I eta^{II} sign(I, J) a_I, J the complement of I.
Form hodge(const Form& a);
/// Contraction into the first slot; grade 0 is rejected.
Form interior(const SpacetimeVector& xi, const Form& a);
/// Cartan: i_xi d a + d i_xi a.
Form lie_derivative(const SpacetimeVector& xi, const Form& a);
/// (a + *a)/2 and (a - *a)/2 on middle forms of Lorentzian R^{4k+2}.
std::pair<Form, Form> selfdual_project(const Form& a);
/// a ^ *b.
Form pairing_density(const Form& a, const Form& b);
/// Sign s with ** = s on k-forms: det(eta) (-1)^{k(n-k)}.
int double_hodge_sign(const FlatSpace& s, std::size_t k);

enum class KillingKind { Killing, Conformal, Neither };
const char* killing_kind_name(KillingKind k);
KillingKind conformal_killing_check(const SpacetimeVector& xi, const FlatSpace& space);

/// Operators acting on component vectors in basis order.
LinDiffOp d_op(const FlatSpace& s, std::size_t k);
LinDiffOp hodge_op(const FlatSpace& s, std::size_t k);
/// diag(eta^{II}): the Gram matrix of the pairing a ^ *b = sum_I a_I b_I eta^{II} vol.
LinDiffOp gram_op(const FlatSpace& s, std::size_t k);
/// Applies an operator to a form's components, producing a grade-`grade` form.
Form apply_to_form(const LinDiffOp& op, const Form& a, std::size_t grade);

}  // namespace lanchor
