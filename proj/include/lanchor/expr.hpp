// Exact symbolic kernel: expressions over jet symbols with rational
// coefficients, kept permanently in canonical (fully expanded, sorted) form.
#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace lanchor {

using Rational = mpq_class;

/// Raised when an expression grows past the configured node cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation is asked for something outside its supported
/// input class (it never returns a wrong answer instead).
class UnsupportedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Derivative counts per independent variable. Trailing zeros are trimmed so
/// that equality does not depend on how many variables the caller declared.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> counts);

  static MultiIndex unit(std::size_t var);

  int operator[](std::size_t var) const {
    return var < counts_.size() ? counts_[var] : 0;
  }
  int order() const;
  std::size_t size() const { return counts_.size(); }
  const std::vector<int>& counts() const { return counts_; }

  MultiIndex operator+(const MultiIndex& other) const;
  /// Componentwise difference; requires other.divides(*this).
  MultiIndex operator-(const MultiIndex& other) const;
  /// True when every entry of *this is <= the matching entry of other.
  bool divides(const MultiIndex& other) const;

  bool operator==(const MultiIndex&) const = default;
  /// Graded order: total order first, then reverse-lex on the counts.
  std::strong_ordering operator<=>(const MultiIndex& other) const;

 private:
  std::vector<int> counts_;
};

/// Product of binomials prod_mu C(alpha_mu, beta_mu).
Rational multi_binomial(const MultiIndex& alpha, const MultiIndex& beta);

/// Enumerates every beta with beta <= alpha componentwise.
std::vector<MultiIndex> sub_indices(const MultiIndex& alpha);

enum class AtomKind { Jet = 0, Indep = 1, Param = 2, Func = 3, Paren = 4 };
enum class Func { Sin = 0, Cos = 1, Exp = 2, Log = 3 };

const char* func_name(Func f);

struct AtomNode;
/// Atoms are interned; pointer equality is structural equality.
using Atom = const AtomNode*;

struct Factor {
  Atom atom;
  int exp;
  bool operator==(const Factor&) const = default;
};
using Monomial = std::vector<Factor>;

struct Term {
  Monomial mono;
  Rational coef;
};

class JetSpace;

class Expr {
 public:
  Expr();
  Expr(int value);  // NOLINT(google-explicit-constructor)
  Expr(long value);  // NOLINT(google-explicit-constructor)
  Expr(const Rational& value);  // NOLINT(google-explicit-constructor)

  static Expr atom(Atom a);
  /// Builds from an arbitrary term list; merges, drops zeros and sorts.
  static Expr from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const;
  std::size_t size() const { return terms().size(); }
  bool is_zero() const { return terms().empty(); }
  bool is_constant() const;
  std::optional<Rational> constant_value() const;
  /// Coefficient of the empty monomial.
  Rational constant_term() const;
  std::size_t hash() const;
  /// Nodes counted as one per term plus one per factor.
  std::size_t node_count() const;

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr& operator+=(const Expr& b) { return *this = *this + b; }
  Expr& operator-=(const Expr& b) { return *this = *this - b; }
  Expr& operator*=(const Expr& b) { return *this = *this * b; }

  friend bool operator==(const Expr& a, const Expr& b);

  std::string str() const;

 private:
  struct Poly;
  explicit Expr(std::shared_ptr<const Poly> p);
  std::shared_ptr<const Poly> p_;
  friend class PolyBuilder;
};

Expr pow(const Expr& base, int exponent);
Expr apply_func(Func f, const Expr& arg);
inline Expr sin(const Expr& e) { return apply_func(Func::Sin, e); }
inline Expr cos(const Expr& e) { return apply_func(Func::Cos, e); }
inline Expr exp(const Expr& e) { return apply_func(Func::Exp, e); }
inline Expr log(const Expr& e) { return apply_func(Func::Log, e); }

/// Symbolic constant; parameters are global and identified by name.
Expr param(const std::string& name);

/// Canonical form of e. Expressions are canonical by construction, so this
/// only re-normalizes (it is the identity on every Expr the library builds).
Expr canonicalize(const Expr& e);

/// Total structural order used for canonical sorting.
int compare(const Expr& a, const Expr& b);
int compare_atoms(Atom a, Atom b);
int compare_monomials(const Monomial& a, const Monomial& b);

struct AtomNode {
  AtomKind kind{};
  int index = 0;
  MultiIndex alpha;
  std::string name;
  Func func{};
  Expr arg;
  std::shared_ptr<const JetSpace> space;
  std::size_t hash = 0;

  bool is_symbol() const {
    return kind == AtomKind::Jet || kind == AtomKind::Indep ||
           kind == AtomKind::Param;
  }
};

/// Names and symbols of one jet space: independent variables and field
/// components. Jet atoms keep a reference to their space so total
/// derivatives can raise them.
class JetSpace : public std::enable_shared_from_this<JetSpace> {
 public:
  static std::shared_ptr<const JetSpace> create(
      std::vector<std::string> indep, std::vector<std::string> fields);

  std::size_t num_indep() const { return indep_.size(); }
  std::size_t num_fields() const { return fields_.size(); }
  const std::string& indep_name(std::size_t mu) const { return indep_.at(mu); }
  const std::string& field_name(std::size_t i) const { return fields_.at(i); }
  const std::vector<std::string>& indep_names() const { return indep_; }
  const std::vector<std::string>& field_names() const { return fields_; }

  Atom indep_atom(std::size_t mu) const;
  Atom jet_atom(std::size_t field, const MultiIndex& alpha = {}) const;
  Expr indep(std::size_t mu) const { return Expr::atom(indep_atom(mu)); }
  Expr jet(std::size_t field, const MultiIndex& alpha = {}) const {
    return Expr::atom(jet_atom(field, alpha));
  }
  std::string jet_name(std::size_t field, const MultiIndex& alpha) const;

  std::optional<std::size_t> find_indep(const std::string& name) const;
  std::optional<std::size_t> find_field(const std::string& name) const;

 private:
  JetSpace(std::vector<std::string> indep, std::vector<std::string> fields);
  std::vector<std::string> indep_;
  std::vector<std::string> fields_;
};

/// Applies the derivation determined by its values on symbol atoms
/// (jets, independent variables, parameters); function atoms follow the
/// chain rule.
Expr derive(const Expr& e, const std::function<Expr(Atom)>& on_symbol);

/// Partial derivative with respect to a symbol atom.
Expr partial(const Expr& e, Atom symbol);

/// Total derivative D_var: jets are raised in direction var, var itself
/// differentiates to 1, parameters to 0.
Expr total_derivative(const Expr& e, Atom var);
/// Applies D^alpha using the independent variables of `space`.
Expr total_derivative(const Expr& e, const MultiIndex& alpha,
                      const JetSpace& space);

/// Replaces symbol atoms; atoms without an entry are kept.
Expr substitute(const Expr& e, const std::function<std::optional<Expr>(Atom)>& rule);
Expr substitute(const Expr& e, const std::unordered_map<Atom, Expr>& rules);

/// Symbol atoms appearing anywhere in e, function arguments included,
/// in canonical atom order.
std::vector<Atom> symbols_of(const Expr& e);
bool has_opaque_atoms(const Expr& e);
bool depends_on(const Expr& e, Atom symbol);
/// Highest derivative order among jet atoms (0 when there are none).
int max_jet_order(const Expr& e);

/// Current cap on Expr::node_count(); read once from LANCHOR_MAX_NODES.
std::size_t node_cap();
/// Overrides the cap (tests); 0 restores the environment/default value.
void set_node_cap(std::size_t cap);

std::string to_string(const Rational& q);

}  // namespace lanchor

template <>
struct std::hash<lanchor::Expr> {
  std::size_t operator()(const lanchor::Expr& e) const noexcept { return e.hash(); }
};
