// Matrix linear differential operators sum coeff * D^alpha over a jet space,
// and on-shell reduction.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "lanchor/expr.hpp"

namespace lanchor {

struct OpKey {
  std::size_t row;
  std::size_t col;
  MultiIndex alpha;

  bool operator==(const OpKey&) const = default;
  bool operator<(const OpKey& o) const {
    if (row != o.row) return row < o.row;
    if (col != o.col) return col < o.col;
    return alpha < o.alpha;
  }
};

class LinDiffOp {
 public:
  LinDiffOp(std::size_t rows, std::size_t cols, std::shared_ptr<const JetSpace> space);

  static LinDiffOp identity(std::size_t n, std::shared_ptr<const JetSpace> space);
  /// Single-entry operator coeff * D^alpha at (row, col).
  static LinDiffOp single(std::size_t rows, std::size_t cols, std::size_t row, std::size_t col,
                          const MultiIndex& alpha, const Expr& coeff,
                          std::shared_ptr<const JetSpace> space);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::shared_ptr<const JetSpace>& space() const { return space_; }
  const std::map<OpKey, Expr>& entries() const { return entries_; }

  /// Adds coeff * D^alpha to entry (row, col).
  void add(std::size_t row, std::size_t col, const MultiIndex& alpha, const Expr& coeff);
  Expr coefficient(std::size_t row, std::size_t col, const MultiIndex& alpha) const;
  bool is_zero() const { return entries_.empty(); }
  int order() const;

  LinDiffOp operator+(const LinDiffOp& o) const;
  LinDiffOp operator-(const LinDiffOp& o) const;
  LinDiffOp operator-() const;
  /// Left multiplication of every coefficient by a scalar expression.
  friend LinDiffOp operator*(const Expr& c, const LinDiffOp& a);

  /// Applies `fn` to every coefficient, dropping entries that become zero.
  LinDiffOp map_coefficients(const std::function<Expr(const Expr&)>& fn) const;

  bool operator==(const LinDiffOp& o) const;

  /// One line per nonzero entry: "[r,c] coeff*D^alpha".
  std::string str() const;

  /// Stacks operators with equal column counts vertically.
  static LinDiffOp vstack(const std::vector<LinDiffOp>& blocks);
  /// Places operators side by side (equal row counts).
  static LinDiffOp hstack(const std::vector<LinDiffOp>& blocks);
  /// Block-diagonal sum.
  static LinDiffOp block_diag(const std::vector<LinDiffOp>& blocks);

 private:
  void check_same_shape(const LinDiffOp& o) const;
  std::size_t rows_;
  std::size_t cols_;
  std::shared_ptr<const JetSpace> space_;
  std::map<OpKey, Expr> entries_;
};

/// Entrywise sum coeff * D^alpha v_col.
std::vector<Expr> apply(const LinDiffOp& a, const std::vector<Expr>& v);
/// Leibniz-expanded composition a o b.
LinDiffOp compose(const LinDiffOp& a, const LinDiffOp& b);
/// (coeff D^alpha)* = (-1)^|alpha| D^alpha o coeff, expanded.
LinDiffOp formal_adjoint(const LinDiffOp& a);
/// J_{a,i} = sum_alpha (dT_a / du^i_alpha) D^alpha over all fields of the space.
LinDiffOp linearize(const std::vector<Expr>& t, std::shared_ptr<const JetSpace> space);

class ShellError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Substitution rules leading jet -> expression, closed under prolongation
/// up to a fixed jet order.
class ShellRules {
 public:
  /// Normal-form ODE shell: x^i_t -> -v^i, prolonged on demand.
  static ShellRules ode(std::shared_ptr<const JetSpace> space, std::vector<Expr> v,
                        int max_order = 8);
  /// Linear shell from relations linear in the jets with rational
  /// coefficients; the relations and their prolongations up to `max_order`
  /// are row-reduced, leading symbols taken highest in graded order.
  static ShellRules linear(std::shared_ptr<const JetSpace> space, const std::vector<Expr>& relations,
                           int max_order);
  /// No rules at all.
  static ShellRules none(std::shared_ptr<const JetSpace> space);

  Expr reduce(const Expr& e) const;
  LinDiffOp reduce(const LinDiffOp& a) const;

  int max_order() const { return max_order_; }
  /// Rules currently known (for the ODE shell, those materialized so far).
  std::vector<std::pair<Atom, Expr>> rules() const;

 private:
  enum class Kind { None, Ode, Linear };
  ShellRules() = default;
  std::optional<Expr> rule_for(Atom a) const;

  Kind kind_ = Kind::None;
  std::shared_ptr<const JetSpace> space_;
  int max_order_ = 0;
  std::vector<Expr> v_;
  std::shared_ptr<std::mutex> mu_;
  std::shared_ptr<std::map<Atom, Expr>> table_;
};

struct ShellComparison {
  bool equal;
  LinDiffOp residual;
};

/// Reduces every entry of a - b on the shell.
ShellComparison op_equal_mod_shell(const LinDiffOp& a, const LinDiffOp& b, const ShellRules& shell);

}  // namespace lanchor
