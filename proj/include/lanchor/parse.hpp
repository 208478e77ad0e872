// Text grammar for expressions.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('-' | '+') unary | power
//   power  := atom ('^' unary)?          exponent must be an integer constant
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
//
// A name is a field component, an independent variable, a jet written
// field '_' followed by independent-variable names (x1_tt), or otherwise a
// parameter.
#pragma once

#include <stdexcept>
#include <string>

#include "lanchor/expr.hpp"

namespace lanchor {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  int line_;
  int column_;
  std::string detail_;
};

/// Parses `text` over the symbols of `space`. `line` and `column` give the
/// position of the first character for diagnostics.
Expr parse_expr(const std::string& text, const JetSpace& space, int line = 1, int column = 1);

}  // namespace lanchor
