// Model definition files for ODE systems.
//
//   [ode]             n = <int>, v = [expr, ...]
//   [anchor]          alpha_ij = expr      (1-based, i < j; alpha_i_j also accepted)
//   [characteristic]  <name> = expr        (any number)
//   [symmetry]        <name> = [expr, ...] (any number)
//   [hamiltonian]     H = expr
//
// '#' starts a comment. Expressions use t and x1..xn; other names are
// parameters.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lanchor/ode_anchor.hpp"
#include "lanchor/parse.hpp"

namespace lanchor {

class ModelFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelFile {
  OdeSystem system;
  std::optional<Bivector> anchor;
  std::vector<std::pair<std::string, Expr>> characteristics;
  std::vector<std::pair<std::string, std::vector<Expr>>> symmetries;
  std::optional<Expr> hamiltonian;
};

/// Throws ParseError (positioned) or ModelFileError.
ModelFile parse_model(const std::string& text);
ModelFile load_model(const std::string& path);
/// Canonical text; parse_model(print_model(m)) reproduces m and
/// print_model is the identity on its own output.
std::string print_model(const ModelFile& m);

}  // namespace lanchor
