#include "lanchor/variational.hpp"

#include <map>

#include "lanchor/rand_eval.hpp"

namespace lanchor {

namespace {

std::vector<Atom> jets_of_field(const Expr& e, std::size_t field) {
  std::vector<Atom> out;
  for (Atom a : symbols_of(e)) {
    if (a->kind == AtomKind::Jet && static_cast<std::size_t>(a->index) == field) out.push_back(a);
  }
  return out;
}

bool mentions_jets(const Expr& e) {
  for (Atom a : symbols_of(e)) {
    if (a->kind == AtomKind::Jet) return true;
  }
  return false;
}

}  // namespace

Expr euler_derivative(const Expr& density, std::size_t field, const JetSpace& space) {
  if (field >= space.num_fields()) throw std::out_of_range("field index out of range");
  Expr out;
  for (Atom a : jets_of_field(density, field)) {
    Expr term = total_derivative(partial(density, a), a->alpha, space);
    if (a->alpha.order() % 2) {
      out -= term;
    } else {
      out += term;
    }
  }
  return out;
}

Expr integrate_laurent(const Expr& e, Atom var) {
  std::vector<Term> out;
  for (const auto& t : e.terms()) {
    int k = 0;
    Monomial rest;
    for (const auto& f : t.mono) {
      if (f.atom == var) {
        k = f.exp;
      } else if (!f.atom->is_symbol()) {
        throw UnsupportedInput("cannot integrate '" + e.str() + "' in " + var->name +
                               ": only Laurent polynomials are supported");
      } else {
        if (f.atom->kind == AtomKind::Jet) {
          throw UnsupportedInput("cannot integrate '" + e.str() + "': it contains jet symbols");
        }
        rest.push_back(f);
      }
    }
    if (k == -1) {
      throw UnsupportedInput("cannot integrate '" + e.str() + "': the antiderivative needs log(" +
                             var->name + ")");
    }
    rest.push_back({var, k + 1});
    out.push_back(Term{std::move(rest), t.coef / (k + 1)});
  }
  return Expr::from_terms(std::move(out));
}

std::optional<Expr> divergence_split(const Expr& density, const JetSpace& space) {
  if (space.num_indep() != 1) {
    throw UnsupportedInput("divergence inversion needs exactly one independent variable");
  }
  // Split by jet degree, validating the polynomial-in-jets precondition.
  std::map<int, std::vector<Term>> by_degree;
  for (const auto& t : density.terms()) {
    int d = 0;
    for (const auto& f : t.mono) {
      if (f.atom->kind == AtomKind::Jet) {
        if (f.exp < 0) throw UnsupportedInput("density is not polynomial in " + f.atom->name);
        d += f.exp;
      } else if (!f.atom->is_symbol() && mentions_jets(f.atom->arg)) {
        throw UnsupportedInput("density is not polynomial in the jets: " + density.str());
      }
    }
    by_degree[d].push_back(t);
  }

  for (std::size_t i = 0; i < space.num_fields(); ++i) {
    if (!is_zero(euler_derivative(density, i, space))) return std::nullopt;
  }

  Atom t_var = space.indep_atom(0);
  Expr j;
  for (auto& [d, terms] : by_degree) {
    Expr part = Expr::from_terms(terms);
    if (d == 0) {
      j += integrate_laurent(part, t_var);
      continue;
    }
    // Homogeneous of degree d: d * L = D(h) with
    // h = sum_i sum_{k>=1} sum_{l<k} (-1)^l u^i_{k-1-l} D^l(dL/du^i_k).
    Expr h;
    for (std::size_t i = 0; i < space.num_fields(); ++i) {
      for (Atom a : jets_of_field(part, i)) {
        const int k = a->alpha.order();
        if (k == 0) continue;
        Expr q = partial(part, a);
        for (int l = 0; l < k; ++l) {
          Expr term = space.jet(i, MultiIndex({k - 1 - l})) * q;
          h = (l % 2) ? h - term : h + term;
          q = total_derivative(q, t_var);
        }
      }
    }
    j += h * Expr(Rational(1, d));
  }
  if (!is_zero(total_derivative(j, t_var) - density)) {
    throw std::logic_error("divergence inversion failed its own check");
  }
  return j;
}

}  // namespace lanchor
