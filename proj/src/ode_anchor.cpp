#include "lanchor/ode_anchor.hpp"

#include <algorithm>

#include "lanchor/rand_eval.hpp"
#include "lanchor/variational.hpp"

namespace lanchor {

std::shared_ptr<const JetSpace> ode_space(std::size_t n) {
  std::vector<std::string> fields;
  for (std::size_t i = 1; i <= n; ++i) fields.push_back("x" + std::to_string(i));
  return JetSpace::create({"t"}, std::move(fields));
}

void require_zeroth_order(const Expr& e, const char* what) {
  for (Atom a : symbols_of(e)) {
    if (a->kind == AtomKind::Jet && a->alpha.order() > 0) {
      throw UnsupportedInput(std::string(what) + " contains the derivative " + a->name +
                             "; eliminate it with the equations of motion (reduce_on_shell) first");
    }
  }
}

OdeSystem::OdeSystem(std::shared_ptr<const JetSpace> sp, std::vector<Expr> vv)
    : space(std::move(sp)), v(std::move(vv)) {
  if (space->num_indep() != 1) throw std::invalid_argument("ODE space needs one independent variable");
  if (v.size() != space->num_fields()) {
    throw std::invalid_argument("v has " + std::to_string(v.size()) + " entries for " +
                                std::to_string(space->num_fields()) + " fields");
  }
  for (const auto& e : v) require_zeroth_order(e, "v");
}

OdeSystem OdeSystem::free(std::size_t n) { return OdeSystem(ode_space(n), std::vector<Expr>(n)); }

std::vector<Expr> OdeSystem::residuals() const {
  std::vector<Expr> out;
  for (std::size_t i = 0; i < n(); ++i) out.push_back(space->jet(i, MultiIndex({1})) + v[i]);
  return out;
}

ShellRules OdeSystem::shell() const { return ShellRules::ode(space, v); }

bool OdeSystem::operator==(const OdeSystem& o) const { return space == o.space && v == o.v; }

// ---------------------------------------------------------------------------

Bivector::Bivector(std::size_t n) : n_(n) {}

Bivector Bivector::canonical(std::size_t n) {
  Bivector b(n);
  for (std::size_t k = 0; k + 1 < n; k += 2) b.set(k, k + 1, Expr(1));
  return b;
}

Bivector Bivector::lie_poisson_so3(const OdeSystem& sys) {
  if (sys.n() != 3) throw std::invalid_argument("so(3) structure needs n = 3");
  Bivector b(3);
  b.set(0, 1, sys.x(2));
  b.set(0, 2, -sys.x(1));
  b.set(1, 2, sys.x(0));
  return b;
}

Expr Bivector::operator()(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw std::out_of_range("bivector index out of range");
  if (i == j) return Expr();
  auto it = upper_.find({std::min(i, j), std::max(i, j)});
  if (it == upper_.end()) return Expr();
  return i < j ? it->second : -it->second;
}

void Bivector::set(std::size_t i, std::size_t j, const Expr& value) {
  if (i >= n_ || j >= n_) throw std::out_of_range("bivector index out of range");
  if (i == j) {
    if (!value.is_zero()) throw std::invalid_argument("bivector diagonal must vanish");
    return;
  }
  Expr v = i < j ? value : -value;
  auto key = std::make_pair(std::min(i, j), std::max(i, j));
  if (v.is_zero()) {
    upper_.erase(key);
  } else {
    upper_[key] = v;
  }
}

namespace {

int sort3(std::array<std::size_t, 3>& a) {
  int sign = 1;
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < 2; ++i) {
      if (a[i] > a[i + 1]) {
        std::swap(a[i], a[i + 1]);
        sign = -sign;
      }
    }
  }
  return sign;
}

bool all_zero(const std::vector<Expr>& r) {
  return std::all_of(r.begin(), r.end(), [](const Expr& e) { return is_zero(e); });
}

}  // namespace

Expr Trivector::operator()(std::size_t i, std::size_t j, std::size_t k) const {
  std::array<std::size_t, 3> a{i, j, k};
  int s = sort3(a);
  if (a[0] == a[1] || a[1] == a[2]) return Expr();
  auto it = comps_.find(a);
  if (it == comps_.end()) return Expr();
  return s > 0 ? it->second : -it->second;
}

void Trivector::set_sorted(std::size_t i, std::size_t j, std::size_t k, const Expr& value) {
  if (!(i < j && j < k && k < n_)) throw std::invalid_argument("trivector indices must be increasing");
  if (value.is_zero()) {
    comps_.erase({i, j, k});
  } else {
    comps_[{i, j, k}] = value;
  }
}

// ---------------------------------------------------------------------------

ExprCheck check_characteristic(const OdeSystem& sys, const Expr& f) {
  require_zeroth_order(f, "characteristic");
  Expr r = partial(f, sys.t_atom());
  for (std::size_t i = 0; i < sys.n(); ++i) r -= sys.v[i] * partial(f, sys.x_atom(i));
  bool ok = is_zero(r);
  return {ok, {ok ? Expr() : r}};
}

ExprCheck check_symmetry(const OdeSystem& sys, const std::vector<Expr>& w) {
  if (w.size() != sys.n()) throw std::invalid_argument("symmetry has wrong length");
  for (const auto& e : w) require_zeroth_order(e, "symmetry");
  std::vector<Expr> r(sys.n());
  for (std::size_t i = 0; i < sys.n(); ++i) {
    Expr e = partial(w[i], sys.t_atom());
    for (std::size_t k = 0; k < sys.n(); ++k) {
      Atom xk = sys.x_atom(k);
      e -= sys.v[k] * partial(w[i], xk) - w[k] * partial(sys.v[i], xk);
    }
    r[i] = is_zero(e) ? Expr() : e;
  }
  return {all_zero(r), r};
}

ExprCheck check_anchor(const OdeSystem& sys, const Bivector& alpha) {
  if (alpha.n() != sys.n()) throw std::invalid_argument("anchor dimension mismatch");
  const std::size_t n = sys.n();
  for (const auto& [ij, e] : alpha.entries()) require_zeroth_order(e, "anchor");
  std::vector<Expr> r;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Expr aij = alpha(i, j);
      Expr e = partial(aij, sys.t_atom());
      for (std::size_t k = 0; k < n; ++k) {
        Atom xk = sys.x_atom(k);
        e -= sys.v[k] * partial(aij, xk) - alpha(k, j) * partial(sys.v[i], xk) -
             alpha(i, k) * partial(sys.v[j], xk);
      }
      r.push_back(is_zero(e) ? Expr() : e);
    }
  }
  return {all_zero(r), r};
}

std::vector<Expr> anchor_apply(const OdeSystem& sys, const Bivector& alpha, const Expr& f) {
  require_zeroth_order(f, "characteristic");
  std::vector<Expr> df = vertical_differential(sys, f);
  std::vector<Expr> w(sys.n());
  for (std::size_t i = 0; i < sys.n(); ++i) {
    for (std::size_t j = 0; j < sys.n(); ++j) w[i] += alpha(i, j) * df[j];
  }
  return w;
}

Trivector schouten_square(const OdeSystem& sys, const Bivector& alpha) {
  const std::size_t n = sys.n();
  Trivector s(n);
  auto term = [&](std::size_t i, std::size_t j, std::size_t k) {
    Expr e;
    for (std::size_t m = 0; m < n; ++m) e += alpha(i, m) * partial(alpha(j, k), sys.x_atom(m));
    return e;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        s.set_sorted(i, j, k, term(i, j, k) + term(j, k, i) + term(k, i, j));
      }
    }
  }
  return s;
}

Expr poisson_bracket(const OdeSystem& sys, const Bivector& alpha, const Expr& f, const Expr& g) {
  Expr out;
  std::vector<Expr> df = vertical_differential(sys, f);
  std::vector<Expr> dg = vertical_differential(sys, g);
  for (std::size_t i = 0; i < sys.n(); ++i) {
    if (df[i].is_zero()) continue;
    for (std::size_t j = 0; j < sys.n(); ++j) out += alpha(i, j) * df[i] * dg[j];
  }
  return out;
}

std::vector<Expr> vector_commutator(const OdeSystem& sys, const std::vector<Expr>& x,
                                    const std::vector<Expr>& y) {
  std::vector<Expr> out(sys.n());
  for (std::size_t i = 0; i < sys.n(); ++i) {
    for (std::size_t k = 0; k < sys.n(); ++k) {
      Atom xk = sys.x_atom(k);
      out[i] += x[k] * partial(y[i], xk) - y[k] * partial(x[i], xk);
    }
  }
  return out;
}

std::vector<Expr> vertical_differential(const OdeSystem& sys, const Expr& f) {
  std::vector<Expr> df;
  for (std::size_t i = 0; i < sys.n(); ++i) df.push_back(partial(f, sys.x_atom(i)));
  return df;
}

OdeSystem deform(const OdeSystem& sys, const Bivector& alpha, const Expr& h) {
  require_zeroth_order(h, "Hamiltonian");
  std::vector<Expr> v = sys.v;
  std::vector<Expr> w = anchor_apply(sys, alpha, h);
  for (std::size_t i = 0; i < sys.n(); ++i) v[i] -= w[i];
  return OdeSystem(sys.space, std::move(v));
}

TwistCheck twist_invariance_check(const OdeSystem& sys, const Bivector& alpha, const Expr& f,
                                  const Expr& h) {
  if (!check_characteristic(sys, f).ok) {
    return {false, Expr(), "f is not a characteristic of the undeformed system"};
  }
  Expr b = poisson_bracket(sys, alpha, f, h);
  for (std::size_t i = 0; i < sys.n(); ++i) {
    if (!is_zero(partial(b, sys.x_atom(i)))) {
      return {false, Expr(), "not applicable: {f,H} = " + b.str() + " depends on x"};
    }
  }
  Expr g;
  try {
    g = integrate_laurent(b, sys.t_atom());
  } catch (const UnsupportedInput& e) {
    return {false, Expr(), std::string("not applicable: ") + e.what()};
  }
  OdeSystem twisted = deform(sys, alpha, h);
  auto c = check_characteristic(twisted, f - g);
  if (!c.ok) return {false, g, "f - g is not conserved: residual " + c.residual[0].str()};
  return {true, g, ""};
}

ExprCheck proper_symmetry_conditions(const OdeSystem& sys, const Bivector& alpha,
                                     const std::vector<Expr>& psi) {
  const std::size_t n = sys.n();
  if (psi.size() != n) throw std::invalid_argument("covector has wrong length");
  for (const auto& e : psi) require_zeroth_order(e, "covector");
  std::vector<Expr> r;
  // Exterior derivative of psi in x: c_{ik} = d_i psi_k - d_k psi_i.
  std::vector<std::vector<Expr>> c(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (i != k) c[i][k] = partial(psi[k], sys.x_atom(i)) - partial(psi[i], sys.x_atom(k));
    }
  }
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t k = 0; k < n; ++k) {
      Expr e;
      for (std::size_t i = 0; i < n; ++i) e += alpha(l, i) * c[i][k];
      r.push_back(is_zero(e) ? Expr() : e);
    }
  }
  Expr contraction;
  for (std::size_t k = 0; k < n; ++k) contraction += psi[k] * sys.v[k];
  for (std::size_t l = 0; l < n; ++l) {
    Expr e;
    for (std::size_t i = 0; i < n; ++i) {
      e += alpha(l, i) * (partial(contraction, sys.x_atom(i)) - partial(psi[i], sys.t_atom()));
    }
    r.push_back(is_zero(e) ? Expr() : e);
  }
  return {all_zero(r), r};
}

namespace {

int rational_rank(std::vector<std::vector<Rational>> m) {
  int rank = 0;
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  std::size_t r = 0;
  for (std::size_t j = 0; j < cols && r < m.size(); ++j) {
    std::size_t p = r;
    while (p < m.size() && sgn(m[p][j]) == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    for (std::size_t i = r + 1; i < m.size(); ++i) {
      if (sgn(m[i][j]) == 0) continue;
      Rational f = m[i][j] / m[r][j];
      for (std::size_t k = j; k < cols; ++k) m[i][k] -= f * m[r][k];
    }
    ++r;
    ++rank;
  }
  return rank;
}

}  // namespace

int transitivity_rank(const OdeSystem& sys, const Bivector& alpha, const std::vector<Rational>& point,
                      int depth) {
  const std::size_t n = sys.n();
  if (point.size() != n + 1) throw std::invalid_argument("point must list t, x1..xn");
  std::vector<std::vector<Expr>> gens;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Expr> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = alpha(i, j);
    gens.push_back(std::move(col));
  }
  std::vector<std::vector<Expr>> all = gens;
  std::vector<std::vector<Expr>> level = gens;
  for (int d = 0; d < depth; ++d) {
    std::vector<std::vector<Expr>> next;
    for (const auto& g : gens) {
      for (const auto& l : level) {
        auto b = vector_commutator(sys, g, l);
        if (std::any_of(b.begin(), b.end(), [](const Expr& e) { return !e.is_zero(); })) {
          next.push_back(std::move(b));
        }
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  std::function<std::optional<Rational>(Atom)> values = [&](Atom a) -> std::optional<Rational> {
    if (a == sys.t_atom()) return point[0];
    if (a->kind == AtomKind::Jet && a->alpha.order() == 0 && a->space.get() == sys.space.get()) {
      return point[static_cast<std::size_t>(a->index) + 1];
    }
    return std::nullopt;
  };
  std::vector<std::vector<Rational>> m;
  for (const auto& vec : all) {
    std::vector<Rational> row;
    for (const auto& e : vec) row.push_back(eval_at(e, values));
    m.push_back(std::move(row));
  }
  return rational_rank(std::move(m));
}

CharacteristicSearch search_characteristics(const OdeSystem& sys, int max_degree) {
  if (max_degree < 1) return {{}, "degree must be at least 1"};
  if (max_degree > kMaxSearchDegree) {
    throw ResourceError("search degree " + std::to_string(max_degree) + " exceeds the cap " +
                        std::to_string(kMaxSearchDegree));
  }
  const std::size_t n = sys.n();
  for (const auto& e : sys.v) {
    for (const auto& t : e.terms()) {
      for (const auto& f : t.mono) {
        bool ok = f.exp > 0 && (f.atom == sys.t_atom() ||
                                (f.atom->kind == AtomKind::Jet && f.atom->space.get() == sys.space.get()));
        if (!ok) throw UnsupportedInput("v must be polynomial in t and x with rational coefficients");
      }
    }
  }
  // Candidate monomials t^a x^beta, 1 <= a + |beta| <= max_degree.
  std::vector<Atom> vars{sys.t_atom()};
  for (std::size_t i = 0; i < n; ++i) vars.push_back(sys.x_atom(i));
  std::vector<Expr> monos;
  std::vector<int> e(vars.size(), 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i == vars.size()) {
      std::vector<Term> t{Term{{}, Rational(1)}};
      for (std::size_t k = 0; k < vars.size(); ++k) {
        if (e[k]) t[0].mono.push_back({vars[k], e[k]});
      }
      if (!t[0].mono.empty()) monos.push_back(Expr::from_terms(std::move(t)));
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[i] = k;
      rec(i + 1, left - k);
    }
    e[i] = 0;
  };
  rec(0, max_degree);
  // Ascending graded-lex: the last column of every null vector is its leading monomial.
  std::sort(monos.begin(), monos.end(), [](const Expr& a, const Expr& b) {
    return compare_monomials(a.terms()[0].mono, b.terms()[0].mono) > 0;
  });

  auto mono_less = [](const Monomial& a, const Monomial& b) { return compare_monomials(a, b) < 0; };
  std::map<Monomial, std::size_t, decltype(mono_less)> row_of(mono_less);
  std::vector<std::vector<std::pair<std::size_t, Rational>>> column_entries(monos.size());
  for (std::size_t c = 0; c < monos.size(); ++c) {
    Expr r = check_characteristic(sys, monos[c]).residual[0];
    for (const auto& t : r.terms()) {
      auto [it, inserted] = row_of.try_emplace(t.mono, row_of.size());
      column_entries[c].emplace_back(it->second, t.coef);
    }
  }
  std::vector<std::vector<Rational>> m(row_of.size(), std::vector<Rational>(monos.size()));
  for (std::size_t c = 0; c < monos.size(); ++c) {
    for (const auto& [r, v] : column_entries[c]) m[r][c] = v;
  }
  // Reduced row echelon form.
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t j = 0; j < monos.size() && r < m.size(); ++j) {
    std::size_t p = r;
    while (p < m.size() && sgn(m[p][j]) == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    Rational inv = 1 / m[r][j];
    for (auto& x : m[r]) x *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || sgn(m[i][j]) == 0) continue;
      Rational f = m[i][j];
      for (std::size_t k = j; k < monos.size(); ++k) m[i][k] -= f * m[r][k];
    }
    pivot_cols.push_back(j);
    ++r;
  }
  std::vector<bool> is_pivot(monos.size(), false);
  for (auto j : pivot_cols) is_pivot[j] = true;
  CharacteristicSearch out;
  for (std::size_t f = monos.size(); f-- > 0;) {
    if (is_pivot[f]) continue;
    Expr sol = monos[f];
    for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
      if (sgn(m[i][f]) != 0) sol -= Expr(m[i][f]) * monos[pivot_cols[i]];
    }
    if (!check_characteristic(sys, sol).ok) throw std::logic_error("characteristic search produced a non-solution");
    out.basis.push_back(sol);
  }
  if (out.basis.empty()) {
    out.diagnostic = "no non-constant polynomial characteristic of degree <= " +
                     std::to_string(max_degree);
  }
  return out;
}

}  // namespace lanchor
