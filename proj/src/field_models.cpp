#include "lanchor/field_models.hpp"

#include <algorithm>

#include "lanchor/rand_eval.hpp"

namespace lanchor {

namespace {

Form zero_tested(const Form& f) {
  return f.map([](const Expr& e) { return is_zero(e) ? Expr() : e; });
}

Form reduce_form(const ShellRules& shell, const Form& f) {
  return zero_tested(f.map([&shell](const Expr& e) { return shell.reduce(e); }));
}

std::vector<Expr> concat(const std::vector<Form>& forms) {
  std::vector<Expr> out;
  for (const auto& f : forms) out.insert(out.end(), f.components().begin(), f.components().end());
  return out;
}

std::vector<std::string> component_names(const std::string& prefix, std::size_t n, std::size_t k) {
  std::vector<std::string> names;
  for (std::uint32_t mask : basis_masks(n, k)) {
    std::string s = prefix;
    for (std::size_t i : mask_indices(mask)) s += std::to_string(i);
    names.push_back(s);
  }
  return names;
}

Form gram_apply(const Form& f) { return apply_to_form(gram_op(f.space(), f.grade()), f, f.grade()); }

Certificate certificate(std::string name, const std::vector<Form>& residuals) {
  std::string text = residual_text(residuals);
  return {std::move(name), text == "0", text};
}

}  // namespace

std::string residual_text(const std::vector<Form>& forms) {
  std::string out;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (forms[i].is_zero()) continue;
    if (!out.empty()) out += "; ";
    out += forms.size() > 1 ? "[" + std::to_string(i) + "] " + forms[i].str() : forms[i].str();
  }
  return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------------------
// p-forms

PFormModel::PFormModel(std::vector<int> signature, std::size_t p, Expr a, Expr b)
    : space_(signature, component_names("F", signature.size(), p)),
      p_(p),
      a_(std::move(a)),
      b_(std::move(b)),
      f_(space_, 0) {
  if (p < 1 || p + 1 > signature.size()) {
    throw std::invalid_argument("p-form model needs 1 <= p <= n-1");
  }
  f_ = Form::from_fields(space_, p, 0);
}

std::pair<Form, Form> pform_residuals(const PFormModel& m) {
  return {exterior_d(m.field()), exterior_d(hodge(m.field()))};
}

bool noether_identity_check(const Form& t1, const Form& t2) {
  auto closed = [](const Form& t) { return t.grade() >= t.n() || exterior_d(t).is_zero(); };
  return closed(t1) && closed(t2);
}

bool noether_identity_check(const PFormModel& m) {
  auto [t1, t2] = pform_residuals(m);
  return noether_identity_check(t1, t2);
}

void require_admissible_vector(const PFormModel& m, const SpacetimeVector& xi) {
  KillingKind k = conformal_killing_check(xi, m.space());
  if (k == KillingKind::Killing) return;
  if (k == KillingKind::Conformal && m.n() == 2 * m.p()) return;
  throw ModelError(std::string("vector field is ") + killing_kind_name(k) +
                   (k == KillingKind::Conformal ? " but n != 2p" : "") +
                   "; a Killing vector (or conformal Killing with n = 2p) is required");
}

std::pair<Form, Form> killing_characteristic(const PFormModel& m, const SpacetimeVector& xi) {
  require_admissible_vector(m, xi);
  const std::size_t n = m.n(), p = m.p();
  const int s = m.space().det();
  const int s1 = s * ((((n - p) * (p - 1)) % 2) ? -1 : 1);
  const int s2 = s * (((p - 1) % 2) ? -1 : 1);
  const Form& f = m.field();
  Form psi1 = Expr(s1) * hodge(interior(xi, hodge(f)));
  Form psi2 = Expr(s2) * hodge(interior(xi, f));
  return {psi1, psi2};
}

CurrentCheck killing_current(const PFormModel& m, const SpacetimeVector& xi) {
  auto [psi1, psi2] = killing_characteristic(m, xi);
  auto [t1, t2] = pform_residuals(m);
  const Form& f = m.field();
  const Form star_f = hodge(f);
  const Expr sign(((m.p() - 1) % 2) ? -1 : 1);
  Form j = Expr(Rational(1, 2)) * (wedge(interior(xi, f), star_f) + sign * wedge(f, interior(xi, star_f)));
  Form residual = zero_tested(pairing_density(psi1, t1) + pairing_density(psi2, t2) - exterior_d(j));
  bool ok = residual.is_zero();
  return {j, ok, residual};
}

EnergyMomentum energy_momentum_extract(const PFormModel& m) {
  const std::size_t n = m.n();
  EnergyMomentum out;
  out.t.assign(n, std::vector<Expr>(n));
  for (std::size_t mu = 0; mu < n; ++mu) {
    CurrentCheck c = killing_current(m, SpacetimeVector::translation(m.space(), mu));
    if (!c.certificate) throw ModelError("translation current " + std::to_string(mu) + " fails its certificate");
    Form dual = hodge(c.current);
    for (std::size_t nu = 0; nu < n; ++nu) out.t[mu][nu] = dual[nu];
  }
  out.symmetric = true;
  std::string asym;
  for (std::size_t mu = 0; mu < n; ++mu) {
    out.trace += Expr(m.space().eta(mu)) * out.t[mu][mu];
    for (std::size_t nu = mu + 1; nu < n; ++nu) {
      Expr d = out.t[mu][nu] - out.t[nu][mu];
      if (!is_zero(d)) {
        out.symmetric = false;
        if (asym.empty()) asym = "T" + std::to_string(mu) + std::to_string(nu) + " - T" +
                                 std::to_string(nu) + std::to_string(mu) + " = " + d.str();
      }
    }
  }
  out.traceless = is_zero(out.trace);
  if (!out.symmetric) throw ModelError("energy-momentum tensor is not symmetric: " + asym);
  return out;
}

LinDiffOp pform_linearization(const PFormModel& m) {
  const FlatSpace& s = m.space();
  return LinDiffOp::vstack({d_op(s, m.p()), compose(d_op(s, m.n() - m.p()), hodge_op(s, m.p()))});
}

AnchorPair pform_anchor_op(const PFormModel& m) {
  const FlatSpace& s = m.space();
  LinDiffOp a = LinDiffOp::vstack(
      {m.a() * d_op(s, m.p()), m.b() * compose(d_op(s, m.n() - m.p()), hodge_op(s, m.p()))});
  LinDiffOp v_star = compose(a, gram_op(s, m.p()));
  return {formal_adjoint(v_star), v_star};
}

ShellRules pform_shell(const PFormModel& m) {
  auto [t1, t2] = pform_residuals(m);
  return ShellRules::linear(m.space().jets(), concat({t1, t2}), 2);
}

ShellComparison pform_anchor_verify(const PFormModel& m, const AnchorPair& anchor) {
  LinDiffOp j = pform_linearization(m);
  return op_equal_mod_shell(compose(j, anchor.v), compose(anchor.v_star, formal_adjoint(j)),
                            pform_shell(m));
}

ShellComparison pform_anchor_verify(const PFormModel& m) { return pform_anchor_verify(m, pform_anchor_op(m)); }

std::optional<LinDiffOp> triviality_witness(const PFormModel& m) {
  if (!is_zero(m.a() - m.b())) return std::nullopt;
  LinDiffOp g = m.a() * gram_op(m.space(), m.p());
  LinDiffOp diff = pform_anchor_op(m).v_star - compose(pform_linearization(m), g);
  diff = diff.map_coefficients([](const Expr& e) { return is_zero(e) ? Expr() : e; });
  if (!diff.is_zero()) return std::nullopt;
  return g;
}

SymmetryCheck pform_proper_symmetry(const PFormModel& m, const SpacetimeVector& xi) {
  auto [psi1, psi2] = killing_characteristic(m, xi);
  AnchorPair anchor = pform_anchor_op(m);
  std::vector<Expr> omega = concat({gram_apply(psi1), gram_apply(psi2)});
  Form delta(m.space(), m.p(), lanchor::apply(anchor.v, omega));
  Form target = (m.a() - m.b()) * lie_derivative(xi, m.field());
  Form residual = reduce_form(pform_shell(m), delta - target);
  return {residual.is_zero(), delta, residual};
}

KernelEquations pform_kernel_equations(const PFormModel& m) {
  AnchorPair anchor = pform_anchor_op(m);
  const std::size_t n = m.n(), p = m.p();
  std::vector<Expr> out = lanchor::apply(anchor.v_star, gram_apply(m.field()).components());
  const std::size_t k1 = binomial(n, p + 1);
  Form first(m.space(), p + 1, std::vector<Expr>(out.begin(), out.begin() + static_cast<long>(k1)));
  Form second(m.space(), n - p + 1, std::vector<Expr>(out.begin() + static_cast<long>(k1), out.end()));
  bool matches = false;
  if (!is_zero(m.a()) && !is_zero(m.b())) {
    auto [t1, t2] = pform_residuals(m);
    matches = zero_tested(pow(m.a(), -1) * first - t1).is_zero() &&
              zero_tested(pow(m.b(), -1) * second - t2).is_zero();
  }
  return {first, second, matches};
}

// ---------------------------------------------------------------------------
// self-dual fields

SelfDualModel::SelfDualModel(std::size_t n)
    : space_(FlatSpace::lorentzian(n, component_names("A", n, n / 2))), a_(space_, 0), h_(space_, 0) {
  if (n % 4 != 2) throw std::invalid_argument("self-dual model needs n = 4k+2");
  a_ = Form::from_fields(space_, n / 2, 0);
  h_ = selfdual_project(a_).first;
}

LinDiffOp selfdual_anchor_star(const FlatSpace& s) {
  const std::size_t k = s.n() / 2;
  LinDiffOp id = LinDiffOp::identity(binomial(s.n(), k), s.jets());
  LinDiffOp pi_minus = Expr(Rational(1, 2)) * (id - hodge_op(s, k));
  return compose(d_op(s, k), compose(pi_minus, gram_op(s, k)));
}

LinDiffOp selfdual_anchor(const FlatSpace& s) { return formal_adjoint(selfdual_anchor_star(s)); }

std::vector<Certificate> selfdual_verify(const SelfDualModel& sd, const SpacetimeVector& xi) {
  const FlatSpace& s = sd.space();
  KillingKind kind = conformal_killing_check(xi, s);
  if (kind == KillingKind::Neither) {
    throw ModelError("vector field is neither Killing nor conformal Killing");
  }
  const Form& h = sd.field();
  const std::size_t k = s.n() / 2;
  Form ixh = interior(xi, h);
  Form psi = -hodge(ixh);
  Form j = Expr(Rational(1, 2)) * wedge(ixh, h);
  Form t = exterior_d(h);
  Form lie_h = lie_derivative(xi, h);

  std::vector<Certificate> out;
  out.push_back(certificate("selfdual.current", {zero_tested(pairing_density(psi, t) - exterior_d(j))}));
  out.push_back(certificate("selfdual.helicity", {zero_tested(wedge(h, lie_h))}));

  Form delta(s, k, lanchor::apply(selfdual_anchor(s), gram_apply(psi).components()));
  out.push_back(certificate("selfdual.projection", {zero_tested(hodge(delta) - delta)}));
  Form delta_plus = selfdual_project(delta).first;
  ShellRules shell = ShellRules::linear(s.jets(), t.components(), 2);
  out.push_back(certificate("selfdual.transformation", {reduce_form(shell, delta_plus - lie_h)}));
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.name < y.name; });
  return out;
}

// ---------------------------------------------------------------------------
// chiral bosons

LieAlgebra LieAlgebra::su2() {
  LieAlgebra g;
  g.name = "su2";
  g.dim = 3;
  g.f.assign(27, Rational(0));
  g.kappa.assign(9, Rational(0));
  auto eps = [](std::size_t a, std::size_t b, std::size_t c) {
    if (a == b || b == c || a == c) return 0;
    return ((b + 3 - a) % 3 == 1) ? 1 : -1;
  };
  for (std::size_t a = 0; a < 3; ++a) {
    g.kappa[a * 3 + a] = 1;
    for (std::size_t b = 0; b < 3; ++b) {
      for (std::size_t c = 0; c < 3; ++c) g.f[(a * 3 + b) * 3 + c] = eps(a, b, c);
    }
  }
  return g;
}

LieAlgebra LieAlgebra::abelian(std::size_t n) {
  LieAlgebra g;
  g.name = "u1^" + std::to_string(n);
  g.dim = n;
  g.f.assign(n * n * n, Rational(0));
  g.kappa.assign(n * n, Rational(0));
  for (std::size_t a = 0; a < n; ++a) g.kappa[a * n + a] = 1;
  return g;
}

LieAlgebra LieAlgebra::by_name(const std::string& name, std::size_t n) {
  if (name == "su2") return su2();
  if (name == "abelian") return abelian(n);
  throw std::invalid_argument("unknown algebra '" + name + "' (expected su2 or abelian)");
}

namespace {

std::optional<std::vector<Rational>> invert(std::vector<Rational> m, std::size_t n) {
  std::vector<Rational> inv(n * n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(m[p * n + c]) == 0) ++p;
    if (p == n) return std::nullopt;
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(m[p * n + k], m[c * n + k]);
      std::swap(inv[p * n + k], inv[c * n + k]);
    }
    Rational d = m[c * n + c];
    for (std::size_t k = 0; k < n; ++k) {
      m[c * n + k] /= d;
      inv[c * n + k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || sgn(m[r * n + c]) == 0) continue;
      Rational f = m[r * n + c];
      for (std::size_t k = 0; k < n; ++k) {
        m[r * n + k] -= f * m[c * n + k];
        inv[r * n + k] -= f * inv[c * n + k];
      }
    }
  }
  return inv;
}

// Jacobi residuals of structure constants c(a, b, d) (bracket [e_a, e_b] = c^{ab}_d e_d),
// together with antisymmetry.
std::vector<std::string> jacobi_failures(std::size_t n,
                                         const std::function<Expr(std::size_t, std::size_t, std::size_t)>& c) {
  std::vector<std::string> out;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t d = 0; d < n; ++d) {
        Expr s = c(a, b, d) + c(b, a, d);
        if (!is_zero(s)) {
          out.push_back("antisymmetry(" + std::to_string(a) + "," + std::to_string(b) + "," +
                        std::to_string(d) + ") = " + s.str());
        }
      }
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t cc = 0; cc < n; ++cc) {
        for (std::size_t e = 0; e < n; ++e) {
          Expr s;
          for (std::size_t d = 0; d < n; ++d) {
            s += c(a, b, d) * c(d, cc, e) + c(b, cc, d) * c(d, a, e) + c(cc, a, d) * c(d, b, e);
          }
          if (!is_zero(s)) {
            out.push_back("jacobi(" + std::to_string(a) + "," + std::to_string(b) + "," +
                          std::to_string(cc) + ";" + std::to_string(e) + ") = " + s.str());
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

void LieAlgebra::validate() const {
  if (f.size() != dim * dim * dim || kappa.size() != dim * dim) {
    throw ModelError("Lie algebra '" + name + "' has inconsistent table sizes");
  }
  auto bad = jacobi_failures(dim, [this](std::size_t a, std::size_t b, std::size_t c) {
    return Expr(structure(a, b, c));
  });
  if (!bad.empty()) throw ModelError("Lie algebra '" + name + "' violates " + bad.front());
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b < dim; ++b) {
      if (kappa[a * dim + b] != kappa[b * dim + a]) {
        throw ModelError("Lie algebra '" + name + "' has a non-symmetric metric");
      }
    }
  }
  if (!invert(kappa, dim)) throw ModelError("Lie algebra '" + name + "' has a degenerate metric");
}

namespace {

std::vector<std::string> chiral_field_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t a = 1; a <= n; ++a) {
    names.push_back("A" + std::to_string(a) + "x0");
    names.push_back("A" + std::to_string(a) + "x1");
  }
  return names;
}

}  // namespace

ChiralModel::ChiralModel(LieAlgebra algebra, Expr g)
    : algebra_(std::move(algebra)),
      g_(std::move(g)),
      space_(FlatSpace::lorentzian(2, chiral_field_names(algebra_.dim))) {
  if (algebra_.dim == 0) throw std::invalid_argument("chiral model needs at least one field");
  algebra_.validate();
  for (std::size_t a = 0; a < algebra_.dim; ++a) {
    h_.push_back(selfdual_project(Form::from_fields(space_, 1, 2 * a)).first);
  }
}

LinDiffOp abelian_anchor(const ChiralModel& c) {
  return formal_adjoint(
      LinDiffOp::block_diag(std::vector<LinDiffOp>(c.size(), selfdual_anchor_star(c.space()))));
}

LinDiffOp chiral_anchor_star(const ChiralModel& c) {
  const FlatSpace& s = c.space();
  const std::size_t n = c.size();
  LinDiffOp op = LinDiffOp::block_diag(std::vector<LinDiffOp>(n, selfdual_anchor_star(s)));
  // Zero-order part: g f^{bc}_a P_b ^ H_c with P_b = Pi-(G pi_b).
  for (std::size_t i = 0; i < 2; ++i) {
    Form unit = Form::basis(s, {i});
    Form p_unit = selfdual_project(gram_apply(unit)).second;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        Expr coeff;
        for (std::size_t cc = 0; cc < n; ++cc) {
          const Rational& f = c.algebra().structure(b, cc, a);
          if (sgn(f) == 0) continue;
          coeff += Expr(f) * wedge(p_unit, c.fields()[cc])[0];
        }
        op.add(a, 2 * b + i, MultiIndex(), c.g() * coeff);
      }
    }
  }
  return op;
}

LinDiffOp chiral_anchor(const ChiralModel& c) { return formal_adjoint(chiral_anchor_star(c)); }

namespace {

std::vector<Certificate> chiral_certificates(
    const ChiralModel& c, const LinDiffOp& v,
    const std::function<Expr(std::size_t, std::size_t, std::size_t)>& constants,
    const std::vector<Expr>& eps) {
  const FlatSpace& s = c.space();
  const std::size_t n = c.size();
  if (eps.size() != n) {
    throw std::invalid_argument("algebra element has " + std::to_string(eps.size()) +
                                " components, expected " + std::to_string(n));
  }
  const auto& h = c.fields();
  std::vector<Rational> kinv = *invert(c.algebra().kappa, n);
  std::vector<Expr> eps_up(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) eps_up[a] += Expr(kinv[a * n + b]) * eps[b];
  }
  std::vector<Form> t;
  for (const auto& ha : h) t.push_back(exterior_d(ha));

  std::vector<Certificate> out;
  Form j(s, 1), et(s, 2);
  for (std::size_t a = 0; a < n; ++a) {
    j = j + eps_up[a] * h[a];
    et = et + eps_up[a] * t[a];
  }
  out.push_back(certificate("chiral.current", {zero_tested(exterior_d(j) - et)}));

  std::vector<Form> omega;
  for (std::size_t a = 0; a < n; ++a) omega.push_back(gram_apply(-eps[a] * Form::volume(s)));
  std::vector<Expr> delta_flat = lanchor::apply(v, concat(omega));
  ShellRules shell = ShellRules::linear(s.jets(), concat(t), 2);
  std::vector<Form> transformation, symmetry;
  for (std::size_t a = 0; a < n; ++a) {
    Form delta(s, 1, {delta_flat[2 * a], delta_flat[2 * a + 1]});
    Form target(s, 1);
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t cc = 0; cc < n; ++cc) {
        Expr k = constants(b, cc, a);
        if (!k.is_zero()) target = target + (k * eps[b]) * h[cc];
      }
    }
    transformation.push_back(reduce_form(shell, delta - target));
    symmetry.push_back(reduce_form(shell, exterior_d(delta)));
  }
  out.push_back(certificate("chiral.transformation", transformation));
  out.push_back(certificate("chiral.symmetry", symmetry));

  auto bad = jacobi_failures(n, constants);
  std::string text;
  for (const auto& b : bad) text += (text.empty() ? "" : "; ") + b;
  out.push_back({"chiral.jacobi", bad.empty(), bad.empty() ? "0" : text});
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.name < y.name; });
  return out;
}

}  // namespace

std::vector<Certificate> chiral_verify(const ChiralModel& c, const std::vector<Expr>& eps) {
  return chiral_certificates(
      c, chiral_anchor(c),
      [&c](std::size_t a, std::size_t b, std::size_t d) {
        return -c.g() * Expr(c.algebra().structure(a, b, d));
      },
      eps);
}

std::vector<Certificate> abelian_reference_verify(const ChiralModel& c, const std::vector<Expr>& eps) {
  return chiral_certificates(
      c, abelian_anchor(c), [](std::size_t, std::size_t, std::size_t) { return Expr(); }, eps);
}

}  // namespace lanchor
