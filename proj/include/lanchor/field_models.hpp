// Field models on flat space: p-form field equations dF = 0, d*F = 0 with
// the two-parameter anchor, self-dual middle forms, and the chiral-boson
// multiplet with a non-abelian anchor.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lanchor/forms.hpp"
#include "lanchor/linop.hpp"

namespace lanchor {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Outcome of one identity check; `residual` is "0" when it holds.
struct Certificate {
  std::string name;
  bool ok;
  std::string residual;
};

/// Residual text of a list of forms ("0" when all vanish).
std::string residual_text(const std::vector<Form>& forms);

// ---------------------------------------------------------------------------
// p-forms

class PFormModel {
 public:
  /// Field components are named F followed by their indices, e.g. F01.
  PFormModel(std::vector<int> signature, std::size_t p, Expr a, Expr b);

  const FlatSpace& space() const { return space_; }
  std::size_t n() const { return space_.n(); }
  std::size_t p() const { return p_; }
  const Expr& a() const { return a_; }
  const Expr& b() const { return b_; }
  const Form& field() const { return f_; }

 private:
  FlatSpace space_;
  std::size_t p_;
  Expr a_, b_;
  Form f_;
};

/// T1 = dF, T2 = d*F.
std::pair<Form, Form> pform_residuals(const PFormModel& m);
/// dT1 = 0 and dT2 = 0 identically (top-degree residuals are closed trivially).
bool noether_identity_check(const Form& t1, const Form& t2);
bool noether_identity_check(const PFormModel& m);

/// Rejects xi unless it is Killing, or conformal with n = 2p.
void require_admissible_vector(const PFormModel& m, const SpacetimeVector& xi);

/// Psi1 = s (-1)^{(n-p)(p-1)} * i_xi * F, Psi2 = s (-1)^{p-1} * i_xi F with
/// s = det(eta) (see the convention sheet).
std::pair<Form, Form> killing_characteristic(const PFormModel& m, const SpacetimeVector& xi);

struct CurrentCheck {
  Form current;
  bool certificate;
  Form residual;  // <Psi1,T1> + <Psi2,T2> - dj
};
/// j = 1/2 ((i_xi F) ^ *F + (-1)^{p-1} F ^ (i_xi *F)).
CurrentCheck killing_current(const PFormModel& m, const SpacetimeVector& xi);

struct EnergyMomentum {
  std::vector<std::vector<Expr>> t;  // T_{mu nu}
  Expr trace;                        // eta^{mu nu} T_{mu nu}
  bool symmetric;
  bool traceless;
};
/// T_{mu nu} = (*j_mu)_nu for the translation currents j_mu; throws
/// ModelError when T is not symmetric.
EnergyMomentum energy_momentum_extract(const PFormModel& m);

struct AnchorPair {
  LinDiffOp v;       // covectors of the equations -> field variations
  LinDiffOp v_star;  // covectors of the fields -> equations
};
/// V*(pi) = (a dP, b d*P) with P = G pi, V = formal_adjoint(V*).
AnchorPair pform_anchor_op(const PFormModel& m);
/// Linearization of (T1, T2) in the field components.
LinDiffOp pform_linearization(const PFormModel& m);
/// dF = 0, d*F = 0 and first prolongations eliminated linearly.
ShellRules pform_shell(const PFormModel& m);
/// Checks J o V against V* o J* on the shell.
ShellComparison pform_anchor_verify(const PFormModel& m);
ShellComparison pform_anchor_verify(const PFormModel& m, const AnchorPair& anchor);

/// For a = b returns G = a * Gram (so that V* = J o G); otherwise nothing.
std::optional<LinDiffOp> triviality_witness(const PFormModel& m);

struct SymmetryCheck {
  bool ok;
  Form variation;  // V applied to the characteristic
  Form residual;   // variation - (a-b) L_xi F reduced on shell
};
SymmetryCheck pform_proper_symmetry(const PFormModel& m, const SpacetimeVector& xi);

struct KernelEquations {
  Form first;   // a dP
  Form second;  // b d*P
  bool matches_residuals;  // (first/a, second/b) == (T1, T2) when ab != 0
};
/// Kernel equations of V* evaluated on P = F.
KernelEquations pform_kernel_equations(const PFormModel& m);

// ---------------------------------------------------------------------------
// self-dual fields

class SelfDualModel {
 public:
  /// H = Pi+(A) for a generic middle form A with components A01.., on
  /// Lorentzian R^n, n = 4k+2.
  explicit SelfDualModel(std::size_t n);

  const FlatSpace& space() const { return space_; }
  std::size_t n() const { return space_.n(); }
  const Form& potential() const { return a_; }
  const Form& field() const { return h_; }

 private:
  FlatSpace space_;
  Form a_;
  Form h_;
};

/// V*(pi) = d Pi-(G pi) on middle forms whose components start at column 0.
LinDiffOp selfdual_anchor_star(const FlatSpace& s);
LinDiffOp selfdual_anchor(const FlatSpace& s);

/// Certificates: current (<Psi, dH> = dj), helicity (H ^ L_xi H = 0),
/// projection (V(G Psi) is self-dual), transformation (Pi+ V(G Psi) ~ L_xi H).
std::vector<Certificate> selfdual_verify(const SelfDualModel& sd, const SpacetimeVector& xi);

// ---------------------------------------------------------------------------
// chiral bosons

struct LieAlgebra {
  std::string name;
  std::size_t dim = 0;
  std::vector<Rational> f;      // f^{ab}_c at (a*dim + b)*dim + c
  std::vector<Rational> kappa;  // kappa_{ab} at a*dim + b

  static LieAlgebra su2();
  static LieAlgebra abelian(std::size_t n);
  static LieAlgebra by_name(const std::string& name, std::size_t n);

  const Rational& structure(std::size_t a, std::size_t b, std::size_t c) const {
    return f.at((a * dim + b) * dim + c);
  }
  /// Throws ModelError naming the first violated invariant.
  void validate() const;
};

class ChiralModel {
 public:
  /// N = algebra.dim self-dual 1-forms H_a = Pi+(A_a) on Lorentzian R^2;
  /// components of A_a are named A<a>x0, A<a>x1 (a from 1).
  ChiralModel(LieAlgebra algebra, Expr g);

  const FlatSpace& space() const { return space_; }
  const LieAlgebra& algebra() const { return algebra_; }
  const Expr& g() const { return g_; }
  std::size_t size() const { return algebra_.dim; }
  const std::vector<Form>& fields() const { return h_; }

 private:
  LieAlgebra algebra_;
  Expr g_;
  FlatSpace space_;
  std::vector<Form> h_;
};

/// V*(pi)_a = d P_a + g f^{bc}_a P_b ^ H_c with P = Pi-(G pi).
LinDiffOp chiral_anchor_star(const ChiralModel& c);
LinDiffOp chiral_anchor(const ChiralModel& c);
/// N decoupled copies of the self-dual anchor on the chiral model's fields.
LinDiffOp abelian_anchor(const ChiralModel& c);

/// Certificates: current (d(eps^a H_a) = eps^a T_a), transformation
/// (V(G Psi) ~ -g [eps, H] with Psi_a = -eps_a vol), symmetry (d(delta H) ~ 0),
/// jacobi (the constants -g f^{ab}_c satisfy Jacobi).
std::vector<Certificate> chiral_verify(const ChiralModel& c, const std::vector<Expr>& eps);
/// Same certificates computed from N copies of the abelian anchor (zero bracket).
std::vector<Certificate> abelian_reference_verify(const ChiralModel& c, const std::vector<Expr>& eps);

}  // namespace lanchor
