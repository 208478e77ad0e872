#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "lanchor/forms.hpp"
#include "support.hpp"

namespace lanchor {
namespace {

Form random_form(const FlatSpace& s, std::size_t k, testing::Gen& g) {
  std::vector<Expr> comps;
  std::vector<Expr> vars;
  for (std::size_t mu = 0; mu < s.n(); ++mu) vars.push_back(s.coord(mu));
  for (std::size_t f = 0; f < s.jets()->num_fields(); ++f) vars.push_back(s.jets()->jet(f));
  for (std::size_t r = 0; r < binomial(s.n(), k); ++r) comps.push_back(g.polynomial_in(vars, 2, 2));
  return Form(s, k, comps);
}

int permutation_sign(std::vector<std::size_t> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (p[i] == p[j]) return 0;
      if (p[i] > p[j]) sign = -sign;
    }
  }
  return sign;
}

// Tensor-index Hodge star: (*a)_J = 1/k! a^{I} eps_{I J}, summing over all
// ordered k-tuples I.
Form brute_hodge(const Form& a) {
  const FlatSpace& s = a.space();
  const std::size_t n = s.n(), k = a.grade();
  Form out(s, n - k);
  Rational kfact = 1;
  for (std::size_t i = 2; i <= k; ++i) kfact *= static_cast<long>(i);
  const auto& jmasks = basis_masks(n, n - k);
  for (std::size_t r = 0; r < jmasks.size(); ++r) {
    std::vector<std::size_t> jidx = mask_indices(jmasks[r]);
    Expr sum;
    std::vector<std::size_t> tuple(k, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
      if (pos == k) {
        std::vector<std::size_t> full = tuple;
        full.insert(full.end(), jidx.begin(), jidx.end());
        int eps = permutation_sign(full);
        if (eps == 0) return;
        std::vector<std::size_t> sorted = tuple;
        std::sort(sorted.begin(), sorted.end());
        int raise = 1;
        for (auto m : tuple) raise *= s.eta(m);
        sum += Expr(eps * raise * permutation_sign(tuple)) * a.component(sorted);
        return;
      }
      for (std::size_t m = 0; m < n; ++m) {
        tuple[pos] = m;
        rec(pos + 1);
      }
    };
    rec(0);
    out[r] = Expr(1 / kfact) * sum;
  }
  return out;
}

class FormsTest : public ::testing::Test {
 protected:
  FlatSpace l2 = FlatSpace::lorentzian(2, {"u", "w"});
  FlatSpace e2 = FlatSpace::euclidean(2, {"u"});
  FlatSpace l4 = FlatSpace::lorentzian(4, {"u", "w"});
  FlatSpace e4 = FlatSpace::euclidean(4, {"u"});
  FlatSpace e3 = FlatSpace::euclidean(3, {"u", "w"});
  Form dx(const FlatSpace& s, std::size_t mu) { return Form::basis(s, {mu}); }
};

TEST_F(FormsTest, Wedge) {
  EXPECT_EQ(wedge(dx(l4, 0), dx(l4, 1)), -wedge(dx(l4, 1), dx(l4, 0)));
  EXPECT_EQ(wedge(dx(l4, 0) + dx(l4, 1), dx(l4, 0) - dx(l4, 1)), Expr(-2) * Form::basis(l4, {0, 1}));
  testing::Gen g(51);
  for (int k = 0; k < 5; ++k) {
    Form a = random_form(l4, 1, g), b = random_form(l4, 3, g), c = random_form(l4, 2, g);
    EXPECT_TRUE(wedge(a, a).is_zero());
    EXPECT_EQ(wedge(a, c), wedge(c, a));
    EXPECT_EQ(wedge(a, b), -wedge(b, a));
  }
  EXPECT_THROW(wedge(Form::basis(e3, {0, 1}), Form::basis(e3, {0, 2})), std::invalid_argument);
}

TEST_F(FormsTest, ExteriorDerivative) {
  EXPECT_EQ(exterior_d(Expr(l4.coord(0)) * dx(l4, 1)), Form::basis(l4, {0, 1}));
  testing::Gen g(52);
  for (std::size_t k = 0; k + 2 <= 4; ++k) EXPECT_TRUE(exterior_d(exterior_d(random_form(l4, k, g))).is_zero());
  auto sp = FlatSpace::lorentzian(2, {"F0", "F1"});
  Form f = Form::from_fields(sp, 1, 0);
  Form df = exterior_d(f);
  const auto& j = *sp.jets();
  EXPECT_EQ(df[0], j.jet(1, MultiIndex({1})) - j.jet(0, MultiIndex({0, 1})));
  EXPECT_THROW(exterior_d(Form::volume(l4)), std::invalid_argument);
}

TEST_F(FormsTest, HodgeConvention) {
  EXPECT_EQ(hodge(dx(l2, 0)), -dx(l2, 1));
  EXPECT_EQ(hodge(dx(l2, 1)), -dx(l2, 0));
  EXPECT_EQ(hodge(Form::scalar(l4, 1)), Form::volume(l4));
  EXPECT_EQ(hodge(Form::scalar(e4, 1)), Form::volume(e4));
  EXPECT_EQ(hodge(Form::volume(l2)), Form::scalar(l2, -1));
}

TEST_F(FormsTest, HodgeMatchesTensorDefinition) {
  testing::Gen g(53);
  for (const FlatSpace* s : {&l2, &e2, &e3, &l4, &e4}) {
    for (std::size_t k = 0; k <= s->n(); ++k) {
      Form a = random_form(*s, k, g);
      EXPECT_EQ(hodge(a), brute_hodge(a)) << "n=" << s->n() << " k=" << k;
    }
  }
}

TEST_F(FormsTest, DoubleHodgeSign) {
  testing::Gen g(54);
  EXPECT_EQ(double_hodge_sign(l2, 1), 1);
  EXPECT_EQ(double_hodge_sign(e4, 2), 1);
  EXPECT_EQ(double_hodge_sign(l4, 2), -1);
  for (const FlatSpace* s : {&l2, &e2, &e3, &l4, &e4}) {
    for (std::size_t k = 0; k <= s->n(); ++k) {
      Form a = random_form(*s, k, g);
      int want = s->det() * (((k * (s->n() - k)) % 2) ? -1 : 1);
      EXPECT_EQ(double_hodge_sign(*s, k), want);
      EXPECT_EQ(hodge(hodge(a)), Expr(want) * a);
    }
  }
}

TEST_F(FormsTest, Interior) {
  SpacetimeVector d0 = SpacetimeVector::translation(l4, 0);
  EXPECT_EQ(interior(d0, Form::basis(l4, {0, 1})), dx(l4, 1));
  SpacetimeVector d01 = d0 + SpacetimeVector::translation(l4, 1);
  EXPECT_EQ(interior(d01, dx(l4, 0)), Form::scalar(l4, 1));
  testing::Gen g(55);
  SpacetimeVector rot = SpacetimeVector::rotation(l4, 1, 2);
  for (std::size_t k = 2; k <= 4; ++k) {
    Form a = random_form(l4, k, g);
    EXPECT_TRUE(interior(rot, interior(rot, a)).is_zero());
  }
  EXPECT_THROW(interior(d0, Form::scalar(l4, 1)), std::invalid_argument);
}

TEST_F(FormsTest, LieDerivative) {
  SpacetimeVector d0 = SpacetimeVector::translation(l4, 0);
  EXPECT_EQ(lie_derivative(d0, Expr(l4.coord(0)) * dx(l4, 1)), dx(l4, 1));
  EXPECT_TRUE(lie_derivative(SpacetimeVector::rotation(e2, 0, 1), Form::volume(e2)).is_zero());
  EXPECT_EQ(lie_derivative(SpacetimeVector::dilation(e2), Form::volume(e2)), Expr(2) * Form::volume(e2));
  testing::Gen g(56);
  SpacetimeVector xi = SpacetimeVector::rotation(l4, 0, 3) + SpacetimeVector::dilation(l4);
  for (std::size_t k = 0; k < 4; ++k) {
    Form a = random_form(l4, k, g);
    EXPECT_EQ(lie_derivative(xi, exterior_d(a)), exterior_d(lie_derivative(xi, a)));
  }
}

TEST_F(FormsTest, SelfDualProjection) {
  auto [plus, minus] = selfdual_project(dx(l2, 0));
  EXPECT_EQ(plus + minus, dx(l2, 0));
  EXPECT_EQ(hodge(plus), plus);
  EXPECT_EQ(hodge(minus), -minus);
  EXPECT_EQ(plus, Expr(Rational(1, 2)) * (dx(l2, 0) - dx(l2, 1)));
  auto [p2, m2] = selfdual_project(plus);
  EXPECT_EQ(p2, plus);
  EXPECT_TRUE(m2.is_zero());
  EXPECT_THROW(selfdual_project(Form::basis(l4, {0, 1})), std::invalid_argument);
  EXPECT_THROW(selfdual_project(dx(e2, 0)), std::invalid_argument);
  FlatSpace l6 = FlatSpace::lorentzian(6);
  testing::Gen g(57);
  Form a = random_form(l6, 3, g);
  auto [p6, m6] = selfdual_project(a);
  EXPECT_EQ(hodge(p6), p6);
  EXPECT_EQ(p6 + m6, a);
}

TEST_F(FormsTest, ConformalKilling) {
  EXPECT_EQ(conformal_killing_check(SpacetimeVector::translation(l4, 0), l4), KillingKind::Killing);
  for (std::size_t mu = 0; mu < 4; ++mu) {
    for (std::size_t nu = mu + 1; nu < 4; ++nu) {
      EXPECT_EQ(conformal_killing_check(SpacetimeVector::rotation(l4, mu, nu), l4), KillingKind::Killing);
    }
  }
  EXPECT_EQ(conformal_killing_check(SpacetimeVector::dilation(l4), l4), KillingKind::Conformal);
  std::vector<Expr> q(4);
  q[0] = l4.coord(1) * l4.coord(1);
  EXPECT_EQ(conformal_killing_check(SpacetimeVector(q), l4), KillingKind::Neither);
  EXPECT_EQ(conformal_killing_check(SpacetimeVector::zero(l4), l4), KillingKind::Killing);
}

TEST_F(FormsTest, SelectorParsing) {
  EXPECT_EQ(SpacetimeVector::from_selector(l4, "translation:2").components(),
            SpacetimeVector::translation(l4, 2).components());
  EXPECT_EQ(SpacetimeVector::from_selector(l4, "rotation:0,3").components(),
            SpacetimeVector::rotation(l4, 0, 3).components());
  EXPECT_THROW(SpacetimeVector::from_selector(l4, "translation:4"), std::invalid_argument);
  EXPECT_THROW(SpacetimeVector::from_selector(l4, "boost"), std::invalid_argument);
}

TEST_F(FormsTest, Pairing) {
  EXPECT_EQ(pairing_density(dx(e2, 1), dx(e2, 1)), Form::volume(e2));
  EXPECT_EQ(pairing_density(dx(l2, 0), dx(l2, 0)), -Form::volume(l2));
  testing::Gen g(58);
  Form a = random_form(l4, 2, g), b = random_form(l4, 2, g);
  EXPECT_EQ(pairing_density(a, b), pairing_density(b, a));
  std::vector<Expr> gb = lanchor::apply(gram_op(l4, 2), b.components());
  Expr dot;
  for (std::size_t r = 0; r < a.size(); ++r) dot += a[r] * gb[r];
  EXPECT_EQ(pairing_density(a, b), dot * Form::volume(l4));
}

TEST_F(FormsTest, OperatorFormsAgree) {
  testing::Gen g(59);
  for (std::size_t k = 0; k < 4; ++k) {
    Form a = random_form(l4, k, g);
    EXPECT_EQ(apply_to_form(d_op(l4, k), a, k + 1), exterior_d(a));
    EXPECT_EQ(apply_to_form(hodge_op(l4, k), a, 4 - k), hodge(a));
  }
}

}  // namespace
}  // namespace lanchor
