#include "lanchor/forms.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <sstream>

#include "lanchor/rand_eval.hpp"

namespace lanchor {

FlatSpace::FlatSpace(std::vector<int> signature, std::vector<std::string> fields)
    : signature_(std::move(signature)) {
  if (signature_.empty() || signature_.size() > 16) throw std::invalid_argument("dimension must be 1..16");
  for (int s : signature_) {
    if (s != 1 && s != -1) throw std::invalid_argument("signature entries must be +1 or -1");
  }
  std::vector<std::string> coords;
  for (std::size_t mu = 0; mu < signature_.size(); ++mu) coords.push_back("x" + std::to_string(mu));
  jets_ = JetSpace::create(std::move(coords), std::move(fields));
}

FlatSpace FlatSpace::euclidean(std::size_t n, std::vector<std::string> fields) {
  return FlatSpace(std::vector<int>(n, 1), std::move(fields));
}

FlatSpace FlatSpace::lorentzian(std::size_t n, std::vector<std::string> fields) {
  std::vector<int> sig(n, 1);
  sig.at(0) = -1;
  return FlatSpace(std::move(sig), std::move(fields));
}

int FlatSpace::det() const {
  int d = 1;
  for (int s : signature_) d *= s;
  return d;
}

bool FlatSpace::is_lorentzian() const {
  return std::count(signature_.begin(), signature_.end(), -1) == 1;
}

// ---------------------------------------------------------------------------
// index bookkeeping

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

const std::vector<std::uint32_t>& basis_masks(std::size_t n, std::size_t k) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::size_t>, std::vector<std::uint32_t>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.try_emplace({n, k});
  if (inserted) {
    std::vector<std::uint32_t>& out = it->second;
    std::function<void(std::size_t, std::size_t, std::uint32_t)> rec =
        [&](std::size_t start, std::size_t left, std::uint32_t mask) {
          if (left == 0) {
            out.push_back(mask);
            return;
          }
          for (std::size_t i = start; i + left <= n; ++i) rec(i + 1, left - 1, mask | (1u << i));
        };
    rec(0, k, 0);
  }
  return it->second;
}

std::size_t basis_rank(std::size_t n, std::uint32_t mask) {
  const auto& masks = basis_masks(n, static_cast<std::size_t>(std::popcount(mask)));
  // Lex order of increasing tuples is not numeric order of masks; search.
  auto it = std::find(masks.begin(), masks.end(), mask);
  if (it == masks.end()) throw std::out_of_range("index set out of range");
  return static_cast<std::size_t>(it - masks.begin());
}

std::vector<std::size_t> mask_indices(std::uint32_t mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < 32; ++i) {
    if (mask & (1u << i)) out.push_back(i);
  }
  return out;
}

int merge_sign(std::uint32_t i, std::uint32_t j) {
  // Inversions: pairs (a in I, b in J) with a > b.
  int inv = 0;
  for (std::size_t a : mask_indices(i)) inv += std::popcount(j & ((1u << a) - 1));
  return inv % 2 ? -1 : 1;
}

int eta_product(const FlatSpace& s, std::uint32_t mask) {
  int p = 1;
  for (std::size_t a : mask_indices(mask)) p *= s.eta(a);
  return p;
}

namespace {

std::uint32_t full_mask(std::size_t n) { return n >= 32 ? ~0u : ((1u << n) - 1); }

bool same_space(const FlatSpace& a, const FlatSpace& b) {
  return a.signature() == b.signature() && a.jets() == b.jets();
}

}  // namespace

// ---------------------------------------------------------------------------
// Form

Form::Form(const FlatSpace& space, std::size_t grade)
    : space_(std::make_shared<FlatSpace>(space)), grade_(grade) {
  if (grade > space.n()) throw std::invalid_argument("grade exceeds dimension");
  comps_.resize(binomial(space.n(), grade));
}

Form::Form(const FlatSpace& space, std::size_t grade, std::vector<Expr> components) : Form(space, grade) {
  if (components.size() != comps_.size()) {
    throw std::invalid_argument("a " + std::to_string(grade) + "-form in dimension " +
                                std::to_string(space.n()) + " has " + std::to_string(comps_.size()) +
                                " components");
  }
  comps_ = std::move(components);
}

Form Form::scalar(const FlatSpace& space, const Expr& value) { return Form(space, 0, {value}); }

Form Form::basis(const FlatSpace& space, const std::vector<std::size_t>& indices) {
  std::uint32_t mask = 0;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= space.n() || (i && indices[i] <= indices[i - 1])) {
      throw std::invalid_argument("basis indices must be increasing and in range");
    }
    mask |= 1u << indices[i];
  }
  Form f(space, indices.size());
  f.comps_[basis_rank(space.n(), mask)] = Expr(1);
  return f;
}

Form Form::volume(const FlatSpace& space) {
  Form f(space, space.n());
  f.comps_[0] = Expr(1);
  return f;
}

Form Form::from_fields(const FlatSpace& space, std::size_t grade, std::size_t first_field) {
  Form f(space, grade);
  for (std::size_t r = 0; r < f.size(); ++r) f.comps_[r] = space.jets()->jet(first_field + r);
  return f;
}

const Expr& Form::component(const std::vector<std::size_t>& indices) const {
  if (indices.size() != grade_) throw std::invalid_argument("wrong number of indices");
  std::uint32_t mask = 0;
  for (auto i : indices) mask |= 1u << i;
  return comps_.at(basis_rank(n(), mask));
}

bool Form::is_zero() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const Expr& e) { return lanchor::is_zero(e); });
}

void Form::check_compatible(const Form& o) const {
  if (!same_space(*space_, *o.space_)) throw std::invalid_argument("forms live on different spaces");
  if (grade_ != o.grade_) {
    throw std::invalid_argument("grade mismatch: " + std::to_string(grade_) + " vs " +
                                std::to_string(o.grade_));
  }
}

Form Form::operator+(const Form& o) const {
  check_compatible(o);
  Form r = *this;
  for (std::size_t i = 0; i < comps_.size(); ++i) r.comps_[i] += o.comps_[i];
  return r;
}

Form Form::operator-(const Form& o) const {
  check_compatible(o);
  Form r = *this;
  for (std::size_t i = 0; i < comps_.size(); ++i) r.comps_[i] -= o.comps_[i];
  return r;
}

Form Form::operator-() const {
  return map([](const Expr& e) { return -e; });
}

Form operator*(const Expr& c, const Form& f) {
  return f.map([&c](const Expr& e) { return c * e; });
}

Form Form::map(const std::function<Expr(const Expr&)>& fn) const {
  Form r = *this;
  for (auto& e : r.comps_) e = fn(e);
  return r;
}

bool Form::operator==(const Form& o) const {
  return same_space(*space_, *o.space_) && grade_ == o.grade_ && comps_ == o.comps_;
}

std::string Form::str() const {
  std::string out;
  const auto& masks = basis_masks(n(), grade_);
  for (std::size_t r = 0; r < comps_.size(); ++r) {
    if (comps_[r].is_zero()) continue;
    std::string basis;
    for (std::size_t i : mask_indices(masks[r])) {
      if (!basis.empty()) basis += "^";
      basis += "dx" + std::to_string(i);
    }
    std::string coeff = comps_[r].size() > 1 ? "(" + comps_[r].str() + ")" : comps_[r].str();
    std::string term;
    if (basis.empty()) {
      term = coeff;
    } else if (coeff == "1") {
      term = basis;
    } else if (coeff == "-1") {
      term = "-" + basis;
    } else {
      term = coeff + "*" + basis;
    }
    if (out.empty()) {
      out = term;
    } else if (term[0] == '-') {
      out += " - " + term.substr(1);
    } else {
      out += " + " + term;
    }
  }
  return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------------------
// vectors

SpacetimeVector SpacetimeVector::zero(const FlatSpace& s) { return SpacetimeVector(std::vector<Expr>(s.n())); }

SpacetimeVector SpacetimeVector::translation(const FlatSpace& s, std::size_t mu) {
  if (mu >= s.n()) throw std::invalid_argument("translation index out of range");
  std::vector<Expr> c(s.n());
  c[mu] = Expr(1);
  return SpacetimeVector(std::move(c));
}

SpacetimeVector SpacetimeVector::rotation(const FlatSpace& s, std::size_t mu, std::size_t nu) {
  if (mu >= s.n() || nu >= s.n() || mu == nu) throw std::invalid_argument("rotation indices invalid");
  std::vector<Expr> c(s.n());
  c[mu] = Expr(s.eta(mu)) * s.coord(nu);
  c[nu] = Expr(-s.eta(nu)) * s.coord(mu);
  return SpacetimeVector(std::move(c));
}

SpacetimeVector SpacetimeVector::dilation(const FlatSpace& s) {
  std::vector<Expr> c;
  for (std::size_t mu = 0; mu < s.n(); ++mu) c.push_back(s.coord(mu));
  return SpacetimeVector(std::move(c));
}

SpacetimeVector SpacetimeVector::from_selector(const FlatSpace& s, const std::string& sel) {
  auto bad = [&sel]() {
    return std::invalid_argument("unknown vector selector '" + sel +
                                 "' (expected translation:MU, rotation:MU,NU or dilation)");
  };
  auto to_index = [&](const std::string& t) -> std::size_t {
    if (t.empty() || !std::all_of(t.begin(), t.end(), ::isdigit)) throw bad();
    return static_cast<std::size_t>(std::stoul(t));
  };
  if (sel == "dilation") return dilation(s);
  if (sel == "zero") return zero(s);
  auto colon = sel.find(':');
  if (colon == std::string::npos) throw bad();
  std::string kind = sel.substr(0, colon), rest = sel.substr(colon + 1);
  if (kind == "translation") return translation(s, to_index(rest));
  if (kind == "rotation") {
    auto comma = rest.find(',');
    if (comma == std::string::npos) throw bad();
    return rotation(s, to_index(rest.substr(0, comma)), to_index(rest.substr(comma + 1)));
  }
  throw bad();
}

SpacetimeVector SpacetimeVector::operator+(const SpacetimeVector& o) const {
  if (size() != o.size()) throw std::invalid_argument("vector size mismatch");
  std::vector<Expr> c = comps_;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.comps_[i];
  return SpacetimeVector(std::move(c));
}

bool SpacetimeVector::is_zero() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const Expr& e) { return e.is_zero(); });
}

// ---------------------------------------------------------------------------
// operations

Form wedge(const Form& a, const Form& b) {
  if (!same_space(a.space(), b.space())) throw std::invalid_argument("forms live on different spaces");
  const std::size_t n = a.n();
  if (a.grade() + b.grade() > n) {
    throw std::invalid_argument("wedge grade overflow: " + std::to_string(a.grade()) + " + " +
                                std::to_string(b.grade()) + " > " + std::to_string(n));
  }
  Form r(a.space(), a.grade() + b.grade());
  const auto& ma = basis_masks(n, a.grade());
  const auto& mb = basis_masks(n, b.grade());
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < mb.size(); ++j) {
      if ((ma[i] & mb[j]) || b[j].is_zero()) continue;
      Expr term = a[i] * b[j];
      std::size_t rank = basis_rank(n, ma[i] | mb[j]);
      if (merge_sign(ma[i], mb[j]) > 0) {
        r[rank] += term;
      } else {
        r[rank] -= term;
      }
    }
  }
  return r;
}

Form exterior_d(const Form& a) {
  const std::size_t n = a.n();
  if (a.grade() >= n) throw std::invalid_argument("exterior derivative of a top-degree form");
  Form r(a.space(), a.grade() + 1);
  const auto& masks = basis_masks(n, a.grade());
  const JetSpace& jets = *a.space().jets();
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t mu = 0; mu < n; ++mu) {
      const std::uint32_t m = 1u << mu;
      if (masks[i] & m) continue;
      Expr d = total_derivative(a[i], jets.indep_atom(mu));
      if (d.is_zero()) continue;
      std::size_t rank = basis_rank(n, masks[i] | m);
      if (merge_sign(m, masks[i]) > 0) {
        r[rank] += d;
      } else {
        r[rank] -= d;
      }
    }
  }
  return r;
}

Form hodge(const Form& a) {
  const std::size_t n = a.n();
  Form r(a.space(), n - a.grade());
  const auto& masks = basis_masks(n, a.grade());
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (a[i].is_zero()) continue;
    const std::uint32_t j = full_mask(n) & ~masks[i];
    const int s = eta_product(a.space(), masks[i]) * merge_sign(masks[i], j);
    r[basis_rank(n, j)] = s > 0 ? a[i] : -a[i];
  }
  return r;
}

Form interior(const SpacetimeVector& xi, const Form& a) {
  if (a.grade() == 0) throw std::invalid_argument("interior product of a 0-form");
  const std::size_t n = a.n();
  if (xi.size() != n) throw std::invalid_argument("vector dimension mismatch");
  Form r(a.space(), a.grade() - 1);
  const auto& masks = basis_masks(n, a.grade());
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t mu : mask_indices(masks[i])) {
      if (xi[mu].is_zero()) continue;
      const std::uint32_t m = 1u << mu;
      const std::uint32_t rest = masks[i] & ~m;
      Expr term = xi[mu] * a[i];
      std::size_t rank = basis_rank(n, rest);
      if (merge_sign(m, rest) > 0) {
        r[rank] += term;
      } else {
        r[rank] -= term;
      }
    }
  }
  return r;
}

Form lie_derivative(const SpacetimeVector& xi, const Form& a) {
  const std::size_t k = a.grade();
  if (k == 0) return interior(xi, exterior_d(a));
  if (k == a.n()) return exterior_d(interior(xi, a));
  return interior(xi, exterior_d(a)) + exterior_d(interior(xi, a));
}

std::pair<Form, Form> selfdual_project(const Form& a) {
  const FlatSpace& s = a.space();
  if (s.n() % 4 != 2) throw std::invalid_argument("self-dual split needs dimension 4k+2");
  if (!s.is_lorentzian()) throw std::invalid_argument("self-dual split needs Lorentzian signature");
  if (a.grade() * 2 != s.n()) throw std::invalid_argument("self-dual split needs a middle-degree form");
  Form star = hodge(a);
  const Expr half(Rational(1, 2));
  return {half * (a + star), half * (a - star)};
}

Form pairing_density(const Form& a, const Form& b) {
  if (a.grade() != b.grade()) {
    throw std::invalid_argument("pairing needs equal grades, got " + std::to_string(a.grade()) +
                                " and " + std::to_string(b.grade()));
  }
  return wedge(a, hodge(b));
}

int double_hodge_sign(const FlatSpace& s, std::size_t k) {
  return s.det() * (((k * (s.n() - k)) % 2) ? -1 : 1);
}

const char* killing_kind_name(KillingKind k) {
  switch (k) {
    case KillingKind::Killing: return "killing";
    case KillingKind::Conformal: return "conformal";
    case KillingKind::Neither: return "neither";
  }
  return "?";
}

KillingKind conformal_killing_check(const SpacetimeVector& xi, const FlatSpace& space) {
  const std::size_t n = space.n();
  if (xi.size() != n) throw std::invalid_argument("vector dimension mismatch");
  const JetSpace& jets = *space.jets();
  std::vector<std::vector<Expr>> k(n, std::vector<Expr>(n));
  Expr div;
  for (std::size_t mu = 0; mu < n; ++mu) {
    div += partial(xi[mu], jets.indep_atom(mu));
    for (std::size_t nu = 0; nu < n; ++nu) {
      k[mu][nu] = Expr(space.eta(nu)) * partial(xi[nu], jets.indep_atom(mu)) +
                  Expr(space.eta(mu)) * partial(xi[mu], jets.indep_atom(nu));
    }
  }
  bool killing = true, conformal = true;
  const Expr scale = Expr(Rational(2, static_cast<long>(n))) * div;
  for (std::size_t mu = 0; mu < n; ++mu) {
    for (std::size_t nu = 0; nu < n; ++nu) {
      if (!is_zero(k[mu][nu])) killing = false;
      Expr expected = mu == nu ? Expr(space.eta(mu)) * scale : Expr();
      if (!is_zero(k[mu][nu] - expected)) conformal = false;
    }
  }
  if (killing) return KillingKind::Killing;
  return conformal ? KillingKind::Conformal : KillingKind::Neither;
}

LinDiffOp d_op(const FlatSpace& s, std::size_t k) {
  const std::size_t n = s.n();
  if (k >= n) throw std::invalid_argument("exterior derivative of a top-degree form");
  LinDiffOp op(binomial(n, k + 1), binomial(n, k), s.jets());
  const auto& masks = basis_masks(n, k);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    for (std::size_t mu = 0; mu < n; ++mu) {
      const std::uint32_t m = 1u << mu;
      if (masks[i] & m) continue;
      op.add(basis_rank(n, masks[i] | m), i, MultiIndex::unit(mu), Expr(merge_sign(m, masks[i])));
    }
  }
  return op;
}

LinDiffOp hodge_op(const FlatSpace& s, std::size_t k) {
  const std::size_t n = s.n();
  LinDiffOp op(binomial(n, n - k), binomial(n, k), s.jets());
  const auto& masks = basis_masks(n, k);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const std::uint32_t j = full_mask(n) & ~masks[i];
    op.add(basis_rank(n, j), i, MultiIndex(), Expr(eta_product(s, masks[i]) * merge_sign(masks[i], j)));
  }
  return op;
}

LinDiffOp gram_op(const FlatSpace& s, std::size_t k) {
  const std::size_t n = s.n();
  LinDiffOp op(binomial(n, k), binomial(n, k), s.jets());
  const auto& masks = basis_masks(n, k);
  for (std::size_t i = 0; i < masks.size(); ++i) op.add(i, i, MultiIndex(), Expr(eta_product(s, masks[i])));
  return op;
}

Form apply_to_form(const LinDiffOp& op, const Form& a, std::size_t grade) {
  return Form(a.space(), grade, lanchor::apply(op, a.components()));
}

}  // namespace lanchor
