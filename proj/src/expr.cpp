#include "lanchor/expr.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>
#include <unordered_set>

namespace lanchor {

// ---------------------------------------------------------------------------
// MultiIndex

MultiIndex::MultiIndex(std::vector<int> counts) : counts_(std::move(counts)) {
  for (int c : counts_) {
    if (c < 0) throw std::invalid_argument("multi-index entries must be non-negative");
  }
  while (!counts_.empty() && counts_.back() == 0) counts_.pop_back();
}

MultiIndex MultiIndex::unit(std::size_t var) {
  std::vector<int> c(var + 1, 0);
  c[var] = 1;
  return MultiIndex(std::move(c));
}

int MultiIndex::order() const {
  int s = 0;
  for (int c : counts_) s += c;
  return s;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  std::vector<int> c(std::max(size(), other.size()), 0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = (*this)[i] + other[i];
  return MultiIndex(std::move(c));
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (!other.divides(*this)) throw std::invalid_argument("multi-index difference would be negative");
  std::vector<int> c(size(), 0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = (*this)[i] - other[i];
  return MultiIndex(std::move(c));
}

bool MultiIndex::divides(const MultiIndex& other) const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (counts_[i] > other[i]) return false;
  }
  return true;
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& other) const {
  if (auto c = order() <=> other.order(); c != 0) return c;
  const std::size_t n = std::max(size(), other.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = (*this)[i] <=> other[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

Rational multi_binomial(const MultiIndex& alpha, const MultiIndex& beta) {
  mpz_class r = 1;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(alpha[i]),
                 static_cast<unsigned long>(beta[i]));
    r *= b;
  }
  return Rational(r);
}

std::vector<MultiIndex> sub_indices(const MultiIndex& alpha) {
  std::vector<std::vector<int>> acc{{}};
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    std::vector<std::vector<int>> next;
    for (const auto& prefix : acc) {
      for (int k = 0; k <= alpha[i]; ++k) {
        auto v = prefix;
        v.push_back(k);
        next.push_back(std::move(v));
      }
    }
    acc = std::move(next);
  }
  std::vector<MultiIndex> out;
  out.reserve(acc.size());
  for (auto& v : acc) out.emplace_back(std::move(v));
  return out;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
  }
  return "?";
}

std::string to_string(const Rational& q) { return q.get_str(); }

// ---------------------------------------------------------------------------
// node cap

namespace {

constexpr std::size_t kDefaultNodeCap = 1'000'000;
std::atomic<std::size_t> g_cap_override{0};

std::size_t env_node_cap() {
  static const std::size_t cap = [] {
    if (const char* s = std::getenv("LANCHOR_MAX_NODES")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(s, &end, 10);
      if (end != s && v > 0) return static_cast<std::size_t>(v);
    }
    return kDefaultNodeCap;
  }();
  return cap;
}

}  // namespace

std::size_t node_cap() {
  std::size_t o = g_cap_override.load(std::memory_order_relaxed);
  return o ? o : env_node_cap();
}

void set_node_cap(std::size_t cap) { g_cap_override.store(cap); }

// ---------------------------------------------------------------------------
// atoms

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

struct AtomPtrHash {
  std::size_t operator()(const AtomNode* a) const { return a->hash; }
};
struct AtomPtrEq {
  bool operator()(const AtomNode* a, const AtomNode* b) const {
    return a->kind == b->kind && a->index == b->index && a->alpha == b->alpha &&
           a->name == b->name && a->func == b->func && a->arg == b->arg && a->space == b->space;
  }
};

Atom intern(AtomNode node) {
  std::size_t h = static_cast<std::size_t>(node.kind);
  h = mix(h, static_cast<std::size_t>(node.index));
  for (int c : node.alpha.counts()) h = mix(h, static_cast<std::size_t>(c));
  h = mix(h, std::hash<std::string>{}(node.name));
  h = mix(h, static_cast<std::size_t>(node.func));
  h = mix(h, node.arg.hash());
  h = mix(h, std::hash<const void*>{}(node.space.get()));
  node.hash = h;

  static std::mutex mu;
  // Interned atoms live for the lifetime of the process.
  static auto* table = new std::unordered_set<const AtomNode*, AtomPtrHash, AtomPtrEq>();
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = table->find(&node); it != table->end()) return *it;
  auto* stored = new AtomNode(std::move(node));
  table->insert(stored);
  return stored;
}

int kind_rank(AtomKind k) { return static_cast<int>(k); }

}  // namespace

int compare_atoms(Atom a, Atom b) {
  if (a == b) return 0;
  if (a->kind != b->kind) return kind_rank(a->kind) < kind_rank(b->kind) ? -1 : 1;
  switch (a->kind) {
    case AtomKind::Jet:
      if (a->index != b->index) return a->index < b->index ? -1 : 1;
      if (a->alpha != b->alpha) return a->alpha < b->alpha ? -1 : 1;
      break;
    case AtomKind::Indep:
      if (a->index != b->index) return a->index < b->index ? -1 : 1;
      break;
    case AtomKind::Param:
      break;
    case AtomKind::Func:
      if (a->func != b->func) return a->func < b->func ? -1 : 1;
      if (int c = compare(a->arg, b->arg); c != 0) return c;
      break;
    case AtomKind::Paren:
      if (int c = compare(a->arg, b->arg); c != 0) return c;
      break;
  }
  if (a->name != b->name) return a->name < b->name ? -1 : 1;
  if (a->space != b->space) {
    auto key = [](const AtomNode* x) { return std::tie(x->space->indep_names(), x->space->field_names()); };
    return key(a) < key(b) ? -1 : 1;
  }
  return 0;
}

namespace {

int degree(const Monomial& m) {
  int d = 0;
  for (const auto& f : m) d += f.exp;
  return d;
}

}  // namespace

int compare_monomials(const Monomial& a, const Monomial& b) {
  const int da = degree(a), db = degree(b);
  if (da != db) return da > db ? -1 : 1;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].atom != b[i].atom) return compare_atoms(a[i].atom, b[i].atom);
    if (a[i].exp != b[i].exp) return a[i].exp > b[i].exp ? -1 : 1;
  }
  if (a.size() != b.size()) return a.size() > b.size() ? -1 : 1;
  return 0;
}

// ---------------------------------------------------------------------------
// Expr

struct Expr::Poly {
  std::vector<Term> terms;
  std::size_t hash = 0;
  std::size_t nodes = 0;
};

namespace {

struct MonoHash {
  std::size_t operator()(const Monomial& m) const {
    std::size_t h = 0x51ed27;
    for (const auto& f : m) h = mix(mix(h, f.atom->hash), static_cast<std::size_t>(f.exp));
    return h;
  }
};

Monomial mul_mono(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].atom == b[j].atom) {
      int e = a[i].exp + b[j].exp;
      if (e != 0) out.push_back({a[i].atom, e});
      ++i;
      ++j;
    } else if (compare_atoms(a[i].atom, b[j].atom) < 0) {
      out.push_back(a[i++]);
    } else {
      out.push_back(b[j++]);
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  return out;
}

}  // namespace

class PolyBuilder {
 public:
  void add(const Monomial& m, const Rational& c) {
    if (sgn(c) == 0) return;
    auto [it, inserted] = acc_.try_emplace(m, c);
    if (!inserted) it->second += c;
    if (acc_.size() > node_cap()) overflow(acc_.size());
  }
  void add(Monomial&& m, const Rational& c) {
    if (sgn(c) == 0) return;
    auto [it, inserted] = acc_.try_emplace(std::move(m), c);
    if (!inserted) it->second += c;
    if (acc_.size() > node_cap()) overflow(acc_.size());
  }
  void add(const Expr& e, const Rational& scale = 1) {
    for (const auto& t : e.terms()) add(t.mono, t.coef * scale);
  }

  Expr finish() {
    auto p = std::make_shared<Expr::Poly>();
    p->terms.reserve(acc_.size());
    for (auto& [m, c] : acc_) {
      if (sgn(c) != 0) p->terms.push_back(Term{m, c});
    }
    std::sort(p->terms.begin(), p->terms.end(), [](const Term& x, const Term& y) {
      return compare_monomials(x.mono, y.mono) < 0;
    });
    finalize(*p);
    return Expr(std::shared_ptr<const Expr::Poly>(std::move(p)));
  }

  static const std::shared_ptr<const Expr::Poly>& zero() {
    static const std::shared_ptr<const Expr::Poly> z = [] {
      auto p = std::make_shared<Expr::Poly>();
      finalize(*p);
      return std::shared_ptr<const Expr::Poly>(p);
    }();
    return z;
  }

  static void finalize(Expr::Poly& p) {
    std::size_t h = 0xabcdef;
    std::size_t nodes = 0;
    for (const auto& t : p.terms) {
      h = mix(h, MonoHash{}(t.mono));
      h = mix(h, std::hash<std::string>{}(t.coef.get_str()));
      nodes += 1 + t.mono.size();
    }
    p.hash = h;
    p.nodes = nodes;
    if (nodes > node_cap()) overflow(nodes);
  }

 private:
  [[noreturn]] static void overflow(std::size_t n) {
    throw ResourceError("expression exceeds node cap (" + std::to_string(n) + " > " +
                        std::to_string(node_cap()) + "); raise LANCHOR_MAX_NODES");
  }
  std::unordered_map<Monomial, Rational, MonoHash> acc_;
};

Expr::Expr() : p_(PolyBuilder::zero()) {}
Expr::Expr(std::shared_ptr<const Poly> p) : p_(std::move(p)) {}
Expr::Expr(int value) : Expr(Rational(value)) {}
Expr::Expr(long value) : Expr(Rational(value)) {}
Expr::Expr(const Rational& value) : p_(PolyBuilder::zero()) {
  if (sgn(value) == 0) return;
  auto p = std::make_shared<Poly>();
  p->terms.push_back(Term{{}, value});
  p->terms.back().coef.canonicalize();
  PolyBuilder::finalize(*p);
  p_ = std::move(p);
}

Expr Expr::atom(Atom a) {
  auto p = std::make_shared<Poly>();
  p->terms.push_back(Term{{Factor{a, 1}}, Rational(1)});
  PolyBuilder::finalize(*p);
  return Expr(std::shared_ptr<const Poly>(std::move(p)));
}

Expr Expr::from_terms(std::vector<Term> terms) {
  PolyBuilder b;
  for (auto& t : terms) {
    std::sort(t.mono.begin(), t.mono.end(),
              [](const Factor& x, const Factor& y) { return compare_atoms(x.atom, y.atom) < 0; });
    Monomial merged;
    for (const auto& f : t.mono) {
      if (!merged.empty() && merged.back().atom == f.atom) {
        merged.back().exp += f.exp;
        if (merged.back().exp == 0) merged.pop_back();
      } else if (f.exp != 0) {
        merged.push_back(f);
      }
    }
    t.coef.canonicalize();
    b.add(std::move(merged), t.coef);
  }
  return b.finish();
}

const std::vector<Term>& Expr::terms() const { return p_->terms; }
std::size_t Expr::hash() const { return p_->hash; }
std::size_t Expr::node_count() const { return p_->nodes; }

bool Expr::is_constant() const {
  return terms().empty() || (terms().size() == 1 && terms()[0].mono.empty());
}

std::optional<Rational> Expr::constant_value() const {
  if (terms().empty()) return Rational(0);
  if (is_constant()) return terms()[0].coef;
  return std::nullopt;
}

Rational Expr::constant_term() const {
  if (!terms().empty() && terms().back().mono.empty()) return terms().back().coef;
  return Rational(0);
}

Expr Expr::operator-() const {
  if (is_zero()) return *this;
  auto p = std::make_shared<Poly>(*p_);
  for (auto& t : p->terms) t.coef = -t.coef;
  PolyBuilder::finalize(*p);
  return Expr(std::shared_ptr<const Poly>(std::move(p)));
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  // Both term lists are sorted; merge them.
  auto p = std::make_shared<Expr::Poly>();
  const auto& x = a.terms();
  const auto& y = b.terms();
  p->terms.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    int c = compare_monomials(x[i].mono, y[j].mono);
    if (c < 0) {
      p->terms.push_back(x[i++]);
    } else if (c > 0) {
      p->terms.push_back(y[j++]);
    } else {
      Rational s = x[i].coef + y[j].coef;
      if (sgn(s) != 0) p->terms.push_back(Term{x[i].mono, s});
      ++i;
      ++j;
    }
  }
  while (i < x.size()) p->terms.push_back(x[i++]);
  while (j < y.size()) p->terms.push_back(y[j++]);
  PolyBuilder::finalize(*p);
  return Expr(std::shared_ptr<const Expr::Poly>(std::move(p)));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr();
  if (auto c = a.constant_value()) {
    if (*c == 1) return b;
  }
  if (auto c = b.constant_value()) {
    if (*c == 1) return a;
  }
  PolyBuilder out;
  for (const auto& s : a.terms()) {
    for (const auto& t : b.terms()) out.add(mul_mono(s.mono, t.mono), s.coef * t.coef);
  }
  return out.finish();
}

Expr operator/(const Expr& a, const Expr& b) { return a * pow(b, -1); }

bool operator==(const Expr& a, const Expr& b) {
  if (a.p_ == b.p_) return true;
  const auto& x = a.terms();
  const auto& y = b.terms();
  if (x.size() != y.size() || a.hash() != b.hash()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].mono != y[i].mono || x[i].coef != y[i].coef) return false;
  }
  return true;
}

int compare(const Expr& a, const Expr& b) {
  const auto& x = a.terms();
  const auto& y = b.terms();
  const std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare_monomials(x[i].mono, y[i].mono); c != 0) return c;
    if (int c = cmp(x[i].coef, y[i].coef); c != 0) return c < 0 ? -1 : 1;
  }
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  return 0;
}

Expr canonicalize(const Expr& e) { return Expr::from_terms(e.terms()); }

namespace {

Expr monomial_expr(const Monomial& m, const Rational& c) {
  PolyBuilder b;
  b.add(m, c);
  return b.finish();
}

// Inverse of a single-term expression; Paren factors with exponent flipped
// to positive are expanded back into their argument.
Expr invert_term(const Term& t) {
  if (sgn(t.coef) == 0) throw std::domain_error("division by zero");
  Monomial plain;
  Expr expanded(Rational(1) / t.coef);
  for (const auto& f : t.mono) {
    if (f.atom->kind == AtomKind::Paren && -f.exp > 0) {
      expanded = expanded * pow(f.atom->arg, -f.exp);
    } else {
      plain.push_back({f.atom, -f.exp});
    }
  }
  return expanded * monomial_expr(plain, 1);
}

}  // namespace

Expr pow(const Expr& base, int exponent) {
  if (exponent == 0) return Expr(1);
  if (exponent < 0) {
    if (base.is_zero()) throw std::domain_error("division by zero");
    if (base.size() == 1) return pow(invert_term(base.terms()[0]), -exponent);
    const Rational lead = base.terms()[0].coef;
    Expr monic = base * Expr(Rational(1) / lead);
    AtomNode node;
    node.kind = AtomKind::Paren;
    node.arg = monic;
    Atom p = intern(std::move(node));
    return pow(Expr(lead), exponent) * monomial_expr(Monomial{{p, exponent}}, 1);
  }
  if (base.size() == 1) {
    const auto& t = base.terms()[0];
    bool has_paren = false;
    for (const auto& f : t.mono) has_paren |= f.atom->kind == AtomKind::Paren;
    if (!has_paren) {
      Monomial m = t.mono;
      for (auto& f : m) f.exp *= exponent;
      Rational c;
      mpz_pow_ui(c.get_num_mpz_t(), t.coef.get_num_mpz_t(), static_cast<unsigned long>(exponent));
      mpz_pow_ui(c.get_den_mpz_t(), t.coef.get_den_mpz_t(), static_cast<unsigned long>(exponent));
      c.canonicalize();
      return monomial_expr(m, c);
    }
  }
  Expr result(1);
  Expr b = base;
  int k = exponent;
  while (k > 0) {
    if (k & 1) result = result * b;
    k >>= 1;
    if (k) b = b * b;
  }
  return result;
}

Expr apply_func(Func f, const Expr& arg) {
  if (arg.is_zero()) {
    switch (f) {
      case Func::Sin: return Expr(0);
      case Func::Cos: return Expr(1);
      case Func::Exp: return Expr(1);
      case Func::Log: throw std::domain_error("log(0)");
    }
  }
  if (f == Func::Log) {
    if (auto c = arg.constant_value(); c && *c == 1) return Expr(0);
  }
  AtomNode node;
  node.kind = AtomKind::Func;
  node.func = f;
  node.arg = arg;
  return Expr::atom(intern(std::move(node)));
}

Expr param(const std::string& name) {
  AtomNode node;
  node.kind = AtomKind::Param;
  node.name = name;
  return Expr::atom(intern(std::move(node)));
}

namespace {

std::string atom_str(Atom a) {
  switch (a->kind) {
    case AtomKind::Jet:
    case AtomKind::Indep:
    case AtomKind::Param:
      return a->name;
    case AtomKind::Func:
      return std::string(func_name(a->func)) + "(" + a->arg.str() + ")";
    case AtomKind::Paren:
      return "(" + a->arg.str() + ")";
  }
  return "?";
}

std::string term_str(const Term& t) {
  std::string out;
  if (t.mono.empty()) return to_string(t.coef);
  if (t.coef == -1) {
    out = "-";
  } else if (t.coef != 1) {
    out = to_string(t.coef) + "*";
  }
  bool first = true;
  for (const auto& f : t.mono) {
    if (!first) out += "*";
    first = false;
    out += atom_str(f.atom);
    if (f.exp < 0) {
      out += "^(" + std::to_string(f.exp) + ")";
    } else if (f.exp != 1) {
      out += "^" + std::to_string(f.exp);
    }
  }
  return out;
}

}  // namespace

std::string Expr::str() const {
  if (is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : terms()) {
    std::string s = term_str(t);
    if (first) {
      out = s;
      first = false;
    } else if (s[0] == '-') {
      out += " - " + s.substr(1);
    } else {
      out += " + " + s;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JetSpace

JetSpace::JetSpace(std::vector<std::string> indep, std::vector<std::string> fields)
    : indep_(std::move(indep)), fields_(std::move(fields)) {}

std::shared_ptr<const JetSpace> JetSpace::create(std::vector<std::string> indep,
                                                 std::vector<std::string> fields) {
  std::unordered_set<std::string> seen;
  for (const auto* list : {&indep, &fields}) {
    for (const auto& n : *list) {
      if (n.empty()) throw std::invalid_argument("empty symbol name");
      if (!seen.insert(n).second) throw std::invalid_argument("duplicate symbol name '" + n + "'");
    }
  }
  // Spaces are interned: equal name lists give the same space, so atoms of
  // structurally equal spaces coincide.
  static std::mutex mu;
  static auto* table = new std::map<std::pair<std::vector<std::string>, std::vector<std::string>>,
                                    std::shared_ptr<const JetSpace>>();
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(indep, fields);
  if (auto it = table->find(key); it != table->end()) return it->second;
  std::shared_ptr<const JetSpace> made(new JetSpace(std::move(indep), std::move(fields)));
  table->emplace(std::move(key), made);
  return made;
}

Atom JetSpace::indep_atom(std::size_t mu) const {
  AtomNode node;
  node.kind = AtomKind::Indep;
  node.index = static_cast<int>(mu);
  node.name = indep_.at(mu);
  node.space = shared_from_this();
  return intern(std::move(node));
}

std::string JetSpace::jet_name(std::size_t field, const MultiIndex& alpha) const {
  std::string name = fields_.at(field);
  if (alpha.order() == 0) return name;
  name += "_";
  for (std::size_t mu = 0; mu < alpha.size(); ++mu) {
    for (int k = 0; k < alpha[mu]; ++k) name += indep_.at(mu);
  }
  return name;
}

Atom JetSpace::jet_atom(std::size_t field, const MultiIndex& alpha) const {
  if (alpha.size() > indep_.size()) throw std::invalid_argument("multi-index longer than variable list");
  AtomNode node;
  node.kind = AtomKind::Jet;
  node.index = static_cast<int>(field);
  node.alpha = alpha;
  node.name = jet_name(field, alpha);
  node.space = shared_from_this();
  return intern(std::move(node));
}

std::optional<std::size_t> JetSpace::find_indep(const std::string& name) const {
  auto it = std::find(indep_.begin(), indep_.end(), name);
  if (it == indep_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - indep_.begin());
}

std::optional<std::size_t> JetSpace::find_field(const std::string& name) const {
  auto it = std::find(fields_.begin(), fields_.end(), name);
  if (it == fields_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - fields_.begin());
}

// ---------------------------------------------------------------------------
// derivations and substitution

Expr derive(const Expr& e, const std::function<Expr(Atom)>& on_symbol) {
  std::unordered_map<Atom, Expr> cache;
  std::function<const Expr&(Atom)> datom = [&](Atom a) -> const Expr& {
    if (auto it = cache.find(a); it != cache.end()) return it->second;
    Expr d;
    switch (a->kind) {
      case AtomKind::Jet:
      case AtomKind::Indep:
      case AtomKind::Param:
        d = on_symbol(a);
        break;
      case AtomKind::Func: {
        Expr inner = derive(a->arg, on_symbol);
        if (!inner.is_zero()) {
          switch (a->func) {
            case Func::Sin: d = cos(a->arg) * inner; break;
            case Func::Cos: d = -(sin(a->arg) * inner); break;
            case Func::Exp: d = Expr::atom(a) * inner; break;
            case Func::Log: d = pow(a->arg, -1) * inner; break;
          }
        }
        break;
      }
      case AtomKind::Paren:
        d = derive(a->arg, on_symbol);
        break;
    }
    return cache.emplace(a, std::move(d)).first->second;
  };

  PolyBuilder out;
  for (const auto& t : e.terms()) {
    for (std::size_t k = 0; k < t.mono.size(); ++k) {
      const Factor& f = t.mono[k];
      const Expr& da = datom(f.atom);
      if (da.is_zero()) continue;
      Monomial base = t.mono;
      if (f.exp == 1) {
        base.erase(base.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        base[k].exp -= 1;
      }
      const Rational scale = t.coef * f.exp;
      for (const auto& dt : da.terms()) out.add(mul_mono(base, dt.mono), scale * dt.coef);
    }
  }
  return out.finish();
}

Expr partial(const Expr& e, Atom symbol) {
  return derive(e, [symbol](Atom a) { return a == symbol ? Expr(1) : Expr(0); });
}

Expr total_derivative(const Expr& e, Atom var) {
  if (var->kind != AtomKind::Indep) throw std::invalid_argument("total derivative needs an independent variable");
  const auto mu = static_cast<std::size_t>(var->index);
  return derive(e, [var, mu](Atom a) -> Expr {
    switch (a->kind) {
      case AtomKind::Indep:
        return a == var ? Expr(1) : Expr(0);
      case AtomKind::Jet:
        return a->space->jet(static_cast<std::size_t>(a->index), a->alpha + MultiIndex::unit(mu));
      default:
        return Expr(0);
    }
  });
}

Expr total_derivative(const Expr& e, const MultiIndex& alpha, const JetSpace& space) {
  Expr r = e;
  for (std::size_t mu = 0; mu < alpha.size(); ++mu) {
    Atom var = space.indep_atom(mu);
    for (int k = 0; k < alpha[mu]; ++k) r = total_derivative(r, var);
  }
  return r;
}

Expr substitute(const Expr& e, const std::function<std::optional<Expr>(Atom)>& rule) {
  std::unordered_map<Atom, std::optional<Expr>> cache;
  auto replaced = [&](Atom a) -> const std::optional<Expr>& {
    if (auto it = cache.find(a); it != cache.end()) return it->second;
    std::optional<Expr> r;
    switch (a->kind) {
      case AtomKind::Jet:
      case AtomKind::Indep:
      case AtomKind::Param:
        r = rule(a);
        break;
      case AtomKind::Func: {
        Expr arg = substitute(a->arg, rule);
        if (!(arg == a->arg)) r = apply_func(a->func, arg);
        break;
      }
      case AtomKind::Paren: {
        Expr arg = substitute(a->arg, rule);
        if (!(arg == a->arg)) r = arg;
        break;
      }
    }
    return cache.emplace(a, std::move(r)).first->second;
  };

  PolyBuilder out;
  for (const auto& t : e.terms()) {
    Monomial kept;
    Expr product(t.coef);
    bool changed = false;
    for (const auto& f : t.mono) {
      const auto& r = replaced(f.atom);
      if (r) {
        product = product * pow(*r, f.exp);
        changed = true;
      } else {
        kept.push_back(f);
      }
    }
    if (!changed) {
      out.add(t.mono, t.coef);
    } else {
      for (const auto& pt : product.terms()) out.add(mul_mono(kept, pt.mono), pt.coef);
    }
  }
  return out.finish();
}

Expr substitute(const Expr& e, const std::unordered_map<Atom, Expr>& rules) {
  return substitute(e, [&rules](Atom a) -> std::optional<Expr> {
    if (auto it = rules.find(a); it != rules.end()) return it->second;
    return std::nullopt;
  });
}

namespace {

void collect_symbols(const Expr& e, std::unordered_set<Atom>& out, bool& opaque) {
  for (const auto& t : e.terms()) {
    for (const auto& f : t.mono) {
      if (f.atom->is_symbol()) {
        out.insert(f.atom);
      } else {
        opaque = true;
        collect_symbols(f.atom->arg, out, opaque);
      }
    }
  }
}

}  // namespace

std::vector<Atom> symbols_of(const Expr& e) {
  std::unordered_set<Atom> set;
  bool opaque = false;
  collect_symbols(e, set, opaque);
  std::vector<Atom> out(set.begin(), set.end());
  std::sort(out.begin(), out.end(), [](Atom a, Atom b) { return compare_atoms(a, b) < 0; });
  return out;
}

bool has_opaque_atoms(const Expr& e) {
  for (const auto& t : e.terms()) {
    for (const auto& f : t.mono) {
      if (!f.atom->is_symbol()) return true;
    }
  }
  return false;
}

bool depends_on(const Expr& e, Atom symbol) {
  for (Atom a : symbols_of(e)) {
    if (a == symbol) return true;
  }
  return false;
}

int max_jet_order(const Expr& e) {
  int m = 0;
  for (Atom a : symbols_of(e)) {
    if (a->kind == AtomKind::Jet) m = std::max(m, a->alpha.order());
  }
  return m;
}

}  // namespace lanchor
