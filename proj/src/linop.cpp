#include "lanchor/linop.hpp"

#include <algorithm>
#include <sstream>

#include "lanchor/rand_eval.hpp"

namespace lanchor {

LinDiffOp::LinDiffOp(std::size_t rows, std::size_t cols, std::shared_ptr<const JetSpace> space)
    : rows_(rows), cols_(cols), space_(std::move(space)) {
  if (!space_) throw std::invalid_argument("operator needs a jet space");
}

LinDiffOp LinDiffOp::identity(std::size_t n, std::shared_ptr<const JetSpace> space) {
  LinDiffOp op(n, n, std::move(space));
  for (std::size_t i = 0; i < n; ++i) op.add(i, i, MultiIndex(), Expr(1));
  return op;
}

LinDiffOp LinDiffOp::single(std::size_t rows, std::size_t cols, std::size_t row, std::size_t col,
                            const MultiIndex& alpha, const Expr& coeff,
                            std::shared_ptr<const JetSpace> space) {
  LinDiffOp op(rows, cols, std::move(space));
  op.add(row, col, alpha, coeff);
  return op;
}

void LinDiffOp::add(std::size_t row, std::size_t col, const MultiIndex& alpha, const Expr& coeff) {
  if (row >= rows_ || col >= cols_) throw std::out_of_range("operator entry out of range");
  if (alpha.size() > space_->num_indep()) throw std::invalid_argument("multi-index too long");
  if (coeff.is_zero()) return;
  OpKey key{row, col, alpha};
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    entries_.emplace(std::move(key), coeff);
    return;
  }
  it->second += coeff;
  if (it->second.is_zero()) entries_.erase(it);
}

Expr LinDiffOp::coefficient(std::size_t row, std::size_t col, const MultiIndex& alpha) const {
  auto it = entries_.find(OpKey{row, col, alpha});
  return it == entries_.end() ? Expr() : it->second;
}

int LinDiffOp::order() const {
  int m = 0;
  for (const auto& [k, c] : entries_) m = std::max(m, k.alpha.order());
  return m;
}

void LinDiffOp::check_same_shape(const LinDiffOp& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) {
    throw std::invalid_argument("operator shape mismatch: " + std::to_string(rows_) + "x" +
                                std::to_string(cols_) + " vs " + std::to_string(o.rows_) + "x" +
                                std::to_string(o.cols_));
  }
}

LinDiffOp LinDiffOp::operator+(const LinDiffOp& o) const {
  check_same_shape(o);
  LinDiffOp r = *this;
  for (const auto& [k, c] : o.entries_) r.add(k.row, k.col, k.alpha, c);
  return r;
}

LinDiffOp LinDiffOp::operator-(const LinDiffOp& o) const { return *this + (-o); }

LinDiffOp LinDiffOp::operator-() const {
  LinDiffOp r = *this;
  for (auto& [k, c] : r.entries_) c = -c;
  return r;
}

LinDiffOp operator*(const Expr& s, const LinDiffOp& a) {
  return a.map_coefficients([&s](const Expr& c) { return s * c; });
}

LinDiffOp LinDiffOp::map_coefficients(const std::function<Expr(const Expr&)>& fn) const {
  LinDiffOp r(rows_, cols_, space_);
  for (const auto& [k, c] : entries_) {
    Expr v = fn(c);
    if (!v.is_zero()) r.entries_.emplace(k, std::move(v));
  }
  return r;
}

bool LinDiffOp::operator==(const LinDiffOp& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && entries_.size() == o.entries_.size() &&
         std::equal(entries_.begin(), entries_.end(), o.entries_.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first && x.second == y.second; });
}

std::string LinDiffOp::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : entries_) {
    if (!first) os << "\n";
    first = false;
    os << "[" << k.row << "," << k.col << "] (" << c.str() << ")";
    if (k.alpha.order() > 0) {
      os << "*D";
      for (std::size_t mu = 0; mu < k.alpha.size(); ++mu) {
        for (int j = 0; j < k.alpha[mu]; ++j) os << "_" << space_->indep_name(mu);
      }
    }
  }
  return os.str();
}

LinDiffOp LinDiffOp::vstack(const std::vector<LinDiffOp>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("vstack of nothing");
  std::size_t rows = 0;
  for (const auto& b : blocks) {
    if (b.cols_ != blocks[0].cols_) throw std::invalid_argument("vstack column mismatch");
    rows += b.rows_;
  }
  LinDiffOp r(rows, blocks[0].cols_, blocks[0].space_);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (const auto& [k, c] : b.entries_) r.add(k.row + off, k.col, k.alpha, c);
    off += b.rows_;
  }
  return r;
}

LinDiffOp LinDiffOp::hstack(const std::vector<LinDiffOp>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("hstack of nothing");
  std::size_t cols = 0;
  for (const auto& b : blocks) {
    if (b.rows_ != blocks[0].rows_) throw std::invalid_argument("hstack row mismatch");
    cols += b.cols_;
  }
  LinDiffOp r(blocks[0].rows_, cols, blocks[0].space_);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (const auto& [k, c] : b.entries_) r.add(k.row, k.col + off, k.alpha, c);
    off += b.cols_;
  }
  return r;
}

LinDiffOp LinDiffOp::block_diag(const std::vector<LinDiffOp>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("block_diag of nothing");
  std::size_t rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows_;
    cols += b.cols_;
  }
  LinDiffOp r(rows, cols, blocks[0].space_);
  std::size_t ro = 0, co = 0;
  for (const auto& b : blocks) {
    for (const auto& [k, c] : b.entries_) r.add(k.row + ro, k.col + co, k.alpha, c);
    ro += b.rows_;
    co += b.cols_;
  }
  return r;
}

std::vector<Expr> apply(const LinDiffOp& a, const std::vector<Expr>& v) {
  if (v.size() != a.cols()) {
    throw std::invalid_argument("operator has " + std::to_string(a.cols()) +
                                " columns but the vector has " + std::to_string(v.size()) +
                                " entries");
  }
  std::vector<Expr> out(a.rows());
  std::map<std::pair<std::size_t, MultiIndex>, Expr> derivs;
  for (const auto& [k, c] : a.entries()) {
    auto key = std::make_pair(k.col, k.alpha);
    auto it = derivs.find(key);
    if (it == derivs.end()) {
      it = derivs.emplace(key, total_derivative(v[k.col], k.alpha, *a.space())).first;
    }
    out[k.row] += c * it->second;
  }
  return out;
}

LinDiffOp compose(const LinDiffOp& a, const LinDiffOp& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("cannot compose " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " with " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()));
  }
  const JetSpace& space = *a.space();
  LinDiffOp r(a.rows(), b.cols(), a.space());
  // Group b's entries by row for the inner sum.
  std::vector<std::vector<std::pair<OpKey, Expr>>> b_rows(b.rows());
  for (const auto& [k, c] : b.entries()) b_rows[k.row].emplace_back(k, c);
  std::map<std::pair<const Expr*, MultiIndex>, Expr> dcache;
  for (const auto& [ka, ca] : a.entries()) {
    for (const auto& [kb, cb] : b_rows[ka.col]) {
      // a D^alpha (b D^beta) = sum_{gamma<=alpha} C(alpha,gamma) a D^gamma(b) D^{alpha-gamma+beta}
      for (const auto& gamma : sub_indices(ka.alpha)) {
        auto key = std::make_pair(&cb, gamma);
        auto it = dcache.find(key);
        if (it == dcache.end()) it = dcache.emplace(key, total_derivative(cb, gamma, space)).first;
        if (it->second.is_zero()) continue;
        Expr coeff = Expr(multi_binomial(ka.alpha, gamma)) * ca * it->second;
        r.add(ka.row, kb.col, ka.alpha - gamma + kb.alpha, coeff);
      }
    }
  }
  return r;
}

LinDiffOp formal_adjoint(const LinDiffOp& a) {
  const JetSpace& space = *a.space();
  LinDiffOp r(a.cols(), a.rows(), a.space());
  for (const auto& [k, c] : a.entries()) {
    const bool odd = k.alpha.order() % 2;
    for (const auto& gamma : sub_indices(k.alpha)) {
      Expr d = total_derivative(c, gamma, space);
      if (d.is_zero()) continue;
      Expr coeff = Expr(multi_binomial(k.alpha, gamma)) * d;
      r.add(k.col, k.row, k.alpha - gamma, odd ? -coeff : coeff);
    }
  }
  return r;
}

LinDiffOp linearize(const std::vector<Expr>& t, std::shared_ptr<const JetSpace> space) {
  LinDiffOp j(t.size(), space->num_fields(), space);
  for (std::size_t a = 0; a < t.size(); ++a) {
    for (Atom s : symbols_of(t[a])) {
      if (s->kind != AtomKind::Jet || s->space.get() != space.get()) continue;
      j.add(a, static_cast<std::size_t>(s->index), s->alpha, partial(t[a], s));
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// ShellRules

namespace {

// Graded order on jets: higher derivative order first, then field index,
// then multi-index descending.
bool jet_before(Atom a, Atom b) {
  const int oa = a->alpha.order(), ob = b->alpha.order();
  if (oa != ob) return oa > ob;
  if (a->index != b->index) return a->index < b->index;
  return b->alpha < a->alpha;
}

std::vector<MultiIndex> indices_of_order(std::size_t vars, int order) {
  std::vector<MultiIndex> out;
  std::vector<int> c(vars, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == vars) {
      c[i] = left;
      out.emplace_back(c);
      return;
    }
    for (int k = left; k >= 0; --k) {
      c[i] = k;
      rec(i + 1, left - k);
    }
  };
  if (vars == 0) {
    if (order == 0) out.emplace_back();
    return out;
  }
  rec(0, order);
  return out;
}

}  // namespace

ShellRules ShellRules::none(std::shared_ptr<const JetSpace> space) {
  ShellRules s;
  s.kind_ = Kind::None;
  s.space_ = std::move(space);
  s.mu_ = std::make_shared<std::mutex>();
  s.table_ = std::make_shared<std::map<Atom, Expr>>();
  return s;
}

ShellRules ShellRules::ode(std::shared_ptr<const JetSpace> space, std::vector<Expr> v,
                           int max_order) {
  if (space->num_indep() != 1) throw std::invalid_argument("ODE shell needs one independent variable");
  if (v.size() != space->num_fields()) throw std::invalid_argument("ODE shell: v has wrong length");
  for (const auto& e : v) {
    if (max_jet_order(e) > 0) throw std::invalid_argument("ODE shell: v must not contain derivatives");
  }
  ShellRules s = none(std::move(space));
  s.kind_ = Kind::Ode;
  s.v_ = std::move(v);
  s.max_order_ = max_order;
  return s;
}

ShellRules ShellRules::linear(std::shared_ptr<const JetSpace> space,
                              const std::vector<Expr>& relations, int max_order) {
  ShellRules s = none(space);
  s.kind_ = Kind::Linear;
  s.max_order_ = max_order;

  std::vector<Expr> rows;
  for (const auto& r : relations) {
    if (r.is_zero()) continue;
    const int ord = max_jet_order(r);
    if (ord > max_order) {
      throw std::invalid_argument("shell relation has order " + std::to_string(ord) +
                                  " above the prolongation order " + std::to_string(max_order));
    }
    for (int m = 0; ord + m <= max_order; ++m) {
      for (const auto& beta : indices_of_order(space->num_indep(), m)) {
        rows.push_back(total_derivative(r, beta, *space));
      }
    }
  }

  // Linear system: sum_s c_s s + rest = 0 with rational c_s.
  std::vector<Atom> cols;
  std::vector<std::map<Atom, Rational>> coef(rows.size());
  std::vector<Expr> rest(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& t : rows[i].terms()) {
      Atom jet = nullptr;
      for (const auto& f : t.mono) {
        if (f.atom->kind == AtomKind::Jet) {
          if (jet || f.exp != 1 || t.mono.size() != 1) {
            throw UnsupportedInput("shell relation is not linear in the jets with constant coefficients: " +
                                   rows[i].str());
          }
          jet = f.atom;
        }
      }
      if (jet) {
        coef[i][jet] += t.coef;
        cols.push_back(jet);
      } else {
        rest[i] += Expr::from_terms({t});
      }
    }
  }
  std::sort(cols.begin(), cols.end(), jet_before);
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());

  // Dense row reduction.
  const std::size_t nc = cols.size();
  std::vector<std::vector<Rational>> m(rows.size(), std::vector<Rational>(nc));
  std::map<Atom, std::size_t> col_of;
  for (std::size_t j = 0; j < nc; ++j) col_of[cols[j]] = j;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [a, c] : coef[i]) m[i][col_of[a]] = c;
  }
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t j = 0; j < nc && r < m.size(); ++j) {
    std::size_t p = r;
    while (p < m.size() && sgn(m[p][j]) == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    std::swap(rest[p], rest[r]);
    Rational inv = 1 / m[r][j];
    for (auto& x : m[r]) x *= inv;
    rest[r] = rest[r] * Expr(inv);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || sgn(m[i][j]) == 0) continue;
      Rational f = m[i][j];
      for (std::size_t k = j; k < nc; ++k) m[i][k] -= f * m[r][k];
      rest[i] = rest[i] - Expr(f) * rest[r];
    }
    pivots.push_back(j);
    ++r;
  }
  for (std::size_t i = r; i < m.size(); ++i) {
    if (!rest[i].is_zero()) throw std::invalid_argument("shell relations are inconsistent");
  }
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    Expr rhs = -rest[i];
    for (std::size_t k = pivots[i] + 1; k < nc; ++k) {
      if (sgn(m[i][k]) != 0) rhs -= Expr(m[i][k]) * Expr::atom(cols[k]);
    }
    s.table_->emplace(cols[pivots[i]], rhs);
  }
  return s;
}

std::optional<Expr> ShellRules::rule_for(Atom a) const {
  if (a->kind != AtomKind::Jet || kind_ == Kind::None) return std::nullopt;
  if (a->space.get() != space_.get()) return std::nullopt;
  const int ord = a->alpha.order();
  if (ord > max_order_) {
    throw ShellError("shell rules do not cover " + a->name + " (prolongation order " +
                     std::to_string(max_order_) + ")");
  }
  {
    std::lock_guard<std::mutex> lock(*mu_);
    if (auto it = table_->find(a); it != table_->end()) return it->second;
  }
  if (kind_ == Kind::Linear || ord == 0) return std::nullopt;

  // ODE: x^i_{t^k} -> D_t of the order k-1 rule, reduced.
  const auto i = static_cast<std::size_t>(a->index);
  Expr value;
  if (ord == 1) {
    value = -v_[i];
  } else {
    Expr lower = space_->jet(i, MultiIndex({ord - 1}));
    Atom lower_atom = lower.terms()[0].mono[0].atom;
    value = reduce(total_derivative(*rule_for(lower_atom), space_->indep_atom(0)));
  }
  std::lock_guard<std::mutex> lock(*mu_);
  return table_->emplace(a, value).first->second;
}

Expr ShellRules::reduce(const Expr& e) const {
  if (kind_ == Kind::None) return e;
  return substitute(e, [this](Atom a) { return rule_for(a); });
}

LinDiffOp ShellRules::reduce(const LinDiffOp& a) const {
  return a.map_coefficients([this](const Expr& c) { return reduce(c); });
}

std::vector<std::pair<Atom, Expr>> ShellRules::rules() const {
  std::vector<std::pair<Atom, Expr>> out;
  {
    std::lock_guard<std::mutex> lock(*mu_);
    out.assign(table_->begin(), table_->end());
  }
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return jet_before(x.first, y.first); });
  return out;
}

ShellComparison op_equal_mod_shell(const LinDiffOp& a, const LinDiffOp& b, const ShellRules& shell) {
  LinDiffOp residual = shell.reduce(a - b).map_coefficients(
      [](const Expr& c) { return is_zero(c) ? Expr() : c; });
  return {residual.is_zero(), residual};
}

}  // namespace lanchor
