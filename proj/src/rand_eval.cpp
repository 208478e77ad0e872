#include "lanchor/rand_eval.hpp"

#include <mpfr.h>

#include <unordered_map>

namespace lanchor {

const OracleSettings& oracle_settings() {
  static const OracleSettings s;
  return s;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct DomainViolation {};

class Mpfr {
 public:
  explicit Mpfr(long bits) { mpfr_init2(v_, bits); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

Rational eval_func(Func f, const Rational& x) {
  const long bits = oracle_settings().precision_bits;
  Mpfr in(bits), out(bits);
  mpfr_set_q(in.get(), x.get_mpq_t(), MPFR_RNDN);
  switch (f) {
    case Func::Sin: mpfr_sin(out.get(), in.get(), MPFR_RNDN); break;
    case Func::Cos: mpfr_cos(out.get(), in.get(), MPFR_RNDN); break;
    case Func::Exp:
      if (x > 10000) throw DomainViolation{};
      mpfr_exp(out.get(), in.get(), MPFR_RNDN);
      break;
    case Func::Log:
      if (sgn(x) <= 0) throw DomainViolation{};
      mpfr_log(out.get(), in.get(), MPFR_RNDN);
      break;
  }
  Rational r;
  mpfr_get_q(r.get_mpq_t(), out.get());
  return r;
}

class Evaluator {
 public:
  explicit Evaluator(const std::function<std::optional<Rational>(Atom)>& values) : values_(values) {}

  Rational eval(const Expr& e) {
    Rational sum = 0;
    for (const auto& t : e.terms()) {
      Rational prod = t.coef;
      for (const auto& f : t.mono) {
        const Rational& base = atom_value(f.atom);
        if (f.exp < 0 && sgn(base) == 0) throw DomainViolation{};
        prod *= power(base, f.exp);
      }
      sum += prod;
    }
    return sum;
  }

 private:
  static Rational power(const Rational& b, int k) {
    Rational r;
    unsigned long e = static_cast<unsigned long>(k < 0 ? -k : k);
    mpz_pow_ui(r.get_num_mpz_t(), b.get_num_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), b.get_den_mpz_t(), e);
    r.canonicalize();
    if (k < 0) r = 1 / r;
    return r;
  }

  const Rational& atom_value(Atom a) {
    if (auto it = cache_.find(a); it != cache_.end()) return it->second;
    Rational v;
    if (a->is_symbol()) {
      auto got = values_(a);
      if (!got) throw EvalError("no value for symbol '" + a->name + "'");
      v = *got;
    } else if (a->kind == AtomKind::Func) {
      v = eval_func(a->func, eval(a->arg));
    } else {
      v = eval(a->arg);
    }
    return cache_.emplace(a, std::move(v)).first->second;
  }

  const std::function<std::optional<Rational>(Atom)>& values_;
  std::unordered_map<Atom, Rational> cache_;
};

}  // namespace

Rational sample_value(Atom symbol, std::uint64_t seed, int attempt) {
  const auto bound = static_cast<std::uint64_t>(oracle_settings().max_bound);
  std::uint64_t h = splitmix(fnv1a(symbol->name) ^ splitmix(seed) ^
                             splitmix(0x1000 + static_cast<std::uint64_t>(attempt)));
  std::uint64_t h2 = splitmix(h);
  long num = static_cast<long>(h % (2 * bound + 1)) - static_cast<long>(bound);
  long den = static_cast<long>(h2 % bound) + 1;
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational eval_at(const Expr& e, const std::function<std::optional<Rational>(Atom)>& values) {
  try {
    return Evaluator(values).eval(e);
  } catch (const DomainViolation&) {
    throw EvalError("expression is undefined at the given point");
  }
}

Rational rand_eval(const Expr& e, std::uint64_t seed) {
  const int limit = oracle_settings().resample_limit;
  for (int attempt = 0; attempt < limit; ++attempt) {
    std::function<std::optional<Rational>(Atom)> values =
        [seed, attempt](Atom a) -> std::optional<Rational> { return sample_value(a, seed, attempt); };
    try {
      return Evaluator(values).eval(e);
    } catch (const DomainViolation&) {
      continue;
    }
  }
  throw EvalError("no valid sample point after " + std::to_string(limit) + " attempts");
}

bool is_zero(const Expr& e) {
  if (e.is_zero()) return true;
  if (!has_opaque_atoms(e)) return false;
  static const Rational threshold = [] {
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, 40);
    return Rational(mpz_class(1), den);
  }();
  for (int s = 0; s < oracle_settings().seeds; ++s) {
    Rational v = rand_eval(e, static_cast<std::uint64_t>(s));
    if (abs(v) >= threshold) return false;
  }
  return true;
}

}  // namespace lanchor
