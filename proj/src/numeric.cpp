#include "lanchor/numeric.hpp"

#include <cmath>
#include <map>
#include <random>

namespace lanchor {

CompiledExpr::CompiledExpr(const Expr& e, const OdeSystem& sys) {
  std::map<Atom, std::size_t> slot_of;
  for (const auto& t : e.terms()) {
    CTerm ct{t.coef.get_d(), {}};
    for (const auto& f : t.mono) {
      auto it = slot_of.find(f.atom);
      if (it == slot_of.end()) {
        Slot s;
        Atom a = f.atom;
        if (a == sys.t_atom()) {
          s.var = -1;
        } else if (a->kind == AtomKind::Jet && a->space.get() == sys.space.get() && a->alpha.order() == 0) {
          s.var = a->index;
        } else if (a->kind == AtomKind::Func) {
          s.opaque = true;
          s.is_func = true;
          s.func = a->func;
          s.arg = std::make_shared<CompiledExpr>(a->arg, sys);
        } else if (a->kind == AtomKind::Paren) {
          s.opaque = true;
          s.arg = std::make_shared<CompiledExpr>(a->arg, sys);
        } else {
          throw UnsupportedInput("numeric evaluation: symbol '" + a->name + "' has no value");
        }
        it = slot_of.emplace(a, slots_.size()).first;
        slots_.push_back(std::move(s));
      }
      ct.factors.emplace_back(it->second, f.exp);
    }
    terms_.push_back(std::move(ct));
  }
}

double CompiledExpr::operator()(double t, const std::vector<double>& x) const {
  double vals[64];
  std::vector<double> big;
  double* v = vals;
  if (slots_.size() > 64) {
    big.resize(slots_.size());
    v = big.data();
  }
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    const Slot& s = slots_[i];
    if (!s.opaque) {
      v[i] = s.var < 0 ? t : x[static_cast<std::size_t>(s.var)];
    } else {
      double a = (*s.arg)(t, x);
      if (!s.is_func) {
        v[i] = a;
      } else {
        switch (s.func) {
          case Func::Sin: v[i] = std::sin(a); break;
          case Func::Cos: v[i] = std::cos(a); break;
          case Func::Exp: v[i] = std::exp(a); break;
          case Func::Log: v[i] = std::log(a); break;
        }
      }
    }
  }
  double sum = 0.0;
  for (const auto& ct : terms_) {
    double p = ct.coef;
    for (const auto& [slot, e] : ct.factors) p *= e == 1 ? v[slot] : std::pow(v[slot], e);
    sum += p;
  }
  return sum;
}

std::vector<std::vector<Rational>> oracle_initial_points(std::size_t n, std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> den(1, 1000);
  std::vector<std::vector<Rational>> out;
  for (int k = 0; k < count; ++k) {
    std::vector<Rational> p;
    for (std::size_t i = 0; i < n; ++i) {
      long q = den(rng);
      std::uniform_int_distribution<long> num(-q, q);
      Rational r(num(rng), q);
      r.canonicalize();
      p.push_back(r);
    }
    out.push_back(std::move(p));
  }
  return out;
}

OracleResult numeric_oracle(const OdeSystem& sys, const std::vector<std::pair<std::string, Expr>>& characteristics,
                            const OracleOptions& opt) {
  if (characteristics.empty()) throw std::invalid_argument("numeric oracle needs at least one characteristic");
  if (!(opt.step > 0) || !(opt.t_end >= 0)) throw std::invalid_argument("step must be positive and t_end non-negative");
  const std::size_t n = sys.n();
  std::vector<CompiledExpr> v;
  for (const auto& e : sys.v) v.emplace_back(e, sys);
  std::vector<CompiledExpr> fs;
  for (const auto& [name, f] : characteristics) {
    require_zeroth_order(f, "characteristic");
    fs.emplace_back(f, sys);
  }

  OracleResult out;
  out.initial_points = oracle_initial_points(n, opt.seed, opt.points);
  for (const auto& [name, f] : characteristics) out.drifts.push_back({name, 0.0, true});

  auto rhs = [&](double t, const std::vector<double>& x, std::vector<double>& dx) {
    for (std::size_t i = 0; i < n; ++i) dx[i] = -v[i](t, x);
  };
  const long steps = static_cast<long>(std::ceil(opt.t_end / opt.step - 1e-9));
  for (const auto& p0 : out.initial_points) {
    std::vector<double> x(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = p0[i].get_d();
    std::vector<double> f0;
    for (const auto& f : fs) f0.push_back(f(0.0, x));
    double t = 0.0;
    for (long s = 0; s < steps; ++s) {
      const double h = std::min(opt.step, opt.t_end - t);
      rhs(t, x, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
      rhs(t + 0.5 * h, tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
      rhs(t + 0.5 * h, tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
      rhs(t + h, tmp, k4);
      for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      t = (s + 1 == steps) ? opt.t_end : t + h;
      double norm = 0.0;
      for (double xi : x) norm = std::max(norm, std::abs(xi));
      if (!(norm <= opt.blowup_norm)) {
        if (!out.blew_up || t < out.blowup_time) out.blowup_time = t;
        out.blew_up = true;
        break;
      }
      for (std::size_t c = 0; c < fs.size(); ++c) {
        double d = std::abs(fs[c](t, x) - f0[c]);
        if (std::isnan(d)) d = INFINITY;
        out.drifts[c].max_drift = std::max(out.drifts[c].max_drift, d);
      }
    }
  }
  for (auto& d : out.drifts) d.within_tolerance = d.max_drift < opt.tolerance;
  return out;
}

}  // namespace lanchor
