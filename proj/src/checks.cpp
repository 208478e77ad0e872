#include "lanchor/checks.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <set>
#include <thread>

#include "lanchor/field_models.hpp"
#include "lanchor/rand_eval.hpp"

namespace lanchor {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep = "; ") {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : sep) + p;
  return out;
}

CheckOutcome pass() { return {Status::Pass, std::nullopt}; }
CheckOutcome fail(std::string r) { return {Status::Fail, std::move(r)}; }
CheckOutcome skip(std::string r) { return {Status::Skip, std::move(r)}; }

std::string vector_residual(const std::vector<Expr>& r, const std::vector<std::string>& labels) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!r[i].is_zero()) parts.push_back(labels.at(i) + ": " + r[i].str());
  }
  return join(parts);
}

std::vector<std::string> component_labels(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::string group_of(const std::string& name) {
  std::size_t cut = name.find_first_of(":(");
  return cut == std::string::npos ? name : name.substr(0, cut);
}

std::string format_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", d);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// ODE model files

const std::vector<std::string>& ode_check_groups() {
  static const std::vector<std::string> groups{"anchor",         "characteristic", "integrability",
                                               "noether",        "oracle",         "proper_symmetry",
                                               "symmetry",       "twist"};
  return groups;
}

std::vector<CheckTask> ode_check_tasks(const ModelFile& m, const OracleOptions& oracle) {
  std::vector<CheckTask> tasks;
  const OdeSystem& sys = m.system;
  const std::size_t n = sys.n();

  tasks.push_back({"anchor", [&m, &sys, n]() {
                     if (!m.anchor) return skip("no [anchor] section");
                     ExprCheck c = check_anchor(sys, *m.anchor);
                     if (c.ok) return pass();
                     std::vector<std::string> labels;
                     for (std::size_t i = 1; i <= n; ++i) {
                       for (std::size_t j = i + 1; j <= n; ++j) {
                         labels.push_back("alpha_" + std::to_string(i) + "_" + std::to_string(j));
                       }
                     }
                     return fail(vector_residual(c.residual, labels));
                   }});

  tasks.push_back({"integrability", [&m, &sys]() {
                     if (!m.anchor) return skip("no [anchor] section");
                     Trivector s = schouten_square(sys, *m.anchor);
                     std::vector<std::string> parts;
                     for (const auto& [ijk, e] : s.entries()) {
                       if (is_zero(e)) continue;
                       parts.push_back("S_" + std::to_string(ijk[0] + 1) + "_" + std::to_string(ijk[1] + 1) +
                                       "_" + std::to_string(ijk[2] + 1) + ": " + e.str());
                     }
                     return parts.empty() ? pass() : fail(join(parts));
                   }});

  for (const auto& [name, f] : m.characteristics) {
    const Expr* fp = &f;
    tasks.push_back({"characteristic:" + name, [&sys, fp]() {
                       ExprCheck c = check_characteristic(sys, *fp);
                       return c.ok ? pass() : fail(c.residual[0].str());
                     }});
    tasks.push_back({"noether:" + name, [&m, &sys, fp]() {
                       if (!m.anchor) return skip("no [anchor] section");
                       if (!check_anchor(sys, *m.anchor).ok) return skip("anchor condition fails");
                       if (!check_characteristic(sys, *fp).ok) return skip("not a characteristic");
                       ExprCheck c = check_symmetry(sys, anchor_apply(sys, *m.anchor, *fp));
                       return c.ok ? pass() : fail(vector_residual(c.residual, component_labels("w", sys.n())));
                     }});
    tasks.push_back({"proper_symmetry:" + name, [&m, &sys, fp]() {
                       if (!m.anchor) return skip("no [anchor] section");
                       if (!check_anchor(sys, *m.anchor).ok) return skip("anchor condition fails");
                       if (!check_characteristic(sys, *fp).ok) return skip("not a characteristic");
                       ExprCheck c = proper_symmetry_conditions(sys, *m.anchor, vertical_differential(sys, *fp));
                       if (c.ok) return pass();
                       std::vector<std::string> labels;
                       for (std::size_t l = 1; l <= sys.n(); ++l) {
                         for (std::size_t k = 1; k <= sys.n(); ++k) {
                           labels.push_back("closed_" + std::to_string(l) + "_" + std::to_string(k));
                         }
                       }
                       for (std::size_t l = 1; l <= sys.n(); ++l) labels.push_back("time_" + std::to_string(l));
                       return fail(vector_residual(c.residual, labels));
                     }});
    tasks.push_back({"twist:" + name, [&m, &sys, fp]() {
                       if (!m.anchor) return skip("no [anchor] section");
                       if (!m.hamiltonian) return skip("no [hamiltonian] section");
                       if (!check_characteristic(sys, *fp).ok) return skip("not a characteristic");
                       TwistCheck c = twist_invariance_check(sys, *m.anchor, *fp, *m.hamiltonian);
                       if (c.ok) return pass();
                       if (c.diagnostic.rfind("not applicable", 0) == 0) return skip(c.diagnostic);
                       return fail(c.diagnostic);
                     }});
  }

  for (const auto& [name, w] : m.symmetries) {
    const std::vector<Expr>* wp = &w;
    tasks.push_back({"symmetry:" + name, [&sys, wp]() {
                       ExprCheck c = check_symmetry(sys, *wp);
                       return c.ok ? pass() : fail(vector_residual(c.residual, component_labels("w", sys.n())));
                     }});
  }

  tasks.push_back({"oracle", [&m, &sys, oracle]() {
                     if (m.characteristics.empty()) return skip("no [characteristic] section");
                     OracleResult r = numeric_oracle(sys, m.characteristics, oracle);
                     std::vector<std::string> parts;
                     bool ok = true;
                     for (std::size_t i = 0; i < r.drifts.size(); ++i) {
                       const auto& d = r.drifts[i];
                       bool symbolic = check_characteristic(sys, m.characteristics[i].second).ok;
                       std::string line = d.name + " drift " + format_double(d.max_drift);
                       if (!symbolic) line += " (not a characteristic)";
                       if (symbolic && !d.within_tolerance) {
                         ok = false;
                         line += " exceeds " + format_double(oracle.tolerance);
                       }
                       parts.push_back(line);
                     }
                     if (r.blew_up) {
                       return skip("trajectory blew up at t = " + format_double(r.blowup_time) + "; " + join(parts));
                     }
                     return ok ? pass() : fail(join(parts));
                   }});
  return tasks;
}

// ---------------------------------------------------------------------------
// catalog

namespace {

Expr parse_scalar(const std::string& text, const char* what) {
  static const auto empty = JetSpace::create({}, {});
  try {
    Expr e = parse_expr(text, *empty);
    return e;
  } catch (const ParseError& err) {
    throw UsageError(std::string("invalid ") + what + " '" + text + "': " + err.what());
  }
}

std::vector<int> signature_of(const std::string& name, std::size_t n) {
  if (name == "lorentzian") {
    std::vector<int> s(n, 1);
    s[0] = -1;
    return s;
  }
  if (name == "euclidean") return std::vector<int>(n, 1);
  throw UsageError("unknown signature '" + name + "' (expected lorentzian or euclidean)");
}

std::vector<std::string> expand_selectors(const std::vector<std::string>& sel, std::size_t n, bool with_dilation) {
  std::vector<std::string> out;
  for (const auto& s : sel) {
    if (s == "all") {
      for (std::size_t mu = 0; mu < n; ++mu) out.push_back("translation:" + std::to_string(mu));
      for (std::size_t mu = 0; mu < n; ++mu) {
        for (std::size_t nu = mu + 1; nu < n; ++nu) {
          out.push_back("rotation:" + std::to_string(mu) + "," + std::to_string(nu));
        }
      }
      if (with_dilation) out.push_back("dilation");
    } else {
      out.push_back(s);
    }
  }
  return out;
}

std::vector<Expr> parse_eps(const std::string& text, std::size_t n) {
  std::vector<Expr> eps;
  if (text.empty()) {
    for (std::size_t a = 1; a <= n; ++a) eps.push_back(param("eps" + std::to_string(a)));
    return eps;
  }
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = text.find(',', start);
    eps.push_back(parse_scalar(text.substr(start, comma - start), "eps component"));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (eps.size() != n) {
    throw UsageError("--eps has " + std::to_string(eps.size()) + " components, the algebra has dimension " +
                     std::to_string(n));
  }
  return eps;
}

CheckOutcome from_certificate(const Certificate& c) { return c.ok ? pass() : fail(c.residual); }

std::size_t default_n(const CatalogOptions& o) {
  if (o.n) return o.n;
  return o.model == "pform" ? 4 : 2;
}

}  // namespace

std::string catalog_label(const CatalogOptions& o) {
  const std::size_t n = default_n(o);
  if (o.model == "pform") {
    std::size_t p = o.p ? o.p : n / 2;
    return "pform n=" + std::to_string(n) + " p=" + std::to_string(p) + " signature=" + o.signature +
           " a=" + parse_scalar(o.a, "a").str() + " b=" + parse_scalar(o.b, "b").str();
  }
  if (o.model == "selfdual") return "selfdual n=" + std::to_string(n);
  if (o.model == "chiral" || o.model == "chiral-abelian") {
    LieAlgebra alg = LieAlgebra::by_name(o.algebra, o.size);
    std::string eps;
    for (const auto& e : parse_eps(o.eps, alg.dim)) eps += (eps.empty() ? "" : ",") + e.str();
    std::string label = o.model + " algebra=" + alg.name + " N=" + std::to_string(alg.dim);
    if (o.model == "chiral") label += " g=" + parse_scalar(o.g, "g").str();
    return label + " eps=" + eps;
  }
  throw UsageError("unknown model '" + o.model + "' (expected pform, selfdual, chiral or chiral-abelian)");
}

std::vector<CheckTask> catalog_tasks(const CatalogOptions& o) {
  std::vector<CheckTask> tasks;
  const std::size_t n = default_n(o);

  if (o.model == "pform") {
    const std::size_t p = o.p ? o.p : n / 2;
    if (n < 2 || p < 1 || p >= n) throw UsageError("pform needs n >= 2 and 1 <= p <= n-1");
    auto model = std::make_shared<PFormModel>(signature_of(o.signature, n), p, parse_scalar(o.a, "a"),
                                              parse_scalar(o.b, "b"));
    std::vector<std::string> selectors = expand_selectors(o.xi, n, n == 2 * p);
    for (const auto& s : selectors) SpacetimeVector::from_selector(model->space(), s);

    tasks.push_back({"pform.noether_identity", [model]() {
                       if (noether_identity_check(*model)) return pass();
                       auto [t1, t2] = pform_residuals(*model);
                       std::vector<Form> r;
                       for (const Form* t : {&t1, &t2}) {
                         if (t->grade() < t->n()) r.push_back(exterior_d(*t));
                       }
                       return fail(residual_text(r));
                     }});
    for (const auto& s : selectors) {
      tasks.push_back({"pform.current(" + s + ")", [model, s]() {
                         CurrentCheck c = killing_current(*model, SpacetimeVector::from_selector(model->space(), s));
                         return c.certificate ? pass() : fail(c.residual.str());
                       }});
      tasks.push_back({"pform.proper_symmetry(" + s + ")", [model, s]() {
                         SymmetryCheck c =
                             pform_proper_symmetry(*model, SpacetimeVector::from_selector(model->space(), s));
                         return c.ok ? pass() : fail(c.residual.str());
                       }});
    }
    tasks.push_back({"pform.energy_momentum", [model]() {
                       EnergyMomentum t = energy_momentum_extract(*model);
                       if (model->n() == 2 * model->p() && !t.traceless) {
                         return fail("trace = " + t.trace.str());
                       }
                       return pass();
                     }});
    tasks.push_back({"pform.anchor", [model]() {
                       ShellComparison c = pform_anchor_verify(*model);
                       return c.equal ? pass() : fail(c.residual.str());
                     }});
    tasks.push_back({"pform.triviality", [model]() {
                       bool equal = is_zero(model->a() - model->b());
                       bool fired = triviality_witness(*model).has_value();
                       if (equal == fired) return pass();
                       return fail(equal ? "a = b but no witness was certified" : "witness fired with a != b");
                     }});
    tasks.push_back({"pform.kernel", [model]() {
                       if (is_zero(model->a()) || is_zero(model->b())) return skip("a*b = 0");
                       KernelEquations k = pform_kernel_equations(*model);
                       return k.matches_residuals ? pass()
                                                  : fail(residual_text({k.first, k.second}));
                     }});
    return tasks;
  }

  if (o.model == "selfdual") {
    if (n % 4 != 2) throw UsageError("selfdual needs n = 4k+2");
    auto model = std::make_shared<SelfDualModel>(n);
    std::vector<std::string> selectors = expand_selectors(o.xi, n, true);
    for (const auto& s : selectors) {
      SpacetimeVector xi = SpacetimeVector::from_selector(model->space(), s);
      // One task computes all certificates for this vector; the others reuse it.
      auto certs = std::make_shared<std::vector<Certificate>>();
      auto once = std::make_shared<std::once_flag>();
      auto get = [model, s, certs, once]() -> const std::vector<Certificate>& {
        std::call_once(*once, [&]() {
          *certs = selfdual_verify(*model, SpacetimeVector::from_selector(model->space(), s));
        });
        return *certs;
      };
      for (const char* name : {"selfdual.current", "selfdual.helicity", "selfdual.projection",
                               "selfdual.transformation"}) {
        std::string cert = name;
        tasks.push_back({cert + "(" + s + ")", [get, cert]() {
                           for (const auto& c : get()) {
                             if (c.name == cert) return from_certificate(c);
                           }
                           return CheckOutcome{Status::Error, "missing certificate " + cert};
                         }});
      }
    }
    return tasks;
  }

  if (o.model == "chiral" || o.model == "chiral-abelian") {
    LieAlgebra alg = LieAlgebra::by_name(o.algebra, o.size);
    std::vector<Expr> eps = parse_eps(o.eps, alg.dim);
    Expr g = o.model == "chiral" ? parse_scalar(o.g, "g") : Expr();
    auto model = std::make_shared<ChiralModel>(alg, g);
    const bool abelian = o.model == "chiral-abelian";
    auto certs = std::make_shared<std::vector<Certificate>>();
    auto once = std::make_shared<std::once_flag>();
    auto get = [model, eps, abelian, certs, once]() -> const std::vector<Certificate>& {
      std::call_once(*once, [&]() {
        *certs = abelian ? abelian_reference_verify(*model, eps) : chiral_verify(*model, eps);
      });
      return *certs;
    };
    for (const char* name : {"chiral.current", "chiral.jacobi", "chiral.symmetry", "chiral.transformation"}) {
      std::string cert = name;
      tasks.push_back({cert, [get, cert]() {
                         for (const auto& c : get()) {
                           if (c.name == cert) return from_certificate(c);
                         }
                         return CheckOutcome{Status::Error, "missing certificate " + cert};
                       }});
    }
    return tasks;
  }
  throw UsageError("unknown model '" + o.model + "' (expected pform, selfdual, chiral or chiral-abelian)");
}

// ---------------------------------------------------------------------------
// runner

namespace {

CheckRecord run_one(const CheckTask& task) {
  CheckRecord rec;
  rec.name = task.name;
  auto start = std::chrono::steady_clock::now();
  try {
    CheckOutcome o = task.run();
    rec.status = o.status;
    rec.residual = std::move(o.residual);
  } catch (const ResourceError& e) {
    rec.status = Status::Error;
    rec.residual = std::string("resource limit: ") + e.what();
  } catch (const std::exception& e) {
    rec.status = Status::Error;
    rec.residual = e.what();
  }
  rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace

ModelReport run_checks(const std::string& model, const std::vector<CheckTask>& tasks,
                       const std::vector<std::string>& selection, std::uint64_t seed, int jobs) {
  std::vector<const CheckTask*> chosen;
  if (selection.empty()) {
    for (const auto& t : tasks) chosen.push_back(&t);
  } else {
    std::set<std::string> names, groups;
    for (const auto& t : tasks) {
      names.insert(t.name);
      groups.insert(group_of(t.name));
    }
    for (const auto& s : selection) {
      if (!names.count(s) && !groups.count(s)) {
        std::vector<std::string> known(groups.begin(), groups.end());
        throw UsageError("unknown check '" + s + "' (known: " + join(known, ", ") + ")");
      }
    }
    for (const auto& t : tasks) {
      bool take = std::any_of(selection.begin(), selection.end(), [&t](const std::string& s) {
        return s == t.name || s == group_of(t.name);
      });
      if (take) chosen.push_back(&t);
    }
  }

  ModelReport report;
  report.model = model;
  report.seed = seed;
  report.checks.resize(chosen.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), chosen.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < chosen.size(); ++i) report.checks[i] = run_one(*chosen[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t i = next++; i < chosen.size(); i = next++) report.checks[i] = run_one(*chosen[i]);
      });
    }
    for (auto& th : pool) th.join();
  }
  report.sort();
  return report;
}

}  // namespace lanchor
