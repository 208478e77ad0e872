#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "lanchor/checks.hpp"
#include "lanchor/model_file.hpp"
#include "lanchor/numeric.hpp"
#include "lanchor/report.hpp"

namespace {

using namespace lanchor;

struct Output {
  bool json = false;
  bool timing = false;
};

int emit(const ModelReport& r, const Output& out) {
  std::cout << (out.json ? to_json(r, out.timing) : to_human(r));
  return r.exit_code();
}

std::vector<std::string> split_commas(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

std::string drift_text(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "drift %.3e", d);
  return buf;
}

ModelReport oracle_report(const std::string& path, const ModelFile& m, const OracleOptions& opt) {
  ModelReport r;
  r.model = path;
  r.seed = opt.seed;
  if (m.characteristics.empty()) throw UsageError("model has no [characteristic] section");
  OracleResult res = numeric_oracle(m.system, m.characteristics, opt);
  for (std::size_t i = 0; i < res.drifts.size(); ++i) {
    const DriftReport& d = res.drifts[i];
    CheckRecord rec;
    rec.name = "drift:" + d.name;
    std::string text = drift_text(d.max_drift);
    bool symbolic = check_characteristic(m.system, m.characteristics[i].second).ok;
    if (res.blew_up) {
      rec.status = Status::Skip;
      char buf[96];
      std::snprintf(buf, sizeof buf, "; trajectory blew up at t = %.3e", res.blowup_time);
      text += buf;
    } else if (!symbolic) {
      rec.status = Status::Skip;
      text += " (not a characteristic)";
    } else {
      rec.status = d.within_tolerance ? Status::Pass : Status::Fail;
    }
    rec.residual = text;
    r.checks.push_back(std::move(rec));
  }
  r.sort();
  return r;
}

int run_search(const std::string& path, const ModelFile& m, int degree, const Output& out) {
  CharacteristicSearch s = search_characteristics(m.system, degree);
  if (out.json) {
    nlohmann::ordered_json j;
    j["version"] = library_version();
    j["model"] = path;
    j["degree"] = degree;
    j["basis"] = nlohmann::ordered_json::array();
    for (const auto& e : s.basis) j["basis"].push_back(e.str());
    j["diagnostic"] = s.diagnostic;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "characteristics of degree <= " << degree << " for " << path << ": " << s.basis.size() << "\n";
    for (const auto& e : s.basis) std::cout << "  " << e.str() << "\n";
    if (!s.diagnostic.empty()) std::cout << s.diagnostic << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lanchor: symbolic checks for Lagrange anchors of ODE and field models"};
  app.set_version_flag("--version", library_version());
  app.require_subcommand(0, 1);

  Output out;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool convention = false;
  app.add_flag("--convention", convention, "Print the sign and Hodge convention sheet");
  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--json", out.json, "Machine-readable JSON report");
    sub->add_flag("--timing", out.timing, "Include per-check wall time in the JSON report");
    sub->add_option("--seed", seed, "Seed for random evaluation and initial points");
    sub->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::PositiveNumber);
  };

  std::string model_path;
  std::vector<std::string> only;
  OracleOptions oracle;
  auto* check = app.add_subcommand("check", "Run the check suite on a model file");
  check->add_option("model", model_path, "Model file")->required();
  check->add_option("--only", only, "Comma-separated checks or groups")->delimiter(',');
  check->add_option("--t-end", oracle.t_end, "Oracle integration time")->check(CLI::PositiveNumber);
  check->add_option("--step", oracle.step, "Oracle step")->check(CLI::PositiveNumber);
  check->add_option("--tolerance", oracle.tolerance, "Oracle drift tolerance")->check(CLI::PositiveNumber);
  add_common(check);

  CatalogOptions cat;
  auto* catalog = app.add_subcommand("catalog", "Run the certificates of a built-in field model");
  catalog->add_option("model", cat.model, "pform, selfdual, chiral or chiral-abelian")
      ->required()
      ->check(CLI::IsMember({"pform", "selfdual", "chiral", "chiral-abelian"}));
  catalog->add_option("--n", cat.n, "Spacetime dimension");
  catalog->add_option("--p", cat.p, "Form degree (pform)");
  catalog->add_option("--signature", cat.signature, "lorentzian or euclidean (pform)");
  catalog->add_option("-a,--a", cat.a, "Anchor coefficient a (pform)");
  catalog->add_option("-b,--b", cat.b, "Anchor coefficient b (pform)");
  catalog->add_option("-g,--g", cat.g, "Coupling constant (chiral)");
  catalog->add_option("--xi", cat.xi, "Vector selectors: translation:MU, rotation:MU,NU, dilation, all");
  catalog->add_option("--algebra", cat.algebra, "su2 or abelian (chiral)");
  catalog->add_option("--size", cat.size, "Number of copies for the abelian algebra");
  catalog->add_option("--eps", cat.eps, "Comma-separated transformation parameters (chiral)");
  catalog->add_option("--only", only, "Comma-separated checks or groups")->delimiter(',');
  add_common(catalog);

  auto* oracle_cmd = app.add_subcommand("oracle", "Integrate the model numerically and report invariant drift");
  oracle_cmd->add_option("model", model_path, "Model file")->required();
  oracle_cmd->add_option("--t-end", oracle.t_end, "Integration time")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--step", oracle.step, "RK4 step")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--points", oracle.points, "Number of initial points")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--tolerance", oracle.tolerance, "Drift tolerance")->check(CLI::PositiveNumber);
  add_common(oracle_cmd);

  int degree = 2;
  auto* search = app.add_subcommand("search", "Find polynomial characteristics up to a degree");
  search->add_option("model", model_path, "Model file")->required();
  search->add_option("--degree", degree, "Maximum total degree in (t, x)")
      ->check(CLI::Range(1, kMaxSearchDegree));
  add_common(search);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (convention) {
      std::cout << convention_sheet();
      return 0;
    }
    oracle.seed = seed;
    if (check->parsed()) {
      ModelFile m = load_model(model_path);
      auto tasks = ode_check_tasks(m, oracle);
      return emit(run_checks(model_path, tasks, split_commas(only), seed, jobs), out);
    }
    if (catalog->parsed()) {
      std::string label = catalog_label(cat);
      auto tasks = catalog_tasks(cat);
      return emit(run_checks(label, tasks, split_commas(only), seed, jobs), out);
    }
    if (oracle_cmd->parsed()) {
      ModelFile m = load_model(model_path);
      return emit(oracle_report(model_path, m, oracle), out);
    }
    if (search->parsed()) {
      return run_search(model_path, load_model(model_path), degree, out);
    }
    std::cout << app.help();
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "lanchor: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "lanchor: error: " << e.what() << "\n";
    return 2;
  }
}
