// Check suites for model files and the built-in field-model catalog.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lanchor/model_file.hpp"
#include "lanchor/numeric.hpp"
#include "lanchor/report.hpp"

namespace lanchor {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Outcome of a check body; name and timing are filled in by the runner.
struct CheckOutcome {
  Status status;
  std::optional<std::string> residual;
};

struct CheckTask {
  std::string name;
  std::function<CheckOutcome()> run;
};

/// Check groups for ODE model files, in the order documented by --help.
const std::vector<std::string>& ode_check_groups();
std::vector<CheckTask> ode_check_tasks(const ModelFile& m, const OracleOptions& oracle);

struct CatalogOptions {
  std::string model;  // pform, selfdual, chiral, chiral-abelian
  std::size_t n = 0;  // 0: model default (pform 4, selfdual 2)
  std::size_t p = 0;  // 0: n/2
  std::string signature = "lorentzian";
  std::string a = "1";
  std::string b = "0";
  std::string g = "1";
  std::vector<std::string> xi{"all"};
  std::string algebra = "su2";
  std::size_t size = 3;  // multiplet size for the abelian algebra
  std::string eps;       // comma-separated components; default symbolic eps1..epsN
};

std::string catalog_label(const CatalogOptions& o);
std::vector<CheckTask> catalog_tasks(const CatalogOptions& o);

/// Runs the selected tasks (all when `selection` is empty). A selection
/// entry matches a task by full name or by group (the part before ':' or
/// '('). Unknown entries raise UsageError. `jobs` > 1 runs checks on
/// worker threads; the report is sorted by name either way.
ModelReport run_checks(const std::string& model, const std::vector<CheckTask>& tasks,
                       const std::vector<std::string>& selection, std::uint64_t seed, int jobs = 1);

/// The frozen convention sheet printed by `lanchor --convention`.
const char* convention_sheet();

}  // namespace lanchor
