// Check records and their human / JSON renderings.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lanchor {

enum class Status { Pass, Fail, Skip, Error };
const char* status_name(Status s);

struct CheckRecord {
  std::string name;
  Status status = Status::Pass;
  std::optional<std::string> residual;  // failure residual, skip reason or error message
  double ms = 0.0;
};

struct ModelReport {
  std::string model;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> checks;  // kept sorted by name

  void sort();
  /// 0 when every check passed or was skipped, 2 if any ERROR, else 1.
  int exit_code() const;
};

std::string library_version();

/// One JSON document {version, model, checks: [{name, status, residual, ms}], seed}.
/// `ms` is null unless with_timing is set, so reports are reproducible.
std::string to_json(const ModelReport& r, bool with_timing = false);
/// Aligned columns: name, status, time, residual.
std::string to_human(const ModelReport& r);

}  // namespace lanchor
