#include "lanchor/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#ifndef LANCHOR_VERSION
#define LANCHOR_VERSION "0.0.0"
#endif

namespace lanchor {

const char* status_name(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Skip: return "SKIP";
    case Status::Error: return "ERROR";
  }
  return "?";
}

std::string library_version() { return LANCHOR_VERSION; }

void ModelReport::sort() {
  std::stable_sort(checks.begin(), checks.end(),
                   [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
}

int ModelReport::exit_code() const {
  int code = 0;
  for (const auto& c : checks) {
    if (c.status == Status::Error) return 2;
    if (c.status == Status::Fail) code = 1;
  }
  return code;
}

std::string to_json(const ModelReport& r, bool with_timing) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["version"] = library_version();
  doc["model"] = r.model;
  ordered_json checks = ordered_json::array();
  for (const auto& c : r.checks) {
    ordered_json rec;
    rec["name"] = c.name;
    rec["status"] = status_name(c.status);
    rec["residual"] = c.residual ? ordered_json(*c.residual) : ordered_json(nullptr);
    rec["ms"] = with_timing ? ordered_json(c.ms) : ordered_json(nullptr);
    checks.push_back(std::move(rec));
  }
  doc["checks"] = std::move(checks);
  doc["seed"] = r.seed;
  return doc.dump(2) + "\n";
}

std::string to_human(const ModelReport& r) {
  std::size_t w = 5;
  for (const auto& c : r.checks) w = std::max(w, c.name.size());
  std::ostringstream os;
  os << "model: " << r.model << "\n";
  auto pad = [](std::string s, std::size_t width) {
    s.resize(std::max(s.size(), width), ' ');
    return s;
  };
  os << pad("CHECK", w) << "  " << pad("STATUS", 6) << "  " << pad("MS", 9) << "  RESIDUAL\n";
  for (const auto& c : r.checks) {
    char ms[32];
    std::snprintf(ms, sizeof ms, "%9.1f", c.ms);
    os << pad(c.name, w) << "  " << pad(status_name(c.status), 6) << "  " << ms << "  "
       << (c.residual ? *c.residual : "-") << "\n";
  }
  int counts[4] = {0, 0, 0, 0};
  for (const auto& c : r.checks) ++counts[static_cast<int>(c.status)];
  os << counts[0] << " passed, " << counts[1] << " failed, " << counts[2] << " skipped, " << counts[3]
     << " errors\n";
  return os.str();
}

}  // namespace lanchor
