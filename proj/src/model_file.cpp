#include "lanchor/model_file.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

namespace lanchor {

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line;
  int key_col;
  int value_col;
};

struct Section {
  std::string name;
  int line;
  std::vector<Entry> entries;
};

const char* const kSections[] = {"ode", "anchor", "characteristic", "symmetry", "hamiltonian"};

std::string trim_right(const std::string& s) {
  std::size_t e = s.size();
  while (e > 0 && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(0, e);
}

std::size_t skip_space(const std::string& s, std::size_t i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return i;
}

bool is_identifier(const std::string& s) {
  static const std::regex re("[A-Za-z][A-Za-z0-9_]*");
  return std::regex_match(s, re);
}

std::vector<Section> split_sections(const std::string& text) {
  std::vector<Section> out;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string s = trim_right(raw.substr(0, raw.find('#')));
    std::size_t i = skip_space(s, 0);
    if (i == s.size()) continue;
    if (s[i] == '[') {
      std::size_t close = s.find(']', i);
      if (close == std::string::npos) throw ParseError(line, static_cast<int>(s.size()) + 1, "expected ']'");
      if (skip_space(s, close + 1) != s.size()) {
        throw ParseError(line, static_cast<int>(close) + 2, "unexpected text after section header");
      }
      std::string name = s.substr(i + 1, close - i - 1);
      bool known = false;
      for (const char* k : kSections) known |= name == k;
      if (!known) throw ParseError(line, static_cast<int>(i) + 1, "unknown section [" + name + "]");
      for (const auto& sec : out) {
        if (sec.name == name) throw ParseError(line, static_cast<int>(i) + 1, "duplicate section [" + name + "]");
      }
      out.push_back({name, line, {}});
      continue;
    }
    if (out.empty()) throw ParseError(line, static_cast<int>(i) + 1, "entry outside of any section");
    std::size_t eq = s.find('=', i);
    if (eq == std::string::npos) throw ParseError(line, static_cast<int>(s.size()) + 1, "expected '='");
    std::string key = trim_right(s.substr(i, eq - i));
    if (!is_identifier(key)) throw ParseError(line, static_cast<int>(i) + 1, "invalid key '" + key + "'");
    std::size_t vstart = skip_space(s, eq + 1);
    if (vstart == s.size()) throw ParseError(line, static_cast<int>(s.size()) + 1, "missing value for '" + key + "'");
    for (const auto& e : out.back().entries) {
      if (e.key == key) throw ParseError(line, static_cast<int>(i) + 1, "duplicate key '" + key + "'");
    }
    out.back().entries.push_back(
        {key, s.substr(vstart), line, static_cast<int>(i) + 1, static_cast<int>(vstart) + 1});
  }
  return out;
}

class Builder {
 public:
  explicit Builder(std::shared_ptr<const JetSpace> space) : space_(std::move(space)) {}

  Expr expr(const std::string& text, int line, int col) const {
    Expr e = parse_expr(text, *space_, line, col);
    check_dimension(e, text, line, col);
    return e;
  }

  std::vector<Expr> vec(const std::string& text, int line, int col) const {
    std::size_t i = skip_space(text, 0);
    if (i >= text.size() || text[i] != '[') throw ParseError(line, col + static_cast<int>(i), "expected '['");
    std::size_t close = text.rfind(']');
    if (close == std::string::npos || close < i) {
      throw ParseError(line, col + static_cast<int>(text.size()), "expected ']'");
    }
    if (skip_space(text, close + 1) != text.size()) {
      throw ParseError(line, col + static_cast<int>(close) + 1, "unexpected text after ']'");
    }
    std::vector<Expr> out;
    std::size_t start = i + 1;
    int depth = 0;
    if (skip_space(text, start) == close) return out;
    for (std::size_t k = start; k <= close; ++k) {
      char c = text[k];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if ((c == ',' && depth == 0) || k == close) {
        std::string piece = text.substr(start, k - start);
        std::size_t lead = skip_space(piece, 0);
        if (lead == piece.size()) throw ParseError(line, col + static_cast<int>(k), "empty vector entry");
        out.push_back(expr(piece, line, col + static_cast<int>(start)));
        start = k + 1;
      }
    }
    return out;
  }

 private:
  void check_dimension(const Expr& e, const std::string& text, int line, int col) const {
    static const std::regex coord("x([0-9]+)");
    for (Atom a : symbols_of(e)) {
      std::smatch m;
      if (a->kind == AtomKind::Param && std::regex_match(a->name, m, coord)) {
        std::size_t at = text.find(a->name);
        throw ParseError(line, col + static_cast<int>(at == std::string::npos ? 0 : at),
                         "dimension mismatch: " + a->name + " is not a coordinate of a system with n = " +
                             std::to_string(space_->num_fields()));
      }
    }
  }

  std::shared_ptr<const JetSpace> space_;
};

}  // namespace

ModelFile parse_model(const std::string& text) {
  std::vector<Section> sections = split_sections(text);
  auto find = [&](const std::string& name) -> const Section* {
    for (const auto& s : sections) {
      if (s.name == name) return &s;
    }
    return nullptr;
  };
  const Section* ode = find("ode");
  if (!ode) throw ModelFileError("missing [ode] section");

  const Entry* n_entry = nullptr;
  const Entry* v_entry = nullptr;
  for (const auto& e : ode->entries) {
    if (e.key == "n") {
      n_entry = &e;
    } else if (e.key == "v") {
      v_entry = &e;
    } else {
      throw ParseError(e.line, e.key_col, "unknown key '" + e.key + "' in [ode] (expected n or v)");
    }
  }
  if (!n_entry) throw ParseError(ode->line, 1, "[ode] section is missing n");
  if (!v_entry) throw ParseError(ode->line, 1, "[ode] section is missing v");
  static const std::regex digits("[0-9]{1,4}");
  if (!std::regex_match(n_entry->value, digits) || std::stoi(n_entry->value) < 1) {
    throw ParseError(n_entry->line, n_entry->value_col, "n must be a positive integer");
  }
  const auto n = static_cast<std::size_t>(std::stoi(n_entry->value));
  auto space = ode_space(n);
  Builder b(space);

  std::vector<Expr> v = b.vec(v_entry->value, v_entry->line, v_entry->value_col);
  if (v.size() != n) {
    throw ParseError(v_entry->line, v_entry->value_col,
                     "dimension mismatch: v has " + std::to_string(v.size()) + " entries but n = " +
                         std::to_string(n));
  }
  for (const auto& e : v) {
    if (max_jet_order(e) > 0) {
      throw ParseError(v_entry->line, v_entry->value_col, "v must not contain derivatives (normal form)");
    }
  }
  ModelFile m{OdeSystem(space, std::move(v)), std::nullopt, {}, {}, std::nullopt};

  auto zeroth = [](const Entry& e, const Expr& x) {
    if (max_jet_order(x) > 0) {
      throw ParseError(e.line, e.value_col, "derivative symbols are not allowed here; use functions of t and x");
    }
  };

  if (const Section* s = find("anchor")) {
    Bivector alpha(n);
    static const std::regex key_short("alpha_([0-9])([0-9])");
    static const std::regex key_long("alpha_([0-9]+)_([0-9]+)");
    for (const auto& e : s->entries) {
      std::smatch mm;
      if (!std::regex_match(e.key, mm, key_short) && !std::regex_match(e.key, mm, key_long)) {
        throw ParseError(e.line, e.key_col, "anchor keys are alpha_ij with 1 <= i < j <= n");
      }
      std::size_t i = std::stoul(mm[1].str()), j = std::stoul(mm[2].str());
      if (i < 1 || j > n || i >= j) {
        throw ParseError(e.line, e.key_col,
                         "anchor key " + e.key + " needs 1 <= i < j <= n (n = " + std::to_string(n) + ")");
      }
      if (!alpha(i - 1, j - 1).is_zero()) throw ParseError(e.line, e.key_col, "duplicate anchor entry " + e.key);
      Expr x = b.expr(e.value, e.line, e.value_col);
      zeroth(e, x);
      alpha.set(i - 1, j - 1, x);
    }
    m.anchor = alpha;
  }
  if (const Section* s = find("characteristic")) {
    for (const auto& e : s->entries) {
      Expr x = b.expr(e.value, e.line, e.value_col);
      zeroth(e, x);
      m.characteristics.emplace_back(e.key, x);
    }
  }
  if (const Section* s = find("symmetry")) {
    for (const auto& e : s->entries) {
      std::vector<Expr> w = b.vec(e.value, e.line, e.value_col);
      if (w.size() != n) {
        throw ParseError(e.line, e.value_col,
                         "dimension mismatch: symmetry has " + std::to_string(w.size()) + " entries but n = " +
                             std::to_string(n));
      }
      for (const auto& x : w) zeroth(e, x);
      m.symmetries.emplace_back(e.key, std::move(w));
    }
  }
  if (const Section* s = find("hamiltonian")) {
    for (const auto& e : s->entries) {
      if (e.key != "H") throw ParseError(e.line, e.key_col, "[hamiltonian] accepts only H");
      Expr x = b.expr(e.value, e.line, e.value_col);
      zeroth(e, x);
      m.hamiltonian = x;
    }
    if (!m.hamiltonian) throw ParseError(s->line, 1, "[hamiltonian] section is missing H");
  }
  return m;
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFileError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string print_model(const ModelFile& m) {
  std::ostringstream os;
  auto vec = [](const std::vector<Expr>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].str();
    return s + "]";
  };
  const std::size_t n = m.system.n();
  os << "[ode]\nn = " << n << "\nv = " << vec(m.system.v) << "\n";
  if (m.anchor) {
    os << "\n[anchor]\n";
    for (const auto& [ij, e] : m.anchor->entries()) {
      os << "alpha_" << ij.first + 1 << (n >= 10 ? "_" : "") << ij.second + 1 << " = " << e.str() << "\n";
    }
  }
  if (!m.characteristics.empty()) {
    os << "\n[characteristic]\n";
    for (const auto& [name, f] : m.characteristics) os << name << " = " << f.str() << "\n";
  }
  if (!m.symmetries.empty()) {
    os << "\n[symmetry]\n";
    for (const auto& [name, w] : m.symmetries) os << name << " = " << vec(w) << "\n";
  }
  if (m.hamiltonian) os << "\n[hamiltonian]\nH = " << m.hamiltonian->str() << "\n";
  return os.str();
}

}  // namespace lanchor
