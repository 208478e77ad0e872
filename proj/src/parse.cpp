#include "lanchor/parse.hpp"

#include <cctype>

namespace lanchor {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

namespace {

class Parser {
 public:
  Parser(const std::string& text, const JetSpace& space, int line, int column)
      : s_(text), space_(space), line_(line), col0_(column) {}

  Expr run() {
    skip_ws();
    if (pos_ == s_.size()) fail("empty expression");
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
    int line = line_;
    int col = col0_;
    for (std::size_t i = 0; i < at && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(line, col, msg);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) {
      if (pos_ == s_.size()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  Expr parse_sum() {
    Expr acc = parse_product();
    for (;;) {
      if (peek('+')) {
        ++pos_;
        acc = acc + parse_product();
      } else if (peek('-')) {
        ++pos_;
        acc = acc - parse_product();
      } else {
        return acc;
      }
    }
  }

  Expr parse_product() {
    Expr acc = parse_unary();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        acc = acc * parse_unary();
      } else if (peek('/')) {
        ++pos_;
        std::size_t at = pos_;
        Expr d = parse_unary();
        if (d.is_zero()) fail_at(at, "division by zero");
        acc = acc / d;
      } else {
        return acc;
      }
    }
  }

  Expr parse_unary() {
    if (peek('-')) {
      ++pos_;
      return -parse_unary();
    }
    if (peek('+')) {
      ++pos_;
      return parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    std::size_t base_at = pos_;
    Expr base = parse_atom();
    if (!peek('^')) return base;
    ++pos_;
    skip_ws();
    std::size_t at = pos_;
    Expr e = parse_unary();
    auto c = e.constant_value();
    if (!c || c->get_den() != 1) fail_at(at, "exponent must be an integer constant");
    if (!c->get_num().fits_sint_p()) fail_at(at, "exponent out of range");
    int k = static_cast<int>(c->get_num().get_si());
    if (k < 0 && base.is_zero()) fail_at(base_at, "division by zero");
    return pow(base, k);
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ == s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ < s_.size() && s_[pos_] == '.') fail("decimal literals are not supported; write p/q");
      return Expr(Rational(mpz_class(s_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
    fail(std::string("unexpected '") + c + "'");
  }

  std::string read_alnum() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  Expr parse_name() {
    std::size_t start = pos_;
    std::string name = read_alnum();
    if (pos_ < s_.size() && s_[pos_] == '_') {
      ++pos_;
      std::size_t suffix_at = pos_;
      std::string suffix = read_alnum();
      auto field = space_.find_field(name);
      if (!field) fail_at(start, "'" + name + "' is not a field, so it has no derivatives");
      if (suffix.empty()) fail_at(suffix_at, "expected derivative variables after '_'");
      std::vector<int> counts(space_.num_indep(), 0);
      std::size_t i = 0;
      while (i < suffix.size()) {
        // Longest independent-variable name matching at position i.
        std::size_t best_len = 0, best = 0;
        for (std::size_t mu = 0; mu < space_.num_indep(); ++mu) {
          const auto& v = space_.indep_name(mu);
          if (v.size() > best_len && suffix.compare(i, v.size(), v) == 0) {
            best_len = v.size();
            best = mu;
          }
        }
        if (best_len == 0) {
          fail_at(suffix_at + i, "'" + suffix.substr(i) + "' is not an independent variable");
        }
        ++counts[best];
        i += best_len;
      }
      return space_.jet(*field, MultiIndex(counts));
    }

    static const std::pair<const char*, Func> funcs[] = {
        {"sin", Func::Sin}, {"cos", Func::Cos}, {"exp", Func::Exp}, {"log", Func::Log}};
    for (const auto& [fname, f] : funcs) {
      if (name == fname) {
        if (!peek('(')) fail(std::string("expected '(' after ") + fname);
        ++pos_;
        std::size_t at = pos_;
        Expr arg = parse_sum();
        expect(')');
        try {
          return apply_func(f, arg);
        } catch (const std::domain_error& e) {
          fail_at(at, e.what());
        }
      }
    }
    if (auto f = space_.find_field(name)) return space_.jet(*f);
    if (auto mu = space_.find_indep(name)) return space_.indep(*mu);
    return param(name);
  }

  const std::string& s_;
  const JetSpace& space_;
  int line_;
  int col0_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text, const JetSpace& space, int line, int column) {
  return Parser(text, space, line, column).run();
}

}  // namespace lanchor
