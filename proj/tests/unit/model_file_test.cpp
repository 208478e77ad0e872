#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "lanchor/model_file.hpp"

namespace lanchor {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ModelFile, OscillatorFixture) {
  ModelFile m = load_model(LANCHOR_TEST_DATA "/oscillator.model");
  ASSERT_EQ(m.system.n(), 2u);
  EXPECT_EQ(m.system.v[0], -m.system.x(1));
  EXPECT_EQ(m.system.v[1], m.system.x(0));
  ASSERT_TRUE(m.anchor.has_value());
  EXPECT_EQ((*m.anchor)(0, 1), Expr(1));
  ASSERT_EQ(m.characteristics.size(), 1u);
  EXPECT_EQ(m.characteristics[0].first, "f");
  ASSERT_EQ(m.symmetries.size(), 1u);
  EXPECT_FALSE(m.hamiltonian.has_value());
}

TEST(ModelFile, CanonicalFilesRoundTrip) {
  for (const char* name : {"oscillator.model", "lie_poisson.model", "hamiltonian.model"}) {
    std::string text = slurp(std::string(LANCHOR_TEST_DATA "/") + name);
    EXPECT_EQ(print_model(parse_model(text)), text) << name;
  }
}

TEST(ModelFile, PrintParseIsStable) {
  std::string messy = "[ode]\n  n=2\nv = [ x2 , -x1 ]\n# comment\n\n[anchor]\nalpha_1_2 = 2*t\n[characteristic]\nf = x1*x1\n";
  ModelFile m = parse_model(messy);
  std::string canon = print_model(m);
  EXPECT_EQ(print_model(parse_model(canon)), canon);
  EXPECT_EQ((*m.anchor)(0, 1), 2 * m.system.t());
}

void expect_error(const std::string& text, const std::string& fragment) {
  try {
    parse_model(text);
    FAIL() << "no error for: " << text;
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(ModelFile, Errors) {
  expect_error("", "missing [ode] section");
  expect_error("[anchor]\nalpha_12 = 1\n", "missing [ode] section");
  expect_error("[ode]\nn = 2\nv = [x1 +, x2]\n", "line 3");
  expect_error("[ode]\nn = 2\nv = [x1]\n", "line 3");
  expect_error("[ode]\nn = 2\nv = [x3, x1]\n", "dimension mismatch");
  expect_error("[odes]\nn = 2\n", "unknown section");
  expect_error("[ode]\nn = 2\nv = [x1, x2]\n[ode]\nn = 2\n", "duplicate");
  expect_error("[ode]\nn = 2\nv = [x1_t, x2]\n", "line 3");
  expect_error("[ode]\nn = 2\nv = [x1, x2]\n[anchor]\nbeta = 1\n", "line 5");
  expect_error("[ode]\nn = 2\nv = [x1, x2]\n[hamiltonian]\nK = x1\n", "line 5");
  expect_error("[ode]\nn = 2\nv = [x1, x2]\n[anchor]\nalpha_12 1\n", "line 5");
}

TEST(ModelFile, MissingFile) { EXPECT_THROW(load_model("/nonexistent/file.model"), ModelFileError); }

}  // namespace
}  // namespace lanchor
