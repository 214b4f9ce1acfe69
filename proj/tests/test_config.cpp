#include <gtest/gtest.h>

#include <sstream>

#include "fockspec/config.hpp"

using namespace fockspec;

namespace {

const char* kCubic = R"(# simple cubic
eps.coeffs = [[1,0,0,-0.5],[0,1,0,-0.5],[0,0,1,-0.5]]
eps.zero = 0
c = 2.5
u0 = -0.1
v.kind = "cos_poly"
v.params = [1, -1]
grid.n_per_axis = 6
)";

ModelConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_model_config(in);
}

}  // namespace

TEST(Config, ParsesModel) {
  const ModelConfig cfg = parse(kCubic);
  const ModelSpec m = cfg.model();
  EXPECT_EQ(m.c(), 2.5);
  EXPECT_EQ(m.u0(), -0.1);
  EXPECT_EQ(m.form_factor().name(), "cos_poly");
  EXPECT_EQ(cfg.grid.n_per_axis, 6);
  EXPECT_NEAR(m.epsilon(Point3{1.0, 0, 0}), 1.0 - std::cos(1.0), 1e-14);
}

TEST(Config, RejectsUnknownKey) { EXPECT_THROW(parse(std::string(kCubic) + "grid.gradng = 3\n"), ConfigError); }

TEST(Config, RejectsDuplicateKey) { EXPECT_THROW(parse(std::string(kCubic) + "c = 1\n"), ConfigError); }

TEST(Config, RejectsBadJson) { EXPECT_THROW(parse("eps.coeffs = [[1,0,0,-0.5]\n"), ConfigError); }

TEST(Config, RejectsPositiveCoefficient) {
  EXPECT_THROW(parse("eps.coeffs = [[1,0,0,0.5],[0,1,0,-0.5],[0,0,1,-0.5]]\n"), ConfigError);
}

TEST(Config, RequiresCoefficients) { EXPECT_THROW(parse("c = 1\n"), ConfigError); }

TEST(Config, HashIsStableAndSensitive) {
  const ModelSpec a = parse(kCubic).model();
  const ModelSpec b = parse(kCubic).model();
  EXPECT_EQ(model_hash(a), model_hash(b));
  EXPECT_NE(model_hash(a), model_hash(a.with_c(2.5000000001)));
  EXPECT_EQ(model_hash(a).size(), 16u);
}

TEST(Config, Fnv1aKnownVector) { EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c"); }

TEST(Config, SeventeenDigitFormatting) { EXPECT_EQ(format_g17(0.1), "0.10000000000000001"); }
