#include <gtest/gtest.h>

#include "qbt/config.hpp"
#include "qbt/error.hpp"
#include "support.hpp"

using namespace qbt;

namespace {

ErrorCode parse_error(const std::string& text) {
  try {
    parse_model_config(text, ".");
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted:\n" << text;
  return ErrorCode::UsageError;
}

}  // namespace

TEST(Config, ParsesFullExample) {
  const auto c = parse_model_config(R"(lambda = -1,0 -5,2
[geometry]
kind = rect2d
grid = staggered
nx = 12
ny = 10
lx = 2
[coefficients]
a11 = 1
a11_x = 0.5
a22 = 2
a22_y = -0.5
a0 = 0.25
[boundary_op]
variant = multiplication
beta = 1
beta_y = -0.25
[boundary_op2]
variant = fourier_decay
s = 2
amplitude = 0.5
)",
                                    ".");
  EXPECT_EQ(c.kind, ModelKind::Rect2d);
  EXPECT_EQ(c.grid, GridKind::Staggered);
  EXPECT_EQ(c.nx, 12);
  EXPECT_EQ(c.ny, 10);
  EXPECT_EQ(c.lx, 2.0);
  EXPECT_EQ(c.coeffs.a11.c_x, 0.5);
  EXPECT_EQ(c.coeffs.a22.c_y, -0.5);
  EXPECT_EQ(c.coeffs.a0.c, 0.25);
  ASSERT_EQ(c.lambdas.size(), 2u);
  EXPECT_EQ(c.lambdas[1], Complex(-5.0, 2.0));
  ASSERT_TRUE(c.boundary_op);
  EXPECT_EQ(c.boundary_op->variant, BoundaryOpVariant::Multiplication);
  EXPECT_EQ(c.boundary_op->beta.c_y, -0.25);
  ASSERT_TRUE(c.boundary_op2);
  EXPECT_EQ(c.boundary_op2->variant, BoundaryOpVariant::FourierDecay);
  EXPECT_EQ(c.boundary_op2->s, 2.0);
  EXPECT_EQ(c.boundary_op2->amplitude, 0.5);
}

TEST(Config, Defaults) {
  const auto c = parse_model_config("[geometry]\nkind = sl1d\n", ".");
  EXPECT_EQ(c.kind, ModelKind::Sl1d);
  EXPECT_EQ(c.grid, GridKind::Vertex);
  EXPECT_EQ(c.coeffs.a11.c, 1.0);
  EXPECT_FALSE(c.boundary_op);
  EXPECT_TRUE(c.lambdas.empty());
}

TEST(Config, Errors) {
  EXPECT_EQ(parse_error("[geometry]\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("[geometry]\nkind = torus\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("[geometry]\nkind = sl1d\nnn = 3\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("[geometry]\nkind = sl1d\nn = 3.5\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("[geometry]\nkind = sl1d\n[extra]\nx = 1\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("lambda = 1,2,3\n[geometry]\nkind = sl1d\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("[geometry]\nkind = sl1d\n[coefficients]\na0 = abc\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("[geometry]\nkind = sl1d\n[boundary_op]\nvariant = foo\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("[geometry]\nkind = sl1d\n[boundary_op]\nvariant = dense\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("[geometry]\nkind = sl1d\n[boundary_op]\nvariant = zero\ndeclared_s = -1\n"),
            ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("[geometry\nkind = sl1d\n"), ErrorCode::ConfigError);
}

TEST(Config, ParseComplex) {
  EXPECT_EQ(parse_complex("-5,2"), Complex(-5.0, 2.0));
  EXPECT_EQ(parse_complex("4"), Complex(4.0, 0.0));
  EXPECT_EQ(parse_complex(" 1e-1 , -0.5 "), Complex(0.1, -0.5));
  EXPECT_THROW(parse_complex("x"), Error);
  EXPECT_THROW(parse_complex("1,"), Error);
}

TEST(Config, ShippedConfigsLoadAndBuild) {
  for (const char* name : {"micro.ini", "sl1d.ini", "rect2d.ini", "disk.ini", "disk_dn.ini"}) {
    const auto c = test::shipped(name);
    const auto m = build_model(c);
    EXPECT_GT(m.boundary_dim(), 0u) << name;
  }
}

TEST(Config, MissingFile) {
  try {
    load_model_config("/nonexistent/qbt.ini");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
}
