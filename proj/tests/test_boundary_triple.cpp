#include <gtest/gtest.h>

#include <random>

#include "qbt/error.hpp"
#include "qbt/models.hpp"
#include "qbt/triple.hpp"
#include "support.hpp"

using namespace qbt;

namespace {

ModelConfig rect(int cells) {
  ModelConfig c;
  c.kind = ModelKind::Rect2d;
  c.nx = cells;
  c.ny = cells;
  c.coeffs.a11 = {1.0, 0.5, 0.0};
  c.coeffs.a22 = {2.0, 0.0, -0.5};
  c.coeffs.a0 = {0.25};
  return c;
}

// B = W⁻¹H with H Hermitian is W-self-adjoint.
RobinParameter random_robin(const WeightedSpace& g, std::mt19937_64& rng) {
  const CMatrix h = test::random_hermitian(g.dim(), rng);
  RealVector inv(g.dim());
  for (std::size_t i = 0; i < g.dim(); ++i) inv[i] = 1.0 / g.weight(i);
  return make_robin(scale_rows(inv, h), g);
}

}  // namespace

TEST(Micro, Realizations) {
  const auto tr = test::micro();
  const CMatrix ad = restrict_to_kernel(tr, TraceKernel::Gamma1);
  const CMatrix an = restrict_to_kernel(tr, TraceKernel::Gamma0);
  const CMatrix ab = restrict_to_kernel(tr, test::robin(tr, CMatrix::identity(2)));
  ASSERT_EQ(ad.rows(), 1u);
  EXPECT_NEAR(std::abs(ad(0, 0) - 8.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(an(0, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(ab(0, 0) + 8.0), 0.0, 1e-12);
}

TEST(Micro, GammaField) {
  const auto tr = test::micro();
  const CMatrix g = gamma(tr, 4.0);
  ASSERT_EQ(g.rows(), 1u);
  ASSERT_EQ(g.cols(), 2u);
  EXPECT_LE(max_abs_diff(g, CMatrix{{-0.5, -0.5}}), 1e-13);
  EXPECT_LE(max_abs_diff(gamma_star(tr, 4.0), CMatrix{{-0.25}, {-0.25}}), 1e-13);
}

TEST(Micro, WeylAndKrein) {
  const auto tr = test::micro();
  EXPECT_LE(max_abs_diff(weyl(tr, 4.0), CMatrix{{0, -0.5}, {-0.5, 0}}), 1e-12);
  EXPECT_LE(std::abs(krein_dn(tr, 4.0)(0, 0) + 0.5), 1e-12);
  const auto b = test::robin(tr, CMatrix::identity(2));
  EXPECT_LE(std::abs(krein_robin(tr, b, 4.0)(0, 0) - 1.0 / 6.0), 1e-12);
  EXPECT_LE(std::abs(krein_robin(tr, b, 4.0, KreinForm::Right)(0, 0) - 1.0 / 6.0), 1e-12);
}

TEST(Micro, WeylAtOtherPoints) {
  // M(λ) = (1/2)I − (2/λ)·ones
  const auto tr = test::micro();
  for (Complex lam : {Complex(1.0), Complex(-3.0), Complex(2.0, 1.5)}) {
    const Complex off = -2.0 / lam;
    EXPECT_LE(max_abs_diff(weyl(tr, lam), CMatrix{{0.5 + off, off}, {off, 0.5 + off}}), 1e-12);
  }
}

TEST(Micro, SpectrumOfA0) {
  const auto tr = test::micro();
  try {
    weyl(tr, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LambdaInSpectrum);
  }
}

TEST(Green, MicroAndRectPass) {
  EXPECT_TRUE(check_green_identity(test::micro(), 32, 1e-12).pass);
  EXPECT_TRUE(check_green_identity(build_rect2d(rect(8)), 32, 1e-12).pass);
}

TEST(Green, CorruptedTraceFails) {
  auto cfg = test::micro_config();
  cfg.gamma1_scale = 2.0;
  const auto rep = check_green_identity(build_sl1d(cfg), 32, 1e-12);
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.max_residual, 1e-3 * rep.scale);
}

TEST(Robin, RejectsNonSelfAdjoint) {
  const auto tr = test::micro();
  try {
    make_robin(CMatrix{{0, 1}, {0, 0}}, tr.boundary);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSelfAdjoint);
  }
}

TEST(Robin, LeftAndRightFormsAgree) {
  const auto tr = build_rect2d(rect(14));
  ASSERT_GE(tr.boundary_dim(), 50u);
  std::mt19937_64 rng(21);
  const auto b = random_robin(tr.boundary, rng);
  for (Complex lam : {Complex(-1.0), Complex(-5.0, 2.0)}) {
    const CMatrix l = krein_robin(tr, b, lam, KreinForm::Left);
    const CMatrix r = krein_robin(tr, b, lam, KreinForm::Right);
    EXPECT_LE(max_abs_diff(l, r), 1e-10 * l.max_abs());
  }
}

TEST(Robin, RealizationIsSelfAdjoint) {
  const auto tr = build_rect2d(rect(10));
  std::mt19937_64 rng(22);
  const auto b = random_robin(tr.boundary, rng);
  EXPECT_LE(self_adjoint_defect(restrict_to_kernel(tr, b), tr.interior), 1e-11);
}

TEST(Weyl, Symmetry) {
  const auto tr = build_rect2d(rect(10));
  const Complex lam(-2.0, 1.25);
  const CMatrix m = weyl(tr, lam);
  const CMatrix mc = weyl(tr, std::conj(lam));
  const CMatrix madj = weighted_adjoint(mc, tr.boundary, tr.boundary);
  EXPECT_LE(max_abs_diff(m, madj), 1e-10 * m.max_abs());
}

TEST(Weyl, DifferenceIdentity) {
  const auto tr = build_rect2d(rect(10));
  const Complex lam(-2.0, 1.25), mu(-0.5, -3.0);
  const CMatrix lhs = weyl(tr, lam) - weighted_adjoint(weyl(tr, mu), tr.boundary, tr.boundary);
  const CMatrix gmu = weighted_adjoint(gamma(tr, mu), tr.boundary, tr.interior);
  const CMatrix rhs = (lam - std::conj(mu)) * (gmu * gamma(tr, lam));
  EXPECT_LE(max_abs_diff(lhs, rhs), 1e-10 * std::max(1.0, lhs.max_abs()));
}

TEST(Krein, DirichletNeumannOnRect) {
  const auto tr = build_rect2d(rect(10));
  const Realization an(restrict_to_kernel(tr, TraceKernel::Gamma0), tr.interior);
  const Realization ad(restrict_to_kernel(tr, TraceKernel::Gamma1), tr.interior);
  const Complex lam(-5.0, 2.0);
  const CMatrix direct = an.resolvent_power(lam, 1) - ad.resolvent_power(lam, 1);
  EXPECT_LE(max_abs_diff(krein_dn(tr, lam), direct), 1e-10 * direct.max_abs());
}

TEST(Triple, ConormalTraceIsSurjective) {
  ModelConfig d;
  d.kind = ModelKind::DiskModes;
  d.mode_max = 2;
  d.nr = 6;
  for (const auto& tr : {test::micro(), build_rect2d(rect(6)), build_model(d).merged()}) {
    EXPECT_EQ(numerical_rank(tr.gamma0), tr.boundary_dim());
  }
}

TEST(Triple, DirectSumOfBlocks) {
  const auto a = test::micro();
  const auto b = build_rect2d(rect(4));
  const std::vector<QuasiTriple> parts{a, b};
  const auto s = direct_sum(parts);
  EXPECT_EQ(s.boundary_dim(), a.boundary_dim() + b.boundary_dim());
  EXPECT_EQ(s.interior_dim(), a.interior_dim() + b.interior_dim());
  EXPECT_TRUE(check_green_identity(s, 8, 1e-12).pass);
}

TEST(Triple, ValidateCatchesShapes) {
  auto tr = test::micro();
  tr.gamma1 = CMatrix(3, tr.dom_dim());
  EXPECT_THROW(tr.validate(), Error);
}
