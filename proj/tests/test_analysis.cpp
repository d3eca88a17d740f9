#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qbt/analysis.hpp"
#include "qbt/error.hpp"
#include "support.hpp"

using namespace qbt;

namespace {

ModelConfig with_robin(ModelConfig c, AffineField b1, std::optional<AffineField> b2 = std::nullopt) {
  BoundaryOpSpec s;
  s.variant = BoundaryOpVariant::Multiplication;
  s.beta = b1;
  c.boundary_op = s;
  if (b2) {
    s.beta = *b2;
    c.boundary_op2 = s;
  }
  return c;
}

ModelConfig small_rect() {
  ModelConfig c;
  c.kind = ModelKind::Rect2d;
  c.nx = c.ny = 8;
  c.coeffs.a11 = {1.0, 0.5};
  c.coeffs.a0 = {0.25};
  return c;
}

ModelConfig small_disk(int mode_max = 8, int nr = 12) {
  ModelConfig c;
  c.kind = ModelKind::DiskModes;
  c.mode_max = mode_max;
  c.nr = nr;
  return c;
}

}  // namespace

TEST(Pair, Parse) {
  EXPECT_EQ(parse_pair("dn"), Pair::DN);
  EXPECT_EQ(parse_pair("rr"), Pair::RR);
  EXPECT_EQ(to_string(Pair::RD), "rd");
  try {
    parse_pair("xy");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UsageError);
  }
}

TEST(ResolventPowerDiff, Micro) {
  const auto tr = test::micro();
  PairParams pp;
  pp.b1 = test::robin(tr, CMatrix::identity(2));
  // A_N = 0, A_D = 8, A_[I] = −8
  EXPECT_NEAR(std::abs(resolvent_power_diff(tr, Pair::DN, pp, 1, 4.0)(0, 0) + 0.5), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(resolvent_power_diff(tr, Pair::RN, pp, 1, 4.0)(0, 0) - 1.0 / 6.0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(resolvent_power_diff(tr, Pair::RD, pp, 2, 4.0)(0, 0) - (1.0 / 144 - 1.0 / 16)), 0.0,
              1e-13);
}

TEST(TraceFormula, MicroValues) {
  const auto tr = test::micro();
  PairParams pp;
  pp.b1 = test::robin(tr, CMatrix::identity(2));
  const struct {
    Pair p;
    double value;
  } cases[] = {{Pair::DN, -0.5}, {Pair::RN, 1.0 / 6}, {Pair::RR, 1.0 / 6}, {Pair::RD, -1.0 / 3}};
  for (const auto& c : cases) {
    const auto r = trace_formula_check(tr, c.p, pp, 1, 4.0);
    EXPECT_NEAR(std::abs(r.lhs - c.value), 0.0, 1e-12) << to_string(c.p);
    EXPECT_NEAR(std::abs(r.rhs - c.value), 0.0, 1e-12) << to_string(c.p);
  }
}

TEST(TraceFormula, HigherPowersOnRect) {
  const auto pb = make_problem(build_model(with_robin(small_rect(), {1.0, 0.5, -0.25}, AffineField{2.0})));
  for (Pair p : {Pair::DN, Pair::RN, Pair::RR, Pair::RD}) {
    for (int m = 1; m <= 4; ++m) {
      const auto r = trace_formula_check(pb, p, m, Complex(-5.0, 2.0));
      EXPECT_LE(r.rel_discrepancy, 1e-9) << to_string(p) << " m=" << m;
    }
  }
}

TEST(TraceFormula, DiskBlocksSumUp) {
  const auto cfg = with_robin(small_disk(), {1.0}, AffineField{2.0});
  const auto blocked = make_problem(build_model(cfg));
  ASSERT_EQ(blocked.params.size(), 17u);
  const auto merged = make_problem(merge_blocks(build_model(cfg)));
  for (Pair p : {Pair::DN, Pair::RR}) {
    const auto a = trace_formula_check(blocked, p, 2, -1.0);
    const auto b = trace_formula_check(merged, p, 2, -1.0);
    EXPECT_LE(std::abs(a.lhs - b.lhs), 1e-11 * std::abs(a.lhs));
    EXPECT_LE(a.rel_discrepancy, 1e-9);
  }
}

TEST(TraceFormula, CouplingBoundaryOpMergesBlocks) {
  const auto pb = make_problem(build_model(with_robin(small_disk(3, 8), {1.0, 0.3, 0.2})));
  EXPECT_EQ(pb.model.blocks.size(), 1u);
  EXPECT_LE(trace_formula_check(pb, Pair::RN, 1, -1.0).rel_discrepancy, 1e-9);
}

TEST(TraceFormula, EqualParametersGiveZero) {
  const auto pb = make_problem(build_model(with_robin(small_rect(), {1.5}, AffineField{1.5})));
  const auto r = trace_formula_check(pb, Pair::RR, 2, -1.0);
  EXPECT_EQ(r.lhs, Complex(0.0));
  EXPECT_LE(std::abs(r.rhs), 1e-14);
  EXPECT_LE(r.rel_discrepancy, 1e-10);
}

TEST(TraceFormula, RobinDirichletTelescopes) {
  const auto pb = make_problem(build_model(with_robin(small_rect(), {1.0, 0.5, -0.25})));
  for (int m = 1; m <= 3; ++m) {
    const Complex lam(-5.0, 2.0);
    const auto rd = trace_formula_check(pb, Pair::RD, m, lam);
    const auto rn = trace_formula_check(pb, Pair::RN, m, lam);
    const auto dn = trace_formula_check(pb, Pair::DN, m, lam);
    EXPECT_LE(std::abs(rd.lhs - rn.lhs - dn.lhs), 1e-10 * std::abs(rd.lhs));
    EXPECT_LE(std::abs(rd.rhs - rn.rhs - dn.rhs), 1e-10 * std::abs(rd.rhs));
  }
}

TEST(TraceFormula, RejectsBadPower) {
  const auto pb = make_problem(build_model(test::micro_config()));
  try {
    trace_formula_check(pb, Pair::DN, 0, 4.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UsageError);
  }
}

TEST(TraceFormula, TraceClassFlag) {
  const auto pb = make_problem(build_model(small_disk(2, 6)));
  EXPECT_TRUE(trace_formula_check(pb, Pair::DN, 1, -1.0).trace_class_condition);
  const auto sl = make_problem(build_model(test::micro_config()));
  EXPECT_TRUE(trace_formula_check(sl, Pair::DN, 1, 4.0).trace_class_condition);
}

TEST(ContinuumAnchor, DirichletNeumannConverges) {
  // Σ(μ_N − λ)⁻¹ − Σ(μ_D − λ)⁻¹ = −1/λ for −f'' on [0, 1].
  std::vector<double> err;
  for (int n : {100, 200, 400}) {
    ModelConfig c;
    c.n = n;
    const auto pb = make_problem(build_model(c));
    const auto r = trace_formula_check(pb, Pair::DN, 1, -1.0);
    ASSERT_TRUE(r.continuum_reference);
    EXPECT_NEAR(std::abs(*r.continuum_reference - 1.0), 0.0, 1e-15);
    err.push_back(std::abs(r.lhs - 1.0));
  }
  EXPECT_LT(err[1], err[0]);
  EXPECT_LT(err[2], err[1]);
  EXPECT_LE(err[2], 1e-3);
}

TEST(ContinuumAnchor, OnlyForConstantSl1dDN) {
  ModelConfig c;
  EXPECT_TRUE(continuum_reference(c, Pair::DN, 1, -1.0));
  EXPECT_FALSE(continuum_reference(c, Pair::RN, 1, -1.0));
  c.coeffs.a11 = {1.0, 0.5};
  EXPECT_FALSE(continuum_reference(c, Pair::DN, 1, -1.0));
  EXPECT_FALSE(continuum_reference(small_rect(), Pair::DN, 1, -1.0));
}

TEST(Krein, MicroAndDisk) {
  EXPECT_TRUE(krein_check(make_problem(build_model(with_robin(test::micro_config(), {1.0}))), 4.0, 1e-10).pass);
  const auto rep = krein_check(make_problem(build_model(with_robin(small_disk(), {1.0}))), Complex(-5, 2), 1e-10);
  EXPECT_TRUE(rep.pass) << rep.dn_residual << " " << rep.robin_residual;
}

TEST(Fit, ExactPowerLaw) {
  RealVector s;
  for (int k = 1; k <= 64; ++k) s.push_back(3.0 * std::pow(k, -2.0));
  const auto f = fit_decay_exponent(s);
  EXPECT_NEAR(f.alpha, 2.0, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  EXPECT_EQ(f.resolved, 64u);
  EXPECT_EQ(f.k_lo, 8u);
  EXPECT_EQ(f.k_hi, 32u);
}

TEST(Fit, IgnoresValuesBelowFloor) {
  RealVector s;
  for (int k = 1; k <= 40; ++k) s.push_back(std::pow(k, -1.5));
  for (int k = 0; k < 40; ++k) s.push_back(1e-15);
  const auto f = fit_decay_exponent(s);
  EXPECT_EQ(f.resolved, 40u);
  EXPECT_NEAR(f.alpha, 1.5, 1e-12);
}

TEST(Fit, TooFewValues) {
  const RealVector s = {1, 0.5, 0.25, 0.125, 0.0625, 0.03, 0.01};
  try {
    fit_decay_exponent(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewValues);
  }
}

TEST(Fit, ProductOfIdealsDecaysFaster) {
  // s_{2j−1}(AB) ≤ s_j(A)s_j(B) = j^{-3} for A ∈ S_{1,∞}, B ∈ S_{1/2,∞}.
  std::mt19937_64 rng(31);
  const std::size_t n = 120;
  auto unitary = [&] { return hermitian_eig(test::random_hermitian(n, rng)).vectors; };
  RealVector da(n), db(n);
  for (std::size_t k = 0; k < n; ++k) {
    da[k] = 1.0 / (k + 1.0);
    db[k] = 1.0 / ((k + 1.0) * (k + 1.0));
  }
  const CMatrix a = unitary() * scale_rows(da, unitary());
  const CMatrix b = unitary() * scale_rows(db, unitary());
  const RealVector s = svd_values(a * b);
  EXPECT_LE(weak_schatten_quasinorm(s, 1.0 / 3.0), 8.0 * (1.0 + 1e-10));
}

TEST(Decay, AbsEigenvaluesMatchSingularValues) {
  const auto pb = make_problem(build_model(with_robin(small_disk(6, 10), {1.0}, AffineField{2.0})));
  for (Pair p : {Pair::DN, Pair::RR}) {
    const RealVector s = power_diff_singular_values(pb, p, 1, -1.0);
    const auto merged = merge_blocks(pb.model);
    PairParams pp = make_problem(merged).params.front();
    const auto tr = merged.blocks.front();
    const auto [a1, a2] = pair_realizations(tr, p, pp);
    const Realization r1(a1, tr.interior), r2(a2, tr.interior);
    const RealVector ref = svd_values(r1.resolvent_power_orthonormal(-1.0, 1) - r2.resolvent_power_orthonormal(-1.0, 1));
    ASSERT_EQ(s.size(), ref.size());
    for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(s[k], ref[k], 1e-7 * ref[0]);
  }
}

TEST(Decay, PredictedExponents) {
  EXPECT_DOUBLE_EQ(*predicted_exponent(Pair::DN, 1, 2, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(*predicted_exponent(Pair::RR, 1, 2, 0.0), 3.0);
  EXPECT_DOUBLE_EQ(*predicted_exponent(Pair::RR, 1, 2, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(*predicted_exponent(Pair::DN, 2, 2, 0.0), 4.0);
  EXPECT_DOUBLE_EQ(*predicted_exponent(Pair::RN, 2, 2, 0.0), 5.0);
  EXPECT_DOUBLE_EQ(*predicted_exponent(Pair::RD, 1, 3, 0.0), 1.0);
  EXPECT_FALSE(predicted_exponent(Pair::DN, 1, 1, 0.0));
}

TEST(Decay, ImprovementIndexFromFourierDecay) {
  auto cfg = small_disk(4, 8);
  BoundaryOpSpec f;
  f.variant = BoundaryOpVariant::FourierDecay;
  f.s = 1.0;
  cfg.boundary_op = f;
  const auto pb = make_problem(build_model(cfg));
  EXPECT_DOUBLE_EQ(improvement_index(Pair::RR, pb.params.front(), 2), 1.0);
  EXPECT_DOUBLE_EQ(improvement_index(Pair::DN, pb.params.front(), 2), 0.0);
  const auto plain = make_problem(build_model(with_robin(small_disk(4, 8), {1.0}, AffineField{2.0})));
  EXPECT_DOUBLE_EQ(improvement_index(Pair::RR, plain.params.front(), 2), 0.0);
}

TEST(Decay, Monotone) {
  EXPECT_TRUE(monotone_approach(std::vector<double>{0.3, 0.2, 0.1}, 0.0));
  EXPECT_TRUE(monotone_approach(std::vector<double>{0.3, 0.3}, 0.0));
  EXPECT_FALSE(monotone_approach(std::vector<double>{0.1, 0.2}, 0.0));
  EXPECT_TRUE(monotone_approach(std::vector<double>{0.01, 0.02}, 0.05));
  EXPECT_TRUE(monotone_approach(std::vector<double>{0.5}, 0.0));
}

TEST(Decay, RefineLadder) {
  auto c = small_disk(32, 64);
  c.radial_factor = 1.5;
  EXPECT_EQ(refine(c, 0).mode_max, 32);
  EXPECT_EQ(refine(c, 0).nr, 48);
  EXPECT_EQ(refine(c, 2).mode_max, 128);
  EXPECT_EQ(refine(c, 2).nr, 192);
  ModelConfig s;
  s.n = 50;
  EXPECT_EQ(refine(s, 3).n, 400);
}

TEST(Decay, Sl1dNotApplicable) {
  ModelConfig c;
  c.n = 20;
  const auto rep = singular_value_ladder(c, Pair::DN, 1, -1.0, 2);
  EXPECT_FALSE(rep.applicable);
  EXPECT_FALSE(rep.predicted);
  EXPECT_FALSE(rep.note.empty());
  ASSERT_EQ(rep.levels.size(), 2u);
  EXPECT_FALSE(rep.levels[0].fit);
  EXPECT_LE(rep.levels[1].s_values.size(), 40u);
}

TEST(Decay, LadderNeedsTwoLevels) {
  try {
    singular_value_ladder(small_disk(), Pair::DN, 1, -1.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UsageError);
  }
}

TEST(Decay, SmallDiskLadderRuns) {
  auto c = small_disk(8, 12);
  c.radial_factor = 1.5;
  const auto rep = singular_value_ladder(c, Pair::DN, 1, -1.0, 2);
  ASSERT_TRUE(rep.applicable);
  ASSERT_EQ(rep.levels.size(), 2u);
  for (const auto& lv : rep.levels) {
    ASSERT_TRUE(lv.fit);
    EXPECT_GT(lv.fit->alpha, 1.0);
    EXPECT_LT(lv.fit->alpha, 3.0);
  }
}

TEST(Green, ModelAggregate) {
  const auto rep = green_check(build_model(small_disk(4, 10)), 8, 1e-12, 1);
  EXPECT_TRUE(rep.pass);
  auto bad = small_disk(4, 10);
  bad.gamma1_scale = 2.0;
  EXPECT_FALSE(green_check(build_model(bad), 8, 1e-12, 1).pass);
}
