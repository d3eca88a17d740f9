#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "qbt/error.hpp"
#include "qbt/kernels.hpp"
#include "qbt/linalg.hpp"
#include "support.hpp"

using namespace qbt;
using qbt::test::random_hermitian;
using qbt::test::random_matrix;

TEST(HermitianEig, SwapMatrix) {
  const auto e = hermitian_eig(CMatrix{{0, 1}, {1, 0}});
  ASSERT_EQ(e.values.size(), 2u);
  EXPECT_NEAR(e.values[0], -1.0, 1e-15);
  EXPECT_NEAR(e.values[1], 1.0, 1e-15);
}

TEST(HermitianEig, Identity) {
  const auto e = hermitian_eig(CMatrix::identity(3));
  for (double v : e.values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(HermitianEig, MicroDirichletRestriction) {
  const auto tr = test::micro();
  const auto e = hermitian_eig(to_orthonormal(restrict_to_kernel(tr, TraceKernel::Gamma1), tr.interior));
  ASSERT_EQ(e.values.size(), 1u);
  EXPECT_NEAR(e.values[0], 8.0, 1e-13);
}

TEST(HermitianEig, RejectsNonHermitian) {
  try {
    hermitian_eig(CMatrix{{0, 1}, {2, 0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
  }
}

TEST(HermitianEig, ReconstructionUpTo200) {
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 2u, 5u, 33u, 120u, 200u}) {
    const CMatrix a = random_hermitian(n, rng);
    const auto e = hermitian_eig(a);
    for (std::size_t i = 1; i < n; ++i) EXPECT_LE(e.values[i - 1], e.values[i]);
    const CMatrix rec = e.vectors * scale_rows(e.values, e.vectors.adjoint());
    EXPECT_LE(max_abs_diff(rec, a), 1e-10 * a.max_abs()) << n;
    const CMatrix qq = e.vectors.adjoint() * e.vectors;
    EXPECT_LE(max_abs_diff(qq, CMatrix::identity(n)), 1e-12) << n;
  }
}

TEST(HermitianEig, RealPathMatchesComplexPath) {
  std::mt19937_64 rng(3);
  CMatrix a = random_hermitian(40, rng);
  for (auto& z : a.data()) z = z.real();
  const auto e = hermitian_eig(a);
  const CMatrix rec = e.vectors * scale_rows(e.values, e.vectors.adjoint());
  EXPECT_LE(max_abs_diff(rec, a), 1e-11 * a.max_abs());
}

TEST(Solve, IdentityAndDiagonal) {
  std::mt19937_64 rng(1);
  const CMatrix rhs = random_matrix(3, 2, rng);
  EXPECT_LE(max_abs_diff(solve(CMatrix::identity(3), rhs), rhs), 0.0);
  const CMatrix x = solve(CMatrix{{2, 0}, {0, 4}}, CMatrix::identity(2));
  EXPECT_LE(max_abs_diff(x, CMatrix{{0.5, 0}, {0, 0.25}}), 1e-16);
}

TEST(Solve, ResidualRandom) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {4u, 30u, 150u}) {
    CMatrix a = random_matrix(n, n, rng);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += static_cast<double>(n);
    const CMatrix rhs = random_matrix(n, 3, rng);
    const CMatrix x = solve(a, rhs);
    EXPECT_LE(max_abs_diff(a * x, rhs), 1e-10 * a.max_abs() * x.max_abs());
  }
}

TEST(Solve, SingularPivot) {
  try {
    solve(CMatrix{{1, 2}, {2, 4}}, CMatrix::identity(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Singular);
  }
}

TEST(SvdValues, Examples) {
  const auto s = svd_values(CMatrix{{3, 0}, {0, -4}});
  EXPECT_NEAR(s[0], 4.0, 1e-14);
  EXPECT_NEAR(s[1], 3.0, 1e-14);
  for (double v : svd_values(CMatrix(4, 3))) EXPECT_EQ(v, 0.0);
}

TEST(SvdValues, AdjointSymmetry) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix k = random_matrix(8, 8, rng);
    const auto a = svd_values(k);
    const auto b = svd_values(k.adjoint());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * a[0]);
  }
}

TEST(SvdValues, MatchesGramEigenvalues) {
  std::mt19937_64 rng(9);
  const CMatrix k = random_matrix(12, 7, rng);
  const auto s = svd_values(k);
  auto e = hermitian_eig(k.adjoint() * k).values;
  std::reverse(e.begin(), e.end());
  ASSERT_EQ(s.size(), 7u);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(s[i], std::sqrt(e[i]), 1e-10 * s[i]);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GE(s[i - 1], s[i]);
}

TEST(Trace, ExamplesAndProperties) {
  EXPECT_EQ(trace(CMatrix{{1, 2}, {3, 4}}), Complex(5.0));
  std::mt19937_64 rng(2);
  const CMatrix k1 = random_matrix(6, 6, rng);
  const CMatrix k2 = random_matrix(6, 6, rng);
  EXPECT_LE(std::abs(trace(k1 + k2) - trace(k1) - trace(k2)), 1e-13);
  const CMatrix a = random_matrix(4, 9, rng);
  const CMatrix b = random_matrix(9, 4, rng);
  EXPECT_LE(std::abs(trace(a * b) - trace(b * a)), 1e-12);
  try {
    trace(CMatrix(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSquare);
  }
}

TEST(WeakSchatten, Examples) {
  RealVector inv, inv2;
  for (int k = 1; k <= 50; ++k) {
    inv.push_back(1.0 / k);
    inv2.push_back(1.0 / (static_cast<double>(k) * k));
  }
  EXPECT_NEAR(weak_schatten_quasinorm(inv, 1.0), 1.0, 1e-14);
  EXPECT_NEAR(weak_schatten_quasinorm(inv2, 0.5), 1.0, 1e-14);
  const RealVector s = {1, 1, 0, 0};
  EXPECT_NEAR(weak_schatten_quasinorm(s, 1.0), 2.0, 1e-15);
  try {
    weak_schatten_quasinorm(RealVector{}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySequence);
  }
}

TEST(WeightedSpace, RejectsNonPositiveWeights) {
  EXPECT_THROW(WeightedSpace(RealVector{1.0, 0.0}), Error);
  EXPECT_THROW(WeightedSpace(RealVector{1.0, -2.0}), Error);
}

TEST(WeightedAdjoint, InnerProductIdentity) {
  std::mt19937_64 rng(4);
  const WeightedSpace from(RealVector{0.5, 2.0, 1.5});
  const WeightedSpace to(RealVector{3.0, 0.25});
  const CMatrix a = random_matrix(2, 3, rng);
  const CMatrix as = weighted_adjoint(a, from, to);
  const CMatrix f = random_matrix(3, 1, rng);
  const CMatrix g = random_matrix(2, 1, rng);
  const CMatrix af = a * f;
  const CMatrix asg = as * g;
  const Complex lhs = to.inner(af.data(), g.data());
  const Complex rhs = from.inner(f.data(), asg.data());
  EXPECT_LE(std::abs(lhs - rhs), 1e-13);
}

TEST(NullSpace, OrthonormalKernel) {
  std::mt19937_64 rng(8);
  const CMatrix c = random_matrix(3, 10, rng);
  const CMatrix k = null_space(c);
  ASSERT_EQ(k.cols(), 7u);
  EXPECT_LE((c * k).max_abs(), 1e-13);
  EXPECT_LE(max_abs_diff(k.adjoint() * k, CMatrix::identity(7)), 1e-13);
}

TEST(Kernels, SerialAndParallelAgree) {
  std::mt19937_64 rng(12);
  const CMatrix a = random_matrix(150, 130, rng);
  const CMatrix b = random_matrix(130, 90, rng);
  CMatrix c1(150, 90), c2(150, 90);
  kernels::gemm(a, b, c1);
  kernels::serial::gemm(a, b, c2);
  EXPECT_EQ(c1, c2);

  CMatrix m = random_matrix(160, 160, rng);
  const auto f1 = kernels::lu_factor(m, 1e-13);
  const auto f2 = kernels::serial::lu_factor(m, 1e-13);
  EXPECT_EQ(f1.lu, f2.lu);
  EXPECT_EQ(f1.perm, f2.perm);

  const CMatrix h = random_hermitian(90, rng);
  const auto e1 = kernels::jacobi_eig<Complex>(h.data(), 90);
  const auto e2 = kernels::serial::jacobi_eig<Complex>(h.data(), 90);
  ASSERT_TRUE(e1.converged);
  ASSERT_TRUE(e2.converged);
  for (std::size_t i = 0; i < 90; ++i) EXPECT_NEAR(e1.values[i], e2.values[i], 1e-12 * h.max_abs() * 90);
}

TEST(Kernels, ParallelIsRepeatable) {
  std::mt19937_64 rng(13);
  const CMatrix h = random_hermitian(70, rng);
  const auto e1 = kernels::jacobi_eig<Complex>(h.data(), 70);
  const auto e2 = kernels::jacobi_eig<Complex>(h.data(), 70);
  EXPECT_EQ(e1.values, e2.values);
  EXPECT_EQ(e1.vectors, e2.vectors);
}
