#pragma once

// Dense kernels in two flavours: the default OpenMP-parallel versions and the
// serial references in kernels::serial. gemm and LU use the same summation
// order in both flavours, so their results are bit-identical. The Jacobi
// eigensolvers differ in rotation ordering (round-robin vs. cyclic-by-row) and
// agree to rounding.

#include <cstddef>
#include <span>
#include <vector>

#include "qbt/matrix.hpp"

namespace qbt::kernels {

// C = A·B.
void gemm(const CMatrix& a, const CMatrix& b, CMatrix& c);

struct LuFactors {
  CMatrix lu;                      // unit-lower L below the diagonal, U on and above
  std::vector<std::size_t> perm;   // row i of LU is row perm[i] of the input
  double pivot_floor = 0.0;        // absolute threshold the pivots were tested against
  double min_pivot = 0.0;          // smallest |pivot| encountered
  bool singular = false;           // some pivot fell at or below pivot_floor
};

// Partial-pivoting LU. A pivot is rejected when |pivot| <= rel_threshold·(max column 2-norm).
LuFactors lu_factor(CMatrix a, double rel_threshold);
// Overwrites rhs with A⁻¹·rhs. Requires !f.singular.
void lu_solve(const LuFactors& f, CMatrix& rhs);

// Iterative refinement of x ≈ A⁻¹·rhs with residuals accumulated in long
// double. The forward error drops to O(eps) as long as cond(A)·eps ≪ 1.
void lu_refine(const CMatrix& a, const LuFactors& f, const CMatrix& rhs, CMatrix& x, int steps = 2);

template <class T>
struct JacobiResult {
  std::vector<double> values;  // ascending
  std::vector<T> vectors;      // n×n row-major, column j is the eigenvector of values[j]
  int sweeps = 0;
  bool converged = false;
};

// Hermitian (T = Complex) or real symmetric (T = double) eigensolver on a
// row-major n×n buffer. Only convergence is reported; callers raise errors.
template <class T>
JacobiResult<T> jacobi_eig(std::span<const T> a, std::size_t n, int max_sweeps = 60);

namespace serial {

void gemm(const CMatrix& a, const CMatrix& b, CMatrix& c);
LuFactors lu_factor(CMatrix a, double rel_threshold);
void lu_solve(const LuFactors& f, CMatrix& rhs);
void lu_refine(const CMatrix& a, const LuFactors& f, const CMatrix& rhs, CMatrix& x, int steps = 2);
template <class T>
JacobiResult<T> jacobi_eig(std::span<const T> a, std::size_t n, int max_sweeps = 60);

}  // namespace serial

}  // namespace qbt::kernels
