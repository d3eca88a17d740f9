#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qbt/matrix.hpp"

namespace qbt {

// Finite-dimensional Hilbert space C^dim with (f, g) = Σ w_i f_i conj(g_i).
class WeightedSpace {
 public:
  WeightedSpace() = default;
  explicit WeightedSpace(RealVector weights);
  static WeightedSpace uniform(std::size_t dim, double w);

  std::size_t dim() const noexcept { return weights_.size(); }
  const RealVector& weights() const noexcept { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

  Complex inner(std::span<const Complex> f, std::span<const Complex> g) const;
  double norm(std::span<const Complex> f) const;

  // W^{1/2} and W^{-1/2} as vectors.
  RealVector sqrt_weights() const;
  RealVector inv_sqrt_weights() const;

  friend bool operator==(const WeightedSpace&, const WeightedSpace&) = default;

 private:
  RealVector weights_;
};

WeightedSpace direct_sum(std::span<const WeightedSpace> spaces);

// Adjoint of A: from → to with respect to the weighted inner products:
// A^⋆ = W_from⁻¹ A^H W_to.
CMatrix weighted_adjoint(const CMatrix& a, const WeightedSpace& from, const WeightedSpace& to);

// Unitary similarity W^{1/2} A W^{-1/2}; turns a W-self-adjoint operator into a Hermitian matrix.
CMatrix to_orthonormal(const CMatrix& a, const WeightedSpace& space);
CMatrix from_orthonormal(const CMatrix& a, const WeightedSpace& space);

// ‖W A − (W A)^H‖_max / ‖W A‖_max, the relative weighted-Hermitian defect.
double self_adjoint_defect(const CMatrix& a, const WeightedSpace& space);

struct EigenDecomposition {
  RealVector values;  // ascending
  CMatrix vectors;    // unitary, columns are eigenvectors
  int sweeps = 0;
};

// Hermitian eigensolver (cyclic Jacobi). Throws NotHermitian when
// ‖A − A^H‖_max > tol·‖A‖_max and NoConvergence when the sweep budget runs out.
EigenDecomposition hermitian_eig(const CMatrix& a, double tol = 1e-12);

// Default pivot threshold of solve(): fraction of the largest column norm.
inline constexpr double kSolvePivotThreshold = 1e-13;

// X with A·X = rhs (partial-pivoting LU). Throws Singular on a rejected pivot.
CMatrix solve(const CMatrix& a, const CMatrix& rhs, double rel_pivot = kSolvePivotThreshold);
CMatrix inverse(const CMatrix& a, double rel_pivot = kSolvePivotThreshold);

// Singular values, non-increasing, from the eigenvalues of K^H K (or K K^H,
// whichever is smaller). Eigenvalues below n·eps·λ_max are deflated to zero.
RealVector svd_values(const CMatrix& k);

// Singular values of an operator between weighted spaces.
RealVector weighted_svd_values(const CMatrix& k, const WeightedSpace& from,
                               const WeightedSpace& to);

Complex trace(const CMatrix& k);

// sup_k k^{1/p} s_k over the given (non-increasing) sequence.
double weak_schatten_quasinorm(std::span<const double> s, double p);

// Orthonormal basis (columns) of ker C via Householder QR of C^H.
// Throws DegenerateKernel if C does not have full row rank.
CMatrix null_space(const CMatrix& c, double rank_tol = 1e-12);

// Numerical rank from singular values relative to the largest.
std::size_t numerical_rank(const CMatrix& a, double rel_tol = 1e-10);

}  // namespace qbt
