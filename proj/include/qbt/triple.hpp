#pragma once

#include <cstdint>
#include <optional>

#include "qbt/linalg.hpp"
#include "qbt/matrix.hpp"

namespace qbt {

// Finite-dimensional boundary triple {G, Γ0, Γ1} for an operator T acting on an
// extended space of interior plus boundary degrees of freedom.
//
//   T, P         : dom → H   (P drops the boundary dofs)
//   Γ0, Γ1       : dom → G   (conormal trace, Dirichlet trace)
//
// Green identity: (Tf, Pg)_H − (Pf, Tg)_H = (Γ1 f, Γ0 g)_G − (Γ0 f, Γ1 g)_G.
struct QuasiTriple {
  WeightedSpace interior;
  WeightedSpace boundary;
  CMatrix T;
  CMatrix P;
  CMatrix gamma0;
  CMatrix gamma1;

  std::size_t dom_dim() const noexcept { return T.cols(); }
  std::size_t interior_dim() const noexcept { return interior.dim(); }
  std::size_t boundary_dim() const noexcept { return boundary.dim(); }

  // Throws DimensionMismatch unless all shapes agree.
  void validate() const;
};

QuasiTriple direct_sum(std::span<const QuasiTriple> blocks);

// Bounded self-adjoint boundary parameter B for the condition BΓ1 f = Γ0 f.
struct RobinParameter {
  CMatrix B;
  std::optional<double> declared_s;  // B (or a difference of such) lies in S_{s,∞}
};

// Validates weighted self-adjointness, ‖W B − (W B)^H‖ ≤ 1e-12·‖W B‖.
RobinParameter make_robin(CMatrix b, const WeightedSpace& boundary,
                          std::optional<double> declared_s = std::nullopt);

struct GreenReport {
  double max_residual = 0.0;  // max |LHS − RHS| / (1 + ‖f‖‖g‖)
  double scale = 1.0;         // magnitude of the weighted Green forms
  double tol = 0.0;
  std::size_t samples = 0;
  bool pass = false;
};

// Random complex f, g (fixed seed). Passes iff max_residual ≤ tol·scale.
GreenReport check_green_identity(const QuasiTriple& tr, std::size_t samples, double tol,
                                 std::uint64_t seed = 1);

enum class TraceKernel { Gamma0, Gamma1 };

// T restricted to ker Γ0 (Neumann-type A0), ker Γ1 (Dirichlet-type A1) or
// ker(BΓ1 − Γ0), expressed on H: A = T·K·(P·K)⁻¹.
CMatrix restrict_to_kernel(const QuasiTriple& tr, TraceKernel which);
CMatrix restrict_to_kernel(const QuasiTriple& tr, const RobinParameter& b);

// A self-adjoint operator on a weighted space together with its spectral
// decomposition; provides resolvent powers by spectral calculus.
class Realization {
 public:
  Realization(CMatrix a, WeightedSpace space);

  const CMatrix& matrix() const noexcept { return a_; }
  const WeightedSpace& space() const noexcept { return space_; }
  const RealVector& eigenvalues() const noexcept { return eig_.values; }

  double distance_to_spectrum(Complex lambda) const;
  // Throws LambdaInSpectrum if λ is within 1e-12·max(1, ‖A‖) of an eigenvalue.
  void require_resolvent(Complex lambda) const;

  // (A − λ)^{-k} on H (k ≥ 0).
  CMatrix resolvent_power(Complex lambda, int k) const;
  // Same operator in the orthonormalized coordinates W^{1/2}·W^{-1/2}.
  CMatrix resolvent_power_orthonormal(Complex lambda, int k) const;
  // tr (A − λ)^{-k} = Σ (μ_i − λ)^{-k}.
  Complex trace_resolvent_power(Complex lambda, int k) const;

 private:
  CMatrix a_;
  WeightedSpace space_;
  EigenDecomposition eig_;
};

// Stacked-system pivot threshold used to detect λ in the spectrum of A0.
inline constexpr double kSpectrumPivotThreshold = 1e-12;

// Extended solutions F (dom × G): (T − λP)F = 0, Γ0 F = I.
CMatrix gamma_solution(const QuasiTriple& tr, Complex lambda);
// γ(λ) = P·F : G → H.
CMatrix gamma(const QuasiTriple& tr, Complex lambda);
// γ(λ̄)^⋆ : H → G, the weighted adjoint of γ at the conjugate point.
CMatrix gamma_star(const QuasiTriple& tr, Complex lambda);
// M(λ) = Γ1·F.
CMatrix weyl(const QuasiTriple& tr, Complex lambda);

// γ(λ) M(λ)⁻¹ γ(λ̄)^⋆ = (A0 − λ)⁻¹ − (A1 − λ)⁻¹.
CMatrix krein_dn(const QuasiTriple& tr, Complex lambda);

enum class KreinForm { Left, Right };

// γ(λ)(I − BM(λ))⁻¹Bγ(λ̄)^⋆ (left) or γ(λ)B(I − M(λ)B)⁻¹γ(λ̄)^⋆ (right),
// both equal to (A_[B] − λ)⁻¹ − (A0 − λ)⁻¹.
CMatrix krein_robin(const QuasiTriple& tr, const RobinParameter& b, Complex lambda,
                    KreinForm form = KreinForm::Left);

}  // namespace qbt
