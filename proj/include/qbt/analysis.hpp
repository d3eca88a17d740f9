#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbt/calculus.hpp"
#include "qbt/models.hpp"
#include "qbt/triple.hpp"

namespace qbt {

// Ordered pairs (A1, A2) of self-adjoint realizations:
//   DN: A_N vs A_D,  RN: A_[B] vs A_N,  RR: A_[B1] vs A_[B2],  RD: A_[B] vs A_D.
enum class Pair { DN, RN, RR, RD };

std::string_view to_string(Pair p);
Pair parse_pair(std::string_view s);  // "dn" | "rn" | "rr" | "rd", throws UsageError

// Boundary parameters of one block. Missing parameters mean B = 0.
struct PairParams {
  std::optional<RobinParameter> b1;
  std::optional<RobinParameter> b2;
};

// Weak-Schatten improvement index t = (n−1)/s of the boundary perturbation
// (B for RN, B1 − B2 for RR), 0 when nothing is declared.
double improvement_index(Pair p, const PairParams& params, int n);
// α = 2m/(n−1) for DN, RD and (2m+1+t)/(n−1) for RN, RR; nothing for n = 1.
std::optional<double> predicted_exponent(Pair p, int m, int n, double t);

struct PairRealizations {
  CMatrix a1;
  CMatrix a2;
};

PairRealizations pair_realizations(const QuasiTriple& tr, Pair p, const PairParams& params);

// (A1 − λ)^{-m} − (A2 − λ)^{-m} by spectral calculus.
CMatrix resolvent_power_diff(const QuasiTriple& tr, Pair p, const PairParams& params, int m,
                             Complex lambda);

// Boundary factor X with tr((A1−λ)^{-m} − (A2−λ)^{-m}) = tr d^{m−1}(X M')/(m−1)!:
//   DN: M⁻¹,  RN: (I − BM)⁻¹B,  RR: U,  RD: V = (I − BM)⁻¹M⁻¹.
OperatorExpr boundary_factor(ExprDims d, Pair p, const PairParams& params);

struct TraceReport {
  Pair pair = Pair::DN;
  int m = 1;
  Complex lambda;
  Complex lhs;  // state-space side
  Complex rhs;  // boundary side
  double abs_discrepancy = 0.0;
  double rel_discrepancy = 0.0;  // |lhs − rhs| / max(|lhs|, |rhs|), 0 if both vanish
  std::optional<Complex> continuum_reference;
  bool trace_class_condition = true;  // m > (n−1)/2 in the continuum
};

TraceReport trace_formula_check(const QuasiTriple& tr, Pair p, const PairParams& params, int m,
                                Complex lambda);

struct RealizationCache;

// A model together with block-wise boundary parameters. Blocks are merged
// when a boundary operator couples them. Realizations and their spectral
// decompositions are built on first use and shared by copies.
struct Problem {
  Model model;
  std::vector<PairParams> params;  // one per block
  std::shared_ptr<RealizationCache> cache;
};

Problem make_problem(const Model& model);

// Block-summed trace check, with the analytic value attached where known.
TraceReport trace_formula_check(const Problem& pb, Pair p, int m, Complex lambda);

// (a0 − λ)^{-m} for sl1d DN with constant coefficients, which is all that is
// left of the Neumann and Dirichlet eigenvalue sums.
std::optional<Complex> continuum_reference(const ModelConfig& cfg, Pair p, int m, Complex lambda);

struct KreinReport {
  Complex lambda;
  double dn_residual = 0.0;     // relative to the direct resolvent difference
  double robin_residual = 0.0;  // left form vs direct difference
  double forms_residual = 0.0;  // left form vs right form
  bool pass = false;
};

KreinReport krein_check(const Problem& pb, Complex lambda, double tol);

GreenReport green_check(const Model& model, std::size_t samples, double tol, std::uint64_t seed);

struct FitResult {
  double alpha = 0.0;
  double r2 = 0.0;
  std::size_t resolved = 0;  // K = #{s_k > floor}
  std::size_t k_lo = 0;      // 1-based window bounds
  std::size_t k_hi = 0;
};

inline constexpr double kResolvedFloor = 1e-13;

// Log-log least squares over k ∈ [max(1, ⌊lo·K⌋), ⌊hi·K⌋].
FitResult fit_decay_exponent(std::span<const double> s, double lo = 0.125, double hi = 0.5);

struct DecayOptions {
  double window_lo = 0.125;
  double window_hi = 0.5;
  double band = 0.0;  // an error at or below the band counts as converged
};

struct DecayLevel {
  int level = 0;
  int resolution = 0;  // n (sl1d), nx (rect2d) or mode_max (disk_modes)
  int radial = 0;      // nr for disk_modes
  RealVector s_values;
  std::optional<FitResult> fit;
  std::optional<double> quasinorm;  // sup k^α s_k at the predicted α
  std::optional<double> error;      // |α̂ − α|
};

struct DecayReport {
  Pair pair = Pair::DN;
  int m = 1;
  int n = 2;
  Complex lambda;
  double t = 0.0;
  std::optional<double> predicted;
  bool applicable = true;
  std::string note;
  std::vector<DecayLevel> levels;
  bool monotone = false;
};

// Level l doubles the base resolution l times.
ModelConfig refine(const ModelConfig& base, int level);

// Singular values of the orthonormalized power difference, non-increasing.
RealVector power_diff_singular_values(const Problem& pb, Pair p, int m, Complex lambda);

DecayReport singular_value_ladder(const ModelConfig& base, Pair p, int m, Complex lambda,
                                  int levels, const DecayOptions& opt = {});

// Every level's error is ≤ the previous one, or ≤ band.
bool monotone_approach(std::span<const double> errors, double band);

}  // namespace qbt
