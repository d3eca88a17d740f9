#pragma once

// λ-derivatives of operator-valued expressions built from the γ-field, its
// adjoint, the Weyl function, the resolvent of A0, constants, sums, products
// and inverses. Leaves use the closed forms
//
//   d^k γ(λ)       = k! (A0 − λ)^{-k} γ(λ)
//   d^k γ(λ̄)^⋆     = k! γ(λ̄)^⋆ (A0 − λ)^{-k}
//   d^k M(λ)       = k! γ(λ̄)^⋆ (A0 − λ)^{-(k-1)} γ(λ),   k ≥ 1
//   d^k (A0 − λ)⁻¹ = k! (A0 − λ)^{-(k+1)}
//
// products use the multinomial Leibniz rule, and inverses the recursion
// F^{(k)} = −Σ_{p<k} C(k,p) F^{(p)} E^{(k−p)} F obtained from F·E = I.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qbt/matrix.hpp"
#include "qbt/triple.hpp"

namespace qbt {

enum class NodeKind { Constant, Gamma, GammaStar, Weyl, Resolvent, Inverse, Product, Sum, Named };

enum class CompositeName { S, TB, U, V, WeylPrime };

std::string_view to_string(CompositeName name);

struct ExprDims {
  std::size_t interior = 0;  // dim H
  std::size_t boundary = 0;  // dim G
};

ExprDims dims_of(const QuasiTriple& tr);

class OperatorExpr {
 public:
  struct Node;

  static OperatorExpr constant(CMatrix value, std::string label = "C");
  static OperatorExpr identity(std::size_t n);
  static OperatorExpr gamma(ExprDims d);
  static OperatorExpr gamma_star(ExprDims d);
  static OperatorExpr weyl(ExprDims d);
  static OperatorExpr weyl_inverse(ExprDims d);
  static OperatorExpr resolvent(ExprDims d);
  static OperatorExpr inverse(const OperatorExpr& e);
  static OperatorExpr product(const std::vector<OperatorExpr>& factors);
  static OperatorExpr sum(const std::vector<OperatorExpr>& terms, std::vector<Complex> coeffs);

  // S(λ) = M(λ)⁻¹γ(λ̄)^⋆
  static OperatorExpr named_s(ExprDims d);
  // T_B(λ) = (I − BM(λ))⁻¹
  static OperatorExpr named_tb(ExprDims d, const CMatrix& b);
  // U(λ) = (I − B1M(λ))⁻¹(B1 − B2)(I − M(λ)B2)⁻¹
  static OperatorExpr named_u(ExprDims d, const CMatrix& b1, const CMatrix& b2);
  // V(λ) = (I − BM(λ))⁻¹M(λ)⁻¹
  static OperatorExpr named_v(ExprDims d, const CMatrix& b);
  // M'(λ) = γ(λ̄)^⋆γ(λ)
  static OperatorExpr weyl_prime(ExprDims d);

  NodeKind kind() const;
  std::size_t rows() const;
  std::size_t cols() const;
  std::string describe() const;
  const Node* node() const noexcept { return node_.get(); }

 private:
  explicit OperatorExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static OperatorExpr named(CompositeName name, const OperatorExpr& body);
  std::shared_ptr<const Node> node_;
};

OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b);

// Binding of expressions to a concrete triple: holds A0 = T↾ker Γ0 and its
// spectral decomposition, reused for every evaluation.
class TripleCalculus {
 public:
  explicit TripleCalculus(QuasiTriple tr);

  const QuasiTriple& triple() const noexcept { return tr_; }
  const Realization& a0() const noexcept { return a0_; }
  ExprDims dims() const noexcept { return dims_of(tr_); }

 private:
  QuasiTriple tr_;
  Realization a0_;
};

inline constexpr int kDefaultMaxOrder = 8;

// Exact k-th derivative at λ. Sub-expression values are memoized per call.
CMatrix derivative(const TripleCalculus& ctx, const OperatorExpr& expr, int k, Complex lambda,
                   int max_order = kDefaultMaxOrder);

// Default step of fd_derivative: 1e-3 for k ≤ 2, 1e-2 for k = 3, 2e-2 for k = 4.
double default_fd_step(int k);

// Central differences (offsets (k/2 − j)h, j = 0..k) with one Richardson step
// (4·D_{h/2} − D_h)/3. h ≤ 0 selects default_fd_step(k)·max(1, |λ|).
CMatrix fd_derivative(const TripleCalculus& ctx, const OperatorExpr& expr, int k, Complex lambda,
                      double h = 0.0);

struct LeibnizTerm {
  std::vector<int> orders;  // derivative order of each factor
  double coefficient;       // m!/(p1!·…·pr!)
};

// All ways to distribute `order` derivatives over `arity` factors.
std::vector<LeibnizTerm> leibniz_expand(int order, int arity);

}  // namespace qbt
