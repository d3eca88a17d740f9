#include "qbt/calculus.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "qbt/error.hpp"

namespace qbt {

struct OperatorExpr::Node {
  NodeKind kind;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::shared_ptr<const Node>> children;
  std::vector<Complex> coeffs;
  CMatrix value;
  std::string label;
  bool constant = false;  // all derivatives of order ≥ 1 vanish
  CompositeName name = CompositeName::S;
};

std::string_view to_string(CompositeName name) {
  switch (name) {
    case CompositeName::S: return "S";
    case CompositeName::TB: return "T_B";
    case CompositeName::U: return "U";
    case CompositeName::V: return "V";
    case CompositeName::WeylPrime: return "M'";
  }
  return "?";
}

ExprDims dims_of(const QuasiTriple& tr) { return {tr.interior_dim(), tr.boundary_dim()}; }

namespace {

using NodePtr = std::shared_ptr<const OperatorExpr::Node>;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

NodePtr leaf(NodeKind kind, std::size_t rows, std::size_t cols, std::string label) {
  auto n = std::make_shared<OperatorExpr::Node>();
  n->kind = kind;
  n->rows = rows;
  n->cols = cols;
  n->label = std::move(label);
  return n;
}

void compositions(int remaining, int slot, std::vector<int>& cur, std::vector<LeibnizTerm>& out,
                  int order) {
  const int arity = static_cast<int>(cur.size());
  if (slot == arity - 1) {
    cur[slot] = remaining;
    double denom = 1.0;
    for (int p : cur) denom *= factorial(p);
    out.push_back({cur, factorial(order) / denom});
    return;
  }
  for (int p = remaining; p >= 0; --p) {
    cur[slot] = p;
    compositions(remaining - p, slot + 1, cur, out, order);
  }
}

}  // namespace

// ---- construction -----------------------------------------------------------

OperatorExpr OperatorExpr::constant(CMatrix value, std::string label) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->rows = value.rows();
  n->cols = value.cols();
  n->value = std::move(value);
  n->label = std::move(label);
  n->constant = true;
  return OperatorExpr(n);
}

OperatorExpr OperatorExpr::identity(std::size_t n) { return constant(CMatrix::identity(n), "I"); }

OperatorExpr OperatorExpr::gamma(ExprDims d) {
  return OperatorExpr(leaf(NodeKind::Gamma, d.interior, d.boundary, "γ"));
}

OperatorExpr OperatorExpr::gamma_star(ExprDims d) {
  return OperatorExpr(leaf(NodeKind::GammaStar, d.boundary, d.interior, "γ*"));
}

OperatorExpr OperatorExpr::weyl(ExprDims d) {
  return OperatorExpr(leaf(NodeKind::Weyl, d.boundary, d.boundary, "M"));
}

OperatorExpr OperatorExpr::weyl_inverse(ExprDims d) { return inverse(weyl(d)); }

OperatorExpr OperatorExpr::resolvent(ExprDims d) {
  return OperatorExpr(leaf(NodeKind::Resolvent, d.interior, d.interior, "R0"));
}

OperatorExpr OperatorExpr::inverse(const OperatorExpr& e) {
  if (e.rows() != e.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "inverse of a non-square expression");
  }
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Inverse;
  n->rows = e.rows();
  n->cols = e.cols();
  n->children = {e.node_};
  n->constant = e.node_->constant;
  n->label = "inv";
  return OperatorExpr(n);
}

OperatorExpr OperatorExpr::product(const std::vector<OperatorExpr>& factors) {
  if (factors.empty()) throw Error(ErrorCode::DimensionMismatch, "empty product");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Product;
  n->rows = factors.front().rows();
  n->cols = factors.back().cols();
  n->constant = true;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i > 0 && factors[i - 1].cols() != factors[i].rows()) {
      std::ostringstream os;
      os << "product factor " << i << " has " << factors[i].rows() << " rows, expected "
         << factors[i - 1].cols();
      throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    n->children.push_back(factors[i].node_);
    n->constant = n->constant && factors[i].node_->constant;
  }
  n->label = "prod";
  return OperatorExpr(n);
}

OperatorExpr OperatorExpr::sum(const std::vector<OperatorExpr>& terms, std::vector<Complex> coeffs) {
  if (terms.empty() || terms.size() != coeffs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "sum needs one coefficient per term");
  }
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Sum;
  n->rows = terms.front().rows();
  n->cols = terms.front().cols();
  n->coeffs = std::move(coeffs);
  n->constant = true;
  for (const auto& t : terms) {
    if (t.rows() != n->rows || t.cols() != n->cols) {
      throw Error(ErrorCode::DimensionMismatch, "sum terms differ in shape");
    }
    n->children.push_back(t.node_);
    n->constant = n->constant && t.node_->constant;
  }
  n->label = "sum";
  return OperatorExpr(n);
}

OperatorExpr OperatorExpr::named_s(ExprDims d) {
  return named(CompositeName::S, product({weyl_inverse(d), gamma_star(d)}));
}

OperatorExpr OperatorExpr::named_tb(ExprDims d, const CMatrix& b) {
  const auto id = identity(d.boundary);
  const auto bm = product({constant(b, "B"), weyl(d)});
  return named(CompositeName::TB, inverse(sum({id, bm}, {1.0, -1.0})));
}

OperatorExpr OperatorExpr::named_u(ExprDims d, const CMatrix& b1, const CMatrix& b2) {
  const auto id = identity(d.boundary);
  const auto m = weyl(d);
  const auto left = inverse(sum({id, product({constant(b1, "B1"), m})}, {1.0, -1.0}));
  const auto right = inverse(sum({id, product({m, constant(b2, "B2")})}, {1.0, -1.0}));
  return named(CompositeName::U, product({left, constant(b1 - b2, "B1-B2"), right}));
}

OperatorExpr OperatorExpr::named_v(ExprDims d, const CMatrix& b) {
  const auto id = identity(d.boundary);
  const auto m = weyl(d);
  const auto t = inverse(sum({id, product({constant(b, "B"), m})}, {1.0, -1.0}));
  return named(CompositeName::V, product({t, inverse(m)}));
}

OperatorExpr OperatorExpr::weyl_prime(ExprDims d) {
  return named(CompositeName::WeylPrime, product({gamma_star(d), gamma(d)}));
}

OperatorExpr OperatorExpr::named(CompositeName name, const OperatorExpr& body) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Named;
  n->rows = body.rows();
  n->cols = body.cols();
  n->children = {body.node_};
  n->constant = body.node_->constant;
  n->name = name;
  n->label = std::string(to_string(name));
  return OperatorExpr(n);
}

NodeKind OperatorExpr::kind() const { return node_->kind; }
std::size_t OperatorExpr::rows() const { return node_->rows; }
std::size_t OperatorExpr::cols() const { return node_->cols; }

std::string OperatorExpr::describe() const {
  std::ostringstream os;
  os << node_->label << "[" << node_->rows << "x" << node_->cols << "]";
  return os.str();
}

OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
  return OperatorExpr::product({a, b});
}

// ---- evaluation -------------------------------------------------------------

TripleCalculus::TripleCalculus(QuasiTriple tr)
    : tr_(std::move(tr)), a0_(restrict_to_kernel(tr_, TraceKernel::Gamma0), tr_.interior) {}

namespace {

class Evaluation {
 public:
  Evaluation(const TripleCalculus& ctx, Complex lambda, int max_order)
      : ctx_(ctx), lambda_(lambda), max_order_(max_order) {}

  CMatrix eval(const OperatorExpr::Node* n, int k) {
    if (k < 0) throw Error(ErrorCode::DepthExceeded, "negative derivative order");
    if (k > max_order_) {
      throw Error(ErrorCode::DepthExceeded, "derivative order above the configured maximum");
    }
    const auto key = std::make_pair(n, k);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    CMatrix v = compute(n, k);
    memo_.emplace(key, v);
    return v;
  }

 private:
  CMatrix compute(const OperatorExpr::Node* n, int k) {
    if (k > 0 && n->constant) return CMatrix(n->rows, n->cols);
    switch (n->kind) {
      case NodeKind::Constant: return n->value;
      case NodeKind::Gamma:
        return k == 0 ? gamma() : static_cast<Complex>(factorial(k)) * (resolvent_power(k) * gamma());
      case NodeKind::GammaStar:
        return k == 0 ? gamma_star()
                      : static_cast<Complex>(factorial(k)) * (gamma_star() * resolvent_power(k));
      case NodeKind::Weyl:
        if (k == 0) return weyl();
        if (k == 1) return gamma_star() * gamma();
        return static_cast<Complex>(factorial(k)) * (gamma_star() * (resolvent_power(k - 1) * gamma()));
      case NodeKind::Resolvent:
        return static_cast<Complex>(factorial(k)) * resolvent_power(k + 1);
      case NodeKind::Inverse: return inverse_derivative(n, k);
      case NodeKind::Product: return product_derivative(n, k);
      case NodeKind::Sum: {
        CMatrix acc(n->rows, n->cols);
        for (std::size_t i = 0; i < n->children.size(); ++i) {
          acc += n->coeffs[i] * eval(n->children[i].get(), k);
        }
        return acc;
      }
      case NodeKind::Named: return eval(n->children.front().get(), k);
    }
    throw Error(ErrorCode::DimensionMismatch, "unknown node kind");
  }

  CMatrix inverse_derivative(const OperatorExpr::Node* n, int k) {
    const auto* e = n->children.front().get();
    if (k == 0) {
      try {
        return qbt::inverse(eval(e, 0), 1e-12);
      } catch (const Error& err) {
        if (err.code() == ErrorCode::Singular) {
          throw Error(ErrorCode::SingularInverse, "expression is not invertible at λ");
        }
        throw;
      }
    }
    const CMatrix f0 = eval(n, 0);
    CMatrix acc(n->rows, n->cols);
    for (int p = 0; p < k; ++p) {
      if (e->constant) break;
      acc += static_cast<Complex>(binomial(k, p)) * (eval(n, p) * (eval(e, k - p) * f0));
    }
    acc *= -1.0;
    return acc;
  }

  CMatrix product_derivative(const OperatorExpr::Node* n, int k) {
    const auto& ch = n->children;
    if (ch.size() == 1) return eval(ch.front().get(), k);
    CMatrix acc(n->rows, n->cols);
    for (const auto& term : leibniz_expand(k, static_cast<int>(ch.size()))) {
      bool zero = false;
      for (std::size_t i = 0; i < ch.size(); ++i) {
        if (term.orders[i] > 0 && ch[i]->constant) {
          zero = true;
          break;
        }
      }
      if (zero) continue;
      CMatrix part = eval(ch.front().get(), term.orders.front());
      for (std::size_t i = 1; i < ch.size(); ++i) part = part * eval(ch[i].get(), term.orders[i]);
      acc += static_cast<Complex>(term.coefficient) * part;
    }
    return acc;
  }

  void ensure_point() {
    if (solved_) return;
    ctx_.a0().require_resolvent(lambda_);
    const auto& tr = ctx_.triple();
    const CMatrix f = gamma_solution(tr, lambda_);
    gamma_ = tr.P * f;
    weyl_ = tr.gamma1 * f;
    const CMatrix gc = (lambda_.imag() == 0.0) ? gamma_ : qbt::gamma(tr, std::conj(lambda_));
    gamma_star_ = weighted_adjoint(gc, tr.boundary, tr.interior);
    solved_ = true;
  }

  const CMatrix& gamma() {
    ensure_point();
    return gamma_;
  }
  const CMatrix& gamma_star() {
    ensure_point();
    return gamma_star_;
  }
  const CMatrix& weyl() {
    ensure_point();
    return weyl_;
  }

  const CMatrix& resolvent_power(int j) {
    auto it = res_.find(j);
    if (it == res_.end()) {
      ensure_point();
      it = res_.emplace(j, ctx_.a0().resolvent_power(lambda_, j)).first;
    }
    return it->second;
  }

  const TripleCalculus& ctx_;
  Complex lambda_;
  int max_order_;
  bool solved_ = false;
  CMatrix gamma_, gamma_star_, weyl_;
  std::map<int, CMatrix> res_;
  std::map<std::pair<const OperatorExpr::Node*, int>, CMatrix> memo_;
};

}  // namespace

CMatrix derivative(const TripleCalculus& ctx, const OperatorExpr& expr, int k, Complex lambda,
                   int max_order) {
  Evaluation ev(ctx, lambda, max_order);
  return ev.eval(expr.node(), k);
}

double default_fd_step(int k) {
  // cancellation grows like eps/h^k, so higher orders need wider stencils
  return k <= 2 ? 1e-3 : k == 3 ? 1e-2 : 2e-2;
}

CMatrix fd_derivative(const TripleCalculus& ctx, const OperatorExpr& expr, int k, Complex lambda,
                      double h) {
  if (k < 0 || k > 4) throw Error(ErrorCode::DepthExceeded, "fd_derivative supports k ≤ 4");
  if (h <= 0.0) h = default_fd_step(k) * std::max(1.0, std::abs(lambda));
  auto value_at = [&](Complex mu) {
    try {
      return derivative(ctx, expr, 0, mu);
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::LambdaInSpectrum:
        case ErrorCode::SingularInverse:
        case ErrorCode::SingularWeyl:
        case ErrorCode::SingularRobinToNeumann:
          throw Error(ErrorCode::StencilHitsSpectrum, e.what());
        default: throw;
      }
    }
  };
  if (k == 0) return value_at(lambda);
  auto central = [&](double step) {
    CMatrix acc(expr.rows(), expr.cols());
    for (int j = 0; j <= k; ++j) {
      const double offset = (0.5 * k - j) * step;
      const double c = ((j % 2) ? -1.0 : 1.0) * binomial(k, j);
      acc += static_cast<Complex>(c) * value_at(lambda + offset);
    }
    acc *= 1.0 / std::pow(step, k);
    return acc;
  };
  CMatrix coarse = central(h);
  CMatrix fine = central(0.5 * h);
  fine *= 4.0 / 3.0;
  coarse *= 1.0 / 3.0;
  return fine - coarse;
}

std::vector<LeibnizTerm> leibniz_expand(int order, int arity) {
  if (order < 0 || arity < 1) throw Error(ErrorCode::DimensionMismatch, "leibniz_expand arguments");
  std::vector<LeibnizTerm> out;
  std::vector<int> cur(static_cast<std::size_t>(arity), 0);
  compositions(order, 0, cur, out, order);
  return out;
}

}  // namespace qbt
