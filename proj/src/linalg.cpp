#include "qbt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbt/error.hpp"
#include "qbt/kernels.hpp"

namespace qbt {

WeightedSpace::WeightedSpace(RealVector weights) : weights_(std::move(weights)) {
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::DimensionMismatch, "weights must be positive and finite");
    }
  }
}

WeightedSpace WeightedSpace::uniform(std::size_t dim, double w) {
  return WeightedSpace(RealVector(dim, w));
}

Complex WeightedSpace::inner(std::span<const Complex> f, std::span<const Complex> g) const {
  if (f.size() != dim() || g.size() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "inner product length");
  }
  Complex s{};
  for (std::size_t i = 0; i < dim(); ++i) s += weights_[i] * f[i] * std::conj(g[i]);
  return s;
}

double WeightedSpace::norm(std::span<const Complex> f) const { return std::sqrt(inner(f, f).real()); }

RealVector WeightedSpace::sqrt_weights() const {
  RealVector r(dim());
  std::transform(weights_.begin(), weights_.end(), r.begin(), [](double w) { return std::sqrt(w); });
  return r;
}

RealVector WeightedSpace::inv_sqrt_weights() const {
  RealVector r(dim());
  std::transform(weights_.begin(), weights_.end(), r.begin(),
                 [](double w) { return 1.0 / std::sqrt(w); });
  return r;
}

WeightedSpace direct_sum(std::span<const WeightedSpace> spaces) {
  RealVector w;
  for (const auto& s : spaces) w.insert(w.end(), s.weights().begin(), s.weights().end());
  return WeightedSpace(std::move(w));
}

CMatrix weighted_adjoint(const CMatrix& a, const WeightedSpace& from, const WeightedSpace& to) {
  if (a.cols() != from.dim() || a.rows() != to.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "weighted_adjoint: space dimensions");
  }
  CMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      t(j, i) = std::conj(a(i, j)) * (to.weight(i) / from.weight(j));
  return t;
}

CMatrix to_orthonormal(const CMatrix& a, const WeightedSpace& space) {
  return scale_cols(scale_rows(space.sqrt_weights(), a), space.inv_sqrt_weights());
}

CMatrix from_orthonormal(const CMatrix& a, const WeightedSpace& space) {
  return scale_cols(scale_rows(space.inv_sqrt_weights(), a), space.sqrt_weights());
}

double self_adjoint_defect(const CMatrix& a, const WeightedSpace& space) {
  if (!a.square() || a.rows() != space.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "self_adjoint_defect");
  }
  const CMatrix wa = scale_rows(space.weights(), a);
  const double scale = wa.max_abs();
  if (scale == 0.0) return 0.0;
  return max_abs_diff(wa, wa.adjoint()) / scale;
}

EigenDecomposition hermitian_eig(const CMatrix& a, double tol) {
  if (!a.square()) throw Error(ErrorCode::NotSquare, "hermitian_eig");
  if (!a.all_finite()) throw Error(ErrorCode::NonFinite, "hermitian_eig input");
  const std::size_t n = a.rows();
  const double scale = a.max_abs();
  const CMatrix ah = a.adjoint();
  if (max_abs_diff(a, ah) > tol * scale) {
    throw Error(ErrorCode::NotHermitian, "‖A − A^H‖ exceeds tolerance");
  }
  CMatrix sym = a + ah;
  sym *= 0.5;

  EigenDecomposition out;
  out.vectors = CMatrix(n, n);
  bool converged = false;
  if (sym.is_real()) {
    std::vector<double> buf(n * n);
    for (std::size_t i = 0; i < n * n; ++i) buf[i] = sym.data()[i].real();
    auto r = kernels::jacobi_eig<double>(buf, n);
    converged = r.converged;
    out.values = std::move(r.values);
    out.sweeps = r.sweeps;
    for (std::size_t i = 0; i < n * n; ++i) out.vectors.data()[i] = r.vectors[i];
  } else {
    auto r = kernels::jacobi_eig<Complex>(sym.data(), n);
    converged = r.converged;
    out.values = std::move(r.values);
    out.sweeps = r.sweeps;
    std::copy(r.vectors.begin(), r.vectors.end(), out.vectors.data().begin());
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "Jacobi sweep budget exhausted");
  return out;
}

CMatrix solve(const CMatrix& a, const CMatrix& rhs, double rel_pivot) {
  if (!a.square()) throw Error(ErrorCode::NotSquare, "solve");
  if (rhs.rows() != a.rows()) throw Error(ErrorCode::DimensionMismatch, "solve: rhs rows");
  auto f = kernels::lu_factor(a, rel_pivot);
  if (f.singular) throw Error(ErrorCode::Singular, "pivot below threshold");
  CMatrix x = rhs;
  kernels::lu_solve(f, x);
  kernels::lu_refine(a, f, rhs, x);
  return x;
}

CMatrix inverse(const CMatrix& a, double rel_pivot) {
  return solve(a, CMatrix::identity(a.rows()), rel_pivot);
}

RealVector svd_values(const CMatrix& k) {
  if (!k.all_finite()) throw Error(ErrorCode::NonFinite, "svd_values input");
  const std::size_t count = std::min(k.rows(), k.cols());
  if (count == 0) return {};
  const CMatrix gram = (k.rows() >= k.cols()) ? k.adjoint() * k : k * k.adjoint();
  const auto eig = hermitian_eig(gram, 1e-8);
  const double top = std::max(0.0, eig.values.back());
  const double floor =
      static_cast<double>(gram.rows()) * std::numeric_limits<double>::epsilon() * top;
  RealVector s(eig.values.rbegin(), eig.values.rend());
  for (auto& v : s) v = (v > floor) ? std::sqrt(v) : 0.0;
  s.resize(count);
  return s;
}

RealVector weighted_svd_values(const CMatrix& k, const WeightedSpace& from,
                               const WeightedSpace& to) {
  if (k.cols() != from.dim() || k.rows() != to.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "weighted_svd_values");
  }
  return svd_values(scale_cols(scale_rows(to.sqrt_weights(), k), from.inv_sqrt_weights()));
}

Complex trace(const CMatrix& k) {
  if (!k.square()) throw Error(ErrorCode::NotSquare, "trace");
  Complex s{};
  for (std::size_t i = 0; i < k.rows(); ++i) s += k(i, i);
  return s;
}

double weak_schatten_quasinorm(std::span<const double> s, double p) {
  if (s.empty()) throw Error(ErrorCode::EmptySequence, "weak_schatten_quasinorm");
  if (!(p > 0.0)) throw Error(ErrorCode::DimensionMismatch, "p must be positive");
  double best = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    best = std::max(best, std::pow(static_cast<double>(k + 1), 1.0 / p) * s[k]);
  }
  return best;
}

CMatrix null_space(const CMatrix& c, double rank_tol) {
  const std::size_t r = c.rows();
  const std::size_t n = c.cols();
  if (r > n) throw Error(ErrorCode::DegenerateKernel, "more constraints than unknowns");
  CMatrix x = c.adjoint();  // n × r
  std::vector<ComplexVector> reflectors;
  reflectors.reserve(r);
  double rmax = 0.0;
  std::vector<double> diag(r);
  for (std::size_t j = 0; j < r; ++j) {
    double nrm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) nrm2 += std::norm(x(i, j));
    const double nrm = std::sqrt(nrm2);
    ComplexVector v(n - j);
    for (std::size_t i = j; i < n; ++i) v[i - j] = x(i, j);
    const Complex x0 = v[0];
    const Complex phase = (std::abs(x0) > 0.0) ? x0 / std::abs(x0) : Complex(1.0);
    const Complex alpha = -phase * nrm;
    v[0] -= alpha;
    double vn2 = 0.0;
    for (const auto& e : v) vn2 += std::norm(e);
    if (vn2 > 0.0) {
      const double inv = 1.0 / std::sqrt(vn2);
      for (auto& e : v) e *= inv;
      for (std::size_t col = j; col < r; ++col) {
        Complex d{};
        for (std::size_t i = j; i < n; ++i) d += std::conj(v[i - j]) * x(i, col);
        for (std::size_t i = j; i < n; ++i) x(i, col) -= 2.0 * v[i - j] * d;
      }
    }
    diag[j] = nrm;
    rmax = std::max(rmax, nrm);
    reflectors.push_back(std::move(v));
  }
  for (double d : diag) {
    if (!(d > rank_tol * rmax)) {
      throw Error(ErrorCode::DegenerateKernel, "constraint map is rank deficient");
    }
  }
  // Columns r..n-1 of Q = H_0 H_1 ... H_{r-1}.
  CMatrix q(n, n - r);
  for (std::size_t k = 0; k < n - r; ++k) q(r + k, k) = 1.0;
  for (std::size_t jj = r; jj-- > 0;) {
    const auto& v = reflectors[jj];
    for (std::size_t col = 0; col < n - r; ++col) {
      Complex d{};
      for (std::size_t i = jj; i < n; ++i) d += std::conj(v[i - jj]) * q(i, col);
      if (d == Complex{}) continue;
      for (std::size_t i = jj; i < n; ++i) q(i, col) -= 2.0 * v[i - jj] * d;
    }
  }
  return q;
}

std::size_t numerical_rank(const CMatrix& a, double rel_tol) {
  const auto s = svd_values(a);
  if (s.empty() || s.front() == 0.0) return 0;
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [&](double v) { return v > rel_tol * s.front(); }));
}

}  // namespace qbt
