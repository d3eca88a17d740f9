#include "qbt/triple.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include "qbt/error.hpp"
#include "qbt/kernels.hpp"

namespace qbt {

void QuasiTriple::validate() const {
  const std::size_t n = T.cols();
  const bool ok = T.rows() == interior.dim() && P.rows() == interior.dim() && P.cols() == n &&
                  gamma0.rows() == boundary.dim() && gamma0.cols() == n &&
                  gamma1.rows() == boundary.dim() && gamma1.cols() == n;
  if (!ok) throw Error(ErrorCode::DimensionMismatch, "quasi triple shapes are inconsistent");
}

QuasiTriple direct_sum(std::span<const QuasiTriple> blocks) {
  std::vector<WeightedSpace> hs, gs;
  std::vector<CMatrix> ts, ps, g0s, g1s;
  for (const auto& b : blocks) {
    b.validate();
    hs.push_back(b.interior);
    gs.push_back(b.boundary);
    ts.push_back(b.T);
    ps.push_back(b.P);
    g0s.push_back(b.gamma0);
    g1s.push_back(b.gamma1);
  }
  return QuasiTriple{direct_sum(std::span<const WeightedSpace>(hs)),
                     direct_sum(std::span<const WeightedSpace>(gs)),
                     block_diagonal(ts),
                     block_diagonal(ps),
                     block_diagonal(g0s),
                     block_diagonal(g1s)};
}

RobinParameter make_robin(CMatrix b, const WeightedSpace& boundary,
                          std::optional<double> declared_s) {
  if (!b.square() || b.rows() != boundary.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "boundary operator size differs from dim G");
  }
  if (!b.all_finite()) throw Error(ErrorCode::NonFinite, "boundary operator");
  if (self_adjoint_defect(b, boundary) > 1e-12) {
    throw Error(ErrorCode::NotSelfAdjoint, "B is not self-adjoint in the boundary space");
  }
  if (declared_s && !(*declared_s > 0.0)) {
    throw Error(ErrorCode::DimensionMismatch, "declared weak-Schatten index must be positive");
  }
  return RobinParameter{std::move(b), declared_s};
}

GreenReport check_green_identity(const QuasiTriple& tr, std::size_t samples, double tol,
                                 std::uint64_t seed) {
  tr.validate();
  if (samples == 0) throw Error(ErrorCode::UsageError, "samples must be at least 1");
  const auto& wh = tr.interior.weights();
  const auto& wg = tr.boundary.weights();
  GreenReport rep;
  rep.samples = samples;
  rep.tol = tol;
  {
    const CMatrix pw = tr.P.adjoint() * scale_rows(wh, tr.T);
    const CMatrix gw = tr.gamma0.adjoint() * scale_rows(wg, tr.gamma1);
    rep.scale = std::max({1.0, pw.max_abs(), gw.max_abs()});
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const std::size_t n = tr.dom_dim();
  auto draw = [&] {
    ComplexVector v(n);
    for (auto& x : v) x = Complex(nd(rng), nd(rng));
    return v;
  };
  auto euclid = [](const ComplexVector& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const ComplexVector f = draw();
    const ComplexVector g = draw();
    const Complex lhs = tr.interior.inner(tr.T * f, tr.P * g) - tr.interior.inner(tr.P * f, tr.T * g);
    const Complex rhs = tr.boundary.inner(tr.gamma1 * f, tr.gamma0 * g) -
                        tr.boundary.inner(tr.gamma0 * f, tr.gamma1 * g);
    const double r = std::abs(lhs - rhs) / (1.0 + euclid(f) * euclid(g));
    rep.max_residual = std::max(rep.max_residual, r);
  }
  rep.pass = rep.max_residual <= tol * rep.scale;
  return rep;
}

namespace {

CMatrix restrict_with(const QuasiTriple& tr, const CMatrix& constraint) {
  tr.validate();
  const CMatrix k = null_space(constraint);
  if (k.cols() != tr.interior_dim()) {
    throw Error(ErrorCode::DegenerateKernel, "kernel dimension differs from dim H");
  }
  const CMatrix pk = tr.P * k;
  const CMatrix tk = tr.T * k;
  CMatrix pk_inv;
  try {
    pk_inv = inverse(pk, 1e-12);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Singular) {
      throw Error(ErrorCode::DegenerateKernel, "P restricted to the kernel is singular");
    }
    throw;
  }
  CMatrix a = tk * pk_inv;
  if (self_adjoint_defect(a, tr.interior) > 1e-10) {
    throw Error(ErrorCode::NotSelfAdjoint, "restricted operator is not self-adjoint");
  }
  return a;
}

}  // namespace

CMatrix restrict_to_kernel(const QuasiTriple& tr, TraceKernel which) {
  return restrict_with(tr, which == TraceKernel::Gamma0 ? tr.gamma0 : tr.gamma1);
}

CMatrix restrict_to_kernel(const QuasiTriple& tr, const RobinParameter& b) {
  if (b.B.rows() != tr.boundary_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "B does not act on the boundary space");
  }
  if (self_adjoint_defect(b.B, tr.boundary) > 1e-12) {
    throw Error(ErrorCode::NotSelfAdjoint, "B is not self-adjoint");
  }
  return restrict_with(tr, b.B * tr.gamma1 - tr.gamma0);
}

Realization::Realization(CMatrix a, WeightedSpace space) : a_(std::move(a)), space_(std::move(space)) {
  if (!a_.square() || a_.rows() != space_.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "realization size");
  }
  CMatrix s = to_orthonormal(a_, space_);
  CMatrix sym = s + s.adjoint();
  sym *= 0.5;
  eig_ = hermitian_eig(sym);
}

double Realization::distance_to_spectrum(Complex lambda) const {
  double d = std::numeric_limits<double>::infinity();
  for (double mu : eig_.values) d = std::min(d, std::abs(mu - lambda));
  return d;
}

void Realization::require_resolvent(Complex lambda) const {
  double top = 1.0;
  for (double mu : eig_.values) top = std::max(top, std::abs(mu));
  if (distance_to_spectrum(lambda) <= 1e-12 * top) {
    throw Error(ErrorCode::LambdaInSpectrum, "λ lies on the spectrum of the realization");
  }
}

CMatrix Realization::resolvent_power_orthonormal(Complex lambda, int k) const {
  require_resolvent(lambda);
  const std::size_t n = eig_.values.size();
  const CMatrix& q = eig_.vectors;
  CMatrix qd(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex f = std::pow(Complex(eig_.values[j]) - lambda, -k);
    for (std::size_t i = 0; i < n; ++i) qd(i, j) = q(i, j) * f;
  }
  return qd * q.adjoint();
}

CMatrix Realization::resolvent_power(Complex lambda, int k) const {
  return from_orthonormal(resolvent_power_orthonormal(lambda, k), space_);
}

Complex Realization::trace_resolvent_power(Complex lambda, int k) const {
  require_resolvent(lambda);
  Complex s{};
  for (double mu : eig_.values) s += std::pow(Complex(mu) - lambda, -k);
  return s;
}

CMatrix gamma_solution(const QuasiTriple& tr, Complex lambda) {
  tr.validate();
  const std::size_t h = tr.interior_dim(), g = tr.boundary_dim(), n = tr.dom_dim();
  if (h + g != n) {
    throw Error(ErrorCode::DimensionMismatch, "stacked system [T − λP; Γ0] is not square");
  }
  CMatrix stacked(n, n);
  stacked.set_block(0, 0, tr.T - lambda * tr.P);
  stacked.set_block(h, 0, tr.gamma0);
  auto lu = kernels::lu_factor(stacked, kSpectrumPivotThreshold);
  if (lu.singular) {
    throw Error(ErrorCode::LambdaInSpectrum, "stacked γ-system is singular at λ");
  }
  CMatrix rhs(n, g);
  for (std::size_t j = 0; j < g; ++j) rhs(h + j, j) = 1.0;
  CMatrix x = rhs;
  kernels::lu_solve(lu, x);
  // Residuals use T and λP separately: rounding T − λP costs ‖T‖·eps per
  // entry, which is not smooth in λ.
  using Wide = std::complex<long double>;
  const Wide wl(lambda.real(), lambda.imag());
  auto wide = [](Complex z) { return Wide(z.real(), z.imag()); };
  for (int step = 0; step < 2; ++step) {
    CMatrix r(n, g);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      std::vector<Wide> acc(g);
      for (std::size_t j = 0; j < g; ++j) acc[j] = wide(rhs(i, j));
      for (std::size_t k = 0; k < n; ++k) {
        Wide w;
        if (i < h) {
          const Complex t = tr.T(i, k), q = tr.P(i, k);
          if (t == Complex(0.0) && q == Complex(0.0)) continue;
          w = wide(t) - wl * wide(q);
        } else {
          const Complex t = tr.gamma0(i - h, k);
          if (t == Complex(0.0)) continue;
          w = wide(t);
        }
        for (std::size_t j = 0; j < g; ++j) acc[j] -= w * wide(x(k, j));
      }
      for (std::size_t j = 0; j < g; ++j) {
        r(i, j) = Complex(static_cast<double>(acc[j].real()), static_cast<double>(acc[j].imag()));
      }
    }
    kernels::lu_solve(lu, r);
    x += r;
  }
  return x;
}

CMatrix gamma(const QuasiTriple& tr, Complex lambda) { return tr.P * gamma_solution(tr, lambda); }

CMatrix gamma_star(const QuasiTriple& tr, Complex lambda) {
  return weighted_adjoint(gamma(tr, std::conj(lambda)), tr.boundary, tr.interior);
}

CMatrix weyl(const QuasiTriple& tr, Complex lambda) {
  return tr.gamma1 * gamma_solution(tr, lambda);
}

CMatrix krein_dn(const QuasiTriple& tr, Complex lambda) {
  const CMatrix f = gamma_solution(tr, lambda);
  const CMatrix g = tr.P * f;
  const CMatrix m = tr.gamma1 * f;
  const CMatrix gs = gamma_star(tr, lambda);
  CMatrix minv_gs;
  try {
    minv_gs = solve(m, gs, 1e-12);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Singular) {
      throw Error(ErrorCode::SingularWeyl, "M(λ) is singular (λ in the spectrum of A1)");
    }
    throw;
  }
  return g * minv_gs;
}

CMatrix krein_robin(const QuasiTriple& tr, const RobinParameter& b, Complex lambda,
                    KreinForm form) {
  if (b.B.rows() != tr.boundary_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "B does not act on the boundary space");
  }
  const CMatrix f = gamma_solution(tr, lambda);
  const CMatrix g = tr.P * f;
  const CMatrix m = tr.gamma1 * f;
  const CMatrix gs = gamma_star(tr, lambda);
  const CMatrix id = CMatrix::identity(tr.boundary_dim());
  try {
    if (form == KreinForm::Left) {
      return g * solve(id - b.B * m, b.B * gs, 1e-12);
    }
    return g * (b.B * solve(id - m * b.B, gs, 1e-12));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Singular) {
      throw Error(ErrorCode::SingularRobinToNeumann,
                  "I − BM(λ) is singular (λ in the spectrum of A_[B])");
    }
    throw;
  }
}

}  // namespace qbt
