#include "qbt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <omp.h>

#include "qbt/error.hpp"

namespace qbt::kernels {

namespace {

inline double conj_of(double x) { return x; }
inline Complex conj_of(const Complex& x) { return std::conj(x); }
inline double abs2(double x) { return x * x; }
inline double abs2(const Complex& x) { return std::norm(x); }
inline double real_of(double x) { return x; }
inline double real_of(const Complex& x) { return x.real(); }

void check_gemm_shapes(const CMatrix& a, const CMatrix& b, CMatrix& c) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "gemm: inner dimensions differ");
  }
  if (c.rows() != a.rows() || c.cols() != b.cols()) c = CMatrix(a.rows(), b.cols());
}

// One output row; shared by both gemm flavours so the summation order is fixed.
inline void gemm_row(const CMatrix& a, const CMatrix& b, CMatrix& c, std::size_t i) {
  auto out = c.row(i);
  std::fill(out.begin(), out.end(), Complex{});
  const std::size_t nc = b.cols();
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const Complex aik = a(i, k);
    if (aik == Complex{}) continue;
    const Complex* brow = b.row(k).data();
    Complex* o = out.data();
    for (std::size_t j = 0; j < nc; ++j) o[j] += aik * brow[j];
  }
}

double pivot_floor_of(const CMatrix& a, double rel_threshold) {
  double max_col = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::norm(a(i, j));
    max_col = std::max(max_col, std::sqrt(s));
  }
  return rel_threshold * max_col;
}

// Pivot search and row swap for column k; returns false if the pivot is too small.
bool pivot_step(LuFactors& f, std::size_t k) {
  CMatrix& lu = f.lu;
  const std::size_t n = lu.rows();
  std::size_t best = k;
  double best_abs = std::abs(lu(k, k));
  for (std::size_t i = k + 1; i < n; ++i) {
    const double v = std::abs(lu(i, k));
    if (v > best_abs) {
      best_abs = v;
      best = i;
    }
  }
  f.min_pivot = (k == 0) ? best_abs : std::min(f.min_pivot, best_abs);
  if (!(best_abs > f.pivot_floor)) {
    f.singular = true;
    return false;
  }
  if (best != k) {
    std::swap_ranges(lu.row(k).begin(), lu.row(k).end(), lu.row(best).begin());
    std::swap(f.perm[k], f.perm[best]);
  }
  return true;
}

inline void eliminate_row(CMatrix& lu, std::size_t k, std::size_t i) {
  const std::size_t n = lu.cols();
  const Complex l = lu(i, k) / lu(k, k);
  lu(i, k) = l;
  if (l == Complex{}) return;
  const Complex* pk = lu.row(k).data();
  Complex* pi = lu.row(i).data();
  for (std::size_t j = k + 1; j < n; ++j) pi[j] -= l * pk[j];
}

LuFactors init_lu(CMatrix a, double rel_threshold) {
  if (!a.square()) throw Error(ErrorCode::NotSquare, "lu_factor needs a square matrix");
  LuFactors f;
  f.pivot_floor = pivot_floor_of(a, rel_threshold);
  f.perm.resize(a.rows());
  std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
  f.lu = std::move(a);
  return f;
}

inline void solve_column_block(const LuFactors& f, const CMatrix& permuted, CMatrix& rhs,
                               std::size_t j) {
  const CMatrix& lu = f.lu;
  const std::size_t n = lu.rows();
  std::vector<Complex> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = permuted(i, j);
  for (std::size_t i = 0; i < n; ++i) {
    Complex s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= lu(i, k) * x[k];
    x[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    Complex s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= lu(ii, k) * x[k];
    x[ii] = s / lu(ii, ii);
  }
  for (std::size_t i = 0; i < n; ++i) rhs(i, j) = x[i];
}

CMatrix permute_rows(const LuFactors& f, const CMatrix& rhs) {
  if (rhs.rows() != f.lu.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "lu_solve: rhs row count");
  }
  if (f.singular) throw Error(ErrorCode::Singular, "lu_solve on singular factors");
  CMatrix p(rhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < rhs.rows(); ++i) {
    std::copy(rhs.row(f.perm[i]).begin(), rhs.row(f.perm[i]).end(), p.row(i).begin());
  }
  return p;
}

// ---- Jacobi machinery --------------------------------------------------------

template <class T>
struct Rotation {
  std::size_t p, q;
  double c, s, t, mag;
  T phase;  // a_pq / |a_pq|
  bool active;
};

template <class T>
Rotation<T> make_rotation(const std::vector<T>& a, std::size_t n, std::size_t p, std::size_t q,
                          double negligible) {
  Rotation<T> r{p, q, 1.0, 0.0, 0.0, 0.0, T(1), false};
  const T apq = a[p * n + q];
  const double mag = std::sqrt(abs2(apq));
  if (mag <= negligible) return r;
  const double app = real_of(a[p * n + p]);
  const double aqq = real_of(a[q * n + q]);
  const double tau = (aqq - app) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  r.c = 1.0 / std::sqrt(1.0 + t * t);
  r.s = t * r.c;
  r.t = t;
  r.mag = mag;
  r.phase = apq / mag;
  r.active = true;
  return r;
}

// A ← A·J on columns p, q; the same update is applied to V.
template <class T>
inline void rotate_cols(std::vector<T>& m, std::size_t n, const Rotation<T>& r) {
  const T se = r.s * r.phase;
  const T sec = r.s * conj_of(r.phase);
  for (std::size_t k = 0; k < n; ++k) {
    T& mp = m[k * n + r.p];
    T& mq = m[k * n + r.q];
    const T xp = mp, xq = mq;
    mp = r.c * xp - sec * xq;
    mq = se * xp + r.c * xq;
  }
}

// A ← J^H·A on rows p, q.
template <class T>
inline void rotate_rows(std::vector<T>& a, std::size_t n, const Rotation<T>& r) {
  const T se = r.s * r.phase;
  const T sec = r.s * conj_of(r.phase);
  T* rp = a.data() + r.p * n;
  T* rq = a.data() + r.q * n;
  for (std::size_t k = 0; k < n; ++k) {
    const T xp = rp[k], xq = rq[k];
    rp[k] = r.c * xp - se * xq;
    rq[k] = sec * xp + r.c * xq;
  }
}

template <class T>
inline void settle(std::vector<T>& a, std::size_t n, const Rotation<T>& r, double app,
                   double aqq) {
  a[r.p * n + r.p] = T(app - r.t * r.mag);
  a[r.q * n + r.q] = T(aqq + r.t * r.mag);
  a[r.p * n + r.q] = T(0);
  a[r.q * n + r.p] = T(0);
}

template <class T>
double off_norm(const std::vector<T>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += abs2(a[i * n + j]);
  return std::sqrt(s);
}

template <class T>
double frob(const std::vector<T>& a) {
  double s = 0.0;
  for (const auto& x : a) s += abs2(x);
  return std::sqrt(s);
}

template <class T>
JacobiResult<T> finish(std::vector<T>& a, std::vector<T>& v, std::size_t n, int sweeps,
                       bool converged) {
  JacobiResult<T> out;
  out.sweeps = sweeps;
  out.converged = converged;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return real_of(a[x * n + x]) < real_of(a[y * n + y]);
  });
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = real_of(a[order[j] * n + order[j]]);
    for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + j] = v[i * n + order[j]];
  }
  return out;
}

template <class T>
std::vector<T> identity_buffer(std::size_t n) {
  std::vector<T> v(n * n, T(0));
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = T(1);
  return v;
}

constexpr double kJacobiStop = 1e-15;
// Entries below this fraction of ‖A‖_F are left alone; a sweep without any
// rotation above it counts as converged.
constexpr double kJacobiNegligible = 1e-18;

// One row of rhs − A·x with long double accumulation.
void residual_row(const CMatrix& a, const CMatrix& rhs, const CMatrix& x, std::size_t i, CMatrix& r) {
  using Wide = std::complex<long double>;
  const std::size_t n = a.cols(), g = x.cols();
  std::vector<Wide> acc(g);
  for (std::size_t j = 0; j < g; ++j) acc[j] = Wide(rhs(i, j).real(), rhs(i, j).imag());
  for (std::size_t k = 0; k < n; ++k) {
    const Complex aik = a(i, k);
    if (aik == Complex(0.0)) continue;
    const Wide w(aik.real(), aik.imag());
    for (std::size_t j = 0; j < g; ++j) acc[j] -= w * Wide(x(k, j).real(), x(k, j).imag());
  }
  for (std::size_t j = 0; j < g; ++j) {
    r(i, j) = Complex(static_cast<double>(acc[j].real()), static_cast<double>(acc[j].imag()));
  }
}

}  // namespace

// ---- parallel flavours ------------------------------------------------------

void gemm(const CMatrix& a, const CMatrix& b, CMatrix& c) {
  check_gemm_shapes(a, b, c);
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) gemm_row(a, b, c, static_cast<std::size_t>(i));
}

LuFactors lu_factor(CMatrix a, double rel_threshold) {
  LuFactors f = init_lu(std::move(a), rel_threshold);
  const std::size_t n = f.lu.rows();
  for (std::size_t k = 0; k < n; ++k) {
    if (!pivot_step(f, k)) return f;
    const auto lo = static_cast<std::ptrdiff_t>(k + 1);
    const auto hi = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n - k > 64)
    for (std::ptrdiff_t i = lo; i < hi; ++i) eliminate_row(f.lu, k, static_cast<std::size_t>(i));
  }
  return f;
}

void lu_solve(const LuFactors& f, CMatrix& rhs) {
  const CMatrix p = permute_rows(f, rhs);
  const auto cols = static_cast<std::ptrdiff_t>(rhs.cols());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < cols; ++j) solve_column_block(f, p, rhs, static_cast<std::size_t>(j));
}

void lu_refine(const CMatrix& a, const LuFactors& f, const CMatrix& rhs, CMatrix& x, int steps) {
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
  for (int s = 0; s < steps; ++s) {
    CMatrix r(x.rows(), x.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) residual_row(a, rhs, x, static_cast<std::size_t>(i), r);
    lu_solve(f, r);
    x += r;
  }
}

// Round-robin (tournament) ordering: each round rotates n/2 disjoint pairs,
// which are applied concurrently. The ordering does not depend on the thread
// count, so results are reproducible across machines.
template <class T>
JacobiResult<T> jacobi_eig(std::span<const T> in, std::size_t n, int max_sweeps) {
  std::vector<T> a(in.begin(), in.end());
  std::vector<T> v = identity_buffer<T>(n);
  if (n <= 1) return finish(a, v, n, 0, true);
  const double scale = frob(a);
  const std::size_t m = (n % 2 == 0) ? n : n + 1;
  std::vector<std::size_t> slot(m);
  std::vector<Rotation<T>> rots(m / 2);
  std::vector<double> diag_p(m / 2), diag_q(m / 2);
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_norm(a, n) <= kJacobiStop * scale) return finish(a, v, n, sweep, true);
    bool any_active = false;
    for (std::size_t round = 0; round + 1 < m; ++round) {
      slot[0] = 0;
      for (std::size_t j = 1; j < m; ++j) slot[j] = 1 + (j - 1 + round) % (m - 1);
      for (std::size_t k = 0; k < m / 2; ++k) {
        std::size_t p = slot[k], q = slot[m - 1 - k];
        if (p > q) std::swap(p, q);
        if (q >= n) {
          rots[k].active = false;
          continue;
        }
        rots[k] = make_rotation(a, n, p, q, kJacobiNegligible * scale);
        any_active = any_active || rots[k].active;
        diag_p[k] = real_of(a[p * n + p]);
        diag_q[k] = real_of(a[q * n + q]);
      }
      const auto npairs = static_cast<std::ptrdiff_t>(m / 2);
#pragma omp parallel
      {
#pragma omp for schedule(static)
        for (std::ptrdiff_t k = 0; k < npairs; ++k) {
          if (!rots[k].active) continue;
          rotate_cols(a, n, rots[k]);
          rotate_cols(v, n, rots[k]);
        }
#pragma omp for schedule(static)
        for (std::ptrdiff_t k = 0; k < npairs; ++k) {
          if (!rots[k].active) continue;
          rotate_rows(a, n, rots[k]);
          settle(a, n, rots[k], diag_p[k], diag_q[k]);
        }
      }
    }
    if (!any_active) return finish(a, v, n, sweep + 1, true);
  }
  const bool ok = off_norm(a, n) <= kJacobiStop * scale;
  return finish(a, v, n, sweep, ok);
}

template JacobiResult<double> jacobi_eig<double>(std::span<const double>, std::size_t, int);
template JacobiResult<Complex> jacobi_eig<Complex>(std::span<const Complex>, std::size_t, int);

// ---- serial references ------------------------------------------------------

namespace serial {

void gemm(const CMatrix& a, const CMatrix& b, CMatrix& c) {
  check_gemm_shapes(a, b, c);
  for (std::size_t i = 0; i < a.rows(); ++i) gemm_row(a, b, c, i);
}

LuFactors lu_factor(CMatrix a, double rel_threshold) {
  LuFactors f = init_lu(std::move(a), rel_threshold);
  const std::size_t n = f.lu.rows();
  for (std::size_t k = 0; k < n; ++k) {
    if (!pivot_step(f, k)) return f;
    for (std::size_t i = k + 1; i < n; ++i) eliminate_row(f.lu, k, i);
  }
  return f;
}

void lu_solve(const LuFactors& f, CMatrix& rhs) {
  const CMatrix p = permute_rows(f, rhs);
  for (std::size_t j = 0; j < rhs.cols(); ++j) solve_column_block(f, p, rhs, j);
}

void lu_refine(const CMatrix& a, const LuFactors& f, const CMatrix& rhs, CMatrix& x, int steps) {
  for (int s = 0; s < steps; ++s) {
    CMatrix r(x.rows(), x.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) residual_row(a, rhs, x, i, r);
    serial::lu_solve(f, r);
    x += r;
  }
}

// Classical cyclic-by-row Jacobi.
template <class T>
JacobiResult<T> jacobi_eig(std::span<const T> in, std::size_t n, int max_sweeps) {
  std::vector<T> a(in.begin(), in.end());
  std::vector<T> v = identity_buffer<T>(n);
  if (n <= 1) return finish(a, v, n, 0, true);
  const double scale = frob(a);
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (off_norm(a, n) <= kJacobiStop * scale) return finish(a, v, n, sweep, true);
    bool any_active = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const auto r = make_rotation(a, n, p, q, kJacobiNegligible * scale);
        if (!r.active) continue;
        any_active = true;
        const double app = real_of(a[p * n + p]);
        const double aqq = real_of(a[q * n + q]);
        rotate_cols(a, n, r);
        rotate_cols(v, n, r);
        rotate_rows(a, n, r);
        settle(a, n, r, app, aqq);
      }
    }
    if (!any_active) return finish(a, v, n, sweep + 1, true);
  }
  const bool ok = off_norm(a, n) <= kJacobiStop * scale;
  return finish(a, v, n, sweep, ok);
}

template JacobiResult<double> jacobi_eig<double>(std::span<const double>, std::size_t, int);
template JacobiResult<Complex> jacobi_eig<Complex>(std::span<const Complex>, std::size_t, int);

}  // namespace serial

}  // namespace qbt::kernels
