#include "qbt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>

#include "qbt/error.hpp"

namespace qbt {

std::string_view to_string(Pair p) {
  switch (p) {
    case Pair::DN: return "dn";
    case Pair::RN: return "rn";
    case Pair::RR: return "rr";
    case Pair::RD: return "rd";
  }
  return "?";
}

Pair parse_pair(std::string_view s) {
  if (s == "dn") return Pair::DN;
  if (s == "rn") return Pair::RN;
  if (s == "rr") return Pair::RR;
  if (s == "rd") return Pair::RD;
  throw Error(ErrorCode::UsageError, "unknown pair '" + std::string(s) + "'");
}

namespace {

enum class Side { N, D, B1, B2 };

std::pair<Side, Side> sides(Pair p) {
  switch (p) {
    case Pair::DN: return {Side::N, Side::D};
    case Pair::RN: return {Side::B1, Side::N};
    case Pair::RR: return {Side::B1, Side::B2};
    case Pair::RD: return {Side::B1, Side::D};
  }
  return {Side::N, Side::D};
}

bool is_zero(const std::optional<RobinParameter>& b) { return !b || b->B.max_abs() == 0.0; }

RobinParameter or_zero(const std::optional<RobinParameter>& b, std::size_t g) {
  return b ? *b : RobinParameter{CMatrix(g, g), std::nullopt};
}

CMatrix side_matrix(const QuasiTriple& tr, Side s, const PairParams& params) {
  switch (s) {
    case Side::N: return restrict_to_kernel(tr, TraceKernel::Gamma0);
    case Side::D: return restrict_to_kernel(tr, TraceKernel::Gamma1);
    case Side::B1: return restrict_to_kernel(tr, or_zero(params.b1, tr.boundary_dim()));
    case Side::B2: return restrict_to_kernel(tr, or_zero(params.b2, tr.boundary_dim()));
  }
  return {};
}

// Realizations of both sides, reusing A_N from the calculus context.
struct SideRealizations {
  std::optional<Realization> own1, own2;
  const Realization* r1 = nullptr;
  const Realization* r2 = nullptr;
};

void realize(SideRealizations& out, const QuasiTriple& tr, Pair p, const PairParams& params,
             const Realization* a_n) {
  const auto [s1, s2] = sides(p);
  auto one = [&](Side s, std::optional<Realization>& own) -> const Realization* {
    if (s == Side::N && a_n) return a_n;
    own.emplace(side_matrix(tr, s, params), tr.interior);
    return &*own;
  };
  out.r1 = one(s1, out.own1);
  out.r2 = one(s2, out.own2);
}

// Runs fn(k) for every block; results land in fixed slots so the order of
// any later reduction does not depend on scheduling.
void for_each_block(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < n; ++k) {
    try {
      fn(k);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

struct RealizationCache {
  struct Block {
    std::once_flag calc_once, d_once, b1_once, b2_once;
    std::unique_ptr<TripleCalculus> calc;
    std::optional<Realization> d, b1, b2;
  };
  std::vector<std::unique_ptr<Block>> blocks;
};

namespace {

const TripleCalculus& cached_calculus(const Problem& pb, std::size_t k) {
  auto& b = *pb.cache->blocks[k];
  std::call_once(b.calc_once, [&] { b.calc = std::make_unique<TripleCalculus>(pb.model.blocks[k]); });
  return *b.calc;
}

const Realization& cached_side(const Problem& pb, std::size_t k, Side s) {
  if (s == Side::N) return cached_calculus(pb, k).a0();
  auto& b = *pb.cache->blocks[k];
  auto& slot = s == Side::D ? b.d : s == Side::B1 ? b.b1 : b.b2;
  auto& flag = s == Side::D ? b.d_once : s == Side::B1 ? b.b1_once : b.b2_once;
  std::call_once(flag, [&] {
    const auto& tr = pb.model.blocks[k];
    slot.emplace(side_matrix(tr, s, pb.params[k]), tr.interior);
  });
  return *slot;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double relative(Complex lhs, Complex rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

void require_m(int m) {
  if (m < 1) throw Error(ErrorCode::UsageError, "power m must be ≥ 1");
}

}  // namespace

double improvement_index(Pair p, const PairParams& params, int n) {
  std::optional<double> s;
  if (p == Pair::RN) {
    if (!is_zero(params.b1)) s = params.b1->declared_s;
  } else if (p == Pair::RR) {
    const bool z1 = is_zero(params.b1);
    const bool z2 = is_zero(params.b2);
    if (z2 && !z1) {
      s = params.b1->declared_s;
    } else if (z1 && !z2) {
      s = params.b2->declared_s;
    } else if (!z1 && !z2 && params.b1->declared_s && params.b2->declared_s) {
      s = std::max(*params.b1->declared_s, *params.b2->declared_s);
    }
  }
  if (!s || !(*s > 0.0)) return 0.0;
  return (n - 1) / *s;
}

std::optional<double> predicted_exponent(Pair p, int m, int n, double t) {
  if (n < 2) return std::nullopt;
  const double d = n - 1;
  if (p == Pair::DN || p == Pair::RD) return 2.0 * m / d;
  return (2.0 * m + 1.0 + t) / d;
}

PairRealizations pair_realizations(const QuasiTriple& tr, Pair p, const PairParams& params) {
  const auto [s1, s2] = sides(p);
  return {side_matrix(tr, s1, params), side_matrix(tr, s2, params)};
}

CMatrix resolvent_power_diff(const QuasiTriple& tr, Pair p, const PairParams& params, int m,
                             Complex lambda) {
  require_m(m);
  SideRealizations sr;
  realize(sr, tr, p, params, nullptr);
  return sr.r1->resolvent_power(lambda, m) - sr.r2->resolvent_power(lambda, m);
}

OperatorExpr boundary_factor(ExprDims d, Pair p, const PairParams& params) {
  const std::size_t g = d.boundary;
  switch (p) {
    case Pair::DN: return OperatorExpr::weyl_inverse(d);
    case Pair::RN: {
      const RobinParameter b = or_zero(params.b1, g);
      return OperatorExpr::named_tb(d, b.B) * OperatorExpr::constant(b.B, "B");
    }
    case Pair::RR:
      return OperatorExpr::named_u(d, or_zero(params.b1, g).B, or_zero(params.b2, g).B);
    case Pair::RD: return OperatorExpr::named_v(d, or_zero(params.b1, g).B);
  }
  throw Error(ErrorCode::UsageError, "unknown pair");
}

namespace {

TraceReport trace_sides(const TripleCalculus& ctx, const Realization& r1, const Realization& r2,
                        Pair p, const PairParams& params, int m, Complex lambda) {
  TraceReport rep;
  rep.pair = p;
  rep.m = m;
  rep.lambda = lambda;
  rep.lhs = r1.trace_resolvent_power(lambda, m) - r2.trace_resolvent_power(lambda, m);
  const auto d = ctx.dims();
  const OperatorExpr expr = boundary_factor(d, p, params) * OperatorExpr::weyl_prime(d);
  rep.rhs = trace(derivative(ctx, expr, m - 1, lambda)) / factorial(m - 1);
  return rep;
}

void finish(TraceReport& rep, int n) {
  rep.abs_discrepancy = std::abs(rep.lhs - rep.rhs);
  rep.rel_discrepancy = relative(rep.lhs, rep.rhs);
  rep.trace_class_condition = 2 * rep.m > n - 1;
}

}  // namespace

TraceReport trace_formula_check(const QuasiTriple& tr, Pair p, const PairParams& params, int m,
                                Complex lambda) {
  require_m(m);
  const TripleCalculus ctx(tr);
  SideRealizations sr;
  realize(sr, tr, p, params, &ctx.a0());
  TraceReport rep = trace_sides(ctx, *sr.r1, *sr.r2, p, params, m, lambda);
  finish(rep, 2);
  return rep;
}

Problem make_problem(const Model& model) {
  const auto& cfg = model.config;
  std::optional<RobinParameter> b1, b2;
  if (cfg.boundary_op) b1 = build_boundary_op(*cfg.boundary_op, model);
  if (cfg.boundary_op2) b2 = build_boundary_op(*cfg.boundary_op2, model);

  std::optional<std::vector<RobinParameter>> s1, s2;
  bool split = true;
  if (b1) {
    s1 = split_robin(*b1, model);
    split = split && s1.has_value();
  }
  if (b2) {
    s2 = split_robin(*b2, model);
    split = split && s2.has_value();
  }
  Problem pb;
  pb.cache = std::make_shared<RealizationCache>();
  if (split) {
    pb.model = model;
    pb.params.resize(model.blocks.size());
    for (std::size_t k = 0; k < model.blocks.size(); ++k) {
      if (s1) pb.params[k].b1 = (*s1)[k];
      if (s2) pb.params[k].b2 = (*s2)[k];
    }
  } else {
    pb.model = merge_blocks(model);
    pb.params.resize(1);
    pb.params[0].b1 = b1;
    pb.params[0].b2 = b2;
  }
  pb.cache->blocks.resize(pb.model.blocks.size());
  for (auto& b : pb.cache->blocks) b = std::make_unique<RealizationCache::Block>();
  return pb;
}

std::optional<Complex> continuum_reference(const ModelConfig& cfg, Pair p, int m, Complex lambda) {
  const auto& c = cfg.coeffs;
  if (cfg.kind != ModelKind::Sl1d || p != Pair::DN || !c.a11.is_constant() ||
      !c.a0.is_constant()) {
    return std::nullopt;
  }
  return std::pow(Complex(c.a0.c) - lambda, -m);
}

TraceReport trace_formula_check(const Problem& pb, Pair p, int m, Complex lambda) {
  require_m(m);
  const auto& blocks = pb.model.blocks;
  std::vector<TraceReport> parts(blocks.size());
  for_each_block(blocks.size(), [&](std::size_t k) {
    const auto [s1, s2] = sides(p);
    parts[k] = trace_sides(cached_calculus(pb, k), cached_side(pb, k, s1), cached_side(pb, k, s2), p,
                           pb.params[k], m, lambda);
  });
  TraceReport rep;
  rep.pair = p;
  rep.m = m;
  rep.lambda = lambda;
  for (const auto& part : parts) {
    rep.lhs += part.lhs;
    rep.rhs += part.rhs;
  }
  rep.continuum_reference = continuum_reference(pb.model.config, p, m, lambda);
  finish(rep, pb.model.config.dimension());
  return rep;
}

KreinReport krein_check(const Problem& pb, Complex lambda, double tol) {
  const auto& blocks = pb.model.blocks;
  struct Part {
    double dn_err, dn_scale, robin_err, robin_scale, forms_err;
  };
  std::vector<Part> parts(blocks.size());
  for_each_block(blocks.size(), [&](std::size_t k) {
    const auto& tr = blocks[k];
    const RobinParameter b = or_zero(pb.params[k].b1, tr.boundary_dim());
    const Realization& a_n = cached_side(pb, k, Side::N);
    const Realization& a_d = cached_side(pb, k, Side::D);
    const Realization& a_b = cached_side(pb, k, Side::B1);
    const CMatrix rn = a_n.resolvent_power(lambda, 1);
    const CMatrix direct_dn = rn - a_d.resolvent_power(lambda, 1);
    const CMatrix direct_rb = a_b.resolvent_power(lambda, 1) - rn;
    const CMatrix left = krein_robin(tr, b, lambda, KreinForm::Left);
    const CMatrix right = krein_robin(tr, b, lambda, KreinForm::Right);
    parts[k] = {max_abs_diff(krein_dn(tr, lambda), direct_dn), direct_dn.max_abs(),
                max_abs_diff(left, direct_rb), direct_rb.max_abs(), max_abs_diff(left, right)};
  });
  double dn_err = 0, dn_scale = 0, rb_err = 0, rb_scale = 0, forms = 0;
  for (const auto& p : parts) {
    dn_err = std::max(dn_err, p.dn_err);
    dn_scale = std::max(dn_scale, p.dn_scale);
    rb_err = std::max(rb_err, p.robin_err);
    rb_scale = std::max(rb_scale, p.robin_scale);
    forms = std::max(forms, p.forms_err);
  }
  KreinReport rep;
  rep.lambda = lambda;
  rep.dn_residual = dn_scale > 0 ? dn_err / dn_scale : dn_err;
  rep.robin_residual = rb_scale > 0 ? rb_err / rb_scale : rb_err;
  rep.forms_residual = rb_scale > 0 ? forms / rb_scale : forms;
  rep.pass = rep.dn_residual <= tol && rep.robin_residual <= tol && rep.forms_residual <= tol;
  return rep;
}

GreenReport green_check(const Model& model, std::size_t samples, double tol, std::uint64_t seed) {
  GreenReport total;
  total.samples = samples;
  total.tol = tol;
  total.scale = 0.0;
  for (std::size_t k = 0; k < model.blocks.size(); ++k) {
    const GreenReport r = check_green_identity(model.blocks[k], samples, tol, seed + k);
    total.max_residual = std::max(total.max_residual, r.max_residual);
    total.scale = std::max(total.scale, r.scale);
  }
  total.pass = total.max_residual <= tol * total.scale;
  return total;
}

FitResult fit_decay_exponent(std::span<const double> s, double lo, double hi) {
  if (!(lo >= 0.0 && hi > lo && hi <= 1.0)) {
    throw Error(ErrorCode::UsageError, "fit window must satisfy 0 ≤ lo < hi ≤ 1");
  }
  FitResult fit;
  fit.resolved = static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](double v) { return v > kResolvedFloor; }));
  if (fit.resolved < 8) {
    throw Error(ErrorCode::TooFewValues,
                "need at least 8 singular values above the floor, got " + std::to_string(fit.resolved));
  }
  const double kd = static_cast<double>(fit.resolved);
  fit.k_lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(lo * kd)));
  fit.k_hi = static_cast<std::size_t>(std::floor(hi * kd));
  if (fit.k_hi < fit.k_lo + 1) throw Error(ErrorCode::TooFewValues, "fit window holds < 2 points");

  const std::size_t cnt = fit.k_hi - fit.k_lo + 1;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = fit.k_lo; k <= fit.k_hi; ++k) {
    mx += std::log(static_cast<double>(k));
    my += std::log(s[k - 1]);
  }
  mx /= cnt;
  my /= cnt;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = fit.k_lo; k <= fit.k_hi; ++k) {
    const double dx = std::log(static_cast<double>(k)) - mx;
    const double dy = std::log(s[k - 1]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  fit.alpha = -slope;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

ModelConfig refine(const ModelConfig& base, int level) {
  ModelConfig c = base;
  const int f = 1 << level;
  switch (c.kind) {
    case ModelKind::Sl1d: c.n *= f; break;
    case ModelKind::Rect2d:
      c.nx *= f;
      c.ny *= f;
      break;
    case ModelKind::DiskModes:
      c.mode_max *= f;
      c.nr = c.radial_factor > 0.0
                 ? std::max(3, static_cast<int>(std::ceil(c.radial_factor * c.mode_max)))
                 : c.nr * f;
      break;
  }
  return c;
}

RealVector power_diff_singular_values(const Problem& pb, Pair p, int m, Complex lambda) {
  require_m(m);
  const auto& blocks = pb.model.blocks;
  std::vector<RealVector> parts(blocks.size());
  for_each_block(blocks.size(), [&](std::size_t k) {
    const auto [s1, s2] = sides(p);
    const Realization& r1 = cached_side(pb, k, s1);
    const Realization& r2 = cached_side(pb, k, s2);
    CMatrix d = r1.resolvent_power_orthonormal(lambda, m) - r2.resolvent_power_orthonormal(lambda, m);
    RealVector s;
    if (lambda.imag() == 0.0) {
      // Hermitian: |eigenvalues| keep full relative accuracy in the tail,
      // where the Gram route of svd_values would square it away.
      d = 0.5 * (d + d.adjoint());
      for (double v : hermitian_eig(d).values) s.push_back(std::abs(v));
    } else {
      s = svd_values(d);
    }
    parts[k] = std::move(s);
  });
  RealVector all;
  for (const auto& part : parts) all.insert(all.end(), part.begin(), part.end());
  std::sort(all.begin(), all.end(), std::greater<>());
  return all;
}

bool monotone_approach(std::span<const double> errors, double band) {
  for (std::size_t l = 1; l < errors.size(); ++l) {
    if (!(errors[l] <= errors[l - 1] || errors[l] <= band)) return false;
  }
  return true;
}

DecayReport singular_value_ladder(const ModelConfig& base, Pair p, int m, Complex lambda,
                                  int levels, const DecayOptions& opt) {
  require_m(m);
  if (levels < 2) throw Error(ErrorCode::UsageError, "a ladder needs at least 2 levels");
  DecayReport rep;
  rep.pair = p;
  rep.m = m;
  rep.n = base.dimension();
  rep.lambda = lambda;
  std::vector<double> errors;
  for (int l = 0; l < levels; ++l) {
    const ModelConfig cfg = refine(base, l);
    const Problem pb = make_problem(build_model(cfg));
    if (l == 0) {
      rep.t = improvement_index(p, pb.params.front(), rep.n);
      rep.predicted = predicted_exponent(p, m, rep.n, rep.t);
    }
    DecayLevel lv;
    lv.level = l;
    lv.resolution = cfg.kind == ModelKind::Sl1d    ? cfg.n
                    : cfg.kind == ModelKind::Rect2d ? cfg.nx
                                                    : cfg.mode_max;
    lv.radial = cfg.kind == ModelKind::DiskModes ? cfg.nr : 0;
    lv.s_values = power_diff_singular_values(pb, p, m, lambda);
    if (rep.predicted) {
      lv.fit = fit_decay_exponent(lv.s_values, opt.window_lo, opt.window_hi);
      lv.quasinorm = weak_schatten_quasinorm(lv.s_values, 1.0 / *rep.predicted);
      lv.error = std::abs(lv.fit->alpha - *rep.predicted);
      errors.push_back(*lv.error);
    }
    rep.levels.push_back(std::move(lv));
  }
  if (!rep.predicted) {
    rep.applicable = false;
    rep.note = "not applicable: n = 1 leaves a finite-dimensional boundary space, so every "
               "difference has finite rank";
    rep.monotone = false;
  } else {
    rep.monotone = monotone_approach(errors, opt.band);
  }
  return rep;
}

}  // namespace qbt
