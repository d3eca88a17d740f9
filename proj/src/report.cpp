#include "qbt/report.hpp"

#include <cstdio>
#include <ostream>

namespace qbt {

using nlohmann::json;

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

namespace {

json field_json(const AffineField& f) { return {{"c", f.c}, {"x", f.c_x}, {"y", f.c_y}}; }

json boundary_json(const std::optional<BoundaryOpSpec>& spec) {
  if (!spec) return nullptr;
  json j = {{"variant", to_string(spec->variant)}};
  switch (spec->variant) {
    case BoundaryOpVariant::Zero: break;
    case BoundaryOpVariant::Multiplication: j["beta"] = field_json(spec->beta); break;
    case BoundaryOpVariant::Dense:
      j["file"] = spec->dense_path;
      if (spec->dense) j["dims"] = {spec->dense->rows(), spec->dense->cols()};
      break;
    case BoundaryOpVariant::FourierDecay:
      j["s"] = spec->s;
      j["amplitude"] = spec->amplitude;
      break;
  }
  if (spec->declared_s) j["declared_s"] = *spec->declared_s;
  return j;
}

}  // namespace

json to_json(const ModelConfig& cfg) {
  json j = {{"kind", to_string(cfg.kind)}, {"dimension", cfg.dimension()}};
  switch (cfg.kind) {
    case ModelKind::Sl1d:
      j["grid"] = to_string(cfg.grid);
      j["n"] = cfg.n;
      j["length"] = cfg.length;
      break;
    case ModelKind::Rect2d:
      j["grid"] = to_string(cfg.grid);
      j["nx"] = cfg.nx;
      j["ny"] = cfg.ny;
      j["lx"] = cfg.lx;
      j["ly"] = cfg.ly;
      break;
    case ModelKind::DiskModes:
      j["nr"] = cfg.nr;
      j["mode_max"] = cfg.mode_max;
      j["radius"] = cfg.radius;
      if (cfg.radial_factor > 0.0) j["radial_factor"] = cfg.radial_factor;
      break;
  }
  if (cfg.gamma1_scale != 1.0) j["gamma1_scale"] = cfg.gamma1_scale;
  j["coefficients"] = {{"a11", field_json(cfg.coeffs.a11)},
                       {"a22", field_json(cfg.coeffs.a22)},
                       {"a12", field_json(cfg.coeffs.a12)},
                       {"a0", field_json(cfg.coeffs.a0)}};
  json lams = json::array();
  for (auto z : cfg.lambdas) lams.push_back(complex_json(z));
  j["lambda"] = lams;
  j["boundary_op"] = boundary_json(cfg.boundary_op);
  j["boundary_op2"] = boundary_json(cfg.boundary_op2);
  return j;
}

json to_json(const RunManifest& m) {
  json j = {{"command", m.command},   {"config_path", m.config_path},
            {"config", to_json(m.config)}, {"seed", m.seed},
            {"outputs", m.outputs},   {"version", kToolVersion}};
  if (m.wall_time) j["wall_time"] = *m.wall_time;
  return j;
}

json to_json(const GreenReport& r) {
  return {{"check", "green"},       {"max_residual", r.max_residual}, {"scale", r.scale},
          {"tol", r.tol},           {"samples", r.samples},           {"pass", r.pass}};
}

json to_json(const KreinReport& r) {
  return {{"check", "krein"},
          {"lambda", complex_json(r.lambda)},
          {"dn_residual", r.dn_residual},
          {"robin_residual", r.robin_residual},
          {"forms_residual", r.forms_residual},
          {"pass", r.pass}};
}

json to_json(const TraceReport& r, double tol) {
  json j = {{"check", "trace"},
            {"pair", to_string(r.pair)},
            {"m", r.m},
            {"lambda", complex_json(r.lambda)},
            {"lhs", complex_json(r.lhs)},
            {"rhs", complex_json(r.rhs)},
            {"abs_discrepancy", r.abs_discrepancy},
            {"rel_discrepancy", r.rel_discrepancy},
            {"trace_class_condition", r.trace_class_condition},
            {"tol", tol},
            {"pass", r.rel_discrepancy <= tol}};
  j["continuum_reference"] = r.continuum_reference ? complex_json(*r.continuum_reference) : json();
  return j;
}

json to_json(const DecayReport& r) {
  json levels = json::array();
  for (const auto& lv : r.levels) {
    json l = {{"level", lv.level}, {"resolution", lv.resolution}, {"count", lv.s_values.size()}};
    if (lv.radial) l["nr"] = lv.radial;
    if (lv.fit) {
      l["fitted_exponent"] = lv.fit->alpha;
      l["r2"] = lv.fit->r2;
      l["resolved"] = lv.fit->resolved;
      l["window"] = {lv.fit->k_lo, lv.fit->k_hi};
    }
    if (lv.quasinorm) l["quasinorm"] = *lv.quasinorm;
    if (lv.error) l["error"] = *lv.error;
    levels.push_back(l);
  }
  json j = {{"check", "decay"},
            {"pair", to_string(r.pair)},
            {"m", r.m},
            {"n", r.n},
            {"lambda", complex_json(r.lambda)},
            {"t", r.t},
            {"applicable", r.applicable},
            {"levels", levels},
            {"monotone", r.monotone},
            {"pass", r.applicable && r.monotone}};
  j["predicted_exponent"] = r.predicted ? json(*r.predicted) : json();
  if (r.predicted) j["p"] = 1.0 / *r.predicted;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

void write_decay_csv(const DecayReport& r, std::ostream& out) {
  out << "k,s_k,level\n";
  char buf[64];
  for (const auto& lv : r.levels) {
    for (std::size_t k = 0; k < lv.s_values.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", lv.s_values[k]);
      out << (k + 1) << ',' << buf << ',' << lv.level << '\n';
    }
  }
}

}  // namespace qbt
