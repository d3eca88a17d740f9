#include "qbt/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "qbt/error.hpp"

namespace qbt {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(std::string_view text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  void allow(std::initializer_list<std::string_view> keys) {
    for (auto k : keys) allowed_.emplace(k);
  }

  void check_unknown() const {
    if (!tree_) return;
    for (const auto& [key, child] : *tree_) {
      if (!allowed_.count(key)) {
        throw Error(ErrorCode::ConfigError, "unknown key '" + key + "' in [" + name_ + "]");
      }
    }
  }

  std::optional<std::string> text(const std::string& key) const {
    if (!tree_) return std::nullopt;
    auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  void real(const std::string& key, double& out) const {
    if (auto v = text(key)) {
      if (!parse_double(*v, out)) {
        throw Error(ErrorCode::ConfigError, "[" + name_ + "] " + key + ": not a number: " + *v);
      }
    }
  }

  void integer(const std::string& key, int& out) const {
    if (auto v = text(key)) {
      const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
      if (ec != std::errc() || ptr != v->data() + v->size()) {
        throw Error(ErrorCode::ConfigError, "[" + name_ + "] " + key + ": not an integer: " + *v);
      }
    }
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string, std::less<>> allowed_;
};

void read_field(const Section& s, const std::string& name, AffineField& f) {
  s.real(name, f.c);
  s.real(name + "_x", f.c_x);
  s.real(name + "_y", f.c_y);
}

std::optional<BoundaryOpSpec> read_boundary_op(const pt::ptree& root, const std::string& name,
                                               const std::filesystem::path& base_dir) {
  const auto child = root.get_child_optional(name);
  if (!child) return std::nullopt;
  Section s(&*child, name);
  s.allow({"variant", "beta", "beta_x", "beta_y", "file", "s", "amplitude", "declared_s"});
  s.check_unknown();
  BoundaryOpSpec spec;
  const std::string variant = s.text("variant").value_or("zero");
  if (variant == "zero") {
    spec.variant = BoundaryOpVariant::Zero;
  } else if (variant == "multiplication") {
    spec.variant = BoundaryOpVariant::Multiplication;
    read_field(s, "beta", spec.beta);
  } else if (variant == "dense") {
    spec.variant = BoundaryOpVariant::Dense;
    const auto file = s.text("file");
    if (!file) throw Error(ErrorCode::ConfigError, "[" + name + "] dense needs file");
    std::filesystem::path p(*file);
    if (p.is_relative()) p = base_dir / p;
    spec.dense_path = *file;
    spec.dense = read_dense_matrix(p.string());
  } else if (variant == "fourier_decay") {
    spec.variant = BoundaryOpVariant::FourierDecay;
    s.real("s", spec.s);
    s.real("amplitude", spec.amplitude);
  } else {
    throw Error(ErrorCode::ConfigError, "[" + name + "] unknown variant '" + variant + "'");
  }
  if (s.text("declared_s")) {
    double d = 0.0;
    s.real("declared_s", d);
    if (!(d > 0.0)) throw Error(ErrorCode::ConfigError, "[" + name + "] declared_s must be > 0");
    spec.declared_s = d;
  }
  return spec;
}

}  // namespace

Complex parse_complex(std::string_view text) {
  const std::string t = trim(text);
  const auto comma = t.find(',');
  double re = 0.0;
  double im = 0.0;
  const bool ok = comma == std::string::npos
                      ? parse_double(t, re)
                      : parse_double(std::string_view(t).substr(0, comma), re) &&
                            parse_double(std::string_view(t).substr(comma + 1), im);
  if (!ok) throw Error(ErrorCode::UsageError, "expected re,im but got '" + t + "'");
  return {re, im};
}

ModelConfig parse_model_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree root;
  try {
    std::istringstream in(text);
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }

  static const std::set<std::string, std::less<>> sections = {
      "geometry", "coefficients", "boundary_op", "boundary_op2"};
  for (const auto& [key, child] : root) {
    if (child.empty() && key == "lambda") continue;
    if (!child.empty() || sections.count(key)) {
      if (!sections.count(key)) throw Error(ErrorCode::ConfigError, "unknown section [" + key + "]");
      continue;
    }
    throw Error(ErrorCode::ConfigError, "unknown top-level key '" + key + "'");
  }

  ModelConfig cfg;
  const auto geo_tree = root.get_child_optional("geometry");
  Section geo(geo_tree ? &*geo_tree : nullptr, "geometry");
  geo.allow({"kind", "grid", "n", "nx", "ny", "nr", "mode_max", "radial_factor", "length", "lx",
             "ly", "radius", "gamma1_scale"});
  geo.check_unknown();
  const auto kind = geo.text("kind");
  if (!kind) throw Error(ErrorCode::ConfigError, "[geometry] kind is required");
  if (*kind == "sl1d") {
    cfg.kind = ModelKind::Sl1d;
  } else if (*kind == "rect2d") {
    cfg.kind = ModelKind::Rect2d;
  } else if (*kind == "disk_modes") {
    cfg.kind = ModelKind::DiskModes;
  } else {
    throw Error(ErrorCode::ConfigError, "unknown model kind '" + *kind + "'");
  }
  const std::string grid = geo.text("grid").value_or("vertex");
  if (grid == "vertex") {
    cfg.grid = GridKind::Vertex;
  } else if (grid == "staggered") {
    cfg.grid = GridKind::Staggered;
  } else {
    throw Error(ErrorCode::ConfigError, "unknown grid '" + grid + "'");
  }
  geo.integer("n", cfg.n);
  geo.integer("nx", cfg.nx);
  geo.integer("ny", cfg.ny);
  geo.integer("nr", cfg.nr);
  geo.integer("mode_max", cfg.mode_max);
  geo.real("radial_factor", cfg.radial_factor);
  geo.real("length", cfg.length);
  geo.real("lx", cfg.lx);
  geo.real("ly", cfg.ly);
  geo.real("radius", cfg.radius);
  geo.real("gamma1_scale", cfg.gamma1_scale);

  const auto coef_tree = root.get_child_optional("coefficients");
  Section coef(coef_tree ? &*coef_tree : nullptr, "coefficients");
  coef.allow({"a11", "a11_x", "a11_y", "a22", "a22_x", "a22_y", "a12", "a12_x", "a12_y", "a0",
              "a0_x", "a0_y"});
  coef.check_unknown();
  read_field(coef, "a11", cfg.coeffs.a11);
  read_field(coef, "a22", cfg.coeffs.a22);
  read_field(coef, "a12", cfg.coeffs.a12);
  read_field(coef, "a0", cfg.coeffs.a0);

  if (auto lam = root.get_optional<std::string>("lambda")) {
    std::istringstream in(*lam);
    std::string tok;
    while (in >> tok) {
      try {
        cfg.lambdas.push_back(parse_complex(tok));
      } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, std::string("lambda: ") + e.what());
      }
    }
  }
  cfg.boundary_op = read_boundary_op(root, "boundary_op", base_dir);
  cfg.boundary_op2 = read_boundary_op(root, "boundary_op2", base_dir);
  return cfg;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model_config(ss.str(), path.parent_path());
}

}  // namespace qbt
