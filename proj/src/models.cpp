#include "qbt/models.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qbt/error.hpp"

namespace qbt {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Sl1d: return "sl1d";
    case ModelKind::Rect2d: return "rect2d";
    case ModelKind::DiskModes: return "disk_modes";
  }
  return "?";
}

std::string_view to_string(GridKind kind) {
  return kind == GridKind::Vertex ? "vertex" : "staggered";
}

std::string_view to_string(BoundaryOpVariant v) {
  switch (v) {
    case BoundaryOpVariant::Zero: return "zero";
    case BoundaryOpVariant::Multiplication: return "multiplication";
    case BoundaryOpVariant::Dense: return "dense";
    case BoundaryOpVariant::FourierDecay: return "fourier_decay";
  }
  return "?";
}

namespace {

void require_positive_length(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::DegenerateGrid, std::string(name) + " must be positive");
  }
}

void require_elliptic(const Coefficients& c, double x, double y, int dimension) {
  const double a11 = c.a11(x, y);
  if (dimension == 1) {
    if (!(a11 > 0.0)) {
      std::ostringstream os;
      os << "a11 = " << a11 << " at x = " << x;
      throw Error(ErrorCode::EllipticityViolated, os.str());
    }
    return;
  }
  const double a22 = c.a22(x, y);
  const double a12 = c.a12(x, y);
  // smallest eigenvalue of [[a11, a12], [a12, a22]]
  const double mean = 0.5 * (a11 + a22);
  const double rad = std::hypot(0.5 * (a11 - a22), a12);
  if (!(mean - rad > 0.0)) {
    std::ostringstream os;
    os << "coefficient matrix not positive definite at (" << x << ", " << y << ")";
    throw Error(ErrorCode::EllipticityViolated, os.str());
  }
}

// Positions along one axis. Interior indices 1..count, boundary-side indices
// 0 and count+1 (boundary nodes on a vertex grid, ghosts on a staggered one).
struct Axis {
  int count;
  double h;
  double length;
  bool staggered;

  double pos(int i) const { return staggered ? (i - 0.5) * h : i * h; }
  double face(int i) const { return 0.5 * (pos(i) + pos(i + 1)); }  // between i and i+1
  double boundary_pos(int side) const { return side == 0 ? 0.0 : length; }
};

Axis make_axis(int cells, double length, GridKind grid) {
  const bool stag = grid == GridKind::Staggered;
  return {stag ? cells : cells - 1, length / cells, length, stag};
}

// One boundary dof: the boundary-side node b and its interior neighbour a.
struct BoundaryDof {
  std::size_t b;
  std::size_t a;
  double flux_coeff;  // a_face / h
  double weight;
  std::array<double, 2> point;
};

QuasiTriple assemble(std::size_t n_interior, const RealVector& interior_weights,
                     const std::vector<BoundaryDof>& dofs, CMatrix t, bool staggered,
                     double gamma1_scale) {
  const std::size_t dom = t.cols();
  const std::size_t g = dofs.size();
  QuasiTriple tr;
  tr.interior = WeightedSpace(interior_weights);
  RealVector bw(g);
  for (std::size_t k = 0; k < g; ++k) bw[k] = dofs[k].weight;
  tr.boundary = WeightedSpace(bw);
  tr.T = std::move(t);
  tr.P = CMatrix(n_interior, dom);
  for (std::size_t i = 0; i < n_interior; ++i) tr.P(i, i) = 1.0;
  tr.gamma0 = CMatrix(g, dom);
  tr.gamma1 = CMatrix(g, dom);
  for (std::size_t k = 0; k < g; ++k) {
    const auto& d = dofs[k];
    tr.gamma0(k, d.b) += d.flux_coeff;
    tr.gamma0(k, d.a) -= d.flux_coeff;
    if (staggered) {
      tr.gamma1(k, d.b) += 0.5 * gamma1_scale;
      tr.gamma1(k, d.a) += 0.5 * gamma1_scale;
    } else {
      tr.gamma1(k, d.b) += gamma1_scale;
    }
  }
  tr.validate();
  return tr;
}

int disk_boundary_index(int ell) { return ell > 0 ? 2 * ell - 1 : -2 * ell; }

}  // namespace

QuasiTriple build_sl1d(const ModelConfig& cfg) {
  if (cfg.n < 2) throw Error(ErrorCode::DegenerateGrid, "sl1d needs n ≥ 2");
  require_positive_length(cfg.length, "length");
  const Axis ax = make_axis(cfg.n, cfg.length, cfg.grid);
  const auto& c = cfg.coeffs;
  for (int i = 0; i <= ax.count + 1; ++i) require_elliptic(c, ax.pos(i), 0.0, 1);
  for (int i = 0; i <= ax.count; ++i) require_elliptic(c, ax.face(i), 0.0, 1);

  const std::size_t ni = static_cast<std::size_t>(ax.count);
  const std::size_t left = ni;
  const std::size_t right = ni + 1;
  // dom index of axis position i
  auto idx = [&](int i) -> std::size_t {
    if (i == 0) return left;
    if (i == ax.count + 1) return right;
    return static_cast<std::size_t>(i - 1);
  };
  CMatrix t(ni, ni + 2);
  const double h2 = ax.h * ax.h;
  for (int i = 1; i <= ax.count; ++i) {
    const std::size_t r = static_cast<std::size_t>(i - 1);
    const double ap = c.a11(ax.face(i)) / h2;
    const double am = c.a11(ax.face(i - 1)) / h2;
    t(r, idx(i)) += ap + am + c.a0(ax.pos(i));
    t(r, idx(i + 1)) -= ap;
    t(r, idx(i - 1)) -= am;
  }
  std::vector<BoundaryDof> dofs = {
      {left, idx(1), c.a11(ax.face(0)) / ax.h, 1.0, {0.0, 0.0}},
      {right, idx(ax.count), c.a11(ax.face(ax.count)) / ax.h, 1.0, {cfg.length, 0.0}},
  };
  return assemble(ni, RealVector(ni, ax.h), dofs, std::move(t), ax.staggered, cfg.gamma1_scale);
}

namespace {

struct RectLayout {
  Axis x, y;
  std::size_t ni;

  std::size_t interior(int i, int j) const {
    return static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(x.count) +
           static_cast<std::size_t>(i - 1);
  }
};

}  // namespace

QuasiTriple build_rect2d(const ModelConfig& cfg) {
  if (cfg.nx < 3 || cfg.ny < 3) throw Error(ErrorCode::DegenerateGrid, "rect2d needs nx, ny ≥ 3");
  require_positive_length(cfg.lx, "lx");
  require_positive_length(cfg.ly, "ly");
  const auto& c = cfg.coeffs;
  RectLayout lay{make_axis(cfg.nx, cfg.lx, cfg.grid), make_axis(cfg.ny, cfg.ly, cfg.grid), 0};
  lay.ni = static_cast<std::size_t>(lay.x.count) * static_cast<std::size_t>(lay.y.count);

  for (int j = 0; j <= lay.y.count + 1; ++j) {
    for (int i = 0; i <= lay.x.count + 1; ++i) {
      require_elliptic(c, lay.x.pos(i), lay.y.pos(j), 2);
    }
  }
  for (int j = 0; j <= lay.y.count; ++j) {
    for (int i = 0; i <= lay.x.count; ++i) {
      require_elliptic(c, lay.x.face(i), lay.y.pos(j), 2);
      require_elliptic(c, lay.x.pos(i), lay.y.face(j), 2);
    }
  }
  if (c.a12.c != 0.0 || c.a12.c_x != 0.0 || c.a12.c_y != 0.0) {
    throw Error(ErrorCode::ConfigError, "rect2d uses a five-point stencil and needs a12 = 0");
  }

  // Boundary dofs: left, right, bottom, top; corners carry none.
  std::vector<BoundaryDof> dofs;
  const std::size_t nb =
      2 * static_cast<std::size_t>(lay.y.count) + 2 * static_cast<std::size_t>(lay.x.count);
  std::vector<std::vector<std::size_t>> side_index(4);
  std::size_t next = lay.ni;
  for (int side = 0; side < 2; ++side) {
    const int ia = side == 0 ? 1 : lay.x.count;
    const double xf = lay.x.face(side == 0 ? 0 : lay.x.count);
    for (int j = 1; j <= lay.y.count; ++j) {
      const double y = lay.y.pos(j);
      side_index[side].push_back(next);
      dofs.push_back({next++, lay.interior(ia, j), c.a11(xf, y) / lay.x.h, lay.y.h,
                      {lay.x.boundary_pos(side), y}});
    }
  }
  for (int side = 0; side < 2; ++side) {
    const int ja = side == 0 ? 1 : lay.y.count;
    const double yf = lay.y.face(side == 0 ? 0 : lay.y.count);
    for (int i = 1; i <= lay.x.count; ++i) {
      const double x = lay.x.pos(i);
      side_index[2 + side].push_back(next);
      dofs.push_back({next++, lay.interior(i, ja), c.a22(x, yf) / lay.y.h, lay.x.h,
                      {x, lay.y.boundary_pos(side)}});
    }
  }
  // dom index of grid position (i, j), never a corner
  auto idx = [&](int i, int j) -> std::size_t {
    if (i == 0) return side_index[0][static_cast<std::size_t>(j - 1)];
    if (i == lay.x.count + 1) return side_index[1][static_cast<std::size_t>(j - 1)];
    if (j == 0) return side_index[2][static_cast<std::size_t>(i - 1)];
    if (j == lay.y.count + 1) return side_index[3][static_cast<std::size_t>(i - 1)];
    return lay.interior(i, j);
  };

  CMatrix t(lay.ni, lay.ni + nb);
  const double hx2 = lay.x.h * lay.x.h;
  const double hy2 = lay.y.h * lay.y.h;
  for (int j = 1; j <= lay.y.count; ++j) {
    for (int i = 1; i <= lay.x.count; ++i) {
      const double x = lay.x.pos(i);
      const double y = lay.y.pos(j);
      const std::size_t r = lay.interior(i, j);
      const double ae = c.a11(lay.x.face(i), y) / hx2;
      const double aw = c.a11(lay.x.face(i - 1), y) / hx2;
      const double an = c.a22(x, lay.y.face(j)) / hy2;
      const double as = c.a22(x, lay.y.face(j - 1)) / hy2;
      t(r, r) += ae + aw + an + as + c.a0(x, y);
      t(r, idx(i + 1, j)) -= ae;
      t(r, idx(i - 1, j)) -= aw;
      t(r, idx(i, j + 1)) -= an;
      t(r, idx(i, j - 1)) -= as;
    }
  }
  return assemble(lay.ni, RealVector(lay.ni, lay.x.h * lay.y.h), dofs, std::move(t),
                  lay.x.staggered, cfg.gamma1_scale);
}

std::vector<QuasiTriple> build_disk_modes(const ModelConfig& cfg) {
  if (cfg.nr < 3) throw Error(ErrorCode::DegenerateGrid, "disk_modes needs nr ≥ 3");
  if (cfg.mode_max < 0) throw Error(ErrorCode::DegenerateGrid, "disk_modes needs mode_max ≥ 0");
  require_positive_length(cfg.radius, "radius");
  const auto& c = cfg.coeffs;
  if (!c.a11.is_constant() || !c.a22.is_constant() || !c.a0.is_constant() ||
      c.a11.c != c.a22.c || c.a12.c != 0.0 || !c.a12.is_constant()) {
    throw Error(ErrorCode::ConfigError,
                "disk_modes separates variables: needs a11 = a22 constant, a12 = 0, a0 constant");
  }
  require_elliptic(c, 0.0, 0.0, 2);
  const double a = c.a11.c;
  const double a0 = c.a0.c;
  const double big_r = cfg.radius;
  const std::size_t ni = static_cast<std::size_t>(cfg.nr - 1);
  const double h = big_r / (cfg.nr - 1);
  const double two_pi = 2.0 * std::numbers::pi;

  std::vector<int> ells = {0};
  for (int l = 1; l <= cfg.mode_max; ++l) {
    ells.push_back(l);
    ells.push_back(-l);
  }
  std::vector<QuasiTriple> blocks(ells.size());
  RealVector weights(ni);
  for (std::size_t i = 0; i < ni; ++i) weights[i] = two_pi * (i + 0.5) * h * h;

#pragma omp parallel for schedule(dynamic)
  for (std::size_t b = 0; b < ells.size(); ++b) {
    const double l2 = static_cast<double>(ells[b]) * ells[b];
    CMatrix t(ni, ni + 1);
    for (std::size_t i = 0; i < ni; ++i) {
      const double r = (i + 0.5) * h;
      const double rp = r + 0.5 * h;
      const double rm = r - 0.5 * h;  // zero at the origin: no flux
      t(i, i) = a * ((rp + rm) / (r * h * h) + l2 / (r * r)) + a0;
      t(i, i + 1) = -a * rp / (r * h * h);
      if (i > 0) t(i, i - 1) = -a * rm / (r * h * h);
    }
    std::vector<BoundaryDof> dofs = {{ni, ni - 1, a / h, two_pi * big_r, {big_r, 0.0}}};
    blocks[b] = assemble(ni, weights, dofs, std::move(t), true, cfg.gamma1_scale);
  }
  return blocks;
}

Model build_model(const ModelConfig& cfg) {
  Model m;
  m.config = cfg;
  switch (cfg.kind) {
    case ModelKind::Sl1d:
    case ModelKind::Rect2d: {
      m.blocks.push_back(cfg.kind == ModelKind::Sl1d ? build_sl1d(cfg) : build_rect2d(cfg));
      // recover boundary coordinates from the same layout rules
      std::vector<std::array<double, 2>> pts;
      if (cfg.kind == ModelKind::Sl1d) {
        pts = {{0.0, 0.0}, {cfg.length, 0.0}};
      } else {
        const Axis ax = make_axis(cfg.nx, cfg.lx, cfg.grid);
        const Axis ay = make_axis(cfg.ny, cfg.ly, cfg.grid);
        for (int side = 0; side < 2; ++side) {
          for (int j = 1; j <= ay.count; ++j) pts.push_back({ax.boundary_pos(side), ay.pos(j)});
        }
        for (int side = 0; side < 2; ++side) {
          for (int i = 1; i <= ax.count; ++i) pts.push_back({ax.pos(i), ay.boundary_pos(side)});
        }
      }
      m.boundary_points.push_back(std::move(pts));
      break;
    }
    case ModelKind::DiskModes: {
      m.blocks = build_disk_modes(cfg);
      m.modes.push_back(0);
      for (int l = 1; l <= cfg.mode_max; ++l) {
        m.modes.push_back(l);
        m.modes.push_back(-l);
      }
      m.boundary_points.assign(m.blocks.size(), {});
      break;
    }
  }
  return m;
}

std::size_t Model::boundary_dim() const {
  std::size_t g = 0;
  for (const auto& b : blocks) g += b.boundary_dim();
  return g;
}

std::size_t Model::interior_dim() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.interior_dim();
  return n;
}

QuasiTriple Model::merged() const {
  if (blocks.size() == 1) return blocks.front();
  return direct_sum(blocks);
}

Model merge_blocks(const Model& model) {
  Model out;
  out.config = model.config;
  out.modes = model.modes;
  out.blocks.push_back(model.merged());
  std::vector<std::array<double, 2>> pts;
  for (const auto& p : model.boundary_points) pts.insert(pts.end(), p.begin(), p.end());
  out.boundary_points.push_back(std::move(pts));
  return out;
}

RobinParameter build_boundary_op(const BoundaryOpSpec& spec, const Model& model) {
  const std::size_t g = model.boundary_dim();
  std::vector<WeightedSpace> spaces;
  for (const auto& b : model.blocks) spaces.push_back(b.boundary);
  const WeightedSpace boundary = direct_sum(spaces);
  const bool disk = model.config.kind == ModelKind::DiskModes;
  std::optional<double> declared = spec.declared_s;
  CMatrix b(g, g);

  switch (spec.variant) {
    case BoundaryOpVariant::Zero: break;
    case BoundaryOpVariant::Multiplication: {
      const auto& beta = spec.beta;
      if (disk) {
        // multiplication by β(Rcosθ, Rsinθ) in the Fourier basis e^{iℓθ}
        const double r = model.config.radius;
        const Complex c1 = 0.5 * r * Complex(beta.c_x, -beta.c_y);  // coefficient of e^{iθ}
        const int mm = model.config.mode_max;
        for (int l = -mm; l <= mm; ++l) {
          const auto i = static_cast<std::size_t>(disk_boundary_index(l));
          b(i, i) = beta.c;
          if (l + 1 <= mm) b(static_cast<std::size_t>(disk_boundary_index(l + 1)), i) = c1;
          if (l - 1 >= -mm) b(static_cast<std::size_t>(disk_boundary_index(l - 1)), i) = std::conj(c1);
        }
      } else {
        std::size_t k = 0;
        for (const auto& pts : model.boundary_points) {
          for (const auto& p : pts) {
            b(k, k) = beta(p[0], p[1]);
            ++k;
          }
        }
      }
      break;
    }
    case BoundaryOpVariant::Dense: {
      if (!spec.dense) throw Error(ErrorCode::ConfigError, "dense boundary operator without matrix");
      if (spec.dense->rows() != g || spec.dense->cols() != g) {
        std::ostringstream os;
        os << "dense B is " << spec.dense->rows() << "x" << spec.dense->cols()
           << ", boundary space has dimension " << g;
        throw Error(ErrorCode::DimensionMismatch, os.str());
      }
      b = *spec.dense;
      break;
    }
    case BoundaryOpVariant::FourierDecay: {
      if (!(spec.s > 0.0)) throw Error(ErrorCode::ConfigError, "fourier_decay needs s > 0");
      for (std::size_t j = 0; j < g; ++j) {
        const double ell = static_cast<double>((j + 1) / 2);
        b(j, j) = spec.amplitude * std::pow(1.0 + ell, -1.0 / spec.s);
      }
      if (!declared) declared = spec.s;
      break;
    }
  }
  return make_robin(std::move(b), boundary, declared);
}

std::optional<std::vector<RobinParameter>> split_robin(const RobinParameter& b, const Model& model) {
  std::vector<std::size_t> offsets = {0};
  for (const auto& blk : model.blocks) offsets.push_back(offsets.back() + blk.boundary_dim());
  if (b.B.rows() != offsets.back()) {
    throw Error(ErrorCode::DimensionMismatch, "boundary operator does not match the model");
  }
  const std::size_t nblk = model.blocks.size();
  std::vector<std::size_t> owner(offsets.back());
  for (std::size_t k = 0; k < nblk; ++k) {
    for (std::size_t i = offsets[k]; i < offsets[k + 1]; ++i) owner[i] = k;
  }
  for (std::size_t i = 0; i < b.B.rows(); ++i) {
    for (std::size_t j = 0; j < b.B.cols(); ++j) {
      if (owner[i] != owner[j] && b.B(i, j) != Complex(0.0)) return std::nullopt;
    }
  }
  std::vector<RobinParameter> out;
  out.reserve(nblk);
  for (std::size_t k = 0; k < nblk; ++k) {
    const std::size_t n = offsets[k + 1] - offsets[k];
    out.push_back({b.B.block(offsets[k], offsets[k], n, n), b.declared_s});
  }
  return out;
}

CMatrix read_dense_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open matrix file " + path);
  long rows = 0;
  long cols = 0;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0) {
    throw Error(ErrorCode::ConfigError, "bad matrix header in " + path);
  }
  CMatrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (auto& z : m.data()) {
    double re = 0.0;
    double im = 0.0;
    if (!(in >> re >> im)) throw Error(ErrorCode::ConfigError, "truncated matrix file " + path);
    z = {re, im};
  }
  std::string extra;
  if (in >> extra) throw Error(ErrorCode::ConfigError, "trailing data in matrix file " + path);
  if (!m.all_finite()) throw Error(ErrorCode::NonFinite, "non-finite entry in " + path);
  return m;
}

}  // namespace qbt
