#pragma once

// Discretized elliptic problems L f = −Σ ∂_j(a_jk ∂_k f) + a0 f packaged as
// boundary triples with Γ0 = outward conormal trace and Γ1 = Dirichlet trace.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qbt/matrix.hpp"
#include "qbt/triple.hpp"

namespace qbt {

enum class ModelKind { Sl1d, Rect2d, DiskModes };
enum class GridKind { Vertex, Staggered };

std::string_view to_string(ModelKind kind);
std::string_view to_string(GridKind kind);

// Affine field c + c_x·x + c_y·y.
struct AffineField {
  double c = 0.0;
  double c_x = 0.0;
  double c_y = 0.0;

  double operator()(double x, double y = 0.0) const noexcept { return c + c_x * x + c_y * y; }
  bool is_constant() const noexcept { return c_x == 0.0 && c_y == 0.0; }
};

struct Coefficients {
  AffineField a11{1.0};
  AffineField a22{1.0};
  AffineField a12{};
  AffineField a0{};
};

enum class BoundaryOpVariant { Zero, Multiplication, Dense, FourierDecay };

std::string_view to_string(BoundaryOpVariant v);

struct BoundaryOpSpec {
  BoundaryOpVariant variant = BoundaryOpVariant::Zero;
  AffineField beta{};                // multiplication
  std::optional<CMatrix> dense;      // dense (already loaded)
  std::string dense_path;            // provenance only
  double s = 1.0;                    // fourier_decay index
  double amplitude = 1.0;            // fourier_decay amplitude
  std::optional<double> declared_s;  // weak-Schatten index, if known
};

struct ModelConfig {
  ModelKind kind = ModelKind::Sl1d;
  GridKind grid = GridKind::Vertex;
  int n = 2;          // sl1d cells
  int nx = 3;         // rect2d cells
  int ny = 3;
  int nr = 3;         // disk radial nodes (including the ghost)
  int mode_max = 0;   // disk angular modes |ℓ| ≤ mode_max
  double radial_factor = 0.0;  // > 0: ladder levels use nr = ⌈factor·mode_max⌉
  double length = 1.0;
  double lx = 1.0;
  double ly = 1.0;
  double radius = 1.0;
  double gamma1_scale = 1.0;  // deliberate corruption hook for the Green check
  Coefficients coeffs;
  std::vector<Complex> lambdas;
  std::optional<BoundaryOpSpec> boundary_op;
  std::optional<BoundaryOpSpec> boundary_op2;

  int dimension() const noexcept { return kind == ModelKind::Sl1d ? 1 : 2; }
};

// The triple of a model as a direct sum of independent blocks (one per angular
// mode for disk_modes, a single block otherwise).
struct Model {
  ModelConfig config;
  std::vector<QuasiTriple> blocks;
  // Physical boundary coordinates of each boundary dof, per block. Empty for
  // disk_modes, whose boundary basis is Fourier modes.
  std::vector<std::vector<std::array<double, 2>>> boundary_points;
  // Angular index ℓ of each block (disk_modes only).
  std::vector<int> modes;

  std::size_t boundary_dim() const;
  std::size_t interior_dim() const;
  QuasiTriple merged() const;
};

QuasiTriple build_sl1d(const ModelConfig& cfg);
QuasiTriple build_rect2d(const ModelConfig& cfg);
// Blocks ordered ℓ = 0, 1, −1, 2, −2, ….
std::vector<QuasiTriple> build_disk_modes(const ModelConfig& cfg);

Model build_model(const ModelConfig& cfg);

// Single-block view: merges all blocks.
Model merge_blocks(const Model& model);

// B on the full boundary space of the model.
RobinParameter build_boundary_op(const BoundaryOpSpec& spec, const Model& model);

// Per-block pieces of B, or nothing if B couples different blocks.
std::optional<std::vector<RobinParameter>> split_robin(const RobinParameter& b, const Model& model);

// Loads "rows cols" followed by rows of "re im" pairs.
CMatrix read_dense_matrix(const std::string& path);

}  // namespace qbt
