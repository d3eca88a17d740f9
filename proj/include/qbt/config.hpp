#pragma once

// Model configuration files: INI-style text.
//
//   lambda = -1,0 -5,2          (top level, whitespace-separated re,im pairs)
//   [geometry]        kind, grid, n, nx, ny, nr, mode_max, radial_factor,
//                     length, lx, ly, radius, gamma1_scale
//   [coefficients]    a11, a22, a12, a0 and their _x / _y slopes
//   [boundary_op]     variant = zero | multiplication | dense | fourier_decay
//   [boundary_op2]    beta, beta_x, beta_y, file, s, amplitude, declared_s
//
// Relative matrix-file paths resolve against the config file's directory.

#include <filesystem>
#include <string>
#include <string_view>

#include "qbt/models.hpp"

namespace qbt {

// "re,im" or "re". Throws UsageError.
Complex parse_complex(std::string_view text);

ModelConfig parse_model_config(const std::string& text, const std::filesystem::path& base_dir);
ModelConfig load_model_config(const std::filesystem::path& path);

}  // namespace qbt
