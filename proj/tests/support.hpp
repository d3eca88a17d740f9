#pragma once

#include <random>
#include <string>

#include "qbt/analysis.hpp"
#include "qbt/config.hpp"
#include "qbt/models.hpp"

namespace qbt::test {

inline ModelConfig micro_config() {
  ModelConfig c;
  c.kind = ModelKind::Sl1d;
  c.n = 2;
  c.length = 1.0;
  return c;
}

inline QuasiTriple micro() { return build_sl1d(micro_config()); }

inline RobinParameter robin(const QuasiTriple& tr, const CMatrix& b) {
  return make_robin(b, tr.boundary);
}

inline CMatrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMatrix m(r, c);
  for (auto& z : m.data()) z = {nd(rng), nd(rng)};
  return m;
}

inline CMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  CMatrix a = random_matrix(n, n, rng);
  return 0.5 * (a + a.adjoint());
}

inline std::string config_path(const std::string& name) {
  return std::string(QBT_CONFIG_DIR) + "/" + name;
}

inline ModelConfig shipped(const std::string& name) { return load_model_config(config_path(name)); }

}  // namespace qbt::test
