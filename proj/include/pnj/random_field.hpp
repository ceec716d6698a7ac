#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pnj/helmholtz.hpp"
#include "pnj/mesh.hpp"

namespace pnj {

/// Matern field parameters for the SPDE (delta I - gamma Laplacian)^(alpha/2) zeta = w.
struct MaternSpec {
  double delta = 25.0;
  double gamma = 2.5;
  int alpha = 2;
  std::uint64_t seed = 0;

  void check(std::vector<std::string>& errors) const;
  void validate() const;
};

/// P1 operators of the SPDE on the lens subdomain, indexed by local lens
/// vertex number. Neumann boundary conditions are natural, so no rows are
/// modified.
struct SpdeOperators {
  Eigen::SparseMatrix<double> system;     // S = delta M + gamma K
  Eigen::SparseMatrix<double> mass;       // M
  Eigen::SparseMatrix<double> stiffness;  // K
  Eigen::VectorXd mass_root;              // diag of H, H H^T = lumped M
  std::vector<std::uint32_t> vertices;    // local -> global vertex index
};

SpdeOperators assemble_spde_operators(const Mesh& mesh, const MaternSpec& spec);

/// Draws realizations zeta = S^{-1} H xi with xi standard normal. The
/// factorization of S is computed once and shared by all draws.
class MaternSampler {
 public:
  MaternSampler(const Mesh& mesh, const MaternSpec& spec);
  ~MaternSampler();
  MaternSampler(MaternSampler&&) noexcept;
  MaternSampler& operator=(MaternSampler&&) noexcept;

  const SpdeOperators& operators() const { return ops_; }
  const MaternSpec& spec() const { return spec_; }
  std::size_t num_lens_vertices() const { return ops_.vertices.size(); }

  /// Realization number `index` of the stream selected by the spec's seed.
  /// Bit-identical for identical (seed, index).
  NoiseRealization sample(std::uint64_t index) const;

  /// Realization for a given white-noise coefficient vector (one entry per
  /// lens vertex), extended by zero outside the lens.
  NoiseRealization from_white_noise(const Eigen::VectorXd& xi) const;

  /// Standard-normal vector for (seed, index).
  Eigen::VectorXd white_noise(std::uint64_t index) const;

 private:
  struct Factor;
  std::size_t num_vertices_;
  MaternSpec spec_;
  SpdeOperators ops_;
  std::unique_ptr<Factor> factor_;
};

}  // namespace pnj
