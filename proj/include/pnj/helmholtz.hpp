#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pnj/mesh.hpp"

namespace pnj {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::SparseMatrix<Complex>;
/// Nodal complex coefficients of a P1 function (scattered, total or adjoint field).
using ComplexField = Eigen::VectorXcd;
/// Nodal design variable tau; only values on lens-supporting vertices matter.
using DesignField = Eigen::VectorXd;
/// Nodal manufacturing-error sample zeta.
using NoiseRealization = Eigen::VectorXd;

struct WaveConfig {
  double wavelength = 0.0;
  Point direction{1.0, 0.0};

  double k0() const;
  void check(std::vector<std::string>& errors) const;
  void validate() const;
};

struct PmlConfig {
  int order = 2;
  double reflection = 1e-6;

  /// Peak absorption for a layer of the given width. The round-trip
  /// attenuation through a Dirichlet-backed layer equals `reflection`.
  double sigma_max(double width) const;
  void check(std::vector<std::string>& errors) const;
  void validate() const;
};

/// Mass integrals use a blend of the exact P1 rule and its row-lumped
/// (vertex quadrature) counterpart: M = (1 - lumping) M_exact + lumping M_lumped.
/// On the alternating-diagonal grid the stiffness is the five-point stencil,
/// whose angle-averaged O(k^3 h^2) phase error cancels at lumping = 5/8.
/// lumping = 0 gives the exact rule.
struct AssemblyOptions {
  double mass_lumping = 0.625;

  void check(std::vector<std::string>& errors) const;
  void validate() const;
};

/// Element-wise wavenumber k = k0 + exp(tau + zeta) chi_D. The lens excess is
/// stored per vertex and only applied inside LENS triangles.
struct WavenumberField {
  double k0 = 0.0;
  Eigen::VectorXd lens_excess;

  /// k at local vertex `local` of triangle t.
  double at(const Mesh& mesh, std::size_t t, int local) const;
};

WavenumberField wavenumber_field(const Mesh& mesh, const WaveConfig& wave, const DesignField& tau);
WavenumberField wavenumber_field(const Mesh& mesh, const WaveConfig& wave, const DesignField& tau,
                                 const NoiseRealization& zeta);

struct LinearSystem {
  ComplexMatrix matrix;
  Eigen::VectorXcd rhs;
};

/// Assembles the weak Helmholtz operator -K_pml + M[k^2 s_x s_y] with a
/// homogeneous Dirichlet closure behind the PML, and the load of the source
/// (k0^2 - k^2) u_inc. The sparsity pattern and all k-independent element
/// contributions are built once, so repeated assembly only touches the lens.
class HelmholtzAssembler {
 public:
  HelmholtzAssembler(const Mesh& mesh, const WaveConfig& wave, const PmlConfig& pml,
                     const AssemblyOptions& options = {});

  LinearSystem assemble(const WavenumberField& k) const;

  const Mesh& mesh() const { return *mesh_; }
  const WaveConfig& wave() const { return wave_; }
  const PmlConfig& pml() const { return pml_; }
  const AssemblyOptions& options() const { return options_; }
  double k0() const { return k0_; }

  /// Nodal plane wave exp(i k0 x.b), x in the physical frame.
  const ComplexField& incident() const { return incident_; }

  Complex stretch_x(std::size_t t) const { return stretch_[t][0]; }
  Complex stretch_y(std::size_t t) const { return stretch_[t][1]; }

  /// Position of entry (row, col) of local pair (i, j) of triangle t in the
  /// compressed value array.
  int slot(std::size_t t, int i, int j) const { return slots_[9 * t + 3 * i + j]; }

  /// Indices of LENS triangles, in ascending order.
  const std::vector<std::size_t>& lens_triangles() const { return lens_triangles_; }

 private:
  const Mesh* mesh_;
  WaveConfig wave_;
  PmlConfig pml_;
  AssemblyOptions options_;
  double k0_;
  ComplexField incident_;
  std::vector<std::array<Complex, 2>> stretch_;
  std::vector<int> slots_;
  std::vector<std::size_t> lens_triangles_;
  ComplexMatrix base_;
};

/// Free-function form of HelmholtzAssembler::assemble.
LinearSystem assemble_system(const Mesh& mesh, const WavenumberField& k, const WaveConfig& wave,
                             const PmlConfig& pml, const AssemblyOptions& options = {});

/// Exact integral of phi_i phi_j phi_l over a triangle of unit area.
double cubic_mass_weight(int i, int j, int l);
/// Weight of the blended mass entry (i, j) per unit element area.
double mass_weight(double lumping, int i, int j);
/// Weight of nodal coefficient l in the blended entry (i, j) of the
/// variable-coefficient mass M[c], per unit element area.
double lens_mass_weight(double lumping, int i, int j, int l);

/// Sparse LU factorization of a complex system, reusable across right-hand
/// sides. Since the Helmholtz operator is complex symmetric, the same factors
/// also solve the transpose (adjoint) system.
class SparseLu {
 public:
  explicit SparseLu(const ComplexMatrix& matrix);
  ~SparseLu();
  SparseLu(const SparseLu&) = delete;
  SparseLu& operator=(const SparseLu&) = delete;

  /// Solves A x = b; checks ||A x - b|| <= 1e-10 ||b||, refining once if needed.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;

  Eigen::Index size() const { return matrix_.rows(); }

 private:
  struct Impl;
  ComplexMatrix matrix_;
  std::unique_ptr<Impl> impl_;
};

ComplexField solve_scattered(const LinearSystem& system);

/// u_tot = u_inc + u_sca at every vertex.
ComplexField total_field(const ComplexField& scattered, const HelmholtzAssembler& assembler);
ComplexField total_field(const ComplexField& scattered, const WaveConfig& wave, const Mesh& mesh);

/// P1 interpolation of a nodal field at a located point.
Complex interpolate(const ComplexField& field, const Mesh& mesh, const PointLocation& loc);
double interpolate(const Eigen::VectorXd& field, const Mesh& mesh, const PointLocation& loc);

}  // namespace pnj
