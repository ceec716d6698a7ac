#pragma once

#include <span>
#include <vector>

#include "pnj/helmholtz.hpp"
#include "pnj/objective.hpp"

namespace pnj {

/// dJ/dQ_m for the SAA objective: 1/M + beta_V (2 Q_m / M - 2 Qbar / M).
double chain_weight(std::span<const double> q, std::size_t m, double variance_weight);

/// Lagrange multiplier of one sample: solves A^T v = -dJ/du, where the
/// right-hand side is the point load
///   weight * 2 (|u_tot|^2 - A^2) conj(u_tot(x_PNJ)) * barycentric weights.
/// A is complex symmetric, so the forward factors are reused as is.
ComplexField adjoint_solve(const SparseLu& lu, const Mesh& mesh, const PointLocation& target,
                           Complex total_at_target, double amplitude, double weight);

/// Re(v^T dR/dtau) for R(u, tau) = A(tau) u - b(tau), per vertex. The design
/// enters through k^2 in the lens mass and in the source (k0^2 - k^2) u_inc.
Eigen::VectorXd design_sensitivity(const HelmholtzAssembler& assembler, const WavenumberField& k,
                                   const ComplexField& scattered, const ComplexField& adjoint);

struct GradientResult {
  ObjectiveValue value;
  DesignField gradient;
  std::vector<ComplexField> adjoints;  // filled when requested
};

/// J and dJ/dtau with exactly M forward and M adjoint solves.
GradientResult gradient(const SaaProblem& problem, const DesignField& tau, bool keep_adjoints = false);

}  // namespace pnj
