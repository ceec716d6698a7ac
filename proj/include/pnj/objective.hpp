#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pnj/helmholtz.hpp"
#include "pnj/mesh.hpp"

namespace pnj {

/// Target and weights of the mean-variance design objective
///   J = mean(Q) + variance_weight * var(Q) + penalty_weight * P(tau).
struct ObjectiveSpec {
  Point target{8.5, 5.0};  // physical frame
  double amplitude = 20.0;
  double variance_weight = 1e-6;
  double penalty_weight = 1e-2;
  double smoothing = 1e-3;
  int samples = 1;

  void check(std::vector<std::string>& errors, const DomainSpec& domain) const;
  void validate(const DomainSpec& domain) const;
};

/// Q for a given intensity |u_tot(x_PNJ)|^2.
inline double pnj_misfit(double intensity, double amplitude) {
  const double d = intensity - amplitude * amplitude;
  return 0.5 * d * d;
}

/// Q = 1/2 (|u_tot(x_PNJ)|^2 - A^2)^2 with u_tot P1-interpolated at the target.
double eval_q(const ComplexField& total, const ObjectiveSpec& spec, const Mesh& mesh);

/// Lens area attached to each vertex (one third of each adjacent LENS
/// triangle). Sums to the tagged lens area.
Eigen::VectorXd lens_vertex_areas(const Mesh& mesh);

/// Smoothed TV penalty: integral over the lens of the P1 interpolant of
/// sqrt(tau^2 + eps).
double eval_penalty(const DesignField& tau, const Mesh& mesh, const ObjectiveSpec& spec);
/// Gradient of eval_penalty with respect to nodal tau (without penalty_weight).
Eigen::VectorXd penalty_gradient(const DesignField& tau, const Mesh& mesh, const ObjectiveSpec& spec);

double saa_mean(std::span<const double> values);
/// Plug-in variance mean(v^2) - mean(v)^2, clamped at 0.
double saa_variance(std::span<const double> values);

struct ObjectiveValue {
  double value = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double penalty = 0.0;
  std::vector<double> q;          // per sample
  std::vector<double> intensity;  // |u_tot(x_PNJ)|^2 per sample
};

struct SolveCounts {
  std::size_t forward = 0;
  std::size_t adjoint = 0;
};

/// Forward solution of one SAA sample, with the factorization retained for
/// the adjoint solve.
struct SampleSolution {
  WavenumberField wavenumber;
  std::unique_ptr<SparseLu> lu;
  ComplexField scattered;
  Complex total_at_target;
  double q = 0.0;
};

/// The sample-average objective over a fixed set of noise realizations.
/// With a single zero realization it is the deterministic objective.
class SaaProblem {
 public:
  /// `samples` must hold spec.samples realizations; an empty list with
  /// spec.samples == 1 means zeta = 0.
  SaaProblem(const HelmholtzAssembler& assembler, const ObjectiveSpec& spec,
             std::vector<NoiseRealization> samples = {}, unsigned threads = 1);

  /// J and its parts; one forward solve per sample.
  ObjectiveValue evaluate(const DesignField& tau) const;

  SampleSolution solve_sample(const DesignField& tau, std::size_t m) const;
  ObjectiveValue combine(const DesignField& tau, std::vector<double> q,
                         std::vector<double> intensity) const;

  const HelmholtzAssembler& assembler() const { return *assembler_; }
  const Mesh& mesh() const { return assembler_->mesh(); }
  const ObjectiveSpec& spec() const { return spec_; }
  const PointLocation& target() const { return target_; }
  std::size_t num_samples() const { return samples_.size(); }
  const NoiseRealization& sample(std::size_t m) const { return samples_[m]; }
  unsigned threads() const { return threads_; }

  SolveCounts counts() const { return {forward_solves_.load(), adjoint_solves_.load()}; }
  void reset_counts() const {
    forward_solves_ = 0;
    adjoint_solves_ = 0;
  }
  void count_adjoint_solve() const { ++adjoint_solves_; }

 private:
  const HelmholtzAssembler* assembler_;
  ObjectiveSpec spec_;
  std::vector<NoiseRealization> samples_;
  unsigned threads_;
  PointLocation target_;
  mutable std::atomic<std::size_t> forward_solves_{0};
  mutable std::atomic<std::size_t> adjoint_solves_{0};
};

/// eval_J: J(tau) for the given problem.
inline ObjectiveValue eval_j(const SaaProblem& problem, const DesignField& tau) {
  return problem.evaluate(tau);
}

}  // namespace pnj
