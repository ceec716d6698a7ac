#include "pnj/adjoint.hpp"

#include "pnj/parallel.hpp"

namespace pnj {

double chain_weight(std::span<const double> q, std::size_t m, double variance_weight) {
  const double count = static_cast<double>(q.size());
  const double mean = saa_mean(q);
  return 1.0 / count + variance_weight * (2.0 * q[m] / count - 2.0 * mean / count);
}

ComplexField adjoint_solve(const SparseLu& lu, const Mesh& mesh, const PointLocation& target,
                           Complex total_at_target, double amplitude, double weight) {
  const double scale =
      weight * 2.0 * (std::norm(total_at_target) - amplitude * amplitude);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(lu.size());
  const auto& tri = mesh.triangle(target.triangle);
  for (int i = 0; i < 3; ++i) {
    if (mesh.on_boundary(tri[i])) continue;
    rhs[tri[i]] -= scale * std::conj(total_at_target) * target.weights[i];
  }
  return lu.solve(rhs);
}

Eigen::VectorXd design_sensitivity(const HelmholtzAssembler& assembler, const WavenumberField& k,
                                   const ComplexField& scattered, const ComplexField& adjoint) {
  const Mesh& mesh = assembler.mesh();
  const double lumping = assembler.options().mass_lumping;
  const ComplexField& inc = assembler.incident();
  Eigen::VectorXd sens = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t t : assembler.lens_triangles()) {
    const auto& tri = mesh.triangle(t);
    const double area = mesh.area(t);
    for (int l = 0; l < 3; ++l) {
      const auto vl = tri[l];
      const double excess = k.lens_excess[vl];
      // d(k^2)/d(tau) at vertex l
      const double dksq = 2.0 * (k.k0 + excess) * excess;
      Complex pairing = 0.0;
      for (int i = 0; i < 3; ++i) {
        Complex row = 0.0;
        for (int j = 0; j < 3; ++j) row += lens_mass_weight(lumping, i, j, l) * scattered[tri[j]];
        pairing += adjoint[tri[i]] * (row + mass_weight(lumping, i, l) * inc[vl]);
      }
      sens[vl] += area * dksq * pairing.real();
    }
  }
  return sens;
}

GradientResult gradient(const SaaProblem& problem, const DesignField& tau, bool keep_adjoints) {
  const std::size_t count = problem.num_samples();
  std::vector<SampleSolution> solutions(count);
  parallel_for(count, problem.threads(),
               [&](std::size_t m) { solutions[m] = problem.solve_sample(tau, m); });

  std::vector<double> q(count), intensity(count);
  for (std::size_t m = 0; m < count; ++m) {
    q[m] = solutions[m].q;
    intensity[m] = std::norm(solutions[m].total_at_target);
  }

  const ObjectiveSpec& spec = problem.spec();
  std::vector<Eigen::VectorXd> contributions(count);
  std::vector<ComplexField> adjoints(keep_adjoints ? count : 0);
  parallel_for(count, problem.threads(), [&](std::size_t m) {
    SampleSolution& sol = solutions[m];
    const double weight = chain_weight(q, m, spec.variance_weight);
    ComplexField v = adjoint_solve(*sol.lu, problem.mesh(), problem.target(), sol.total_at_target,
                                   spec.amplitude, weight);
    problem.count_adjoint_solve();
    contributions[m] = design_sensitivity(problem.assembler(), sol.wavenumber, sol.scattered, v);
    if (keep_adjoints) adjoints[m] = std::move(v);
    sol.lu.reset();
  });

  GradientResult result;
  result.value = problem.combine(tau, std::move(q), std::move(intensity));
  result.gradient = spec.penalty_weight * penalty_gradient(tau, problem.mesh(), spec);
  for (const auto& c : contributions) result.gradient += c;
  result.adjoints = std::move(adjoints);
  return result;
}

}  // namespace pnj
