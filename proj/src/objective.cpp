#include "pnj/objective.hpp"

#include <cmath>
#include <sstream>

#include "pnj/error.hpp"
#include "pnj/parallel.hpp"

namespace pnj {

void ObjectiveSpec::check(std::vector<std::string>& errors, const DomainSpec& domain) const {
  if (!(amplitude > 0.0)) errors.emplace_back("objective.amplitude must be positive");
  if (!(variance_weight >= 0.0)) errors.emplace_back("objective.variance_weight must be >= 0");
  if (!(penalty_weight >= 0.0)) errors.emplace_back("objective.penalty_weight must be >= 0");
  if (!(smoothing > 0.0)) errors.emplace_back("objective.smoothing must be positive");
  if (samples < 1) errors.emplace_back("objective.samples must be >= 1");
  if (!(target.x >= 0.0 && target.x <= domain.side && target.y >= 0.0 && target.y <= domain.side)) {
    errors.emplace_back("objective.target must lie in the physical region (outside the PML)");
  }
}

void ObjectiveSpec::validate(const DomainSpec& domain) const {
  std::vector<std::string> errors;
  check(errors, domain);
  if (!errors.empty()) throw ConfigError(errors.front());
}

double eval_q(const ComplexField& total, const ObjectiveSpec& spec, const Mesh& mesh) {
  const Complex value = interpolate(total, mesh, mesh.locate_physical(spec.target));
  return pnj_misfit(std::norm(value), spec.amplitude);
}

Eigen::VectorXd lens_vertex_areas(const Mesh& mesh) {
  Eigen::VectorXd areas = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.region(t) != Region::Lens) continue;
    const double third = mesh.area(t) / 3.0;
    for (auto v : mesh.triangle(t)) areas[v] += third;
  }
  return areas;
}

double eval_penalty(const DesignField& tau, const Mesh& mesh, const ObjectiveSpec& spec) {
  // The P1 interpolant integrates exactly to the lumped nodal sum.
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.region(t) != Region::Lens) continue;
    double sum = 0.0;
    for (auto v : mesh.triangle(t)) sum += std::sqrt(tau[v] * tau[v] + spec.smoothing);
    total += mesh.area(t) * sum / 3.0;
  }
  return total;
}

Eigen::VectorXd penalty_gradient(const DesignField& tau, const Mesh& mesh, const ObjectiveSpec& spec) {
  const Eigen::VectorXd areas = lens_vertex_areas(mesh);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(tau.size());
  for (Eigen::Index v = 0; v < tau.size(); ++v) {
    if (areas[v] > 0.0) grad[v] = areas[v] * tau[v] / std::sqrt(tau[v] * tau[v] + spec.smoothing);
  }
  return grad;
}

double saa_mean(std::span<const double> values) {
  if (values.empty()) throw ConfigError("saa_mean: empty sample list");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double saa_variance(std::span<const double> values) {
  if (values.empty()) throw ConfigError("saa_variance: empty sample list");
  const double mean = saa_mean(values);
  double sq = 0.0;
  for (double v : values) sq += v * v;
  const double var = sq / static_cast<double>(values.size()) - mean * mean;
  return var < 0.0 ? 0.0 : var;
}

SaaProblem::SaaProblem(const HelmholtzAssembler& assembler, const ObjectiveSpec& spec,
                       std::vector<NoiseRealization> samples, unsigned threads)
    : assembler_(&assembler), spec_(spec), samples_(std::move(samples)), threads_(threads) {
  spec_.validate(assembler.mesh().spec());
  const auto n = static_cast<Eigen::Index>(assembler.mesh().num_vertices());
  if (samples_.empty() && spec_.samples == 1) samples_.push_back(NoiseRealization::Zero(n));
  if (samples_.size() != static_cast<std::size_t>(spec_.samples)) {
    std::ostringstream msg;
    msg << "objective: " << samples_.size() << " noise realizations supplied but objective.samples = "
        << spec_.samples;
    throw ConfigError(msg.str());
  }
  for (const auto& s : samples_) {
    if (s.size() != n) throw ConfigError("objective: noise realization size does not match mesh");
  }
  target_ = assembler.mesh().locate_physical(spec_.target);
}

SampleSolution SaaProblem::solve_sample(const DesignField& tau, std::size_t m) const {
  SampleSolution sol;
  try {
    sol.wavenumber = wavenumber_field(mesh(), assembler_->wave(), tau, samples_[m]);
    const LinearSystem sys = assembler_->assemble(sol.wavenumber);
    sol.lu = std::make_unique<SparseLu>(sys.matrix);
    sol.scattered = sol.lu->solve(sys.rhs);
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "sample " << m << ": " << e.what();
    if (dynamic_cast<const SolverError*>(&e) != nullptr) throw SolverError(msg.str());
    throw NumericError(msg.str());
  }
  ++forward_solves_;
  const ComplexField& inc = assembler_->incident();
  const auto& tri = mesh().triangle(target_.triangle);
  sol.total_at_target = 0.0;
  for (int i = 0; i < 3; ++i) {
    sol.total_at_target += target_.weights[i] * (inc[tri[i]] + sol.scattered[tri[i]]);
  }
  sol.q = pnj_misfit(std::norm(sol.total_at_target), spec_.amplitude);
  return sol;
}

ObjectiveValue SaaProblem::combine(const DesignField& tau, std::vector<double> q,
                                   std::vector<double> intensity) const {
  ObjectiveValue out;
  out.mean = saa_mean(q);
  out.variance = saa_variance(q);
  out.penalty = eval_penalty(tau, mesh(), spec_);
  out.value = out.mean + spec_.variance_weight * out.variance + spec_.penalty_weight * out.penalty;
  out.q = std::move(q);
  out.intensity = std::move(intensity);
  return out;
}

ObjectiveValue SaaProblem::evaluate(const DesignField& tau) const {
  std::vector<double> q(samples_.size()), intensity(samples_.size());
  parallel_for(samples_.size(), threads_, [&](std::size_t m) {
    const SampleSolution sol = solve_sample(tau, m);
    q[m] = sol.q;
    intensity[m] = std::norm(sol.total_at_target);
  });
  return combine(tau, std::move(q), std::move(intensity));
}

}  // namespace pnj
