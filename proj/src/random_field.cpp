#include "pnj/random_field.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "pnj/error.hpp"

namespace pnj {

void MaternSpec::check(std::vector<std::string>& errors) const {
  if (!(delta > 0.0)) errors.emplace_back("noise.delta must be positive");
  if (!(gamma > 0.0)) errors.emplace_back("noise.gamma must be positive");
  if (alpha != 2) errors.emplace_back("noise.alpha must be 2 (one elliptic solve per sample)");
}

void MaternSpec::validate() const {
  std::vector<std::string> errors;
  check(errors);
  if (!errors.empty()) throw ConfigError(errors.front());
}

SpdeOperators assemble_spde_operators(const Mesh& mesh, const MaternSpec& spec) {
  spec.validate();
  SpdeOperators ops;
  std::vector<int> local(mesh.num_vertices(), -1);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.lens_support(v)) {
      local[v] = static_cast<int>(ops.vertices.size());
      ops.vertices.push_back(static_cast<std::uint32_t>(v));
    }
  }
  if (ops.vertices.empty()) throw ConfigError("spde: the lens has no vertices");

  const auto n = static_cast<Eigen::Index>(ops.vertices.size());
  std::vector<Eigen::Triplet<double>> mass, stiff;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.region(t) != Region::Lens) continue;
    const auto& tri = mesh.triangle(t);
    const Point p[3] = {mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2])};
    const double area = mesh.area(t);
    double gx[3], gy[3];
    for (int i = 0; i < 3; ++i) {
      const Point& a = p[(i + 1) % 3];
      const Point& b = p[(i + 2) % 3];
      gx[i] = (a.y - b.y) / (2.0 * area);
      gy[i] = (b.x - a.x) / (2.0 * area);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int a = local[tri[i]], b = local[tri[j]];
        mass.emplace_back(a, b, area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0));
        stiff.emplace_back(a, b, area * (gx[i] * gx[j] + gy[i] * gy[j]));
      }
    }
  }
  ops.mass.resize(n, n);
  ops.mass.setFromTriplets(mass.begin(), mass.end());
  ops.stiffness.resize(n, n);
  ops.stiffness.setFromTriplets(stiff.begin(), stiff.end());
  ops.system = spec.delta * ops.mass + spec.gamma * ops.stiffness;
  ops.system.makeCompressed();

  ops.mass_root.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) ops.mass_root[i] = std::sqrt(ops.mass.col(i).sum());
  return ops;
}

struct MaternSampler::Factor {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

MaternSampler::MaternSampler(const Mesh& mesh, const MaternSpec& spec)
    : num_vertices_(mesh.num_vertices()),
      spec_(spec),
      ops_(assemble_spde_operators(mesh, spec)),
      factor_(std::make_unique<Factor>()) {
  factor_->ldlt.compute(ops_.system);
  if (factor_->ldlt.info() != Eigen::Success) {
    throw SolverError("spde: Cholesky factorization of delta M + gamma K failed");
  }
}

MaternSampler::~MaternSampler() = default;
MaternSampler::MaternSampler(MaternSampler&&) noexcept = default;
MaternSampler& MaternSampler::operator=(MaternSampler&&) noexcept = default;

Eigen::VectorXd MaternSampler::white_noise(std::uint64_t index) const {
  std::seed_seq seq{static_cast<std::uint32_t>(spec_.seed), static_cast<std::uint32_t>(spec_.seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd xi(static_cast<Eigen::Index>(ops_.vertices.size()));
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = normal(rng);
  return xi;
}

NoiseRealization MaternSampler::from_white_noise(const Eigen::VectorXd& xi) const {
  if (xi.size() != static_cast<Eigen::Index>(ops_.vertices.size())) {
    throw ConfigError("spde: white-noise vector size does not match the lens vertex count");
  }
  const Eigen::VectorXd rhs = ops_.mass_root.cwiseProduct(xi);
  const Eigen::VectorXd local = factor_->ldlt.solve(rhs);
  if (factor_->ldlt.info() != Eigen::Success || !local.allFinite()) {
    throw SolverError("spde: solve with the factored Matern operator failed");
  }
  NoiseRealization zeta = NoiseRealization::Zero(static_cast<Eigen::Index>(num_vertices_));
  for (std::size_t i = 0; i < ops_.vertices.size(); ++i) {
    zeta[ops_.vertices[i]] = local[static_cast<Eigen::Index>(i)];
  }
  return zeta;
}

NoiseRealization MaternSampler::sample(std::uint64_t index) const {
  return from_white_noise(white_noise(index));
}

}  // namespace pnj
