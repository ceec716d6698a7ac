#include "pnj/helmholtz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/UmfPackSupport>

#include "pnj/error.hpp"

namespace pnj {

namespace {

constexpr Complex kI{0.0, 1.0};

struct ElementGeometry {
  double area;
  std::array<double, 3> gx;
  std::array<double, 3> gy;
};

ElementGeometry element_geometry(const Mesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangle(t);
  const Point p[3] = {mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2])};
  ElementGeometry g{};
  g.area = mesh.area(t);
  for (int i = 0; i < 3; ++i) {
    const Point& a = p[(i + 1) % 3];
    const Point& b = p[(i + 2) % 3];
    g.gx[i] = (a.y - b.y) / (2.0 * g.area);
    g.gy[i] = (b.x - a.x) / (2.0 * g.area);
  }
  return g;
}

}  // namespace

double WaveConfig::k0() const { return 2.0 * std::numbers::pi / wavelength; }

void WaveConfig::check(std::vector<std::string>& errors) const {
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
    errors.emplace_back("wave.wavelength must be positive and finite");
  }
  if (!(std::abs(std::hypot(direction.x, direction.y) - 1.0) <= 1e-12)) {
    errors.emplace_back("wave.direction must be a unit vector");
  }
}

void WaveConfig::validate() const {
  std::vector<std::string> errors;
  check(errors);
  if (!errors.empty()) throw ConfigError(errors.front());
}

double PmlConfig::sigma_max(double width) const {
  return -(order + 1) * std::log(reflection) / (2.0 * width);
}

void PmlConfig::check(std::vector<std::string>& errors) const {
  if (order < 1) errors.emplace_back("pml.order must be >= 1");
  if (!(reflection > 0.0 && reflection < 1.0)) errors.emplace_back("pml.reflection must lie in (0, 1)");
}

void PmlConfig::validate() const {
  std::vector<std::string> errors;
  check(errors);
  if (!errors.empty()) throw ConfigError(errors.front());
}

double WavenumberField::at(const Mesh& mesh, std::size_t t, int local) const {
  if (mesh.region(t) != Region::Lens) return k0;
  return k0 + lens_excess[mesh.triangle(t)[local]];
}

namespace {

WavenumberField make_wavenumber(const Mesh& mesh, const WaveConfig& wave, const DesignField& tau,
                                const NoiseRealization* zeta) {
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  if (tau.size() != n) throw ConfigError("wavenumber: design field size does not match mesh");
  if (zeta != nullptr && zeta->size() != n) {
    throw ConfigError("wavenumber: noise realization size does not match mesh");
  }
  WavenumberField k;
  k.k0 = wave.k0();
  k.lens_excess = Eigen::VectorXd::Zero(n);
  for (Eigen::Index v = 0; v < n; ++v) {
    if (!mesh.lens_support(static_cast<std::size_t>(v))) continue;
    const double exponent = tau[v] + (zeta != nullptr ? (*zeta)[v] : 0.0);
    if (!std::isfinite(exponent) || std::abs(exponent) > 700.0) {
      std::ostringstream msg;
      msg << "wavenumber: exponent tau + zeta = " << exponent << " at vertex " << v
          << " would overflow exp()";
      throw NumericError(msg.str());
    }
    k.lens_excess[v] = std::exp(exponent);
  }
  return k;
}

}  // namespace

WavenumberField wavenumber_field(const Mesh& mesh, const WaveConfig& wave, const DesignField& tau) {
  return make_wavenumber(mesh, wave, tau, nullptr);
}

WavenumberField wavenumber_field(const Mesh& mesh, const WaveConfig& wave, const DesignField& tau,
                                 const NoiseRealization& zeta) {
  return make_wavenumber(mesh, wave, tau, &zeta);
}

double cubic_mass_weight(int i, int j, int l) {
  if (i == j && j == l) return 1.0 / 10.0;
  if (i == j || j == l || i == l) return 1.0 / 30.0;
  return 1.0 / 60.0;
}

double mass_weight(double lumping, int i, int j) {
  const double consistent = i == j ? 1.0 / 6.0 : 1.0 / 12.0;
  const double lumped = i == j ? 1.0 / 3.0 : 0.0;
  return (1.0 - lumping) * consistent + lumping * lumped;
}

double lens_mass_weight(double lumping, int i, int j, int l) {
  const double lumped = i == j ? (i == l ? 1.0 / 6.0 : 1.0 / 12.0) : 0.0;
  return (1.0 - lumping) * cubic_mass_weight(i, j, l) + lumping * lumped;
}

void AssemblyOptions::check(std::vector<std::string>& errors) const {
  if (!(mass_lumping >= 0.0 && mass_lumping <= 1.0)) {
    errors.emplace_back("assembly.mass_lumping must lie in [0, 1]");
  }
}

void AssemblyOptions::validate() const {
  std::vector<std::string> errors;
  check(errors);
  if (!errors.empty()) throw ConfigError(errors.front());
}

HelmholtzAssembler::HelmholtzAssembler(const Mesh& mesh, const WaveConfig& wave,
                                       const PmlConfig& pml, const AssemblyOptions& options)
    : mesh_(&mesh), wave_(wave), pml_(pml), options_(options), k0_(wave.k0()) {
  wave_.validate();
  pml_.validate();
  options_.validate();
  const std::size_t nv = mesh.num_vertices();
  const std::size_t nt = mesh.num_triangles();

  incident_.resize(static_cast<Eigen::Index>(nv));
  for (std::size_t v = 0; v < nv; ++v) {
    const Point x = mesh.to_physical(mesh.vertex(v));
    incident_[static_cast<Eigen::Index>(v)] =
        std::exp(kI * k0_ * (x.x * wave_.direction.x + x.y * wave_.direction.y));
  }

  const DomainSpec& spec = mesh.spec();
  const double w = spec.pml_width;
  const double lo = w, hi = w + spec.side;
  const double sigma_max = pml_.sigma_max(w);
  auto sigma = [&](double c) {
    const double depth = std::max({0.0, lo - c, c - hi});
    return sigma_max * std::pow(depth / w, pml_.order);
  };
  stretch_.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const Point c = mesh.centroid(t);
    stretch_[t] = {1.0 + kI * sigma(c.x) / k0_, 1.0 + kI * sigma(c.y) / k0_};
    if (mesh.region(t) == Region::Lens) lens_triangles_.push_back(t);
  }

  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(9 * nt + nv);
  const double k0sq = k0_ * k0_;
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangle(t);
    const ElementGeometry g = element_geometry(mesh, t);
    const Complex sx = stretch_[t][0], sy = stretch_[t][1];
    const Complex ax = sy / sx, ay = sx / sy;
    const bool lens = mesh.region(t) == Region::Lens;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const auto a = tri[i], b = tri[j];
        Complex value = -g.area * (ax * g.gx[i] * g.gx[j] + ay * g.gy[i] * g.gy[j]);
        if (!lens) {
          value += k0sq * sx * sy * g.area * mass_weight(options_.mass_lumping, i, j);
        }
        if (mesh.on_boundary(a) || mesh.on_boundary(b)) value = 0.0;
        triplets.emplace_back(a, b, value);
      }
    }
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (mesh.on_boundary(v)) triplets.emplace_back(v, v, 1.0);
  }
  base_.resize(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(nv));
  base_.setFromTriplets(triplets.begin(), triplets.end());
  base_.makeCompressed();

  slots_.resize(9 * nt);
  const int* outer = base_.outerIndexPtr();
  const int* inner = base_.innerIndexPtr();
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangle(t);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int row = static_cast<int>(tri[i]);
        const int col = static_cast<int>(tri[j]);
        const int* pos = std::lower_bound(inner + outer[col], inner + outer[col + 1], row);
        slots_[9 * t + 3 * i + j] = static_cast<int>(pos - inner);
      }
    }
  }
}

LinearSystem HelmholtzAssembler::assemble(const WavenumberField& k) const {
  const Mesh& mesh = *mesh_;
  LinearSystem sys;
  sys.matrix = base_;
  sys.rhs = Eigen::VectorXcd::Zero(base_.rows());
  Complex* values = sys.matrix.valuePtr();
  const double k0sq = k0_ * k0_;
  for (std::size_t t : lens_triangles_) {
    const auto& tri = mesh.triangle(t);
    const double area = mesh.area(t);
    std::array<double, 3> ksq{};
    for (int l = 0; l < 3; ++l) {
      const double kl = k.at(mesh, t, l);
      ksq[l] = kl * kl;
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double m = 0.0;
        for (int l = 0; l < 3; ++l) m += ksq[l] * lens_mass_weight(options_.mass_lumping, i, j, l);
        values[slot(t, i, j)] += area * m;
      }
    }
    for (int i = 0; i < 3; ++i) {
      Complex load = 0.0;
      for (int l = 0; l < 3; ++l) {
        load += (k0sq - ksq[l]) * incident_[tri[l]] * mass_weight(options_.mass_lumping, i, l);
      }
      sys.rhs[tri[i]] += area * load;
    }
  }
  return sys;
}

LinearSystem assemble_system(const Mesh& mesh, const WavenumberField& k, const WaveConfig& wave,
                             const PmlConfig& pml, const AssemblyOptions& options) {
  return HelmholtzAssembler(mesh, wave, pml, options).assemble(k);
}

struct SparseLu::Impl {
  Eigen::UmfPackLU<ComplexMatrix> lu;
};

SparseLu::SparseLu(const ComplexMatrix& matrix) : matrix_(matrix), impl_(std::make_unique<Impl>()) {
  if (matrix_.rows() != matrix_.cols()) throw SolverError("sparse LU: matrix is not square");
  impl_->lu.compute(matrix_);
  if (impl_->lu.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "sparse LU: factorization of " << matrix_.rows() << "x" << matrix_.cols()
        << " matrix (nnz " << matrix_.nonZeros() << ") failed, umfpack status "
        << impl_->lu.umfpackFactorizeReturncode()
        << " (1 = singular: zero pivot encountered)";
    throw SolverError(msg.str());
  }
}

SparseLu::~SparseLu() = default;

Eigen::VectorXcd SparseLu::solve(const Eigen::VectorXcd& rhs) const {
  if (rhs.size() != matrix_.rows()) throw SolverError("sparse LU: right-hand side size mismatch");
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) return Eigen::VectorXcd::Zero(rhs.size());
  Eigen::VectorXcd x = impl_->lu.solve(rhs);
  Eigen::VectorXcd r = rhs - matrix_ * x;
  if (r.norm() > 1e-10 * bnorm) {
    x += impl_->lu.solve(r);
    r = rhs - matrix_ * x;
  }
  const double rel = r.norm() / bnorm;
  if (!std::isfinite(rel) || rel > 1e-10) {
    std::ostringstream msg;
    msg << "sparse LU: relative residual " << rel << " exceeds 1e-10 after refinement";
    throw SolverError(msg.str());
  }
  return x;
}

ComplexField solve_scattered(const LinearSystem& system) {
  if (system.rhs.norm() == 0.0) return ComplexField::Zero(system.rhs.size());
  return SparseLu(system.matrix).solve(system.rhs);
}

ComplexField total_field(const ComplexField& scattered, const HelmholtzAssembler& assembler) {
  return assembler.incident() + scattered;
}

ComplexField total_field(const ComplexField& scattered, const WaveConfig& wave, const Mesh& mesh) {
  ComplexField total(scattered.size());
  const double k0 = wave.k0();
  for (Eigen::Index v = 0; v < scattered.size(); ++v) {
    const Point x = mesh.to_physical(mesh.vertex(static_cast<std::size_t>(v)));
    total[v] = std::exp(kI * k0 * (x.x * wave.direction.x + x.y * wave.direction.y)) + scattered[v];
  }
  return total;
}

Complex interpolate(const ComplexField& field, const Mesh& mesh, const PointLocation& loc) {
  const auto& tri = mesh.triangle(loc.triangle);
  return loc.weights[0] * field[tri[0]] + loc.weights[1] * field[tri[1]] +
         loc.weights[2] * field[tri[2]];
}

double interpolate(const Eigen::VectorXd& field, const Mesh& mesh, const PointLocation& loc) {
  const auto& tri = mesh.triangle(loc.triangle);
  return loc.weights[0] * field[tri[0]] + loc.weights[1] * field[tri[1]] +
         loc.weights[2] * field[tri[2]];
}

}  // namespace pnj
