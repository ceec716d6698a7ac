#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "pnj/error.hpp"
#include "pnj/helmholtz.hpp"

using namespace pnj;

namespace {

struct Setup {
  DomainSpec spec;
  WaveConfig wave{2.0};
  Mesh mesh;
  HelmholtzAssembler assembler;

  explicit Setup(double ppw = 10.0, double lumping = 0.625)
      : spec(with_ppw(ppw)), mesh(Mesh::build(spec, 2.0)), assembler(mesh, wave, PmlConfig{}, {lumping}) {}

  static DomainSpec with_ppw(double ppw) {
    DomainSpec s;
    s.points_per_wavelength = ppw;
    return s;
  }

  WavenumberField homogeneous(double index) const {
    WavenumberField k{wave.k0(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()))};
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      if (mesh.lens_support(v)) k.lens_excess[static_cast<Eigen::Index>(v)] = (index - 1.0) * wave.k0();
    }
    return k;
  }

  double lumped_area(std::size_t v) const {
    double a = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      for (auto w : mesh.triangle(t)) {
        if (w == v) a += mesh.area(t) / 3.0;
      }
    }
    return a;
  }

  bool touches(std::size_t v, Region region) const {
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      if (mesh.region(t) != region) continue;
      for (auto w : mesh.triangle(t)) {
        if (w == v) return true;
      }
    }
    return false;
  }
};

Complex row_sum(const ComplexMatrix& a, Eigen::Index row) {
  Complex s = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) s += a.coeff(row, c);
  return s;
}

}  // namespace

TEST_CASE("mass weights") {
  for (double beta : {0.0, 0.5, 0.625, 1.0}) {
    double total = 0.0;
    for (int i = 0; i < 3; ++i) {
      double row = 0.0;
      for (int j = 0; j < 3; ++j) {
        double lens = 0.0;
        for (int l = 0; l < 3; ++l) lens += lens_mass_weight(beta, i, j, l);
        CHECK(lens == doctest::Approx(mass_weight(beta, i, j)).epsilon(1e-15));
        row += mass_weight(beta, i, j);
      }
      CHECK(row == doctest::Approx(1.0 / 3.0));
      total += row;
    }
    CHECK(total == doctest::Approx(1.0));
  }
  double cubic = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) cubic += cubic_mass_weight(i, j, l);
  CHECK(cubic == doctest::Approx(1.0));
  CHECK(cubic_mass_weight(1, 1, 1) == doctest::Approx(0.1));
  CHECK(cubic_mass_weight(0, 0, 2) == doctest::Approx(1.0 / 30.0));
  CHECK(cubic_mass_weight(0, 1, 2) == doctest::Approx(1.0 / 60.0));
}

TEST_CASE("no scatterer gives a zero load and a zero scattered field") {
  Setup s;
  const LinearSystem sys = s.assembler.assemble(s.homogeneous(1.0));
  CHECK(sys.rhs.norm() == 0.0);
  const ComplexField u = solve_scattered(sys);
  CHECK(u.lpNorm<Eigen::Infinity>() <= 1e-8);
  const ComplexField total = total_field(u, s.assembler);
  for (Eigen::Index v = 0; v < total.size(); ++v) REQUIRE(std::abs(total[v]) == doctest::Approx(1.0));
}

TEST_CASE("operator is complex symmetric") {
  Setup s;
  const LinearSystem sys = s.assembler.assemble(s.homogeneous(1.7));
  const ComplexMatrix diff = sys.matrix - ComplexMatrix(sys.matrix.transpose());
  CHECK(diff.norm() <= 1e-12 * sys.matrix.norm());
}

TEST_CASE("rows away from lens and PML") {
  Setup s;
  const double k0sq = s.wave.k0() * s.wave.k0();
  const LinearSystem sys = s.assembler.assemble(s.homogeneous(1.5));
  int checked = 0;
  for (std::size_t v = 0; v < s.mesh.num_vertices() && checked < 40; v += 97) {
    if (s.mesh.on_boundary(v) || s.touches(v, Region::Lens) || s.touches(v, Region::Pml)) continue;
    const auto row = static_cast<Eigen::Index>(v);
    const Complex sum = row_sum(sys.matrix, row);
    CHECK(sum.real() == doctest::Approx(k0sq * s.lumped_area(v)).epsilon(1e-12));
    CHECK(std::abs(sum.imag()) <= 1e-12);
    CHECK(sys.rhs[row] == Complex(0.0));
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("homogeneous lens rows use the lens wavenumber") {
  Setup s;
  const double n = 1.5;
  const double ksq = std::pow(n * s.wave.k0(), 2);
  const LinearSystem sys = s.assembler.assemble(s.homogeneous(n));
  const std::size_t v = s.mesh.locate_physical({5.0, 5.0}).triangle;
  const auto vertex = s.mesh.triangle(v)[0];
  const Complex sum = row_sum(sys.matrix, vertex);
  CHECK(sum.real() == doctest::Approx(ksq * s.lumped_area(vertex)).epsilon(1e-12));
  // At an interior lens vertex the load scales with k0^2 - k^2.
  const LinearSystem other = s.assembler.assemble(s.homogeneous(2.0));
  const auto row = static_cast<Eigen::Index>(vertex);
  const Complex ratio = sys.rhs[row] / other.rhs[row];
  CHECK(ratio.real() == doctest::Approx((1.0 - n * n) / (1.0 - 4.0)).epsilon(1e-12));
  CHECK(std::abs(ratio.imag()) <= 1e-12);
}

TEST_CASE("Dirichlet rows on the outer boundary") {
  Setup s;
  const LinearSystem sys = s.assembler.assemble(s.homogeneous(1.5));
  for (std::size_t v = 0; v < s.mesh.num_vertices(); ++v) {
    if (!s.mesh.on_boundary(v)) continue;
    const auto r = static_cast<Eigen::Index>(v);
    REQUIRE(sys.matrix.coeff(r, r) == Complex(1.0));
    REQUIRE(row_sum(sys.matrix, r) == Complex(1.0));
    REQUIRE(sys.rhs[r] == Complex(0.0));
  }
}

TEST_CASE("stretch factors") {
  Setup s;
  const PmlConfig pml;
  const double smax = pml.sigma_max(1.0);
  CHECK(smax == doctest::Approx(-3.0 * std::log(1e-6) / 2.0));
  for (std::size_t t = 0; t < s.mesh.num_triangles(); ++t) {
    const Point c = s.mesh.to_physical(s.mesh.centroid(t));
    const double dx = std::max({0.0, -c.x, c.x - 10.0});
    const double dy = std::max({0.0, -c.y, c.y - 10.0});
    REQUIRE(s.assembler.stretch_x(t).real() == 1.0);
    REQUIRE(s.assembler.stretch_x(t).imag() == doctest::Approx(smax * dx * dx / s.wave.k0()));
    REQUIRE(s.assembler.stretch_y(t).imag() == doctest::Approx(smax * dy * dy / s.wave.k0()));
    if (s.mesh.region(t) != Region::Pml) {
      REQUIRE(s.assembler.stretch_x(t) == Complex(1.0));
      REQUIRE(s.assembler.stretch_y(t) == Complex(1.0));
    }
  }
}

TEST_CASE("repeated assembly matches a fresh assembler") {
  Setup s;
  const auto k = s.homogeneous(1.3);
  s.assembler.assemble(s.homogeneous(2.0));
  const LinearSystem a = s.assembler.assemble(k);
  const LinearSystem b = assemble_system(s.mesh, k, s.wave, PmlConfig{});
  CHECK((a.matrix - b.matrix).norm() == 0.0);
  CHECK((a.rhs - b.rhs).norm() == 0.0);
}

TEST_CASE("sparse LU") {
  Setup s;
  const LinearSystem sys = s.assembler.assemble(s.homogeneous(1.5));
  const SparseLu lu(sys.matrix);
  const Eigen::VectorXcd x = lu.solve(sys.rhs);
  CHECK((sys.matrix * x - sys.rhs).norm() <= 1e-10 * sys.rhs.norm());
  CHECK(lu.solve(Eigen::VectorXcd::Zero(sys.rhs.size())).norm() == 0.0);
  CHECK_THROWS_AS(lu.solve(Eigen::VectorXcd::Zero(3)), SolverError);

  // The same factors solve the transposed system.
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(sys.rhs.size());
  b[1234] = Complex(0.3, -1.0);
  const Eigen::VectorXcd y = lu.solve(b);
  const ComplexMatrix at = sys.matrix.transpose();
  CHECK((at * y - b).norm() <= 1e-10 * b.norm());

  ComplexMatrix singular(3, 3);
  singular.insert(0, 0) = 1.0;
  singular.insert(1, 1) = 1.0;
  singular.makeCompressed();
  CHECK_THROWS_AS(SparseLu{singular}, SolverError);
}

TEST_CASE("wavenumber parameterization") {
  Setup s;
  DesignField tau = DesignField::Constant(static_cast<Eigen::Index>(s.mesh.num_vertices()), 0.25);
  const auto k = wavenumber_field(s.mesh, s.wave, tau);
  for (std::size_t t = 0; t < s.mesh.num_triangles(); ++t) {
    const double expected = s.mesh.region(t) == Region::Lens ? s.wave.k0() + std::exp(0.25) : s.wave.k0();
    REQUIRE(k.at(s.mesh, t, 0) == doctest::Approx(expected));
  }
  NoiseRealization zeta = NoiseRealization::Constant(tau.size(), -0.25);
  const auto kz = wavenumber_field(s.mesh, s.wave, tau, zeta);
  const std::size_t t = s.mesh.locate_physical({5.0, 5.0}).triangle;
  CHECK(kz.at(s.mesh, t, 1) == doctest::Approx(s.wave.k0() + 1.0));

  const std::size_t v = s.mesh.triangle(t)[2];
  tau[static_cast<Eigen::Index>(v)] = 800.0;
  try {
    wavenumber_field(s.mesh, s.wave, tau);
    FAIL("expected an overflow error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find(std::to_string(v)) != std::string::npos);
  }
  CHECK_THROWS_AS(wavenumber_field(s.mesh, s.wave, DesignField::Zero(4)), ConfigError);
}

TEST_CASE("interpolation is exact for linear fields") {
  Setup s;
  ComplexField f(static_cast<Eigen::Index>(s.mesh.num_vertices()));
  for (std::size_t v = 0; v < s.mesh.num_vertices(); ++v) {
    const Point p = s.mesh.vertex(v);
    f[static_cast<Eigen::Index>(v)] = Complex(2.0 * p.x - p.y + 1.0, 0.5 * p.y);
  }
  const Point q{3.217, 8.913};
  const Complex value = interpolate(f, s.mesh, s.mesh.locate(q));
  CHECK(value.real() == doctest::Approx(2.0 * q.x - q.y + 1.0));
  CHECK(value.imag() == doctest::Approx(0.5 * q.y));
}

TEST_CASE("config validation of the wave and PML") {
  std::vector<std::string> errors;
  WaveConfig{0.0, {1.0, 1.0}}.check(errors);
  CHECK(errors.size() == 2);
  errors.clear();
  PmlConfig{0, 2.0}.check(errors);
  CHECK(errors.size() == 2);
  CHECK_THROWS_AS(AssemblyOptions{1.5}.validate(), ConfigError);
  CHECK(WaveConfig{0.5}.k0() == doctest::Approx(4.0 * std::numbers::pi));
}
