#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "pnj/error.hpp"
#include "pnj/mesh.hpp"

using namespace pnj;

TEST_CASE("mesh triangles tile the square") {
  for (double ppw : {10.0, 15.0, 20.0}) {
    DomainSpec spec;
    spec.points_per_wavelength = ppw;
    const Mesh mesh = Mesh::build(spec, 1.0);
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      CHECK(mesh.area(t) > 0.0);
      total += mesh.area(t);
    }
    CHECK(std::abs(total - 144.0) <= 1e-10 * 144.0);
    CHECK(mesh.num_triangles() == 2 * mesh.cells_per_side() * mesh.cells_per_side());
    CHECK(mesh.h() <= 1.0 / ppw + 1e-12);
  }
}

TEST_CASE("tagged lens area approximates the disk") {
  DomainSpec spec;
  const double disk = std::numbers::pi * 9.0;
  double previous = 1.0;
  for (double ppw : {10.0, 20.0, 40.0}) {
    spec.points_per_wavelength = ppw;
    const Mesh mesh = Mesh::build(spec, 1.0);
    double lens = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      if (mesh.region(t) == Region::Lens) lens += mesh.area(t);
    }
    const double err = std::abs(lens - disk) / disk;
    CHECK(err <= 0.05);
    CHECK(err <= previous);
    previous = err;
  }
}

TEST_CASE("regions follow the element centroid") {
  DomainSpec spec;
  spec.points_per_wavelength = 10.0;
  const Mesh mesh = Mesh::build(spec, 1.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Point c = mesh.to_physical(mesh.centroid(t));
    const double r = std::hypot(c.x - 5.0, c.y - 5.0);
    Region expected = Region::Background;
    if (r < 3.0) {
      expected = Region::Lens;
    } else if (c.x < 0.0 || c.y < 0.0 || c.x > 10.0 || c.y > 10.0) {
      expected = Region::Pml;
    }
    REQUIRE(mesh.region(t) == expected);
  }
}

TEST_CASE("vertex flags") {
  DomainSpec spec;
  spec.points_per_wavelength = 10.0;
  const Mesh mesh = Mesh::build(spec, 1.0);
  std::size_t boundary = 0;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point p = mesh.vertex(v);
    const bool edge = p.x == 0.0 || p.y == 0.0 || p.x == mesh.extent() || p.y == mesh.extent();
    CHECK(mesh.on_boundary(v) == edge);
    boundary += edge ? 1 : 0;
    const Point q = mesh.to_physical(p);
    if (mesh.lens_support(v)) CHECK(std::hypot(q.x - 5.0, q.y - 5.0) < 3.0 + 2.0 * mesh.h());
    const bool inside = q.x >= -1e-12 && q.y >= -1e-12 && q.x <= 10.0 + 1e-12 && q.y <= 10.0 + 1e-12;
    CHECK(mesh.physical_support(v) == inside);
  }
  CHECK(boundary == 4 * mesh.cells_per_side());
}

TEST_CASE("frames differ by the PML width") {
  DomainSpec spec;
  spec.pml_width = 1.5;
  spec.points_per_wavelength = 10.0;
  const Mesh mesh = Mesh::build(spec, 1.0);
  const Point g = mesh.to_global({2.0, 3.0});
  CHECK(g.x == doctest::Approx(3.5));
  CHECK(g.y == doctest::Approx(4.5));
  const Point p = mesh.to_physical(g);
  CHECK(p.x == doctest::Approx(2.0));
  CHECK(p.y == doctest::Approx(3.0));
}

TEST_CASE("locate") {
  DomainSpec spec;
  spec.points_per_wavelength = 10.0;
  const Mesh mesh = Mesh::build(spec, 1.0);

  SUBCASE("weights reproduce the point") {
    for (Point p : {Point{0.37, 2.91}, Point{5.0, 5.0}, Point{11.99, 0.01}, Point{6.123, 7.456}}) {
      const auto loc = mesh.locate(p);
      const auto& tri = mesh.triangle(loc.triangle);
      double x = 0.0, y = 0.0, sum = 0.0;
      for (int i = 0; i < 3; ++i) {
        CHECK(loc.weights[i] >= 0.0);
        x += loc.weights[i] * mesh.vertex(tri[i]).x;
        y += loc.weights[i] * mesh.vertex(tri[i]).y;
        sum += loc.weights[i];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(x == doctest::Approx(p.x).epsilon(1e-12));
      CHECK(y == doctest::Approx(p.y).epsilon(1e-12));
    }
  }

  SUBCASE("a vertex gets weight one") {
    const std::size_t v = 5 * (mesh.cells_per_side() + 1) + 7;
    const auto loc = mesh.locate(mesh.vertex(v));
    const auto& tri = mesh.triangle(loc.triangle);
    for (int i = 0; i < 3; ++i) {
      CHECK(loc.weights[i] == doctest::Approx(tri[i] == v ? 1.0 : 0.0));
    }
  }

  SUBCASE("shared edges resolve to the lowest triangle index") {
    const double h = mesh.h();
    const Point p{3.5 * h, 2.0 * h};  // on a horizontal grid line
    const auto loc = mesh.locate(p);
    for (std::size_t t = 0; t < loc.triangle; ++t) {
      const auto& tri = mesh.triangle(t);
      const auto w = barycentric(p, mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2]));
      CHECK(std::min({w[0], w[1], w[2]}) < -1e-12);
    }
  }

  SUBCASE("corners") {
    CHECK_NOTHROW(mesh.locate({0.0, 0.0}));
    CHECK_NOTHROW(mesh.locate({mesh.extent(), mesh.extent()}));
  }

  SUBCASE("outside") {
    CHECK_THROWS_AS(mesh.locate({-0.1, 5.0}), OutOfDomainError);
    CHECK_THROWS_AS(mesh.locate({5.0, 12.5}), OutOfDomainError);
    CHECK_THROWS_AS(mesh.locate_physical({11.5, 5.0}), OutOfDomainError);
  }
}

TEST_CASE("invalid domains") {
  DomainSpec spec;
  spec.lens_radius = 6.0;
  CHECK_THROWS_AS(Mesh::build(spec, 1.0), ConfigError);
  spec = DomainSpec{};
  spec.points_per_wavelength = 5.0;
  CHECK_THROWS_AS(Mesh::build(spec, 1.0), ConfigError);
  spec = DomainSpec{};
  CHECK_THROWS_AS(Mesh::build(spec, 0.0), ConfigError);

  spec = DomainSpec{};
  spec.lens_radius = 0.01;
  spec.lens_center = {5.05, 5.05};
  CHECK_THROWS_AS(Mesh::build(spec, 2.0), ConfigError);

  std::vector<std::string> errors;
  DomainSpec bad;
  bad.side = -1.0;
  bad.pml_width = 0.0;
  bad.check(errors);
  CHECK(errors.size() >= 3);
}

TEST_CASE("mesh export") {
  DomainSpec spec;
  spec.points_per_wavelength = 10.0;
  const Mesh mesh = Mesh::build(spec, 2.0);
  std::ostringstream out;
  mesh.write(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line[0] == '#');
  std::string word;
  std::size_t count = 0;
  in >> word >> count;
  CHECK(word == "vertices");
  CHECK(count == mesh.num_vertices());
  std::size_t idx = 0;
  double x = 0.0, y = 0.0;
  in >> idx >> x >> y;
  CHECK(idx == 0);
  CHECK(x == doctest::Approx(-1.0));
  for (std::size_t v = 1; v < count; ++v) in >> idx >> x >> y;
  in >> word >> count;
  CHECK(word == "triangles");
  CHECK(count == mesh.num_triangles());
  std::size_t a = 0, b = 0, c = 0;
  std::string tag;
  in >> idx >> a >> b >> c >> tag;
  CHECK(tag == "PML");
}
