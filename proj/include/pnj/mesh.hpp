#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pnj {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class Region : std::uint8_t { Lens, Background, Pml };

const char* to_string(Region region);

/// Geometry of the computational domain. All points are in the physical
/// frame [0, side]^2; the PML frame surrounds it.
struct DomainSpec {
  double side = 10.0;
  double pml_width = 1.0;
  Point lens_center{5.0, 5.0};
  double lens_radius = 3.0;
  double points_per_wavelength = 20.0;

  /// Appends one message per violated invariant.
  void check(std::vector<std::string>& errors) const;
  /// Throws ConfigError on the first violated invariant.
  void validate() const;
};

using Triangle = std::array<std::uint32_t, 3>;

struct PointLocation {
  std::size_t triangle = 0;
  std::array<double, 3> weights{};
};

/// Structured triangulation of [0, side + 2 * pml_width]^2. Each grid cell is
/// split into two triangles, the diagonal alternating in a checkerboard
/// pattern. Immutable after construction.
class Mesh {
 public:
  static Mesh build(const DomainSpec& spec, double wavelength);

  const DomainSpec& spec() const { return spec_; }
  std::size_t cells_per_side() const { return cells_; }
  double h() const { return h_; }
  double extent() const { return extent_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  std::span<const Point> vertices() const { return vertices_; }
  std::span<const Triangle> triangles() const { return triangles_; }
  std::span<const Region> regions() const { return regions_; }

  const Point& vertex(std::size_t v) const { return vertices_[v]; }
  const Triangle& triangle(std::size_t t) const { return triangles_[t]; }
  Region region(std::size_t t) const { return regions_[t]; }
  bool on_boundary(std::size_t v) const { return boundary_[v] != 0; }
  double area(std::size_t t) const;
  Point centroid(std::size_t t) const;

  /// True for vertices of at least one LENS triangle.
  bool lens_support(std::size_t v) const { return lens_support_[v] != 0; }
  /// True for vertices of at least one non-PML triangle.
  bool physical_support(std::size_t v) const { return physical_support_[v] != 0; }
  std::size_t num_lens_triangles() const { return num_lens_triangles_; }

  Point to_global(Point physical) const;
  Point to_physical(Point global) const;

  /// Containing triangle and barycentric weights of a point in the global
  /// frame. Points on shared edges resolve to the lowest triangle index.
  PointLocation locate(Point global) const;
  PointLocation locate_physical(Point physical) const { return locate(to_global(physical)); }

  /// Vertex table and triangle table, coordinates in the physical frame.
  void write(std::ostream& out) const;

 private:
  Mesh() = default;

  DomainSpec spec_;
  std::size_t cells_ = 0;
  double h_ = 0.0;
  double extent_ = 0.0;
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Region> regions_;
  std::vector<std::uint8_t> boundary_;
  std::vector<std::uint8_t> lens_support_;
  std::vector<std::uint8_t> physical_support_;
  std::size_t num_lens_triangles_ = 0;
};

/// Barycentric coordinates of p with respect to triangle (a, b, c).
std::array<double, 3> barycentric(Point p, Point a, Point b, Point c);

}  // namespace pnj
