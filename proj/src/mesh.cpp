#include "pnj/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "pnj/error.hpp"

namespace pnj {

const char* to_string(Region region) {
  switch (region) {
    case Region::Lens:
      return "LENS";
    case Region::Background:
      return "BACKGROUND";
    case Region::Pml:
      return "PML";
  }
  return "?";
}

void DomainSpec::check(std::vector<std::string>& errors) const {
  if (!(side > 0.0)) errors.emplace_back("domain.side must be positive");
  if (!(pml_width > 0.0)) errors.emplace_back("domain.pml_width must be positive");
  if (!(lens_radius > 0.0)) errors.emplace_back("domain.lens_radius must be positive");
  if (!(points_per_wavelength >= 10.0)) {
    errors.emplace_back("domain.points_per_wavelength must be >= 10");
  }
  const double c = lens_center.x, d = lens_center.y, r = lens_radius;
  if (!(c - r > 0.0 && c + r < side && d - r > 0.0 && d + r < side)) {
    errors.emplace_back("domain: lens disk must lie strictly inside the physical square");
  }
}

void DomainSpec::validate() const {
  std::vector<std::string> errors;
  check(errors);
  if (!errors.empty()) throw ConfigError(errors.front());
}

std::array<double, 3> barycentric(Point p, Point a, Point b, Point c) {
  const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  const double l1 = ((b.x - p.x) * (c.y - p.y) - (c.x - p.x) * (b.y - p.y)) / det;
  const double l2 = ((c.x - p.x) * (a.y - p.y) - (a.x - p.x) * (c.y - p.y)) / det;
  return {l1, l2, 1.0 - l1 - l2};
}

Mesh Mesh::build(const DomainSpec& spec, double wavelength) {
  spec.validate();
  if (!(wavelength > 0.0)) throw ConfigError("mesh: wavelength must be positive");

  Mesh mesh;
  mesh.spec_ = spec;
  mesh.extent_ = spec.side + 2.0 * spec.pml_width;
  const auto n = static_cast<std::size_t>(
      std::ceil(mesh.extent_ * spec.points_per_wavelength / wavelength - 1e-9));
  mesh.cells_ = n;
  mesh.h_ = mesh.extent_ / static_cast<double>(n);

  const std::size_t np = n + 1;
  mesh.vertices_.reserve(np * np);
  mesh.boundary_.reserve(np * np);
  for (std::size_t j = 0; j < np; ++j) {
    for (std::size_t i = 0; i < np; ++i) {
      // Exact endpoints so the outer edge sits on extent.
      const double x = i == n ? mesh.extent_ : static_cast<double>(i) * mesh.h_;
      const double y = j == n ? mesh.extent_ : static_cast<double>(j) * mesh.h_;
      mesh.vertices_.push_back({x, y});
      mesh.boundary_.push_back(i == 0 || j == 0 || i == n || j == n);
    }
  }

  const Point center = mesh.to_global(spec.lens_center);
  const double lo = spec.pml_width, hi = spec.pml_width + spec.side;
  auto classify = [&](Point c) {
    if (std::hypot(c.x - center.x, c.y - center.y) < spec.lens_radius) return Region::Lens;
    if (c.x < lo || c.x > hi || c.y < lo || c.y > hi) return Region::Pml;
    return Region::Background;
  };

  mesh.triangles_.reserve(2 * n * n);
  mesh.regions_.reserve(2 * n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto v00 = static_cast<std::uint32_t>(i + np * j);
      const auto v10 = v00 + 1;
      const auto v01 = static_cast<std::uint32_t>(v00 + np);
      const auto v11 = v01 + 1;
      if ((i + j) % 2 == 0) {
        mesh.triangles_.push_back({v00, v10, v11});
        mesh.triangles_.push_back({v00, v11, v01});
      } else {
        mesh.triangles_.push_back({v00, v10, v01});
        mesh.triangles_.push_back({v10, v11, v01});
      }
    }
  }

  mesh.lens_support_.assign(np * np, 0);
  mesh.physical_support_.assign(np * np, 0);
  for (std::size_t t = 0; t < mesh.triangles_.size(); ++t) {
    const Region r = classify(mesh.centroid(t));
    mesh.regions_.push_back(r);
    if (r == Region::Lens) {
      ++mesh.num_lens_triangles_;
      for (auto v : mesh.triangles_[t]) mesh.lens_support_[v] = 1;
    }
    if (r != Region::Pml) {
      for (auto v : mesh.triangles_[t]) mesh.physical_support_[v] = 1;
    }
  }
  if (mesh.num_lens_triangles_ == 0) {
    std::ostringstream msg;
    msg << "mesh: lens of radius " << spec.lens_radius << " contains no elements at h = " << mesh.h_;
    throw ConfigError(msg.str());
  }
  return mesh;
}

double Mesh::area(std::size_t t) const {
  const auto& tri = triangles_[t];
  const Point a = vertices_[tri[0]], b = vertices_[tri[1]], c = vertices_[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Point Mesh::centroid(std::size_t t) const {
  const auto& tri = triangles_[t];
  const Point a = vertices_[tri[0]], b = vertices_[tri[1]], c = vertices_[tri[2]];
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

Point Mesh::to_global(Point physical) const {
  return {physical.x + spec_.pml_width, physical.y + spec_.pml_width};
}

Point Mesh::to_physical(Point global) const {
  return {global.x - spec_.pml_width, global.y - spec_.pml_width};
}

PointLocation Mesh::locate(Point p) const {
  const double tol = 1e-12 * extent_;
  if (!(p.x >= -tol && p.x <= extent_ + tol && p.y >= -tol && p.y <= extent_ + tol)) {
    std::ostringstream msg;
    msg << "point (" << p.x << ", " << p.y << ") lies outside the meshed square [0, " << extent_
        << "]^2";
    throw OutOfDomainError(msg.str());
  }
  const auto n = static_cast<long>(cells_);
  const auto ci = std::clamp(static_cast<long>(std::floor(p.x / h_)), 0L, n - 1);
  const auto cj = std::clamp(static_cast<long>(std::floor(p.y / h_)), 0L, n - 1);

  PointLocation best;
  best.triangle = std::numeric_limits<std::size_t>::max();
  for (long j = std::max(0L, cj - 1); j <= std::min(n - 1, cj + 1); ++j) {
    for (long i = std::max(0L, ci - 1); i <= std::min(n - 1, ci + 1); ++i) {
      const auto first = static_cast<std::size_t>(2 * (i + n * j));
      for (std::size_t t = first; t < first + 2; ++t) {
        if (t >= best.triangle) continue;
        const auto& tri = triangles_[t];
        const auto w = barycentric(p, vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
        if (std::min({w[0], w[1], w[2]}) >= -1e-12) {
          best.triangle = t;
          best.weights = w;
        }
      }
    }
  }
  if (best.triangle == std::numeric_limits<std::size_t>::max()) {
    throw OutOfDomainError("point location failed inside the meshed square");
  }
  double sum = 0.0;
  for (double& w : best.weights) {
    w = std::clamp(w, 0.0, 1.0);
    sum += w;
  }
  for (double& w : best.weights) w /= sum;
  return best;
}

void Mesh::write(std::ostream& out) const {
  out.precision(17);
  out << "# mesh: physical frame [0," << spec_.side << "]^2, pml width " << spec_.pml_width
      << ", h " << h_ << "\n";
  out << "vertices " << vertices_.size() << "\n";
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    const Point p = to_physical(vertices_[v]);
    out << v << ' ' << p.x << ' ' << p.y << '\n';
  }
  out << "triangles " << triangles_.size() << "\n";
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    out << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' ' << to_string(regions_[t])
        << '\n';
  }
}

}  // namespace pnj
