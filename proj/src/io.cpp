#include "pnj/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pnj/error.hpp"

namespace pnj {

std::string format_double(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

void write_design(std::ostream& out, const Mesh& mesh, const DesignField& tau) {
  out << "# vertex x y tau\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point p = mesh.to_physical(mesh.vertex(v));
    out << v << ' ' << format_double(p.x) << ' ' << format_double(p.y) << ' '
        << format_double(tau[static_cast<Eigen::Index>(v)]) << '\n';
  }
}

DesignField read_design(std::istream& in, const Mesh& mesh) {
  DesignField tau = DesignField::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
  std::vector<char> seen(mesh.num_vertices(), 0);
  std::string line;
  std::size_t lineno = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::size_t v = 0;
    double x = 0.0, y = 0.0, t = 0.0;
    if (!(row >> v >> x >> y >> t)) {
      throw ConfigError("design table line " + std::to_string(lineno) + ": expected 'vertex x y tau'");
    }
    if (v >= mesh.num_vertices() || seen[v]) {
      throw ConfigError("design table line " + std::to_string(lineno) + ": bad or repeated vertex index");
    }
    const Point p = mesh.to_physical(mesh.vertex(v));
    if (std::abs(p.x - x) > 1e-9 || std::abs(p.y - y) > 1e-9) {
      throw ConfigError("design table line " + std::to_string(lineno) + ": coordinates do not match the mesh");
    }
    seen[v] = 1;
    tau[static_cast<Eigen::Index>(v)] = t;
    ++rows;
  }
  if (rows != mesh.num_vertices()) {
    throw ConfigError("design table has " + std::to_string(rows) + " rows, mesh has " +
                      std::to_string(mesh.num_vertices()) + " vertices");
  }
  return tau;
}

DesignField read_design(const std::filesystem::path& path, const Mesh& mesh) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open design table " + path.string());
  return read_design(in, mesh);
}

void write_field(std::ostream& out, const Mesh& mesh, const ComplexField& total) {
  out << "# vertex x y re im intensity\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const Point p = mesh.to_physical(mesh.vertex(v));
    const Complex u = total[static_cast<Eigen::Index>(v)];
    out << v << ' ' << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(u.real()) << ' '
        << format_double(u.imag()) << ' ' << format_double(std::norm(u)) << '\n';
  }
}

}  // namespace pnj
