#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pnj/helmholtz.hpp"
#include "pnj/mesh.hpp"

namespace pnj {

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

/// Nodal design table: "vertex x y tau", physical-frame coordinates.
void write_design(std::ostream& out, const Mesh& mesh, const DesignField& tau);
/// Reads a design table written for the same mesh. Throws ConfigError on a
/// malformed table or a vertex count that does not match.
DesignField read_design(std::istream& in, const Mesh& mesh);
DesignField read_design(const std::filesystem::path& path, const Mesh& mesh);

/// Nodal field table: "vertex x y re im intensity".
void write_field(std::ostream& out, const Mesh& mesh, const ComplexField& total);

}  // namespace pnj
