#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pnj/helmholtz.hpp"
#include "pnj/mesh.hpp"
#include "pnj/objective.hpp"
#include "pnj/optimizer.hpp"
#include "pnj/random_field.hpp"

namespace pnj {

enum class RunMode { DesignDet, DesignOuu, ForwardUq, ForwardSolve };

const char* to_string(RunMode mode);
std::optional<RunMode> parse_mode(const std::string& name);

struct UqConfig {
  int realizations = 15;
  /// Realizations use sample indices first_index, first_index + 1, ... of the
  /// noise stream, disjoint from the SAA design samples 0 .. M-1.
  std::uint64_t first_index = 1000;
  bool exclude_lens = true;
  /// Defaults to the x of the objective target.
  std::optional<double> transect_x;
  int bins = 10;
};

struct RunConfig {
  RunMode mode = RunMode::ForwardSolve;
  DomainSpec domain;
  WaveConfig wave;
  PmlConfig pml;
  AssemblyOptions assembly;
  ObjectiveSpec objective;
  MaternSpec noise;
  OptConfig optimizer;
  UqConfig uq;
  /// Nodal design table: the input of forward-uq and forward-solve, the
  /// optional starting point of the design modes.
  std::string design;
  /// Homogeneous lens index for forward-solve without a design file; 1 means no lens.
  std::optional<double> lens_index;
  int threads = 0;

  double transect_x() const { return uq.transect_x.value_or(objective.target.x); }
};

struct ConfigResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;
};

/// Parses JSON (comments allowed) into a fully defaulted config. Every
/// problem is reported: syntax, wrong types, unknown keys, missing
/// wavelength, and violated invariants of the nested specs. `mode`
/// overrides the file's "mode" key.
ConfigResult parse_config(const std::string& text, std::optional<RunMode> mode = std::nullopt);

/// Invariant checks on an assembled config.
void check_config(const RunConfig& config, std::vector<std::string>& errors);

/// The resolved config with every default materialized, as JSON text that
/// parse_config accepts.
std::string to_json(const RunConfig& config);

}  // namespace pnj
