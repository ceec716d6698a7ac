#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "pnj/config.hpp"
#include "pnj/helmholtz.hpp"
#include "pnj/objective.hpp"
#include "pnj/optimizer.hpp"
#include "pnj/random_field.hpp"
#include "pnj/uq.hpp"

namespace pnj {

/// Mesh, assembler and noise sampler for one validated config.
class Experiment {
 public:
  explicit Experiment(const RunConfig& config);

  const RunConfig& config() const { return config_; }
  const Mesh& mesh() const { return *mesh_; }
  const HelmholtzAssembler& assembler() const { return *assembler_; }
  const MaternSampler& sampler() const { return *sampler_; }
  FeatureOptions feature_options() const;

  /// tau = ln(k0 (n - 1)) on lens-supporting vertices, 0 elsewhere.
  DesignField homogeneous_design(double index) const;
  /// The config's design table if given, else the homogeneous start.
  DesignField initial_design() const;
  /// Noise samples 0 .. M-1 for design-ouu; empty for design-det.
  std::vector<NoiseRealization> design_samples() const;
  std::vector<std::uint64_t> uq_indices() const;
  std::vector<NoiseRealization> uq_realizations() const;

  /// Total field of an unpolluted design.
  ComplexField total(const DesignField& tau) const;

 private:
  RunConfig config_;
  std::unique_ptr<Mesh> mesh_;
  std::unique_ptr<HelmholtzAssembler> assembler_;
  std::unique_ptr<MaternSampler> sampler_;
};

struct DesignOutcome {
  DesignField initial;
  OptResult result;
  std::vector<ObjectiveValue> values;  // one per trace record
  SolveCounts counts;
};

using DesignProgress = std::function<void(const OptRecord& record, const ObjectiveValue& value)>;

/// Minimizes the deterministic (design-det) or SAA (design-ouu) objective
/// from the experiment's initial design.
DesignOutcome optimize_design(const Experiment& experiment, const DesignProgress& progress = {});

/// Runs the config's mode and writes all outputs into `output`, including a
/// manifest.json from which the run can be repeated.
void run(const RunConfig& config, const std::filesystem::path& output, std::ostream& log);

}  // namespace pnj
