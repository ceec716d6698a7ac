#include "pnj/runner.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "pnj/adjoint.hpp"
#include "pnj/error.hpp"
#include "pnj/io.hpp"
#include "pnj/parallel.hpp"

namespace pnj {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::string csv(std::initializer_list<std::string> cells) {
  std::string line;
  for (const auto& c : cells) {
    if (!line.empty()) line += ',';
    line += c;
  }
  return line + '\n';
}

std::string num(double v) { return format_double(v); }

RunConfig resolve(RunConfig config) {
  if (!config.design.empty()) {
    config.design = std::filesystem::absolute(config.design).lexically_normal().string();
  }
  if (config.mode == RunMode::ForwardSolve && config.design.empty() && !config.lens_index) {
    config.lens_index = config.optimizer.initial_index;
  }
  if (!config.uq.transect_x) config.uq.transect_x = config.objective.target.x;
  return config;
}

void write_features_header(std::ostream& out) {
  out << "stage,peak_vertex,peak_x,peak_y,peak_value,target_intensity,fwhm,fwhm_defined\n";
}

void write_features_row(std::ostream& out, const std::string& stage, const PnjFeatures& f, double target) {
  out << csv({stage, std::to_string(f.vertex), num(f.peak.x), num(f.peak.y), num(f.peak_value), num(target),
              num(f.fwhm), f.fwhm_defined ? "1" : "0"});
}

double target_intensity(const Experiment& ex, const ComplexField& total) {
  return std::norm(interpolate(total, ex.mesh(), ex.mesh().locate_physical(ex.config().objective.target)));
}

void write_field_file(const Experiment& ex, const std::filesystem::path& path, const ComplexField& u) {
  auto out = open_output(path);
  write_field(out, ex.mesh(), u);
}

void write_design_file(const Experiment& ex, const std::filesystem::path& path, const DesignField& tau) {
  auto out = open_output(path);
  write_design(out, ex.mesh(), tau);
}

void run_design(const Experiment& ex, const std::filesystem::path& dir, std::ostream& log) {
  auto trace = open_output(dir / "trace.csv");
  auto timing = open_output(dir / "timing.csv");
  trace << "iteration,J,mean,variance,penalty,grad_norm,step,backtracks\n";
  timing << "iteration,wall_time\n";
  const auto& obj = ex.config().objective;

  const DesignOutcome outcome = optimize_design(ex, [&](const OptRecord& r, const ObjectiveValue& v) {
    trace << csv({std::to_string(r.iteration), num(r.value), num(v.mean), num(obj.variance_weight * v.variance),
                  num(obj.penalty_weight * v.penalty), num(r.gradient_norm), num(r.step),
                  std::to_string(r.backtracks)});
    trace.flush();
    timing << r.iteration << ',' << r.wall_time << '\n';
    log << "iter " << r.iteration << "  J " << r.value << "  |g| " << r.gradient_norm << "  step " << r.step
        << "  backtracks " << r.backtracks << '\n';
  });

  const FeatureOptions fo = ex.feature_options();
  const ComplexField u0 = ex.total(outcome.initial);
  const ComplexField u1 = ex.total(outcome.result.x);
  write_design_file(ex, dir / "design_initial.txt", outcome.initial);
  write_design_file(ex, dir / "design_final.txt", outcome.result.x);
  write_field_file(ex, dir / "field_initial.txt", u0);
  write_field_file(ex, dir / "field_final.txt", u1);

  auto features = open_output(dir / "features.csv");
  write_features_header(features);
  write_features_row(features, "initial", extract_features(u0, ex.mesh(), fo), target_intensity(ex, u0));
  write_features_row(features, "final", extract_features(u1, ex.mesh(), fo), target_intensity(ex, u1));

  auto result = open_output(dir / "result.csv");
  result << "key,value\n";
  result << "termination," << to_string(outcome.result.reason) << '\n';
  result << "iterations," << outcome.result.trace.back().iteration << '\n';
  result << "J," << num(outcome.result.value) << '\n';
  result << "forward_solves," << outcome.counts.forward << '\n';
  result << "adjoint_solves," << outcome.counts.adjoint << '\n';
  log << "termination: " << to_string(outcome.result.reason) << '\n';
}

void run_forward_uq(const Experiment& ex, const std::filesystem::path& dir, std::ostream& log) {
  const auto& cfg = ex.config();
  const DesignField tau = read_design(cfg.design, ex.mesh());
  const auto indices = ex.uq_indices();
  const auto zetas = ex.uq_realizations();
  const UqSummary summary =
      forward_uq(ex.assembler(), tau, zetas, ex.feature_options(), resolve_threads(cfg.threads));

  auto rows = open_output(dir / "uq_realizations.csv");
  rows << "realization,seed,sample_index,peak_vertex,peak_x,peak_y,peak_value,fwhm,fwhm_defined\n";
  for (std::size_t m = 0; m < summary.features.size(); ++m) {
    const auto& f = summary.features[m];
    rows << csv({std::to_string(m), std::to_string(cfg.noise.seed), std::to_string(indices[m]),
                 std::to_string(f.vertex), num(f.peak.x), num(f.peak.y), num(f.peak_value), num(f.fwhm),
                 f.fwhm_defined ? "1" : "0"});
  }

  auto sum = open_output(dir / "uq_summary.csv");
  sum << "quantity,mean,variance\n";
  sum << csv({"peak_x", num(summary.mean_x), num(summary.variance_x)});
  sum << csv({"peak_y", num(summary.mean_y), num(summary.variance_y)});
  sum << csv({"peak_value", num(summary.mean_value), num(summary.variance_value)});

  auto loc = open_output(dir / "uq_locations.csv");
  loc << "peak_vertex,peak_x,peak_y,count\n";
  for (const auto& b : location_histogram(summary)) {
    loc << csv({std::to_string(b.vertex), num(b.location.x), num(b.location.y), std::to_string(b.count)});
  }

  auto val = open_output(dir / "uq_values.csv");
  val << "lower,upper,count\n";
  const auto values = summary.values(Feature::PeakValue);
  for (const auto& b : value_histogram(values, static_cast<std::size_t>(cfg.uq.bins))) {
    val << csv({num(b.lower), num(b.upper), std::to_string(b.count)});
  }
  log << "peak x " << summary.mean_x << " (var " << summary.variance_x << ")  peak y " << summary.mean_y
      << " (var " << summary.variance_y << ")  peak value " << summary.mean_value << " (var "
      << summary.variance_value << ")\n";
}

void run_forward_solve(const Experiment& ex, const std::filesystem::path& dir, std::ostream& log) {
  const auto& cfg = ex.config();
  const Mesh& mesh = ex.mesh();
  ComplexField u;
  if (!cfg.design.empty()) {
    const DesignField tau = read_design(cfg.design, mesh);
    write_design_file(ex, dir / "design.txt", tau);
    u = ex.total(tau);
  } else {
    WavenumberField k{ex.assembler().k0(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.num_vertices()))};
    const double excess = (*cfg.lens_index - 1.0) * k.k0;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      if (mesh.lens_support(v)) k.lens_excess[static_cast<Eigen::Index>(v)] = excess;
    }
    u = total_field(solve_scattered(ex.assembler().assemble(k)), ex.assembler());
  }
  write_field_file(ex, dir / "field.txt", u);
  auto features = open_output(dir / "features.csv");
  write_features_header(features);
  const PnjFeatures f = extract_features(u, mesh, ex.feature_options());
  write_features_row(features, "solve", f, target_intensity(ex, u));
  log << "peak " << f.peak_value << " at (" << f.peak.x << ", " << f.peak.y << ")\n";
}

}  // namespace

Experiment::Experiment(const RunConfig& config) : config_(config) {
  std::vector<std::string> errors;
  check_config(config_, errors);
  if (!errors.empty()) throw ConfigError(errors.front());
  mesh_ = std::make_unique<Mesh>(Mesh::build(config_.domain, config_.wave.wavelength));
  assembler_ = std::make_unique<HelmholtzAssembler>(*mesh_, config_.wave, config_.pml, config_.assembly);
  sampler_ = std::make_unique<MaternSampler>(*mesh_, config_.noise);
}

FeatureOptions Experiment::feature_options() const {
  return {config_.uq.exclude_lens, config_.transect_x()};
}

DesignField Experiment::homogeneous_design(double index) const {
  DesignField tau = DesignField::Zero(static_cast<Eigen::Index>(mesh_->num_vertices()));
  const double value = std::log(assembler_->k0() * (index - 1.0));
  for (std::size_t v = 0; v < mesh_->num_vertices(); ++v) {
    if (mesh_->lens_support(v)) tau[static_cast<Eigen::Index>(v)] = value;
  }
  return tau;
}

DesignField Experiment::initial_design() const {
  if (!config_.design.empty()) return read_design(config_.design, *mesh_);
  return homogeneous_design(config_.optimizer.initial_index);
}

std::vector<NoiseRealization> Experiment::design_samples() const {
  if (config_.mode != RunMode::DesignOuu) return {};
  std::vector<NoiseRealization> out;
  for (int m = 0; m < config_.objective.samples; ++m) out.push_back(sampler_->sample(static_cast<std::uint64_t>(m)));
  return out;
}

std::vector<std::uint64_t> Experiment::uq_indices() const {
  std::vector<std::uint64_t> out;
  for (int m = 0; m < config_.uq.realizations; ++m) out.push_back(config_.uq.first_index + static_cast<std::uint64_t>(m));
  return out;
}

std::vector<NoiseRealization> Experiment::uq_realizations() const {
  std::vector<NoiseRealization> out;
  for (auto i : uq_indices()) out.push_back(sampler_->sample(i));
  return out;
}

ComplexField Experiment::total(const DesignField& tau) const {
  const auto k = wavenumber_field(*mesh_, config_.wave, tau);
  return total_field(solve_scattered(assembler_->assemble(k)), *assembler_);
}

DesignOutcome optimize_design(const Experiment& ex, const DesignProgress& progress) {
  const auto& cfg = ex.config();
  if (cfg.mode != RunMode::DesignDet && cfg.mode != RunMode::DesignOuu) {
    throw ConfigError("optimize_design needs mode design-det or design-ouu");
  }
  ObjectiveSpec spec = cfg.objective;
  if (cfg.mode == RunMode::DesignDet) spec.samples = 1;
  const SaaProblem problem(ex.assembler(), spec, ex.design_samples(), resolve_threads(cfg.threads));

  DesignOutcome outcome;
  outcome.initial = ex.initial_design();
  ObjectiveValue last;
  auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    GradientResult r = gradient(problem, x);
    g = std::move(r.gradient);
    last = std::move(r.value);
    return last.value;
  };
  auto on_iteration = [&](const OptRecord& record, const Eigen::VectorXd&) {
    outcome.values.push_back(last);
    if (progress) progress(record, last);
  };
  outcome.result = minimize(outcome.initial, objective, cfg.optimizer, on_iteration);
  outcome.counts = problem.counts();
  return outcome;
}

void run(const RunConfig& config, const std::filesystem::path& output, std::ostream& log) {
  const RunConfig resolved = resolve(config);
  const Experiment ex(resolved);
  std::filesystem::create_directories(output);

  {
    auto manifest = open_output(output / "manifest.json");
    auto j = nlohmann::json::parse(to_json(resolved));
    std::vector<std::uint64_t> design_indices;
    if (resolved.mode == RunMode::DesignOuu) {
      for (int m = 0; m < resolved.objective.samples; ++m) design_indices.push_back(static_cast<std::uint64_t>(m));
    }
    j["info"] = {{"noise_seed", resolved.noise.seed},
                 {"design_sample_indices", design_indices},
                 {"uq_sample_indices", resolved.mode == RunMode::ForwardUq ? ex.uq_indices() : std::vector<std::uint64_t>{}},
                 {"vertices", ex.mesh().num_vertices()},
                 {"triangles", ex.mesh().num_triangles()},
                 {"h", ex.mesh().h()}};
    manifest << j.dump(2) << '\n';
  }
  {
    auto mesh = open_output(output / "mesh.txt");
    ex.mesh().write(mesh);
  }
  log << to_string(resolved.mode) << ": " << ex.mesh().num_vertices() << " vertices, h = " << ex.mesh().h()
      << ", " << resolve_threads(resolved.threads) << " thread(s)\n";

  switch (resolved.mode) {
    case RunMode::DesignDet:
    case RunMode::DesignOuu:
      run_design(ex, output, log);
      break;
    case RunMode::ForwardUq:
      run_forward_uq(ex, output, log);
      break;
    case RunMode::ForwardSolve:
      run_forward_solve(ex, output, log);
      break;
  }
}

}  // namespace pnj
