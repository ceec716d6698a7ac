#include "pnj/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace pnj {

using nlohmann::json;

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::DesignDet:
      return "design-det";
    case RunMode::DesignOuu:
      return "design-ouu";
    case RunMode::ForwardUq:
      return "forward-uq";
    case RunMode::ForwardSolve:
      return "forward-solve";
  }
  return "?";
}

std::optional<RunMode> parse_mode(const std::string& name) {
  for (auto m : {RunMode::DesignDet, RunMode::DesignOuu, RunMode::ForwardUq, RunMode::ForwardSolve}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

namespace {

/// Typed access to one JSON object; records type errors and unknown keys.
class Reader {
 public:
  Reader(const json* node, std::string path, std::vector<std::string>& errors)
      : node_(node), path_(std::move(path)), errors_(&errors) {
    if (node_ != nullptr && !node_->is_object()) {
      fail("", "must be an object");
      node_ = nullptr;
    }
  }

  Reader child(const char* key) { return Reader(find(key), name(key), *errors_); }

  bool has(const char* key) { return find(key) != nullptr; }

  void get(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(key, "must be a number");
      }
    }
  }

  void get(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (v->is_number_integer()) {
        out = v->get<int>();
      } else {
        fail(key, "must be an integer");
      }
    }
  }

  void get(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else {
        fail(key, "must be a non-negative integer");
      }
    }
  }

  void get(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (v->is_boolean()) {
        out = v->get<bool>();
      } else {
        fail(key, "must be true or false");
      }
    }
  }

  void get(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (v->is_string()) {
        out = v->get<std::string>();
      } else {
        fail(key, "must be a string");
      }
    }
  }

  void get(const char* key, Point& out) {
    if (const json* v = find(key)) {
      if (v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number()) {
        out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
      } else {
        fail(key, "must be an array of two numbers");
      }
    }
  }

  void get(const char* key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        fail(key, "must be a number or null");
      }
    }
  }

  void require(const char* key, double& out) {
    if (find(key) == nullptr) {
      fail(key, "is required");
      return;
    }
    get(key, out);
  }

  /// Reports keys that were never asked for.
  void finish(std::initializer_list<const char*> ignored = {}) {
    if (node_ == nullptr) return;
    for (const auto& [key, value] : node_->items()) {
      if (seen_.count(key) != 0) continue;
      bool skip = false;
      for (const char* k : ignored) skip = skip || key == k;
      if (!skip) fail(key.c_str(), "is not a recognized key");
    }
  }

 private:
  const json* find(const char* key) {
    seen_.insert(key);
    if (node_ == nullptr) return nullptr;
    auto it = node_->find(key);
    return it == node_->end() ? nullptr : &*it;
  }

  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void fail(const char* key, const char* what) {
    std::string n = *key != '\0' ? name(key) : (path_.empty() ? "config" : path_);
    errors_->push_back(n + " " + what);
  }

  const json* node_;
  std::string path_;
  std::vector<std::string>* errors_;
  std::set<std::string> seen_;
};

json point(Point p) { return json::array({p.x, p.y}); }

}  // namespace

void check_config(const RunConfig& c, std::vector<std::string>& errors) {
  c.domain.check(errors);
  c.wave.check(errors);
  c.pml.check(errors);
  c.assembly.check(errors);
  c.objective.check(errors, c.domain);
  c.noise.check(errors);
  c.optimizer.check(errors);
  if (c.uq.realizations < 1) errors.emplace_back("uq.realizations must be >= 1");
  if (c.uq.bins < 1) errors.emplace_back("uq.bins must be >= 1");
  const double tx = c.transect_x();
  if (!(tx >= 0.0 && tx <= c.domain.side)) errors.emplace_back("uq.transect_x must lie in the physical square");
  if (c.threads < 0) errors.emplace_back("threads must be >= 0");
  if (c.lens_index && !(*c.lens_index >= 1.0 && std::isfinite(*c.lens_index))) {
    errors.emplace_back("lens_index must be >= 1");
  }
  switch (c.mode) {
    case RunMode::DesignDet:
      if (c.objective.samples != 1) errors.emplace_back("objective.samples must be 1 for design-det");
      break;
    case RunMode::DesignOuu:
      break;
    case RunMode::ForwardUq:
      if (c.design.empty()) errors.emplace_back("design is required for forward-uq");
      break;
    case RunMode::ForwardSolve:
      if (!c.design.empty() && c.lens_index) {
        errors.emplace_back("design and lens_index are mutually exclusive");
      }
      break;
  }
}

ConfigResult parse_config(const std::string& text, std::optional<RunMode> mode) {
  ConfigResult result;
  auto& errors = result.errors;
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    errors.push_back(std::string("config is not valid JSON: ") + e.what());
    return result;
  }

  RunConfig c;
  Reader top(&root, "", errors);

  std::string mode_name;
  top.get("mode", mode_name);
  if (mode) {
    c.mode = *mode;
  } else if (mode_name.empty()) {
    errors.emplace_back("mode is required (or give a subcommand)");
  } else if (auto m = parse_mode(mode_name)) {
    c.mode = *m;
  } else {
    errors.push_back("mode '" + mode_name + "' is not one of design-det, design-ouu, forward-uq, forward-solve");
  }

  Reader wave = top.child("wave");
  const bool missing_wavelength = !top.has("wave") || !wave.has("wavelength");
  if (!top.has("wave")) {
    errors.emplace_back("wave.wavelength is required");
  } else {
    wave.require("wavelength", c.wave.wavelength);
  }
  wave.get("direction", c.wave.direction);
  wave.finish();

  Reader domain = top.child("domain");
  domain.get("side", c.domain.side);
  domain.get("pml_width", c.domain.pml_width);
  domain.get("lens_center", c.domain.lens_center);
  domain.get("lens_radius", c.domain.lens_radius);
  domain.get("points_per_wavelength", c.domain.points_per_wavelength);
  domain.finish();

  Reader pml = top.child("pml");
  pml.get("order", c.pml.order);
  pml.get("reflection", c.pml.reflection);
  pml.finish();

  Reader assembly = top.child("assembly");
  assembly.get("mass_lumping", c.assembly.mass_lumping);
  assembly.finish();

  Reader objective = top.child("objective");
  objective.get("target", c.objective.target);
  objective.get("amplitude", c.objective.amplitude);
  objective.get("variance_weight", c.objective.variance_weight);
  objective.get("penalty_weight", c.objective.penalty_weight);
  objective.get("smoothing", c.objective.smoothing);
  objective.get("samples", c.objective.samples);
  objective.finish();

  Reader noise = top.child("noise");
  noise.get("delta", c.noise.delta);
  noise.get("gamma", c.noise.gamma);
  noise.get("alpha", c.noise.alpha);
  noise.get("seed", c.noise.seed);
  noise.finish();

  Reader opt = top.child("optimizer");
  opt.get("memory", c.optimizer.memory);
  opt.get("gradient_tolerance", c.optimizer.gradient_tolerance);
  opt.get("max_iterations", c.optimizer.max_iterations);
  opt.get("max_backtracks", c.optimizer.max_backtracks);
  opt.get("armijo", c.optimizer.armijo);
  opt.get("initial_step", c.optimizer.initial_step);
  opt.get("initial_index", c.optimizer.initial_index);
  opt.finish();

  Reader uq = top.child("uq");
  uq.get("realizations", c.uq.realizations);
  uq.get("first_index", c.uq.first_index);
  uq.get("exclude_lens", c.uq.exclude_lens);
  uq.get("transect_x", c.uq.transect_x);
  uq.get("bins", c.uq.bins);
  uq.finish();

  top.get("design", c.design);
  top.get("lens_index", c.lens_index);
  top.get("threads", c.threads);
  top.finish({"info"});

  std::vector<std::string> invariants;
  check_config(c, invariants);
  for (auto& e : invariants) {
    if (missing_wavelength && e.rfind("wave.wavelength", 0) == 0) continue;
    errors.push_back(std::move(e));
  }
  if (errors.empty()) result.config = std::move(c);
  return result;
}

std::string to_json(const RunConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["wave"] = {{"wavelength", c.wave.wavelength}, {"direction", point(c.wave.direction)}};
  j["domain"] = {{"side", c.domain.side},
                 {"pml_width", c.domain.pml_width},
                 {"lens_center", point(c.domain.lens_center)},
                 {"lens_radius", c.domain.lens_radius},
                 {"points_per_wavelength", c.domain.points_per_wavelength}};
  j["pml"] = {{"order", c.pml.order}, {"reflection", c.pml.reflection}};
  j["assembly"] = {{"mass_lumping", c.assembly.mass_lumping}};
  j["objective"] = {{"target", point(c.objective.target)},
                    {"amplitude", c.objective.amplitude},
                    {"variance_weight", c.objective.variance_weight},
                    {"penalty_weight", c.objective.penalty_weight},
                    {"smoothing", c.objective.smoothing},
                    {"samples", c.objective.samples}};
  j["noise"] = {{"delta", c.noise.delta}, {"gamma", c.noise.gamma}, {"alpha", c.noise.alpha}, {"seed", c.noise.seed}};
  j["optimizer"] = {{"memory", c.optimizer.memory},
                    {"gradient_tolerance", c.optimizer.gradient_tolerance},
                    {"max_iterations", c.optimizer.max_iterations},
                    {"max_backtracks", c.optimizer.max_backtracks},
                    {"armijo", c.optimizer.armijo},
                    {"initial_step", c.optimizer.initial_step},
                    {"initial_index", c.optimizer.initial_index}};
  j["uq"] = {{"realizations", c.uq.realizations},
             {"first_index", c.uq.first_index},
             {"exclude_lens", c.uq.exclude_lens},
             {"transect_x", c.transect_x()},
             {"bins", c.uq.bins}};
  j["design"] = c.design;
  j["lens_index"] = c.lens_index ? json(*c.lens_index) : json(nullptr);
  j["threads"] = c.threads;
  return j.dump(2);
}

}  // namespace pnj
