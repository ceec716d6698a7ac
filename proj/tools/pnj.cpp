#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "pnj/config.hpp"
#include "pnj/error.hpp"
#include "pnj/runner.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct Options {
  std::string config;
  std::string output = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("-c,--config", opt.config, "JSON config or a manifest.json of an earlier run")->required();
  cmd->add_option("-o,--output", opt.output, "Output directory")->capture_default_str();
  cmd->add_option("--seed", opt.seed, "Noise seed (overrides noise.seed)");
  cmd->add_option("--threads", opt.threads, "Worker threads, 0 = all cores (overrides threads)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photonic nanojet lens design and uncertainty quantification"};
  app.require_subcommand(1);
  Options opt;

  struct Command {
    const char* name;
    const char* help;
    std::optional<pnj::RunMode> mode;
  };
  const Command commands[] = {
      {"design-det", "Deterministic lens design", pnj::RunMode::DesignDet},
      {"design-ouu", "Lens design under uncertainty (sample average)", pnj::RunMode::DesignOuu},
      {"forward-uq", "Pollute a design with noise realizations and collect PNJ statistics", pnj::RunMode::ForwardUq},
      {"forward-solve", "Single forward solve of a design or homogeneous lens", pnj::RunMode::ForwardSolve},
      {"run", "Run the mode named in the config (e.g. a manifest)", std::nullopt},
  };
  std::vector<std::pair<CLI::App*, std::optional<pnj::RunMode>>> subs;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, opt);
    subs.emplace_back(sub, c.mode);
  }

  CLI11_PARSE(app, argc, argv);

  std::optional<pnj::RunMode> mode;
  for (const auto& [sub, m] : subs) {
    if (sub->parsed()) mode = m;
  }

  std::ifstream in(opt.config);
  if (!in) {
    std::cerr << "error: cannot read config " << opt.config << '\n';
    return kConfigError;
  }
  std::stringstream text;
  text << in.rdbuf();

  pnj::ConfigResult parsed = pnj::parse_config(text.str(), mode);
  if (!parsed.config) {
    for (const auto& e : parsed.errors) std::cerr << "config error: " << e << '\n';
    return kConfigError;
  }
  pnj::RunConfig config = std::move(*parsed.config);
  if (opt.seed) config.noise.seed = *opt.seed;
  if (opt.threads) {
    if (*opt.threads < 0) {
      std::cerr << "config error: --threads must be >= 0\n";
      return kConfigError;
    }
    config.threads = *opt.threads;
  }

  try {
    pnj::run(config, opt.output, std::cerr);
  } catch (const pnj::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
