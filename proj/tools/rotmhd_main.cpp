// rotmhd <kind> --config <path> [--out <dir>] [--seed <n>]
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rotmhd/errors.hpp"
#include "rotmhd/experiment.hpp"

using namespace rotmhd;

namespace {

int execute(const std::string& kind, const std::string& config_path, const std::string& out,
            const std::optional<std::uint64_t>& seed) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read '" + config_path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + config_path + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  if (doc.contains("kind") && doc["kind"] != kind)
    throw ConfigError("config: kind '" + doc["kind"].dump() + "' does not match subcommand '" +
                      kind + "'");
  doc["kind"] = kind;

  ExperimentConfig cfg = parse_config(doc);
  if (seed) cfg.seed = *seed;
  if (!out.empty()) cfg.output_dir = out;
  cfg.validate();

  const RunManifest m = run_experiment(cfg, cfg.output_dir, text);
  for (const auto& w : m.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("%s: %s (%.1f s) -> %s\n", kind.c_str(), m.status.c_str(), m.seconds,
              cfg.output_dir.c_str());
  return m.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotating anisotropic MHD experiments"};
  app.require_subcommand(1);

  std::string config, out, chosen;
  std::optional<std::uint64_t> seed;
  for (const char* kind : {"simulate", "linear", "kernels", "strichartz", "sweep", "check"}) {
    CLI::App* sub = app.add_subcommand(kind, std::string("run the ") + kind + " experiment");
    sub->add_option("--config", config, "JSON experiment configuration")->required();
    sub->add_option("--out", out, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "random seed (overrides seed)");
    sub->callback([&chosen, kind] { chosen = kind; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    return execute(chosen, config, out, seed);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitBlowup;
  } catch (const InvariantError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitBlowup;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
