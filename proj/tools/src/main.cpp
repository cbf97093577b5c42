#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "kpzc/errors.hpp"
#include "kpzc/version.hpp"
#include "kpzc_cli/config.hpp"
#include "kpzc_cli/runner.hpp"

namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--d", "d", "Spatial dimension (1..8)"},
    {"--weight", "weight", "lognormal(sigma2=x) | twopoint(a=x,b=x,p=x)"},
    {"--set", "set", "fullcube | cantor(keep=[..]) | slice(axis=i,coord=x) | singleton(x,..) | union(..)"},
    {"--n-min", "n_min", "Smallest depth of the scaling fit (energy: first profile depth)"},
    {"--n-max", "n_max", "Largest depth of the scaling fit (energy: last profile depth)"},
    {"--s-grid", "s_grid", "Comma-separated increasing exponents in [0,1]"},
    {"--seeds", "seeds", "Number of cascade seeds or Monte Carlo trials"},
    {"--master-seed", "master_seed", "Master seed every job seed derives from"},
    {"--tail", "tail", "mean_one | extended(q)"},
    {"--layout", "layout", "product_per_axis | single_draw"},
    {"--tolerance", "tolerance", "Pass tolerance on the dimension"},
    {"--depth", "depth", "Truncation depth (mass-stats, bound-check)"},
    {"--points", "points", "Sample points per energy evaluation"},
    {"--measure", "measure", "lebesgue | cascade (dimension, energy)"},
    {"--exponents", "exponents", "Exponents for energy and bound-check"},
    {"--epsilon", "epsilon", "Growth threshold for energy profiles"},
    {"--threads", "threads", "Thread budget (default: $KPZC_THREADS or 1)"},
    {"--out", "out", "Output directory"},
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read config file " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char** argv) {
  using namespace kpzc::cli;

  CLI::App app{"Multiplicative cascade dimension experiments"};
  app.set_version_flag("--version", std::string(kpzc::kVersion));
  std::string command;
  std::string provenance;
  std::string config_path;
  app.add_option("command", command,
                 "validate | mass-stats | dimension | energy | kpz | bound-check | replay");
  app.add_option("provenance", provenance, "provenance.json to replay");
  app.add_option("--config", config_path, "Key-value config file; flags override it");
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  for (const auto& f : kFlags) options[f.key] = app.add_option(f.flag, values[f.key], f.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  try {
    if (command == "replay") {
      if (provenance.empty()) throw std::invalid_argument("replay needs a provenance.json path");
      const std::string out = options["out"]->count() ? values["out"] : "kpzc-replay";
      const unsigned threads =
          options["threads"]->count() ? static_cast<unsigned>(std::stoul(values["threads"])) : default_threads();
      return replay(provenance, out, threads, std::cout).exit_code;
    }
    if (!provenance.empty()) throw std::invalid_argument("unexpected argument '" + provenance + "'");

    ExperimentConfig cfg;
    cfg.threads = default_threads();
    KeyLines lines;
    bool have_command = false;
    if (!config_path.empty()) {
      const std::string text = read_file(config_path);
      cfg = parse_config(text, cfg, &lines);
      have_command = lines.count("command") > 0;
    }
    if (!command.empty()) {
      set_field(cfg, "command", command);
      have_command = true;
    }
    if (!have_command) throw std::invalid_argument("no command given");
    for (const auto& f : kFlags) {
      if (options[f.key]->count()) {
        set_field(cfg, f.key, values[f.key]);
        lines.erase(f.key);
      }
    }
    validate_config(cfg, &lines);
    return run(cfg, std::cout).exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "kpzc: config error: " << (config_path.empty() || e.line() == 0 ? "" : config_path + ": ")
              << e.what() << '\n';
    return kExitError;
  } catch (const kpzc::EstimationError& e) {
    std::cerr << "kpzc: estimation failed: " << e.what() << '\n' << "  " << e.diagnostics() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "kpzc: error: " << e.what() << '\n';
    return kExitError;
  }
}
