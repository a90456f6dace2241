// Command-line front end: critns <experiment> --config FILE [--out DIR] [--seed N]

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "critns/critns.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw critns::Error("cannot open config file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// A run.json from an earlier run carries the resolved config text.
std::string config_text(const std::string& path) {
  std::string text = slurp(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const auto j = nlohmann::json::parse(text);
    if (!j.contains("config") || !j["config"].is_string())
      throw critns::Error(path + ": JSON input must contain a \"config\" string");
    return j["config"].get<std::string>();
  }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral Navier-Stokes experiments in critical Fourier spaces"};
  std::string experiment, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("experiment", experiment, "simulate | decay | split | stability | picard | oracle | inequalities")
      ->required();
  app.add_option("-c,--config", config_path, "config file, or a run.json from an earlier run")->required();
  app.add_option("-o,--out", out_dir, "output directory (overrides run.output_dir)");
  app.add_option("-s,--seed", seed, "run seed (overrides run.seed and data.seed)");
  app.add_flag("-q,--quiet", quiet, "suppress the summary table");
  CLI11_PARSE(app, argc, argv);

  critns::set_warning_handler([](const std::string& m) { std::cerr << "warning: " << m << '\n'; });
  try {
    auto cfg = critns::parse_config(config_text(config_path));
    if (!critns::experiment_names().count(experiment)) throw critns::Error("unknown experiment '" + experiment + "'");
    if (cfg.experiment != experiment)
      std::cerr << "note: config names experiment '" << cfg.experiment << "', running '" << experiment << "'\n";
    cfg.experiment = experiment;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed) {
      cfg.seed = *seed;
      cfg.data.seed = *seed;
    }
    const auto outcome = critns::run(cfg);
    if (!quiet) std::cout << critns::emit_summary(outcome.checks);
    std::cout << "exit " << outcome.exit_code << "  (" << cfg.output_dir << "/run.json)\n";
    return outcome.exit_code;
  } catch (const critns::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
