#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lindblad/lindblad.hpp"

namespace {

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("LINDBLAD_LIGHTCONE_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end && *end == '\0' && parsed > 0) return static_cast<int>(parsed);
    std::cerr << "warning: ignoring malformed LINDBLAD_LIGHTCONE_THREADS='" << env << "'\n";
  }
  return 1;
}

int load_and_dispatch(const std::string& config_path, const lindblad::ScenarioContext& ctx,
                      bool audit_only) {
  std::string text;
  try {
    text = lindblad::read_text_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return lindblad::exit_config_error;
  }
  lindblad::RunConfig cfg;
  try {
    cfg = lindblad::parse_config(text);
  } catch (const lindblad::ConfigError& e) {
    std::cerr << "configuration error in " << config_path << ":\n";
    for (const auto& problem : e.problems()) std::cerr << "  - " << problem << '\n';
    return lindblad::exit_config_error;
  }
  return audit_only ? lindblad::run_audit(cfg, ctx) : lindblad::run_scenario(cfg, ctx);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"light-cone laboratory for one-dimensional Lindblad lattice dynamics"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string output_dir;  // empty keeps the config's output.dir
  int threads_flag = 0;
  bool verbose = false;
  app.add_option("--output-dir", output_dir, "directory for report files (overrides output.dir)");
  app.add_option("--threads", threads_flag,
                 "worker threads for multi-scale runs (overrides LINDBLAD_LIGHTCONE_THREADS)");
  app.add_flag("--verbose", verbose, "print progress notes to stderr");

  CLI::App* run = app.add_subcommand("run", "run the scenario named in the config file");
  run->add_option("config", config_path, "path to a key = value config file")->required();

  CLI::App* audit = app.add_subcommand("audit", "report assumption norms and speeds, no dynamics");
  audit->add_option("config", config_path, "path to a key = value config file")->required();

  CLI::App* defaults = app.add_subcommand("print-defaults", "print the canonical config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lindblad::exit_config_error;
  }

  if (defaults->parsed()) {
    std::cout << lindblad::default_config_text();
    return lindblad::exit_ok;
  }

  lindblad::ScenarioContext ctx;
  ctx.output_dir = output_dir;
  ctx.threads = resolve_threads(threads_flag);
  ctx.verbose = verbose;
  return load_and_dispatch(config_path, ctx, audit->parsed());
}
