#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "run_config.hpp"

namespace {

std::string preset_dir() {
  if (const char* env = std::getenv("GSDD_PRESET_DIR")) return env;
#ifdef GSDD_PRESET_DIR
  return GSDD_PRESET_DIR;
#else
  return "presets";
#endif
}

struct Args {
  std::string config, preset, out, format, records;
  bool with_mc = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  unsigned threads = 0;
};

int run(const std::string& command, const Args& a) {
  using namespace gsdd::cli;
  if (a.config.empty() == a.preset.empty())
    throw ConfigError("exactly one of --config and --preset is required");
  std::string path = a.config;
  if (!a.preset.empty()) {
    path = (std::filesystem::path(preset_dir()) / (a.preset + ".json")).string();
    if (!std::filesystem::exists(path)) throw ConfigError("unknown preset '" + a.preset + "'");
  }
  auto rc = parse_run_config(load_json_file(path), command);
  if (a.seed_set) {
    rc.sim.seed = a.seed;
    rc.effective["sim"]["seed"] = a.seed;
  }
  if (!a.format.empty()) rc.output.format = a.format;
  if (!a.out.empty()) rc.output.path = a.out;
  rc.effective["with_mc"] = a.with_mc;
  rc.effective.erase("output");

  RunOptions opt;
  opt.with_mc = a.with_mc;
  opt.threads = gsdd::resolve_threads(a.threads);
  opt.records_path = a.records;
  auto table = run_command(rc, opt);

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!rc.output.path.empty()) {
    file.open(rc.output.path, std::ios::binary);
    if (!file) throw ConfigError("cannot write '" + rc.output.path + "'");
    os = &file;
  }
  if (rc.output.format == "json") write_json(*os, table, rc);
  else write_csv(*os, table, rc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gerber-Shiu functions at general drawdown times"};
  app.set_version_flag("--version", gsdd::cli::version());
  app.require_subcommand(1);
  Args a;
  const std::vector<std::pair<std::string, std::string>> cmds = {
      {"prob", "drawdown probabilities over a parameter grid"},
      {"joint-density", "joint density of the drawdown time and the last maximum time"},
      {"exit", "two-sided exit probabilities and creeping densities"},
      {"tax", "ruin densities of the loss-carry-forward taxed process"},
      {"dividend", "ruin densities under a dividend barrier"},
      {"simulate", "Monte Carlo estimates of drawdown functionals"}};
  std::string chosen;
  for (auto& [name, help] : cmds) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", a.config, "JSON run configuration");
    sub->add_option("--preset", a.preset, "named configuration from the preset directory");
    sub->add_option("--out", a.out, "output file (default stdout)");
    sub->add_option("--format", a.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--with-mc", a.with_mc, "add Monte Carlo estimates");
    sub->add_option("--seed", a.seed, "random seed")->each([&](const std::string&) { a.seed_set = true; });
    sub->add_option("--threads", a.threads, "worker threads (0 = all cores)");
    if (name == "simulate") sub->add_option("--records", a.records, "dump raw path records as CSV");
    sub->callback([&chosen, n = name] { chosen = n; });
  }
  CLI11_PARSE(app, argc, argv);
  try {
    return run(chosen, a);
  } catch (const gsdd::cli::ConfigError& e) {
    std::cerr << "gsdd: " << e.what() << "\n";
    return 2;
  } catch (const gsdd::InvalidArgument& e) {
    std::cerr << "gsdd: invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const gsdd::DomainError& e) {
    std::cerr << "gsdd: domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gsdd: " << e.what() << "\n";
    return 3;
  }
}
