#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "avglab/config.hpp"

namespace {

avglab::RunConfig load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return avglab::parse_config(ss.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral Galerkin experiments for equations with a large mean flow"};
  std::string bounds_path, plot_path, out_dir;
  std::uint64_t seed = 0;
  app.add_option("--bounds", bounds_path, "Print the bounds report for a config (no integration)");
  app.add_option("--plot", plot_path, "Write a gnuplot script for a result JSON");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (default: the config's output)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random initial data and sampling");
  auto* run = app.add_subcommand("run", "Run the scenario described by a config");
  std::string run_path;
  run->add_option("config", run_path, "Config JSON")->required();
  run->fallthrough();
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const int actions = (run->parsed() ? 1 : 0) + (!bounds_path.empty() ? 1 : 0) + (!plot_path.empty() ? 1 : 0);
  if (actions != 1) {
    std::cerr << "error: give exactly one of 'run <config>', --bounds <config>, --plot <result>\n";
    return 2;
  }

  try {
    if (!plot_path.empty()) {
      std::cout << avglab::emit_plot_script(plot_path) << '\n';
      return 0;
    }
    avglab::RunConfig cfg = load(run->parsed() ? run_path : bounds_path);
    if (seed_opt->count()) cfg.seed = seed;
    const std::string dir = out_opt->count() ? out_dir : cfg.output;
    if (!bounds_path.empty()) {
      const std::string report = avglab::make_bounds_report(cfg).to_json();
      std::cout << report << '\n';
      if (out_opt->count()) {
        std::filesystem::create_directories(dir);
        std::ofstream os(std::filesystem::path(dir) / "bounds.json");
        os << report << '\n';
        if (!os) throw std::runtime_error("cannot write bounds.json");
      }
      return 0;
    }
    return avglab::dispatch(cfg, dir, std::cout, std::cerr);
  } catch (const avglab::ConfigError& e) {
    for (const auto& msg : e.errors()) std::cerr << "config error: " << msg << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
