#include <CLI11.hpp>

#include <iostream>

#include "anisores/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"anisores: transfer-operator spectra and horocycle expansions on hyperbolic models"};
  std::string experiment;
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  std::vector<std::string> plots;
  app.add_option("experiment", experiment,
                 "one of: partition-check cones resonances ly-probe dolgopyat-probe tau-verify "
                 "horo-fit ibp-check")
      ->required();
  app.add_option("--config", config_path, "config file (key = value, INI sections)");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--seed", seed, "random seed (overrides config)");
  app.add_option("--plots", plots, "series names to emit as plot data");
  CLI11_PARSE(app, argc, argv);

  try {
    anisores::RunConfig cfg;
    if (!config_path.empty()) cfg = anisores::load_config_file(config_path);
    cfg.experiment = experiment;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
    {
      // re-validate after overrides
      std::vector<anisores::ConfigError> errs;
      anisores::parse_config(cfg.serialize(), errs);
      if (!errs.empty()) {
        for (const auto& e : errs) std::cerr << "config error: " << e.key << ": " << e.message << "\n";
        return 2;
      }
    }
    anisores::ResultStore store = anisores::run_pipeline(cfg);
    for (const auto& v : store.verdicts())
      std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << "  value=" << v.value
                << " threshold=" << v.threshold << "\n";
    if (!plots.empty()) {
      for (const auto& f : anisores::emit_plots(store, plots)) std::cout << "wrote " << f << "\n";
    }
    return store.all_pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
