#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "cymc/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cyclical tempering MCMC: batch experiments and spectral checks"};

  std::string config_path, preset, out_dir = ".";
  std::uint64_t seed = 0;
  bool paper_scale = false;
  int replicas = 1;
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--preset", preset, "reproduce a named experiment");
  app.add_option("--seed", seed, "RNG seed (default 0)");
  app.add_option("--out", out_dir, "output directory (default .)");
  app.add_flag("--paper-scale", paper_scale, "use the full-scale run lengths");
  app.add_option("--replicas", replicas, "independent chains to run");
  CLI11_PARSE(app, argc, argv);

  try {
    cymc::ExperimentConfig config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot open config " << config_path << "\n";
        return 2;
      }
      cymc::Json doc = cymc::Json::parse(in);
      config = cymc::parse_experiment_config(doc);
      if (seed != 0) config.run.seed = seed;
    } else if (!preset.empty()) {
      config.mode = "reproduce";
      config.preset = preset;
      config.run.seed = seed;
    } else {
      std::cerr << "error: either --config or --preset is required\n";
      return 2;
    }
    if (paper_scale) config.paper_scale = true;
    if (replicas > 1) config.replicas = replicas;
    config.out_dir = out_dir;

    cymc::Json report = cymc::execute(config);
    std::cout << report["results"].dump(2) << "\n";
    return 0;
  } catch (const cymc::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const cymc::Json::parse_error& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) { // ConfigError and validation errors
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
