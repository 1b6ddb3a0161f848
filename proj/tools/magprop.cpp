#include "magprop/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace cli = magprop::cli;

int main(int argc, char** argv) {
  CLI::App app{"Magnetic short-time propagator laboratory"};
  app.set_version_flag("--version", std::string(cli::kArtifactVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  bool check = false;
  for (const auto& name : cli::experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("-c,--config", config_path, "INI config file")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output directory (overrides [experiment] output)");
    sub->add_option("-t,--threads", threads, "worker thread cap (0 = hardware)");
    sub->add_flag("--check", check, "exit 4 when an acceptance threshold fails");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (threads > 0) magprop::set_thread_limit(threads);
    cli::ExperimentConfig config = cli::load_config(config_path);
    if (!config.experiment.empty() && config.experiment != name) {
      magprop::raise(magprop::ErrorCode::ConfigInvalid,
                     "experiment.name: config is for '" + config.experiment + "', not '" + name + "'");
    }
    config.experiment = name;
    cli::RunOptions options;
    options.check = check;
    if (!out_dir.empty()) options.output = out_dir;
    const cli::RunResult result = cli::run_experiment(config, options);
    for (const auto& w : result.output.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& c : result.output.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << " (" << c.relation
                << (c.relation == "within" ? " " + std::to_string(c.target) + " +-" : "") << " "
                << c.threshold << ")\n";
    }
    std::cout << "wrote " << result.output_dir.string() << "\n";
    return result.exit_code;
  } catch (const magprop::Error& e) {
    std::cerr << cli::error_line(magprop::to_string(e.code()), e.what()) << "\n";
    return cli::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << cli::error_line("Failure", e.what()) << "\n";
    return cli::kExitFailure;
  }
}
