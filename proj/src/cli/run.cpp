#include "magprop/cli.hpp"

#include <fstream>

namespace magprop::cli {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  RunResult result;
  result.output = compute_experiment(config);
  result.output_dir = options.output.value_or(config.output);
  std::filesystem::create_directories(result.output_dir);

  const nlohmann::ordered_json m = manifest(config);
  nlohmann::ordered_json report{{"manifest", m}, {"data", result.output.data}};
  write_file(result.output_dir / "manifest.json", m.dump(2) + "\n");
  write_file(result.output_dir / "report.json", report.dump(2) + "\n");
  write_file(result.output_dir / (config.experiment + ".csv"), result.output.table.to_csv());

  if (options.check && !result.output.all_pass()) result.exit_code = kExitCheck;
  return result;
}

int exit_code_for(const Error& e) {
  return e.code() == ErrorCode::ConfigInvalid ? kExitConfig : kExitNumeric;
}

std::string error_line(std::string_view kind, std::string_view message) {
  return nlohmann::ordered_json{{"error", kind}, {"message", message}}.dump();
}

}  // namespace magprop::cli
