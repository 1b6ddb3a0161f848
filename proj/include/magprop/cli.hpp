#pragma once

// Experiment front end: INI-style config, named experiments, deterministic
// JSON/CSV outputs. The executable in tools/ is a thin wrapper over this.

#include "magprop/core.hpp"
#include "magprop/fields.hpp"
#include "magprop/kernels.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace magprop::cli {

inline constexpr const char* kArtifactName = "magprop";
inline constexpr const char* kArtifactVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitCheck = 4,
};

const std::vector<std::string>& experiment_names();

struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
};

struct FieldSpec {
  std::string kind = "free";
  Real omega = 0.0;           // harmonic potential; added on top of non-harmonic kinds
  Real magnetic_field = 0.0;  // constant_b_*
  Real c0 = 0.0;              // pure_gauge amplitude
  std::vector<Real> k;        // pure_gauge wavevector
  std::vector<Real> coefficients;  // polynomial A_0(x_0)
};

struct GaugeSpec {
  Real c0 = 0.0;
  std::vector<Real> k;
};

/// Optional thresholds; unset ones fall back to per-experiment defaults or
/// are skipped.
struct CheckSpec {
  std::optional<Real> plain_order, plain_tolerance;
  std::optional<Real> symmetric_order, symmetric_tolerance;
  std::optional<Real> coefficient_tolerance;
  std::optional<Real> max_residual;
  std::vector<Real> expected_orders;
  std::optional<Real> order_tolerance;
  std::optional<Real> min_order;
  std::optional<Real> agreement_factor;
  std::optional<Real> stall_factor;
  std::optional<Real> robustness;
  std::optional<Real> max_norm_drift;
  std::optional<Real> min_overlap;
  std::optional<Real> exponent, exponent_tolerance, reference_sigmas;
  std::optional<Real> symmetry_tolerance;
  std::optional<Real> oracle_tolerance;
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::filesystem::path output = "out";

  PhysicalConstants constants;
  int dimension = 1;
  Real lower = -10.0, upper = 10.0;
  Index points = 256;

  FieldSpec field;
  GaugeSpec gauge;
  std::vector<SchemeSpec> schemes{SchemeSpec{}};
  TimeMode mode = TimeMode::RealTime;

  Real total_time = 1.0;
  int steps = 16;
  std::vector<int> steps_list{16, 32, 64, 128};
  bool precompose = false;
  bool track_energy = false;
  bool compare_oracle = false;

  std::vector<Real> packet_center;  // empty -> origin
  Real packet_width = 1.0;
  std::vector<Real> packet_momentum;

  // splitting-order
  Index pair_dimension = 8;
  int pairs = 5;
  Real lambda_min = 1e-3, lambda_max = 1e-1;
  int lambda_points = 8;
  Real coefficient_lambda = 1e-3;
  int coefficient_pairs = 3;

  // fresnel-check
  std::vector<Position> fresnel_b;
  Real fresnel_step = 1.0;
  Real fresnel_damping = 1e-2;
  Real fresnel_range_factor = 12.0;
  Real fresnel_spacing_factor = 0.5;

  // kernel-symmetry
  int trials = 100;

  // midpoint-vs-average
  std::vector<Real> anchor;
  std::vector<Real> difference_steps;
  int weight_points = 801;
  Real difference_packet_width = 0.5;

  // roughness
  std::vector<Real> roughness_steps;
  std::size_t samples = 100000;
  Real reference_step = 1.0;

  CheckSpec check;
  std::vector<ConfigEntry> entries;  // verbatim echo in file order

  SpatialGrid grid() const;
  FieldConfiguration make_field() const;
  Position packet_center_position() const;
  Position packet_momentum_position() const;
};

/// Parses the INI text; unknown sections or keys raise ConfigInvalid naming them.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

using Cell = std::variant<Real, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Header row, LF endings, reals as %.15e.
  std::string to_csv() const;
};

struct CheckResult {
  std::string name;
  Real value = 0.0;
  std::string relation;  // "<=", ">=" or "within" (|value - target| <= threshold)
  Real threshold = 0.0;
  Real target = 0.0;
  bool pass = false;
};

struct ExperimentOutput {
  nlohmann::ordered_json data = nlohmann::ordered_json::object();
  Table table;
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;

  bool all_pass() const;
};

/// Runs the experiment without touching the filesystem.
ExperimentOutput compute_experiment(const ExperimentConfig& config);

nlohmann::ordered_json manifest(const ExperimentConfig& config);

struct RunOptions {
  std::optional<std::filesystem::path> output;  // overrides config.output
  bool check = false;
};

struct RunResult {
  int exit_code = kExitOk;
  std::filesystem::path output_dir;
  ExperimentOutput output;
};

/// compute_experiment plus manifest.json, report.json and <experiment>.csv.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

int exit_code_for(const Error& e);

/// One-line JSON error record.
std::string error_line(std::string_view kind, std::string_view message);

}  // namespace magprop::cli
