#include "magprop/cli.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace magprop::cli {

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "splitting-order", "fresnel-check", "kernel-symmetry",     "propagate",
      "convergence",     "gauge-test",    "midpoint-vs-average", "roughness"};
  return names;
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"name", "seed", "output"}},
      {"constants", {"mass", "hbar", "charge", "light_speed"}},
      {"grid", {"dimension", "lower", "upper", "points"}},
      {"field", {"kind", "omega", "magnetic_field", "c0", "k", "coefficients"}},
      {"gauge", {"c0", "k"}},
      {"scheme", {"schemes", "mode"}},
      {"time", {"t", "steps", "steps_list", "precompose", "track_energy", "compare_oracle"}},
      {"packet", {"center", "width", "momentum"}},
      {"splitting",
       {"dimension", "pairs", "lambda_min", "lambda_max", "lambda_points", "coefficient_lambda",
        "coefficient_pairs"}},
      {"fresnel", {"b", "step", "damping", "range_factor", "spacing_factor"}},
      {"symmetry", {"trials"}},
      {"difference", {"anchor", "steps", "weight_points", "packet_width"}},
      {"roughness", {"steps", "samples", "reference_step"}},
      {"check",
       {"plain_order", "plain_tolerance", "symmetric_order", "symmetric_tolerance",
        "coefficient_tolerance", "max_residual", "expected_orders", "order_tolerance", "min_order",
        "agreement_factor", "stall_factor", "robustness", "max_norm_drift", "min_overlap",
        "exponent", "exponent_tolerance", "reference_sigmas", "symmetry_tolerance",
        "oracle_tolerance"}},
  };
  return keys;
}

[[noreturn]] void invalid(const std::string& key, const std::string& reason) {
  raise(ErrorCode::ConfigInvalid, key + ": " + reason);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Real parse_real(const std::string& key, const std::string& text) {
  Real v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) invalid(key, "expected a number, got '" + text + "'");
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) invalid(key, "expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  invalid(key, "expected true/false, got '" + text + "'");
}

std::vector<Real> parse_reals(const std::string& key, const std::string& text) {
  std::vector<Real> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_real(key, item));
  return out;
}

std::vector<int> parse_ints(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) out.push_back(static_cast<int>(parse_integer(key, item)));
  return out;
}

VectorRule parse_vector_rule(const std::string& key, const std::string& s) {
  for (auto r : {VectorRule::NaiveLeft, VectorRule::NaiveRight, VectorRule::EndpointAverage,
                 VectorRule::Midpoint}) {
    if (s == to_string(r)) return r;
  }
  invalid(key, "unknown vector rule '" + s + "'");
}

PotentialRule parse_potential_rule(const std::string& key, const std::string& s) {
  for (auto r : {PotentialRule::Left, PotentialRule::Right, PotentialRule::SymmetricSplit,
                 PotentialRule::Midpoint}) {
    if (s == to_string(r)) return r;
  }
  invalid(key, "unknown potential rule '" + s + "'");
}

class Reader {
 public:
  explicit Reader(const std::vector<ConfigEntry>& entries) {
    for (const auto& e : entries) values_[e.section + "." + e.key] = e.value;
  }

  const std::string* find(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  void real(const std::string& key, Real& out) const {
    if (auto v = find(key)) out = parse_real(key, *v);
  }
  void real(const std::string& key, std::optional<Real>& out) const {
    if (auto v = find(key)) out = parse_real(key, *v);
  }
  template <typename Int>
  void integer(const std::string& key, Int& out) const {
    if (auto v = find(key)) out = static_cast<Int>(parse_integer(key, *v));
  }
  void boolean(const std::string& key, bool& out) const {
    if (auto v = find(key)) out = parse_bool(key, *v);
  }
  void reals(const std::string& key, std::vector<Real>& out) const {
    if (auto v = find(key)) out = parse_reals(key, *v);
  }
  void ints(const std::string& key, std::vector<int>& out) const {
    if (auto v = find(key)) out = parse_ints(key, *v);
  }
  void text(const std::string& key, std::string& out) const {
    if (auto v = find(key)) out = *v;
  }

 private:
  std::map<std::string, std::string> values_;
};

void require(bool ok, const std::string& key, const std::string& reason) {
  if (!ok) invalid(key, reason);
}

void validate(const ExperimentConfig& c) {
  require(c.constants.mass > 0 && c.constants.hbar > 0 && c.constants.charge > 0 &&
              c.constants.light_speed > 0,
          "constants", "all constants must be strictly positive");
  require(c.dimension >= 1 && c.dimension <= 3, "grid.dimension", "must be 1, 2 or 3");
  require(c.upper > c.lower, "grid.upper", "must exceed grid.lower");
  require(c.points >= 8, "grid.points", "must be at least 8");
  require(!c.schemes.empty(), "scheme.schemes", "needs at least one scheme");
  require(c.total_time != 0.0, "time.t", "must be nonzero");
  require(c.mode == TimeMode::RealTime || c.total_time > 0, "time.t",
          "imaginary time needs positive t");
  require(c.steps >= 1, "time.steps", "must be at least 1");
  require(c.packet_width > 0, "packet.width", "must be positive");
  require(c.packet_center.empty() || static_cast<int>(c.packet_center.size()) == c.dimension,
          "packet.center", "needs one entry per grid dimension");
  require(c.packet_momentum.empty() || static_cast<int>(c.packet_momentum.size()) == c.dimension,
          "packet.momentum", "needs one entry per grid dimension");
  require(c.anchor.empty() || static_cast<int>(c.anchor.size()) == c.dimension, "difference.anchor",
          "needs one entry per grid dimension");
  require(c.field.k.empty() || static_cast<int>(c.field.k.size()) == c.dimension, "field.k",
          "needs one entry per grid dimension");
  require(c.gauge.k.empty() || static_cast<int>(c.gauge.k.size()) == c.dimension, "gauge.k",
          "needs one entry per grid dimension");
  require(c.pair_dimension >= 2 && c.pair_dimension <= 64, "splitting.dimension", "must be in [2, 64]");
  require(c.pairs >= 1, "splitting.pairs", "must be at least 1");
  require(c.lambda_points >= 4, "splitting.lambda_points", "must be at least 4");
  require(c.lambda_min > 0 && c.lambda_max <= 1 && c.lambda_min < c.lambda_max,
          "splitting.lambda_min", "needs 0 < lambda_min < lambda_max <= 1");
  require(c.coefficient_lambda > 0 && c.coefficient_lambda <= 1, "splitting.coefficient_lambda",
          "must be in (0, 1]");
  require(c.coefficient_pairs >= 0, "splitting.coefficient_pairs", "must be nonnegative");
  require(c.trials >= 1, "symmetry.trials", "must be at least 1");
  require(c.weight_points >= 3, "difference.weight_points", "must be at least 3");
  require(c.difference_packet_width > 0, "difference.packet_width", "must be positive");
  require(c.samples >= 2, "roughness.samples", "must be at least 2");
  require(c.reference_step > 0, "roughness.reference_step", "must be positive");
  for (Real e : c.difference_steps) require(e > 0, "difference.steps", "entries must be positive");
  for (Real e : c.roughness_steps) require(e > 0, "roughness.steps", "entries must be positive");
  for (int n : c.steps_list) require(n >= 1, "time.steps_list", "entries must be positive");

  static const std::set<std::string> kinds{"free", "harmonic", "constant_b_symmetric",
                                           "constant_b_landau", "pure_gauge", "polynomial"};
  require(kinds.contains(c.field.kind), "field.kind", "unknown builtin '" + c.field.kind + "'");
  if (c.field.kind.starts_with("constant_b")) {
    require(c.dimension >= 2, "field.kind", "constant magnetic fields need dimension >= 2");
  }
  if (c.field.kind == "polynomial") {
    require(!c.field.coefficients.empty(), "field.coefficients", "required for polynomial fields");
  }
}

}  // namespace

SpatialGrid ExperimentConfig::grid() const {
  return SpatialGrid::cube(dimension, lower, upper, points);
}

namespace {

Position to_position(const std::vector<Real>& v, int dimension, Real fill) {
  Position p = Position::Constant(dimension, fill);
  for (int a = 0; a < dimension && a < static_cast<int>(v.size()); ++a) p[a] = v[static_cast<std::size_t>(a)];
  return p;
}

}  // namespace

FieldConfiguration ExperimentConfig::make_field() const {
  const auto& f = field;
  const auto d = dimension;
  if (f.kind == "harmonic") return harmonic(constants, d, f.omega);
  FieldConfiguration base = [&] {
    if (f.kind == "constant_b_symmetric") return constant_b_symmetric(constants, d, f.magnetic_field);
    if (f.kind == "constant_b_landau") return constant_b_landau(constants, d, f.magnetic_field);
    if (f.kind == "pure_gauge") return pure_gauge(constants, f.c0, to_position(f.k, d, 1.0));
    if (f.kind == "polynomial") return polynomial_vector_potential(constants, d, f.coefficients);
    return free_particle(constants, d);
  }();
  if (f.omega != 0.0) return combine(base, harmonic(constants, d, f.omega));
  return base;
}

Position ExperimentConfig::packet_center_position() const {
  return to_position(packet_center, dimension, 0.0);
}

Position ExperimentConfig::packet_momentum_position() const {
  return to_position(packet_momentum, dimension, 0.0);
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    raise(ErrorCode::ConfigInvalid, std::string("parse error: ") + e.message() + " at line " +
                                        std::to_string(e.line()));
  }

  ExperimentConfig c;
  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = keys.find(section);
    if (it == keys.end()) invalid(section, "unknown section");
    if (body.empty() && !body.data().empty()) invalid(section, "top-level keys are not allowed");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) invalid(section + "." + key, "unknown key");
      c.entries.push_back({section, key, trim(value.data())});
    }
  }

  const Reader r(c.entries);
  r.text("experiment.name", c.experiment);
  if (auto v = r.find("experiment.seed")) {
    const long long s = parse_integer("experiment.seed", *v);
    if (s < 0) invalid("experiment.seed", "must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = r.find("experiment.output")) c.output = *v;

  r.real("constants.mass", c.constants.mass);
  r.real("constants.hbar", c.constants.hbar);
  r.real("constants.charge", c.constants.charge);
  r.real("constants.light_speed", c.constants.light_speed);

  r.integer("grid.dimension", c.dimension);
  r.real("grid.lower", c.lower);
  r.real("grid.upper", c.upper);
  r.integer("grid.points", c.points);

  r.text("field.kind", c.field.kind);
  r.real("field.omega", c.field.omega);
  r.real("field.magnetic_field", c.field.magnetic_field);
  r.real("field.c0", c.field.c0);
  r.reals("field.k", c.field.k);
  r.reals("field.coefficients", c.field.coefficients);
  r.real("gauge.c0", c.gauge.c0);
  r.reals("gauge.k", c.gauge.k);

  if (auto v = r.find("scheme.mode")) {
    if (*v == "real") c.mode = TimeMode::RealTime;
    else if (*v == "imaginary") c.mode = TimeMode::ImaginaryTime;
    else invalid("scheme.mode", "expected real or imaginary, got '" + *v + "'");
  }
  if (auto v = r.find("scheme.schemes")) {
    c.schemes.clear();
    for (const auto& item : split(*v, ',')) {
      const auto parts = split(item, '/');
      if (parts.size() != 2) invalid("scheme.schemes", "entries are vector_rule/potential_rule, got '" + item + "'");
      c.schemes.push_back({parse_vector_rule("scheme.schemes", parts[0]),
                           parse_potential_rule("scheme.schemes", parts[1]), c.mode});
    }
  }
  for (auto& s : c.schemes) s.mode = c.mode;

  r.real("time.t", c.total_time);
  r.integer("time.steps", c.steps);
  r.ints("time.steps_list", c.steps_list);
  r.boolean("time.precompose", c.precompose);
  r.boolean("time.track_energy", c.track_energy);
  r.boolean("time.compare_oracle", c.compare_oracle);

  r.reals("packet.center", c.packet_center);
  r.real("packet.width", c.packet_width);
  r.reals("packet.momentum", c.packet_momentum);

  r.integer("splitting.dimension", c.pair_dimension);
  r.integer("splitting.pairs", c.pairs);
  r.real("splitting.lambda_min", c.lambda_min);
  r.real("splitting.lambda_max", c.lambda_max);
  r.integer("splitting.lambda_points", c.lambda_points);
  r.real("splitting.coefficient_lambda", c.coefficient_lambda);
  r.integer("splitting.coefficient_pairs", c.coefficient_pairs);

  if (auto v = r.find("fresnel.b")) {
    for (const auto& vec : split(*v, ';')) {
      const auto comps = parse_reals("fresnel.b", vec);
      if (comps.empty() || comps.size() > 3) invalid("fresnel.b", "vectors have 1 to 3 components");
      Position b(static_cast<Index>(comps.size()));
      for (std::size_t i = 0; i < comps.size(); ++i) b[static_cast<Index>(i)] = comps[i];
      c.fresnel_b.push_back(b);
    }
  }
  r.real("fresnel.step", c.fresnel_step);
  r.real("fresnel.damping", c.fresnel_damping);
  r.real("fresnel.range_factor", c.fresnel_range_factor);
  r.real("fresnel.spacing_factor", c.fresnel_spacing_factor);

  r.integer("symmetry.trials", c.trials);

  r.reals("difference.anchor", c.anchor);
  r.reals("difference.steps", c.difference_steps);
  r.integer("difference.weight_points", c.weight_points);
  r.real("difference.packet_width", c.difference_packet_width);

  r.reals("roughness.steps", c.roughness_steps);
  if (auto v = r.find("roughness.samples")) {
    const long long n = parse_integer("roughness.samples", *v);
    if (n < 2) invalid("roughness.samples", "must be at least 2");
    c.samples = static_cast<std::size_t>(n);
  }
  r.real("roughness.reference_step", c.reference_step);

  auto& k = c.check;
  r.real("check.plain_order", k.plain_order);
  r.real("check.plain_tolerance", k.plain_tolerance);
  r.real("check.symmetric_order", k.symmetric_order);
  r.real("check.symmetric_tolerance", k.symmetric_tolerance);
  r.real("check.coefficient_tolerance", k.coefficient_tolerance);
  r.real("check.max_residual", k.max_residual);
  r.reals("check.expected_orders", k.expected_orders);
  r.real("check.order_tolerance", k.order_tolerance);
  r.real("check.min_order", k.min_order);
  r.real("check.agreement_factor", k.agreement_factor);
  r.real("check.stall_factor", k.stall_factor);
  r.real("check.robustness", k.robustness);
  r.real("check.max_norm_drift", k.max_norm_drift);
  r.real("check.min_overlap", k.min_overlap);
  r.real("check.exponent", k.exponent);
  r.real("check.exponent_tolerance", k.exponent_tolerance);
  r.real("check.reference_sigmas", k.reference_sigmas);
  r.real("check.symmetry_tolerance", k.symmetry_tolerance);
  r.real("check.oracle_tolerance", k.oracle_tolerance);

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::ConfigInvalid, "config: cannot open " + path.string());
  return parse_config(in);
}

}  // namespace magprop::cli
