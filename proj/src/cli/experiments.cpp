#include "magprop/analysis.hpp"
#include "magprop/cli.hpp"
#include "magprop/oracles.hpp"
#include "magprop/propagation.hpp"
#include "magprop/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

namespace magprop::cli {

using json = nlohmann::ordered_json;

namespace {

constexpr Real kNaN = std::numeric_limits<Real>::quiet_NaN();

json to_json(const Position& p) {
  json a = json::array();
  for (Index i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

std::string label(const SchemeSpec& s) {
  return std::string(to_string(s.vector_rule)) + "/" + std::string(to_string(s.potential_rule));
}

json to_json(const SchemeSpec& s) {
  return json{{"vector_rule", to_string(s.vector_rule)},
              {"potential_rule", to_string(s.potential_rule)},
              {"mode", to_string(s.mode)}};
}

json fit_json(const OrderFit& f) {
  return json{{"order", f.order}, {"intercept", f.intercept}, {"residual", f.residual}};
}

CheckResult at_most(std::string name, Real value, Real threshold) {
  return {std::move(name), value, "<=", threshold, 0.0, value <= threshold};
}

CheckResult at_least(std::string name, Real value, Real threshold) {
  return {std::move(name), value, ">=", threshold, 0.0, value >= threshold};
}

CheckResult within(std::string name, Real value, Real target, Real tolerance) {
  return {std::move(name), value, "within", tolerance, target, std::abs(value - target) <= tolerance};
}

WaveFunction initial_packet(const ExperimentConfig& c) {
  return make_gaussian_packet(c.grid(), c.packet_center_position(), c.packet_width,
                              c.packet_momentum_position());
}

std::vector<Real> or_default_ladder(const std::vector<Real>& given) {
  if (!given.empty()) return given;
  return log_spaced_descending(1e-3, 1e-1, 8);
}

// --- splitting-order ----------------------------------------------------------

ExperimentOutput splitting_order(const ExperimentConfig& c) {
  ExperimentOutput out;
  const auto lambdas = log_spaced_descending(c.lambda_min, c.lambda_max, c.lambda_points);
  const Real plain_target = c.check.plain_order.value_or(2.0);
  const Real plain_tol = c.check.plain_tolerance.value_or(0.1);
  const Real sym_target = c.check.symmetric_order.value_or(3.0);
  const Real sym_tol = c.check.symmetric_tolerance.value_or(0.15);
  const Real coef_tol = c.check.coefficient_tolerance.value_or(0.05);

  out.table.columns = {"pair", "lambda", "plain_error", "symmetric_error"};
  out.data["dimension"] = c.pair_dimension;
  out.data["lambdas"] = lambdas;
  json pairs = json::array();
  for (int k = 0; k < c.pairs; ++k) {
    const std::uint64_t seed = derive_seed(c.seed, static_cast<std::uint64_t>(k));
    OperatorPair pair = random_hermitian_pair(c.pair_dimension, 1.0, seed);
    const Real scale = spectral_norm(pair.a) + spectral_norm(pair.b);
    std::vector<Real> plain, sym;
    for (Real lambda : lambdas) {
      pair.lambda = lambda;
      plain.push_back(product_formula_error(pair, SplitVariant::Plain));
      sym.push_back(product_formula_error(pair, SplitVariant::Symmetric));
      out.table.rows.push_back({static_cast<long long>(k), lambda, plain.back(), sym.back()});
    }
    const OrderFit fp = fit_error_order(lambdas, plain, scale);
    const OrderFit fs = fit_error_order(lambdas, sym, scale);
    pairs.push_back(json{{"pair", k},
                         {"seed", seed},
                         {"plain_errors", plain},
                         {"symmetric_errors", sym},
                         {"plain_fit", fit_json(fp)},
                         {"symmetric_fit", fit_json(fs)}});
    out.checks.push_back(within("plain_order[" + std::to_string(k) + "]", fp.order, plain_target, plain_tol));
    out.checks.push_back(within("symmetric_order[" + std::to_string(k) + "]", fs.order, sym_target, sym_tol));
  }
  out.data["pairs"] = std::move(pairs);

  json coeffs = json::array();
  auto coefficient_case = [&](const std::string& name, OperatorPair pair) {
    pair.lambda = c.coefficient_lambda;
    const Real err = product_formula_error(pair, SplitVariant::Plain);
    const Real expected = 0.5 * spectral_norm(commutator(pair.b, pair.a));
    const Real ratio = err / (pair.lambda * pair.lambda) / expected;
    coeffs.push_back(json{{"case", name},
                          {"lambda", pair.lambda},
                          {"error", err},
                          {"error_over_lambda_squared", err / (pair.lambda * pair.lambda)},
                          {"half_commutator_norm", expected},
                          {"ratio", ratio}});
    out.checks.push_back(within("commutator_coefficient[" + name + "]", ratio, 1.0, coef_tol));
  };
  coefficient_case("pauli", pauli_pair(c.coefficient_lambda));
  for (int j = 0; j < c.coefficient_pairs; ++j) {
    const auto seed = derive_seed(c.seed, static_cast<std::uint64_t>(c.pairs + j));
    coefficient_case("random" + std::to_string(j),
                     random_hermitian_pair(c.pair_dimension, c.coefficient_lambda, seed));
  }
  out.data["commutator_coefficient"] = std::move(coeffs);
  return out;
}

// --- fresnel-check ------------------------------------------------------------

ExperimentOutput fresnel_check_experiment(const ExperimentConfig& c) {
  ExperimentOutput out;
  std::vector<Position> cases = c.fresnel_b;
  if (cases.empty()) {
    for (Real b : {0.0, 0.5, 1.0, 2.0}) cases.push_back(Position::Constant(1, b));
    cases.push_back(Position(Eigen::Vector3d(1.0, 1.0, 0.0)));
  }
  const Real tol = c.check.max_residual.value_or(1e-6);
  out.table.columns = {"case", "dimension", "b_norm", "lhs_re", "lhs_im",
                       "extrapolated_re", "extrapolated_im", "residual"};
  json rows = json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const FresnelCheckInput input{cases[i], c.fresnel_step, c.fresnel_damping, c.fresnel_range_factor,
                                  c.fresnel_spacing_factor};
    const FresnelResult r = fresnel_check(input, c.constants);
    json damped = json::array();
    for (std::size_t j = 0; j < r.dampings.size(); ++j) {
      damped.push_back(json{{"damping", r.dampings[j]},
                            {"re", r.damped[j].real()},
                            {"im", r.damped[j].imag()}});
    }
    rows.push_back(json{{"b", to_json(cases[i])},
                        {"step", c.fresnel_step},
                        {"lhs", {r.lhs.real(), r.lhs.imag()}},
                        {"damped", std::move(damped)},
                        {"extrapolated", {r.extrapolated.real(), r.extrapolated.imag()}},
                        {"residual", r.residual}});
    out.table.rows.push_back({static_cast<long long>(i), static_cast<long long>(cases[i].size()),
                              cases[i].norm(), r.lhs.real(), r.lhs.imag(), r.extrapolated.real(),
                              r.extrapolated.imag(), r.residual});
    out.checks.push_back(at_most("residual[" + std::to_string(i) + "]", r.residual, tol));
  }
  out.data["cases"] = std::move(rows);
  return out;
}

// --- kernel-symmetry ----------------------------------------------------------

FieldConfiguration random_field(const PhysicalConstants& pc, int d, Rng& rng) {
  std::uniform_real_distribution<Real> u(-1.0, 1.0);
  Eigen::MatrixXd slope(d, d), wave(d, d);
  Eigen::VectorXd offset(d), amp(d), phase(d);
  for (int i = 0; i < d; ++i) {
    offset[i] = u(rng);
    amp[i] = u(rng);
    phase[i] = kPi * u(rng);
    for (int j = 0; j < d; ++j) {
      slope(i, j) = u(rng);
      wave(i, j) = 2.0 * u(rng);
    }
  }
  const Real g = 1.0 + u(rng), h = u(rng);
  ScalarField v = [g, h](const Position& x) { return 0.5 * g * x.squaredNorm() + h * std::cos(x[0]); };
  VectorField a = [=](const Position& x) {
    Position out(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      out[i] = offset[i] + slope.row(i).dot(x) + amp[i] * std::sin(wave.row(i).dot(x) + phase[i]);
    }
    return out;
  };
  return FieldConfiguration(pc, std::move(v), std::move(a));
}

ExperimentOutput kernel_symmetry(const ExperimentConfig& c) {
  ExperimentOutput out;
  const SpatialGrid grid = c.grid();
  const int d = grid.dimension();
  const Real tol = c.check.symmetry_tolerance.value_or(1e-12);
  out.table.columns = {"trial", "mode", "vector_rule", "potential_rule", "step",
                       "transpose_deviation", "gauge_deviation"};
  long long failures = 0;
  Real worst_t = 0.0, worst_g = 0.0;
  for (int k = 0; k < c.trials; ++k) {
    Rng rng(derive_seed(c.seed, static_cast<std::uint64_t>(k)));
    const FieldConfiguration f = random_field(c.constants, d, rng);
    std::uniform_real_distribution<Real> u(0.0, 1.0);
    const SchemeSpec scheme{u(rng) < 0.5 ? VectorRule::EndpointAverage : VectorRule::Midpoint,
                            u(rng) < 0.5 ? PotentialRule::SymmetricSplit : PotentialRule::Midpoint,
                            k % 2 == 0 ? TimeMode::RealTime : TimeMode::ImaginaryTime};
    const Real step = 0.05 + 0.45 * u(rng);
    Position slope(d);
    for (int a = 0; a < d; ++a) slope[a] = 2.0 * u(rng) - 1.0;

    const MatrixXc t = build_transfer_matrix(grid, step, f, scheme).entries;
    const MatrixXc t_neg = build_transfer_matrix(grid, step, scale_vector_potential(f, -1.0), scheme).entries;
    const GaugeFunction chi = GaugeFunction::linear(slope);
    const MatrixXc t_gauge = build_transfer_matrix(grid, step, gauge_transform(f, chi), scheme).entries;

    const Real scale = t.cwiseAbs().maxCoeff();
    const Real dev_t = (t.transpose() - t_neg).cwiseAbs().maxCoeff() / scale;
    VectorXc phase(grid.size());
    const Real q = c.constants.coupling() / c.constants.hbar;
    for (Index i = 0; i < grid.size(); ++i) phase[i] = std::polar(1.0, q * chi.value(grid.point(i)));
    const MatrixXc expected = phase.asDiagonal() * t * phase.conjugate().asDiagonal();
    const Real dev_g = (t_gauge - expected).cwiseAbs().maxCoeff() / scale;

    if (!(dev_t <= tol) || !(dev_g <= tol)) ++failures;
    worst_t = std::max(worst_t, dev_t);
    worst_g = std::max(worst_g, dev_g);
    out.table.rows.push_back({static_cast<long long>(k), std::string(to_string(scheme.mode)),
                              std::string(to_string(scheme.vector_rule)),
                              std::string(to_string(scheme.potential_rule)), step, dev_t, dev_g});
  }
  out.data["trials"] = c.trials;
  out.data["grid_points"] = grid.size();
  out.data["tolerance"] = tol;
  out.data["max_transpose_deviation"] = worst_t;
  out.data["max_gauge_deviation"] = worst_g;
  out.data["failures"] = failures;
  out.checks.push_back(at_most("symmetry_failures", static_cast<Real>(failures), 0.0));
  return out;
}

// --- propagate ----------------------------------------------------------------

Real overlap(const WaveFunction& a, const WaveFunction& b) {
  return std::abs(inner_product(a, b)) / (l2_norm(a) * l2_norm(b));
}

ExperimentOutput propagate_experiment(const ExperimentConfig& c) {
  ExperimentOutput out;
  const WaveFunction psi0 = initial_packet(c);
  const FieldConfiguration field = c.make_field();
  const SchemeSpec scheme = c.schemes.front();
  const PropagationPlan plan{.total_time = c.total_time,
                             .steps = c.steps,
                             .field = field,
                             .scheme = scheme,
                             .grid = c.grid(),
                             .track_energy = c.track_energy,
                             .precompose = c.precompose};
  const int d = c.dimension;

  const PropagationTrace trace = propagate(psi0, plan);
  out.warnings = trace.warnings;

  out.table.columns = {"step", "time", "norm"};
  for (int a = 0; a < d; ++a) out.table.columns.push_back("mean_x" + std::to_string(a));
  for (int a = 0; a < d; ++a) out.table.columns.push_back("mean_p" + std::to_string(a));
  out.table.columns.push_back("energy");
  Real drift = 0.0;
  const Real norm0 = trace.records.front().norm;
  for (const auto& r : trace.records) {
    std::vector<Cell> row{static_cast<long long>(r.step), r.time, r.norm};
    for (int a = 0; a < d; ++a) row.emplace_back(r.mean_position[a]);
    for (int a = 0; a < d; ++a) row.emplace_back(r.mean_momentum[a]);
    row.emplace_back(r.energy);
    out.table.rows.push_back(std::move(row));
    drift = std::max(drift, std::abs(r.norm - norm0));
  }

  out.data["scheme"] = to_json(scheme);
  out.data["field"] = to_string(field.kind());
  out.data["steps"] = c.steps;
  out.data["step"] = plan.step();
  out.data["precomposed"] = c.precompose;
  out.data["final_norm"] = trace.records.back().norm;
  out.data["max_norm_drift"] = drift;
  const Real return_overlap = overlap(psi0, trace.final_state);
  out.data["return_overlap"] = return_overlap;

  Real ground_overlap = kNaN;
  const bool need_oracle = c.compare_oracle || (c.check.min_overlap && scheme.mode == TimeMode::ImaginaryTime);
  if (need_oracle) {
    const SpectralHamiltonian h = build_spectral_hamiltonian(c.grid(), field);
    const WaveFunction ref = oracle_propagate(psi0, c.total_time, h, scheme.mode);
    out.data["oracle_error"] = l2_distance(trace.final_state, ref);
    out.data["oracle_overlap"] = overlap(ref, trace.final_state);
    if (scheme.mode == TimeMode::ImaginaryTime) {
      ground_overlap = overlap(oracle_ground_state(h), trace.final_state);
      out.data["ground_state_overlap"] = ground_overlap;
    }
  }

  if (scheme.mode == TimeMode::RealTime) {
    out.checks.push_back(at_most("max_norm_drift", drift, c.check.max_norm_drift.value_or(1e-3)));
  } else if (c.check.max_norm_drift) {
    out.checks.push_back(at_most("max_norm_drift", drift, *c.check.max_norm_drift));
  }
  if (c.check.min_overlap) {
    if (scheme.mode == TimeMode::RealTime) {
      out.checks.push_back(at_least("return_overlap", return_overlap, *c.check.min_overlap));
    } else {
      out.checks.push_back(at_least("ground_state_overlap", ground_overlap, *c.check.min_overlap));
    }
  }
  out.data["warnings"] = trace.warnings;
  return out;
}

// --- convergence and gauge-test -------------------------------------------------

json report_json(const ConvergenceReport& r) {
  std::vector<Real> eps;
  for (int n : r.steps) eps.push_back(r.total_time / n);
  return json{{"scheme", to_json(r.scheme)},
              {"label", label(r.scheme)},
              {"steps", r.steps},
              {"eps", eps},
              {"errors", r.errors},
              {"order", r.order},
              {"residual", r.residual},
              {"order_without_finest", r.order_without_finest},
              {"floor_limited", r.floor_limited}};
}

struct Study {
  std::vector<ConvergenceReport> reports;
  std::vector<std::vector<WaveFunction>> states;
};

Study run_studies(const ExperimentConfig& c, const WaveFunction& psi0, const FieldConfiguration& field,
                  const WaveFunction& reference, ExperimentOutput& out) {
  Study s;
  out.table.columns = {"scheme", "steps", "eps", "error", "distance_to_first"};
  for (const auto& scheme : c.schemes) {
    std::vector<WaveFunction> states;
    s.reports.push_back(
        convergence_study(psi0, c.total_time, field, scheme, c.steps_list, reference, &states));
    s.states.push_back(std::move(states));
  }
  json schemes = json::array();
  for (std::size_t k = 0; k < s.reports.size(); ++k) {
    const auto& r = s.reports[k];
    json j = report_json(r);
    std::vector<Real> dist;
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
      dist.push_back(l2_distance(s.states[k][i], s.states[0][i]));
      out.table.rows.push_back({label(r.scheme), static_cast<long long>(r.steps[i]),
                                c.total_time / r.steps[i], r.errors[i], dist.back()});
    }
    j["distance_to_first"] = dist;
    schemes.push_back(std::move(j));
  }
  out.data["schemes"] = std::move(schemes);
  return s;
}

void robustness_checks(const Study& s, Real tol, ExperimentOutput& out,
                       const std::vector<bool>& include) {
  for (std::size_t k = 0; k < s.reports.size(); ++k) {
    const auto& r = s.reports[k];
    if (!include[k] || r.floor_limited) continue;
    out.checks.push_back(at_most("order_robustness[" + label(r.scheme) + "]",
                                 std::abs(r.order - r.order_without_finest), tol));
  }
}

ExperimentOutput convergence_experiment(const ExperimentConfig& c) {
  ExperimentOutput out;
  validate_doubling_ladder(c.steps_list);
  const WaveFunction psi0 = initial_packet(c);
  const FieldConfiguration field = c.make_field();
  const SpectralHamiltonian h = build_spectral_hamiltonian(c.grid(), field);
  const WaveFunction reference = oracle_propagate(psi0, c.total_time, h, c.mode);
  out.data["field"] = to_string(field.kind());
  out.data["mode"] = to_string(c.mode);
  out.data["total_time"] = c.total_time;
  out.data["oracle_hermiticity_residual"] = h.hermiticity_residual();
  const Study s = run_studies(c, psi0, field, reference, out);

  for (std::size_t k = 0; k < s.reports.size(); ++k) {
    const auto& r = s.reports[k];
    const std::string name = label(r.scheme);
    if (k < c.check.expected_orders.size()) {
      out.checks.push_back(within("order[" + name + "]", r.order, c.check.expected_orders[k],
                                  c.check.order_tolerance.value_or(0.2)));
    }
    if (c.check.min_order) out.checks.push_back(at_least("order[" + name + "]", r.order, *c.check.min_order));
  }
  if (c.check.agreement_factor && s.reports.size() >= 2) {
    const auto& a = s.reports[0];
    const auto& b = s.reports[1];
    json agreement = json::array();
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      const Real dist = l2_distance(s.states[0][i], s.states[1][i]);
      const Real bound = *c.check.agreement_factor * std::min(a.errors[i], b.errors[i]);
      agreement.push_back(json{{"steps", a.steps[i]}, {"distance", dist}, {"bound", bound}});
      out.checks.push_back(at_most("scheme_agreement[N=" + std::to_string(a.steps[i]) + "]", dist, bound));
    }
    out.data["agreement"] = std::move(agreement);
  }
  robustness_checks(s, c.check.robustness.value_or(0.15), out,
                    std::vector<bool>(s.reports.size(), true));
  return out;
}

bool converging_rule(VectorRule r) {
  return r == VectorRule::EndpointAverage || r == VectorRule::Midpoint;
}

ExperimentOutput gauge_test(const ExperimentConfig& c) {
  ExperimentOutput out;
  validate_doubling_ladder(c.steps_list);
  const WaveFunction psi0 = initial_packet(c);
  const FieldConfiguration base = c.make_field();
  const Position k = c.gauge.k.empty() ? Position::Ones(c.dimension)
                                       : Position(Eigen::Map<const Eigen::VectorXd>(c.gauge.k.data(), c.dimension));
  const GaugeFunction chi = GaugeFunction::sinusoidal(c.gauge.c0, k);
  const FieldConfiguration field = gauge_transform(base, chi);
  const SpectralHamiltonian h_base = build_spectral_hamiltonian(c.grid(), base);
  const WaveFunction reference = gauge_phase_reference(psi0, c.total_time, chi, h_base, c.mode);
  const SpectralHamiltonian h_gauge = build_spectral_hamiltonian(c.grid(), field);
  const Real self_check = l2_distance(oracle_propagate(psi0, c.total_time, h_gauge, c.mode), reference);

  out.data["base_field"] = to_string(base.kind());
  out.data["gauge"] = json{{"c0", c.gauge.c0}, {"k", to_json(k)}};
  out.data["mode"] = to_string(c.mode);
  out.data["total_time"] = c.total_time;
  out.data["oracle_self_check"] = self_check;
  out.checks.push_back(at_most("oracle_self_check", self_check, c.check.oracle_tolerance.value_or(1e-8)));

  const Study s = run_studies(c, psi0, field, reference, out);
  const Real min_order = c.check.min_order.value_or(1.8);
  const Real stall = c.check.stall_factor.value_or(10.0);
  std::optional<Real> average_finest;
  for (const auto& r : s.reports) {
    if (r.scheme.vector_rule == VectorRule::EndpointAverage) average_finest = r.errors.back();
  }
  std::vector<bool> include;
  for (const auto& r : s.reports) {
    const std::string name = label(r.scheme);
    include.push_back(converging_rule(r.scheme.vector_rule));
    if (converging_rule(r.scheme.vector_rule)) {
      out.checks.push_back(at_least("order[" + name + "]", r.order, min_order));
    } else if (average_finest) {
      out.checks.push_back(at_least("stall_ratio[" + name + "]", r.errors.back() / *average_finest, stall));
    }
  }
  robustness_checks(s, c.check.robustness.value_or(0.15), out, include);
  return out;
}

// --- midpoint-vs-average --------------------------------------------------------

ExperimentOutput midpoint_vs_average(const ExperimentConfig& c) {
  ExperimentOutput out;
  const FieldConfiguration field = c.make_field();
  const auto steps = or_default_ladder(c.difference_steps);
  Position anchor = Position::Zero(c.dimension);
  for (int a = 0; a < c.dimension && a < static_cast<int>(c.anchor.size()); ++a) anchor[a] = c.anchor[static_cast<std::size_t>(a)];
  const KernelDifferenceOptions options{c.grid(), c.difference_packet_width, c.mode, c.weight_points};
  const KernelDifferenceReport r = kernel_difference_order(field, anchor, steps, options);

  out.table.columns = {"eps", "weighted_difference", "applied_difference"};
  for (std::size_t i = 0; i < steps.size(); ++i) {
    out.table.rows.push_back({steps[i], r.weighted_difference[i], r.applied_difference[i]});
  }
  out.data["field"] = to_string(field.kind());
  out.data["anchor"] = to_json(anchor);
  out.data["mode"] = to_string(c.mode);
  out.data["steps"] = steps;
  out.data["weighted_difference"] = r.weighted_difference;
  out.data["applied_difference"] = r.applied_difference;
  out.data["weighted_fit"] = fit_json(r.weighted_fit);
  out.data["applied_fit"] = fit_json(r.applied_fit);
  out.data["weighted_floor_limited"] = r.weighted_floor_limited;
  out.data["applied_floor_limited"] = r.applied_floor_limited;
  if (!r.applied_floor_limited) {
    out.checks.push_back(at_least("applied_order", r.applied_fit.order, c.check.min_order.value_or(1.4)));
  }
  return out;
}

// --- roughness ------------------------------------------------------------------

ExperimentOutput roughness(const ExperimentConfig& c) {
  ExperimentOutput out;
  const auto steps = or_default_ladder(c.roughness_steps);
  const RoughnessReport r = roughness_experiment(steps, c.samples, c.seed, c.constants);
  const auto [ref_mean, ref_se] = sample_mean_abs_increment(
      c.reference_step, c.samples, derive_seed(c.seed, static_cast<std::uint64_t>(steps.size())), c.constants);
  const Real exact = std::sqrt(2.0 * c.constants.hbar * c.reference_step / (kPi * c.constants.mass));

  out.table.columns = {"eps", "mean_abs_increment", "standard_error", "exact"};
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Real e = std::sqrt(2.0 * c.constants.hbar * steps[i] / (kPi * c.constants.mass));
    out.table.rows.push_back({steps[i], r.mean_abs_increment[i], r.standard_errors[i], e});
  }
  out.data["samples"] = r.samples;
  out.data["steps"] = r.steps;
  out.data["mean_abs_increment"] = r.mean_abs_increment;
  out.data["standard_errors"] = r.standard_errors;
  out.data["exponent"] = r.exponent;
  out.data["exponent_standard_error"] = r.exponent_standard_error;
  out.data["reference"] = json{{"step", c.reference_step},
                               {"mean_abs_increment", ref_mean},
                               {"standard_error", ref_se},
                               {"exact", exact},
                               {"sigmas", (ref_mean - exact) / ref_se}};
  out.checks.push_back(within("exponent", r.exponent, c.check.exponent.value_or(0.5),
                              c.check.exponent_tolerance.value_or(0.03)));
  out.checks.push_back(at_most("reference_mean_sigmas", std::abs(ref_mean - exact) / ref_se,
                               c.check.reference_sigmas.value_or(2.0)));
  return out;
}

std::string format_real(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15e", v);
  return buf;
}

json checks_json(const std::vector<CheckResult>& checks) {
  json a = json::array();
  for (const auto& k : checks) {
    json j{{"name", k.name}, {"value", k.value}, {"relation", k.relation}, {"threshold", k.threshold}};
    if (k.relation == "within") j["target"] = k.target;
    j["pass"] = k.pass;
    a.push_back(std::move(j));
  }
  return a;
}

}  // namespace

std::string Table::to_csv() const {
  std::string s;
  for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
  s += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Real>) s += format_real(v);
            else if constexpr (std::is_same_v<T, long long>) s += std::to_string(v);
            else s += v;
          },
          row[i]);
    }
    s += '\n';
  }
  return s;
}

bool ExperimentOutput::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

ExperimentOutput compute_experiment(const ExperimentConfig& c) {
  const auto& n = c.experiment;
  ExperimentOutput out;
  if (n == "splitting-order") out = splitting_order(c);
  else if (n == "fresnel-check") out = fresnel_check_experiment(c);
  else if (n == "kernel-symmetry") out = kernel_symmetry(c);
  else if (n == "propagate") out = propagate_experiment(c);
  else if (n == "convergence") out = convergence_experiment(c);
  else if (n == "gauge-test") out = gauge_test(c);
  else if (n == "midpoint-vs-average") out = midpoint_vs_average(c);
  else if (n == "roughness") out = roughness(c);
  else raise(ErrorCode::ConfigInvalid, "experiment.name: unknown experiment '" + n + "'");
  out.data["checks"] = checks_json(out.checks);
  out.data["all_pass"] = out.all_pass();
  return out;
}

json manifest(const ExperimentConfig& c) {
  json config = json::object();
  for (const auto& e : c.entries) config[e.section][e.key] = e.value;
  return json{{"artifact", kArtifactName},
              {"version", kArtifactVersion},
              {"experiment", c.experiment},
              {"seed", c.seed},
              {"config", std::move(config)}};
}

}  // namespace magprop::cli
