#include "magprop/analysis.hpp"

#include "magprop/propagation.hpp"
#include "parallel.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace magprop {

void validate_doubling_ladder(const std::vector<int>& steps) {
  if (steps.size() < 4) raise(ErrorCode::InvalidArgument, "convergence ladder needs at least 4 entries");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i] < 1) raise(ErrorCode::InvalidArgument, "step counts must be positive");
    if (i > 0 && steps[i] != 2 * steps[i - 1]) {
      raise(ErrorCode::InvalidArgument, "each step count must double the previous one");
    }
  }
}

namespace {

constexpr Real kDifferenceFloor = 1e-12;

void fit_report(ConvergenceReport& r) {
  Real worst = 0.0;
  for (Real e : r.errors) worst = std::max(worst, e);
  if (worst < kConvergenceFloor) {
    r.floor_limited = true;
    r.order = r.residual = r.order_without_finest = std::numeric_limits<Real>::quiet_NaN();
    return;
  }
  std::vector<Real> eps;
  for (int n : r.steps) eps.push_back(r.total_time / static_cast<Real>(n));
  const OrderFit fit = fit_power_law(eps, r.errors);
  r.order = fit.order;
  r.residual = fit.residual;
  const std::span<const Real> coarse_eps(eps.data(), eps.size() - 1);
  const std::span<const Real> coarse_err(r.errors.data(), r.errors.size() - 1);
  r.order_without_finest = fit_power_law(coarse_eps, coarse_err).order;
}

}  // namespace

ConvergenceReport convergence_study(const WaveFunction& psi0, Real t,
                                    const FieldConfiguration& field, const SchemeSpec& scheme,
                                    const std::vector<int>& steps, const WaveFunction& reference,
                                    std::vector<WaveFunction>* final_states) {
  validate_doubling_ladder(steps);
  require_same_grid(psi0.grid(), reference.grid());
  ConvergenceReport r;
  r.scheme = scheme;
  r.steps = steps;
  r.total_time = t;
  for (int n : steps) {
    PropagationPlan plan{.total_time = t,
                         .steps = n,
                         .field = field,
                         .scheme = scheme,
                         .grid = psi0.grid(),
                         .track_observables = false};
    WaveFunction psi = propagate_final(psi0, plan);
    r.errors.push_back(l2_distance(psi, reference));
    if (final_states) final_states->push_back(std::move(psi));
  }
  fit_report(r);
  return r;
}

ConvergenceReport convergence_study(const WaveFunction& psi0, Real t,
                                    const FieldConfiguration& field, const SchemeSpec& scheme,
                                    const std::vector<int>& steps,
                                    const SpectralHamiltonian& oracle) {
  return convergence_study(psi0, t, field, scheme, steps,
                           oracle_propagate(psi0, t, oracle, scheme.mode));
}

KernelDifferenceReport kernel_difference_order(const FieldConfiguration& field,
                                               const Position& anchor,
                                               const std::vector<Real>& steps,
                                               const KernelDifferenceOptions& options) {
  const int d = options.grid.dimension();
  if (anchor.size() != d) raise(ErrorCode::DimensionMismatch, "anchor dimension differs from grid");
  if (d > 2) raise(ErrorCode::DimensionMismatch, "kernel difference study supports d <= 2");
  if (options.weight_points < 3) raise(ErrorCode::InvalidArgument, "need at least 3 weight points");
  const auto& c = field.constants();

  KernelDifferenceReport r;
  r.steps = steps;
  const WaveFunction psi = make_gaussian_packet(options.grid, anchor, options.packet_width,
                                                Position::Zero(d));
  const int np = options.weight_points;
  const Real s_max = 8.0;
  const Real ds = 2.0 * s_max / (np - 1);

  for (Real eps : steps) {
    const Real width = std::sqrt(c.hbar * eps / c.mass);
    // Weighted relative kernel difference over the free Gaussian.
    Real num = 0.0, den = 0.0;
    const Index total = d == 1 ? np : static_cast<Index>(np) * np;
    for (Index q = 0; q < total; ++q) {
      Position y = anchor;
      Real w = 1.0;
      for (int ax = 0; ax < d; ++ax) {
        const Index k = ax == 0 ? q % np : q / np;
        const Real s = -s_max + static_cast<Real>(k) * ds;
        y[ax] += s * width;
        w *= std::exp(-0.5 * s * s);
      }
      const Complex rel = vector_phase(anchor, y, field, VectorRule::EndpointAverage) -
                          vector_phase(anchor, y, field, VectorRule::Midpoint);
      num += w * std::norm(rel);
      den += w;
    }
    r.weighted_difference.push_back(std::sqrt(num / den));

    const SchemeSpec avg{VectorRule::EndpointAverage, PotentialRule::SymmetricSplit, options.mode};
    const SchemeSpec mid{VectorRule::Midpoint, PotentialRule::SymmetricSplit, options.mode};
    const WaveFunction pa = build_transfer_matrix(options.grid, eps, field, avg).apply(psi);
    const WaveFunction pm = build_transfer_matrix(options.grid, eps, field, mid).apply(psi);
    r.applied_difference.push_back(l2_distance(pa, pm));
  }

  auto fit_or_floor = [&](const std::vector<Real>& v, bool& floor) {
    Real worst = 0.0;
    for (Real e : v) worst = std::max(worst, e);
    floor = worst < kDifferenceFloor;
    if (floor) {
      const Real nan = std::numeric_limits<Real>::quiet_NaN();
      return OrderFit{nan, nan, nan};
    }
    return fit_power_law(steps, v);
  };
  r.weighted_fit = fit_or_floor(r.weighted_difference, r.weighted_floor_limited);
  r.applied_fit = fit_or_floor(r.applied_difference, r.applied_floor_limited);
  return r;
}

std::pair<Real, Real> fit_roughness_exponent(const std::vector<Real>& steps,
                                             const std::vector<Real>& means,
                                             const std::vector<Real>& standard_errors) {
  if (steps.size() < 2 || steps.size() != means.size() || means.size() != standard_errors.size()) {
    raise(ErrorCode::DegenerateData, "roughness fit needs paired data with >= 2 points");
  }
  Real s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Real x = std::log(steps[i]);
    const Real y = std::log(means[i]);
    const Real sigma = standard_errors[i] / means[i];
    if (!(sigma > 0)) raise(ErrorCode::DegenerateData, "roughness fit needs positive standard errors");
    const Real w = 1.0 / (sigma * sigma);
    s += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  const Real delta = s * sxx - sx * sx;
  if (!(delta > 0)) raise(ErrorCode::DegenerateData, "roughness steps are degenerate");
  return {(s * sxy - sx * sy) / delta, std::sqrt(s / delta)};
}

std::pair<Real, Real> sample_mean_abs_increment(Real step, std::size_t samples, std::uint64_t seed,
                                                const PhysicalConstants& constants) {
  if (!(step > 0)) raise(ErrorCode::InvalidArgument, "roughness step must be positive");
  if (samples < 2) raise(ErrorCode::InvalidArgument, "need at least two samples");
  Rng rng(seed);
  std::normal_distribution<Real> increment(0.0, std::sqrt(constants.hbar * step / constants.mass));
  Real sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Real a = std::abs(increment(rng));
    sum += a;
    sum2 += a * a;
  }
  const Real count = static_cast<Real>(samples);
  const Real mean = sum / count;
  const Real var = (sum2 - count * mean * mean) / (count - 1.0);
  return {mean, std::sqrt(var / count)};
}

RoughnessReport roughness_experiment(const std::vector<Real>& steps, std::size_t samples,
                                     std::uint64_t seed, const PhysicalConstants& constants) {
  constants.validate();
  if (samples < 10000) raise(ErrorCode::InvalidArgument, "roughness needs at least 1e4 samples per step");
  if (steps.size() < 2) raise(ErrorCode::InvalidArgument, "roughness needs at least two steps");
  Real lo = steps.front(), hi = steps.front();
  for (Real e : steps) {
    if (!(e > 0)) raise(ErrorCode::InvalidArgument, "roughness steps must be positive");
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  if (hi / lo < 10.0 * (1.0 - 1e-12)) raise(ErrorCode::InvalidArgument, "steps must span a decade");

  RoughnessReport r;
  r.steps = steps;
  r.samples = samples;
  r.seed = seed;
  r.mean_abs_increment.assign(steps.size(), 0.0);
  r.standard_errors.assign(steps.size(), 0.0);
  const auto n = static_cast<Index>(steps.size());
  detail::parallel_for(n, [&](Index begin, Index end) {
    for (Index k = begin; k < end; ++k) {
      const auto [mean, se] = sample_mean_abs_increment(
          steps[static_cast<std::size_t>(k)], samples,
          derive_seed(seed, static_cast<std::uint64_t>(k)), constants);
      r.mean_abs_increment[static_cast<std::size_t>(k)] = mean;
      r.standard_errors[static_cast<std::size_t>(k)] = se;
    }
  });
  std::tie(r.exponent, r.exponent_standard_error) =
      fit_roughness_exponent(r.steps, r.mean_abs_increment, r.standard_errors);
  return r;
}

}  // namespace magprop
