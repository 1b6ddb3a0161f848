#pragma once

#include "magprop/core.hpp"
#include "magprop/fields.hpp"
#include "magprop/kernels.hpp"
#include "magprop/oracles.hpp"
#include "magprop/splitting.hpp"

#include <utility>
#include <vector>

namespace magprop {

/// Errors below this L2 level are treated as the quadrature/truncation floor.
inline constexpr Real kConvergenceFloor = 1e-10;

struct ConvergenceReport {
  SchemeSpec scheme;
  std::vector<int> steps;
  Real total_time = 0.0;
  std::vector<Real> errors;  // L2 distance to the reference final state
  Real order = 0.0;          // NaN when floor-limited
  Real residual = 0.0;
  /// Order refitted without the largest N.
  Real order_without_finest = 0.0;
  bool floor_limited = false;
};

/// Propagates psi0 for each N (a doubling ladder of >= 4 entries) and fits
/// error ~ eps^p against `reference`. Final states are appended to
/// `final_states` when given.
ConvergenceReport convergence_study(const WaveFunction& psi0, Real t,
                                    const FieldConfiguration& field, const SchemeSpec& scheme,
                                    const std::vector<int>& steps, const WaveFunction& reference,
                                    std::vector<WaveFunction>* final_states = nullptr);

/// Same, with the reference computed by oracle_propagate under `oracle`.
ConvergenceReport convergence_study(const WaveFunction& psi0, Real t,
                                    const FieldConfiguration& field, const SchemeSpec& scheme,
                                    const std::vector<int>& steps, const SpectralHamiltonian& oracle);

void validate_doubling_ladder(const std::vector<int>& steps);

struct KernelDifferenceOptions {
  SpatialGrid grid;
  Real packet_width = 0.5;
  TimeMode mode = TimeMode::ImaginaryTime;
  /// Gaussian quadrature over y = x_anchor + s * sqrt(hbar eps/m), |s| <= 8.
  int weight_points = 801;
};

struct KernelDifferenceReport {
  std::vector<Real> steps;
  /// sqrt(int w(y) |K_avg - K_mid|^2 / |K|^2 dy) with w the normalized free Gaussian.
  std::vector<Real> weighted_difference;
  /// ||(T_avg - T_mid) psi|| for a packet centered on the anchor.
  std::vector<Real> applied_difference;
  OrderFit weighted_fit;
  OrderFit applied_fit;
  bool weighted_floor_limited = false;
  bool applied_floor_limited = false;
};

KernelDifferenceReport kernel_difference_order(const FieldConfiguration& field,
                                               const Position& anchor,
                                               const std::vector<Real>& steps,
                                               const KernelDifferenceOptions& options);

struct RoughnessReport {
  std::vector<Real> steps;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<Real> mean_abs_increment;
  std::vector<Real> standard_errors;
  Real exponent = 0.0;
  Real exponent_standard_error = 0.0;
};

/// E|dx| for Gaussian increments of variance hbar*eps/m, per eps, with the
/// fitted exponent of mean |dx| ~ eps^q. Batch k draws from derive_seed(seed, k).
RoughnessReport roughness_experiment(const std::vector<Real>& steps, std::size_t samples,
                                     std::uint64_t seed,
                                     const PhysicalConstants& constants = PhysicalConstants{});

/// Mean |dx| and its standard error over `samples` Gaussian increments of
/// variance hbar*step/m drawn from Rng(seed).
std::pair<Real, Real> sample_mean_abs_increment(Real step, std::size_t samples, std::uint64_t seed,
                                                const PhysicalConstants& constants = PhysicalConstants{});

/// Weighted least-squares exponent of mean ~ eps^q with per-point standard
/// errors; returns (q, standard error of q).
std::pair<Real, Real> fit_roughness_exponent(const std::vector<Real>& steps,
                                             const std::vector<Real>& means,
                                             const std::vector<Real>& standard_errors);

}  // namespace magprop
