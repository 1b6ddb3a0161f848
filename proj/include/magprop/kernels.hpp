#pragma once

#include "magprop/core.hpp"
#include "magprop/fields.hpp"

namespace magprop {

/// Where the vector potential is sampled on a slice from y (earlier) to x (later).
enum class VectorRule {
  NaiveLeft,        // a(y)
  NaiveRight,       // a(x)
  EndpointAverage,  // (a(x) + a(y)) / 2
  Midpoint,         // a((x + y) / 2)
};

/// Where the scalar potential is sampled on a slice.
enum class PotentialRule {
  Left,            // V(y)
  Right,           // V(x)
  SymmetricSplit,  // half-steps at both ends
  Midpoint,        // V((x + y) / 2)
};

struct SchemeSpec {
  VectorRule vector_rule = VectorRule::EndpointAverage;
  PotentialRule potential_rule = PotentialRule::SymmetricSplit;
  TimeMode mode = TimeMode::RealTime;
};

std::string_view to_string(VectorRule rule);
std::string_view to_string(PotentialRule rule);
std::string_view to_string(TimeMode mode);

/// Free kernel (m / 2 pi i hbar eps)^{d/2} exp[i m |x-y|^2 / (2 hbar eps)].
/// In imaginary time eps -> -i tau gives the heat kernel
/// (m / 2 pi hbar tau)^{d/2} exp[-m |x-y|^2 / (2 hbar tau)].
Complex free_kernel(const Position& x, const Position& y, Real step,
                    const PhysicalConstants& constants, TimeMode mode);

/// exp[(i/hbar) (x - y) . a_rule]; unit modulus in both time modes.
Complex vector_phase(const Position& x, const Position& y, const FieldConfiguration& field,
                     VectorRule rule);

/// exp[-(i/hbar) eps V_rule] in real time, exp[-tau V_rule / hbar] in imaginary time.
Complex scalar_phase(const Position& x, const Position& y, Real step,
                     const FieldConfiguration& field, PotentialRule rule, TimeMode mode);

/// free_kernel * vector_phase * scalar_phase.
Complex short_time_kernel(const Position& x, const Position& y, Real step,
                          const FieldConfiguration& field, const SchemeSpec& scheme);

inline constexpr Index kDefaultRowCap = 4096;

/// One slice of the composed propagator on a grid:
/// entries(i, j) = short_time_kernel(x_i, x_j, step) * dV.
struct TransferMatrix {
  SpatialGrid grid;
  Real step = 0.0;
  SchemeSpec scheme;
  MatrixXc entries;

  WaveFunction apply(const WaveFunction& psi) const;
};

TransferMatrix build_transfer_matrix(const SpatialGrid& grid, Real step,
                                     const FieldConfiguration& field, const SchemeSpec& scheme,
                                     Index row_cap = kDefaultRowCap);

/// Smallest real-time step for which the sampled free kernel does not
/// alias copies of the state back into the domain: m * L * dx / (2 pi hbar),
/// maximized over axes.
Real real_time_alias_free_step(const SpatialGrid& grid, const PhysicalConstants& constants);

// --- Gaussian-trick identity -------------------------------------------------

/// Damped quadrature of
///   (2 pi i)^{-d/2} int d^d u exp(i u^2/2 - eta u^2 - i sqrt(eps/(m hbar)) b.u)
/// against its undamped closed form exp(-i eps b^2 / (2 m hbar)).
/// The u range is [-range_factor/sqrt(eta), range_factor/sqrt(eta)] per axis
/// with spacing spacing_factor*sqrt(eta).
struct FresnelCheckInput {
  Position b;
  Real step = 1.0;
  Real damping = 1e-2;
  Real range_factor = 12.0;
  Real spacing_factor = 0.5;

  void validate() const;
};

struct FresnelResult {
  Complex lhs;
  std::vector<Real> dampings;
  std::vector<Complex> damped;
  Complex extrapolated;
  Real residual = 0.0;
};

/// exp(-i eps |b|^2 / (2 m hbar))
Complex fresnel_lhs(const Position& b, Real step, const PhysicalConstants& constants);

Complex fresnel_damped_integral(const FresnelCheckInput& input, const PhysicalConstants& constants);

/// Evaluates the damped integral at eta, eta/10, eta/100 and extrapolates to
/// eta = 0 with the interpolating quadratic.
FresnelResult fresnel_check(const FresnelCheckInput& input, const PhysicalConstants& constants);

Real fresnel_identity_residual(const FresnelCheckInput& input, const PhysicalConstants& constants);

}  // namespace magprop
