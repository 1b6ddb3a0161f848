#pragma once

#include "magprop/core.hpp"

#include <functional>
#include <optional>
#include <string>

namespace magprop {

using ScalarField = std::function<Real(const Position&)>;
using VectorField = std::function<Position(const Position&)>;

/// A gauge generator chi together with its analytic gradient.
struct GaugeFunction {
  ScalarField value;
  VectorField gradient;

  static GaugeFunction zero();
  /// chi(x) = c0 * sin(k . x)
  static GaugeFunction sinusoidal(Real c0, const Position& k);
  /// chi(x) = slope . x
  static GaugeFunction linear(const Position& slope);

  GaugeFunction operator+(const GaugeFunction& other) const;
  GaugeFunction operator-() const;
};

enum class BuiltinField {
  FreeParticle,
  Harmonic,
  ConstantBSymmetric,
  ConstantBLandau,
  PureGauge,
  Custom,
};

std::string_view to_string(BuiltinField kind);

/// V(x), A(x) and the constants of the minimal-coupling Hamiltonian
/// H = (p - eA/c)^2 / 2m + V. Immutable; evaluation is reentrant.
class FieldConfiguration {
 public:
  FieldConfiguration(PhysicalConstants constants, ScalarField potential,
                     VectorField vector_potential, BuiltinField kind = BuiltinField::Custom,
                     std::optional<ScalarField> divergence = std::nullopt,
                     std::optional<GaugeFunction> gauge = std::nullopt);

  const PhysicalConstants& constants() const { return constants_; }
  BuiltinField kind() const { return kind_; }

  Real potential(const Position& x) const { return potential_(x); }
  Position vector_potential(const Position& x) const { return vector_potential_(x); }
  /// a(x) = e A(x) / c
  Position reduced_vector_potential(const Position& x) const {
    return constants_.coupling() * vector_potential_(x);
  }

  bool has_divergence() const { return divergence_.has_value(); }
  Real divergence(const Position& x) const;

  /// Accumulated gauge generator applied through gauge_transform, if any.
  const std::optional<GaugeFunction>& gauge() const { return gauge_; }

  const ScalarField& potential_function() const { return potential_; }
  const VectorField& vector_potential_function() const { return vector_potential_; }
  const std::optional<ScalarField>& divergence_function() const { return divergence_; }

 private:
  PhysicalConstants constants_;
  ScalarField potential_;
  VectorField vector_potential_;
  BuiltinField kind_;
  std::optional<ScalarField> divergence_;
  std::optional<GaugeFunction> gauge_;
};

FieldConfiguration free_particle(const PhysicalConstants& constants, int dimension);
/// V = m omega^2 |x|^2 / 2
FieldConfiguration harmonic(const PhysicalConstants& constants, int dimension, Real omega);
/// A = (-B y/2, B x/2[, 0]); needs dimension >= 2.
FieldConfiguration constant_b_symmetric(const PhysicalConstants& constants, int dimension, Real b);
/// A = (-B y, 0[, 0]); needs dimension >= 2.
FieldConfiguration constant_b_landau(const PhysicalConstants& constants, int dimension, Real b);
/// A = grad chi with chi = c0 sin(k . x); zero magnetic field.
FieldConfiguration pure_gauge(const PhysicalConstants& constants, Real c0, const Position& k);
/// A_0(x) = sum_n coeffs[n] * x_0^n along axis 0, other components zero.
FieldConfiguration polynomial_vector_potential(const PhysicalConstants& constants, int dimension,
                                               std::vector<Real> coeffs);

/// Sum of potentials and vector potentials; constants must agree.
FieldConfiguration combine(const FieldConfiguration& f, const FieldConfiguration& g);

/// A -> s * A, V unchanged.
FieldConfiguration scale_vector_potential(const FieldConfiguration& f, Real s);

/// a(x) with a domain check against `grid`.
Position eval_reduced_vector_potential(const FieldConfiguration& f, const Position& x,
                                       const SpatialGrid& grid);

/// A' = A + grad chi, V unchanged; the generator is accumulated into gauge().
FieldConfiguration gauge_transform(const FieldConfiguration& f, const GaugeFunction& chi);

/// Central-difference divergence of A at x with step h.
Real central_divergence(const FieldConfiguration& f, const Position& x, Real h);

/// Central-difference curl of A at x (z component in 2D, full vector in 3D).
Position central_curl(const FieldConfiguration& f, const Position& x, Real h);

}  // namespace magprop
