#include "magprop/fields.hpp"

#include <cmath>

namespace magprop {

GaugeFunction GaugeFunction::zero() {
  return {[](const Position&) { return 0.0; },
          [](const Position& x) -> Position { return Position::Zero(x.size()); }};
}

GaugeFunction GaugeFunction::sinusoidal(Real c0, const Position& k) {
  return {[c0, k](const Position& x) { return c0 * std::sin(k.dot(x)); },
          [c0, k](const Position& x) -> Position { return c0 * std::cos(k.dot(x)) * k; }};
}

GaugeFunction GaugeFunction::linear(const Position& slope) {
  return {[slope](const Position& x) { return slope.dot(x); },
          [slope](const Position&) -> Position { return slope; }};
}

GaugeFunction GaugeFunction::operator+(const GaugeFunction& other) const {
  return {[a = value, b = other.value](const Position& x) { return a(x) + b(x); },
          [a = gradient, b = other.gradient](const Position& x) -> Position {
            return a(x) + b(x);
          }};
}

GaugeFunction GaugeFunction::operator-() const {
  return {[a = value](const Position& x) { return -a(x); },
          [a = gradient](const Position& x) -> Position { return -a(x); }};
}

std::string_view to_string(BuiltinField kind) {
  switch (kind) {
    case BuiltinField::FreeParticle: return "free";
    case BuiltinField::Harmonic: return "harmonic";
    case BuiltinField::ConstantBSymmetric: return "constant_b_symmetric";
    case BuiltinField::ConstantBLandau: return "constant_b_landau";
    case BuiltinField::PureGauge: return "pure_gauge";
    case BuiltinField::Custom: return "custom";
  }
  return "custom";
}

FieldConfiguration::FieldConfiguration(PhysicalConstants constants, ScalarField potential,
                                       VectorField vector_potential, BuiltinField kind,
                                       std::optional<ScalarField> divergence,
                                       std::optional<GaugeFunction> gauge)
    : constants_(constants),
      potential_(std::move(potential)),
      vector_potential_(std::move(vector_potential)),
      kind_(kind),
      divergence_(std::move(divergence)),
      gauge_(std::move(gauge)) {
  constants_.validate();
}

Real FieldConfiguration::divergence(const Position& x) const {
  if (!divergence_) raise(ErrorCode::InvalidArgument, "field has no analytic divergence");
  return (*divergence_)(x);
}

namespace {

Position zero_vector(const Position& x) { return Position::Zero(x.size()); }

void require_planar(int dimension, const char* what) {
  if (dimension < 2) raise(ErrorCode::DimensionMismatch, std::string(what) + " needs dimension >= 2");
}

}  // namespace

FieldConfiguration free_particle(const PhysicalConstants& constants, int) {
  return FieldConfiguration(
      constants, [](const Position&) { return 0.0; }, zero_vector, BuiltinField::FreeParticle,
      ScalarField([](const Position&) { return 0.0; }));
}

FieldConfiguration harmonic(const PhysicalConstants& constants, int, Real omega) {
  const Real k = constants.mass * omega * omega;
  return FieldConfiguration(
      constants, [k](const Position& x) { return 0.5 * k * x.squaredNorm(); }, zero_vector,
      BuiltinField::Harmonic, ScalarField([](const Position&) { return 0.0; }));
}

FieldConfiguration constant_b_symmetric(const PhysicalConstants& constants, int dimension, Real b) {
  require_planar(dimension, "constant_b_symmetric");
  return FieldConfiguration(
      constants, [](const Position&) { return 0.0; },
      [b](const Position& x) -> Position {
        if (x.size() < 2) raise(ErrorCode::DimensionMismatch, "constant B needs a planar position");
        Position a = Position::Zero(x.size());
        a[0] = -0.5 * b * x[1];
        a[1] = 0.5 * b * x[0];
        return a;
      },
      BuiltinField::ConstantBSymmetric, ScalarField([](const Position&) { return 0.0; }));
}

FieldConfiguration constant_b_landau(const PhysicalConstants& constants, int dimension, Real b) {
  require_planar(dimension, "constant_b_landau");
  return FieldConfiguration(
      constants, [](const Position&) { return 0.0; },
      [b](const Position& x) -> Position {
        if (x.size() < 2) raise(ErrorCode::DimensionMismatch, "constant B needs a planar position");
        Position a = Position::Zero(x.size());
        a[0] = -b * x[1];
        return a;
      },
      BuiltinField::ConstantBLandau, ScalarField([](const Position&) { return 0.0; }));
}

FieldConfiguration pure_gauge(const PhysicalConstants& constants, Real c0, const Position& k) {
  const GaugeFunction chi = GaugeFunction::sinusoidal(c0, k);
  const Real k2 = k.squaredNorm();
  return FieldConfiguration(
      constants, [](const Position&) { return 0.0; }, chi.gradient, BuiltinField::PureGauge,
      ScalarField([c0, k, k2](const Position& x) { return -c0 * k2 * std::sin(k.dot(x)); }), chi);
}

FieldConfiguration polynomial_vector_potential(const PhysicalConstants& constants, int,
                                               std::vector<Real> coeffs) {
  auto horner = [](const std::vector<Real>& c, Real s) {
    Real v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
    return v;
  };
  std::vector<Real> deriv;
  for (std::size_t n = 1; n < coeffs.size(); ++n) deriv.push_back(static_cast<Real>(n) * coeffs[n]);
  return FieldConfiguration(
      constants, [](const Position&) { return 0.0; },
      [coeffs, horner](const Position& x) -> Position {
        Position a = Position::Zero(x.size());
        a[0] = horner(coeffs, x[0]);
        return a;
      },
      BuiltinField::Custom,
      ScalarField([deriv, horner](const Position& x) { return horner(deriv, x[0]); }));
}

FieldConfiguration combine(const FieldConfiguration& f, const FieldConfiguration& g) {
  const auto& cf = f.constants();
  const auto& cg = g.constants();
  if (cf.mass != cg.mass || cf.hbar != cg.hbar || cf.charge != cg.charge ||
      cf.light_speed != cg.light_speed) {
    raise(ErrorCode::InvalidArgument, "cannot combine fields with different constants");
  }
  std::optional<ScalarField> div;
  if (f.has_divergence() && g.has_divergence()) {
    div = [a = *f.divergence_function(), b = *g.divergence_function()](const Position& x) {
      return a(x) + b(x);
    };
  }
  std::optional<GaugeFunction> gauge;
  if (f.gauge() && g.gauge()) gauge = *f.gauge() + *g.gauge();
  else if (f.gauge()) gauge = f.gauge();
  else if (g.gauge()) gauge = g.gauge();
  return FieldConfiguration(
      cf,
      [a = f.potential_function(), b = g.potential_function()](const Position& x) {
        return a(x) + b(x);
      },
      [a = f.vector_potential_function(), b = g.vector_potential_function()](
          const Position& x) -> Position { return a(x) + b(x); },
      BuiltinField::Custom, std::move(div), std::move(gauge));
}

FieldConfiguration scale_vector_potential(const FieldConfiguration& f, Real s) {
  std::optional<ScalarField> div;
  if (f.has_divergence()) {
    div = [a = *f.divergence_function(), s](const Position& x) { return s * a(x); };
  }
  return FieldConfiguration(
      f.constants(), f.potential_function(),
      [a = f.vector_potential_function(), s](const Position& x) -> Position { return s * a(x); },
      BuiltinField::Custom, std::move(div));
}

Position eval_reduced_vector_potential(const FieldConfiguration& f, const Position& x,
                                       const SpatialGrid& grid) {
  if (!grid.contains(x)) raise(ErrorCode::OutOfDomain, "position outside the grid bounds");
  return f.reduced_vector_potential(x);
}

FieldConfiguration gauge_transform(const FieldConfiguration& f, const GaugeFunction& chi) {
  // The analytic divergence is dropped: it would need the Laplacian of chi.
  GaugeFunction total = f.gauge() ? *f.gauge() + chi : chi;
  return FieldConfiguration(
      f.constants(), f.potential_function(),
      [a = f.vector_potential_function(), g = chi.gradient](const Position& x) -> Position {
        return a(x) + g(x);
      },
      BuiltinField::Custom, std::nullopt, std::move(total));
}

Real central_divergence(const FieldConfiguration& f, const Position& x, Real h) {
  Real div = 0.0;
  for (Index a = 0; a < x.size(); ++a) {
    Position xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    div += (f.vector_potential(xp)[a] - f.vector_potential(xm)[a]) / (2.0 * h);
  }
  return div;
}

Position central_curl(const FieldConfiguration& f, const Position& x, Real h) {
  // d_i A_j by central differences
  auto partial = [&](Index i, Index j) {
    Position xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    return (f.vector_potential(xp)[j] - f.vector_potential(xm)[j]) / (2.0 * h);
  };
  if (x.size() == 2) {
    Position c(1);
    c[0] = partial(0, 1) - partial(1, 0);
    return c;
  }
  if (x.size() == 3) {
    Position c(3);
    c[0] = partial(1, 2) - partial(2, 1);
    c[1] = partial(2, 0) - partial(0, 2);
    c[2] = partial(0, 1) - partial(1, 0);
    return c;
  }
  raise(ErrorCode::DimensionMismatch, "curl needs dimension 2 or 3");
}

}  // namespace magprop
