#include "magprop/kernels.hpp"

#include <cmath>
#include <sstream>

namespace magprop {

void FresnelCheckInput::validate() const {
  if (b.size() < 1 || b.size() > 3) raise(ErrorCode::DimensionMismatch, "b must have dimension 1..3");
  if (!(damping > 0.0)) raise(ErrorCode::InvalidArgument, "damping eta must be positive");
  if (range_factor < 12.0) {
    std::ostringstream msg;
    msg << "u range " << range_factor << "/sqrt(eta) is below the required 12/sqrt(eta)";
    raise(ErrorCode::RangeTooSmall, msg.str());
  }
  if (!(spacing_factor > 0.0) || spacing_factor > 1.0) {
    raise(ErrorCode::InvalidArgument, "u spacing must be in (0, sqrt(eta)]");
  }
}

Complex fresnel_lhs(const Position& b, Real step, const PhysicalConstants& constants) {
  return std::exp(Complex(0.0, -step * b.squaredNorm() / (2.0 * constants.mass * constants.hbar)));
}

namespace {

// (2 pi i)^{-1/2} int du exp((i/2 - eta) u^2 - i beta u), trapezoid on a symmetric grid.
Complex damped_axis_integral(Real beta, Real eta, Real range_factor, Real spacing_factor) {
  const Real root = std::sqrt(eta);
  const Real half_range = range_factor / root;
  const Real h = spacing_factor * root;
  const auto half_count = static_cast<long>(std::ceil(half_range / h));
  const Complex quad(-eta, 0.5);
  Complex sum = 0.0;
  Complex carry = 0.0;  // Kahan compensation
  for (long j = -half_count; j <= half_count; ++j) {
    const Real u = static_cast<Real>(j) * h;
    Complex term = std::exp(quad * (u * u) - Complex(0.0, beta * u));
    if (j == -half_count || j == half_count) term *= 0.5;
    const Complex y = term - carry;
    const Complex t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum * h / std::sqrt(2.0 * kPi * kI);
}

}  // namespace

Complex fresnel_damped_integral(const FresnelCheckInput& input, const PhysicalConstants& constants) {
  input.validate();
  constants.validate();
  const Real scale = std::sqrt(input.step / (constants.mass * constants.hbar));
  Complex value = 1.0;
  for (Index a = 0; a < input.b.size(); ++a) {
    value *= damped_axis_integral(scale * input.b[a], input.damping, input.range_factor,
                                  input.spacing_factor);
  }
  return value;
}

FresnelResult fresnel_check(const FresnelCheckInput& input, const PhysicalConstants& constants) {
  input.validate();
  FresnelResult r;
  r.lhs = fresnel_lhs(input.b, input.step, constants);
  for (Real factor : {1.0, 0.1, 0.01}) {
    FresnelCheckInput at = input;
    at.damping = input.damping * factor;
    r.dampings.push_back(at.damping);
    r.damped.push_back(fresnel_damped_integral(at, constants));
  }
  // Lagrange interpolation of the damped values, evaluated at eta = 0.
  r.extrapolated = 0.0;
  for (std::size_t k = 0; k < r.dampings.size(); ++k) {
    Real w = 1.0;
    for (std::size_t l = 0; l < r.dampings.size(); ++l) {
      if (l != k) w *= -r.dampings[l] / (r.dampings[k] - r.dampings[l]);
    }
    r.extrapolated += w * r.damped[k];
  }
  r.residual = std::abs(r.lhs - r.extrapolated);
  return r;
}

Real fresnel_identity_residual(const FresnelCheckInput& input, const PhysicalConstants& constants) {
  return fresnel_check(input, constants).residual;
}

}  // namespace magprop
