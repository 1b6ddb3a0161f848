#include <doctest.h>

#include "magprop/oracles.hpp"

#include <algorithm>
#include <cmath>

using namespace magprop;

namespace {

const PhysicalConstants kUnit{};

Position p1(Real x) { return Position::Constant(1, x); }

WaveFunction analytic_free_gaussian(const SpatialGrid& g, Real center, Real sigma, Real t,
                                    const PhysicalConstants& c) {
  const Complex spread = 1.0 + kI * c.hbar * t / (2.0 * c.mass * sigma * sigma);
  VectorXc amp(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const Real dx = g.point(i)[0] - center;
    amp[i] = std::pow(2.0 * kPi * sigma * sigma, -0.25) / std::sqrt(spread) *
             std::exp(-dx * dx / (4.0 * sigma * sigma * spread));
  }
  return WaveFunction(g, amp);
}

}  // namespace

TEST_CASE("free spectrum is the discrete kinetic symbol") {
  const auto g = SpatialGrid::cube(1, -kPi, kPi, 64);
  const auto h = build_spectral_hamiltonian(g, free_particle(kUnit, 1));
  CHECK(h.hermiticity_residual() < 1e-12);
  const Eigen::VectorXd k = wavevectors(g, 0);
  std::vector<Real> expected(static_cast<std::size_t>(k.size()));
  for (Index i = 0; i < k.size(); ++i) expected[static_cast<std::size_t>(i)] = 0.5 * k[i] * k[i];
  std::sort(expected.begin(), expected.end());
  const Eigen::VectorXd& ev = h.eigenvalues();
  for (Index i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] - expected[static_cast<std::size_t>(i)]) < 1e-10);
}

TEST_CASE("harmonic spectrum") {
  const auto g = SpatialGrid::cube(1, -10.0, 10.0, 256);
  const auto h = build_spectral_hamiltonian(g, harmonic(kUnit, 1, 1.0));
  for (int n = 0; n < 5; ++n) CHECK(std::abs(h.eigenvalues()[n] - (n + 0.5)) < 1e-6);

  const auto ground = oracle_ground_state(h);
  CHECK(std::abs(l2_norm(ground) - 1.0) < 1e-12);
  CHECK(h.energy(ground) == doctest::Approx(0.5).epsilon(1e-8));
  const auto exact = make_gaussian_packet(g, p1(0.0), std::sqrt(0.5), p1(0.0));
  CHECK(std::abs(inner_product(exact, ground)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("spectral Hamiltonian with a vector potential is Hermitian") {
  const auto g = SpatialGrid::cube(2, -4.0, 4.0, 16);
  const auto h = build_spectral_hamiltonian(g, combine(harmonic(kUnit, 2, 1.0),
                                                       constant_b_symmetric(kUnit, 2, 1.0)));
  CHECK(h.hermiticity_residual() < 1e-12);
  CHECK(h.matrix().allFinite());
}

TEST_CASE("row cap applies to the oracle") {
  const auto g = SpatialGrid::cube(2, -1.0, 1.0, 65);
  try {
    build_spectral_hamiltonian(g, free_particle(kUnit, 2));
    FAIL("expected MatrixTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MatrixTooLarge);
  }
}

TEST_CASE("zero time is the identity") {
  const auto g = SpatialGrid::cube(1, -8.0, 8.0, 128);
  const auto h = build_spectral_hamiltonian(g, harmonic(kUnit, 1, 1.3));
  const auto psi = make_gaussian_packet(g, p1(0.5), 0.8, p1(1.0));
  CHECK(l2_distance(oracle_propagate(psi, 0.0, h), psi) < 1e-12);
  CHECK(l2_distance(oracle_propagate(psi, 0.0, h, TimeMode::ImaginaryTime), psi) < 1e-12);
}

TEST_CASE("free gaussian spreads as the closed form") {
  const auto g = SpatialGrid::cube(1, -20.0, 20.0, 256);
  const auto h = build_spectral_hamiltonian(g, free_particle(kUnit, 1));
  const auto psi0 = make_gaussian_packet(g, p1(0.0), 1.0, p1(0.0));
  const Real scale = l2_norm(analytic_free_gaussian(g, 0.0, 1.0, 0.0, kUnit));
  for (Real t : {0.5, 1.0, 2.0}) {
    const auto expected = analytic_free_gaussian(g, 0.0, 1.0, t, kUnit);
    const WaveFunction rescaled(g, expected.amplitudes() / scale);
    CHECK(l2_distance(oracle_propagate(psi0, t, h), rescaled) < 1e-8);
  }
}

TEST_CASE("real-time oracle is unitary") {
  const auto g = SpatialGrid::cube(2, -5.0, 5.0, 24);
  const auto h = build_spectral_hamiltonian(g, combine(harmonic(kUnit, 2, 1.0),
                                                       constant_b_symmetric(kUnit, 2, 0.7)));
  const auto psi = make_gaussian_packet(g, Position(Eigen::Vector2d(0.5, 0.0)), 0.9,
                                        Position(Eigen::Vector2d(0.0, 0.5)));
  CHECK(std::abs(l2_norm(oracle_propagate(psi, 10.0, h)) - 1.0) < 1e-10);
}

TEST_CASE("oracle evolution composes") {
  const auto g = SpatialGrid::cube(1, -8.0, 8.0, 128);
  const auto h = build_spectral_hamiltonian(
      g, combine(harmonic(kUnit, 1, 1.0), polynomial_vector_potential(kUnit, 1, {0.2, 0.1})));
  const auto psi = make_gaussian_packet(g, p1(-1.0), 0.7, p1(0.3));
  for (auto mode : {TimeMode::RealTime, TimeMode::ImaginaryTime}) {
    const auto direct = oracle_propagate(psi, 1.7, h, mode);
    const auto split = oracle_propagate(oracle_propagate(psi, 0.6, h, mode), 1.1, h, mode);
    CHECK(l2_distance(direct, split) < 1e-9 * l2_norm(direct));
  }
}

TEST_CASE("gauge reference for trivial generators") {
  const auto g = SpatialGrid::cube(1, -8.0, 8.0, 128);
  const auto field = harmonic(kUnit, 1, 1.0);
  const auto h = build_spectral_hamiltonian(g, field);
  const auto psi = make_gaussian_packet(g, p1(0.4), 0.8, p1(0.0));
  const auto base = oracle_propagate(psi, 1.0, h);
  CHECK(l2_distance(gauge_phase_reference(psi, 1.0, GaugeFunction::zero(), h), base) < 1e-12);

  GaugeFunction constant{[](const Position&) { return 0.9; },
                         [](const Position& x) { return Position::Zero(x.size()); }};
  const auto shifted = gauge_phase_reference(psi, 1.0, constant, h);
  CHECK(l2_distance(shifted, base) < 1e-12);
}

TEST_CASE("gauge reference matches the transformed Hamiltonian") {
  const auto g = SpatialGrid::cube(1, -4.0 * kPi, 4.0 * kPi, 128);
  const auto base_field = free_particle(kUnit, 1);
  const auto chi = GaugeFunction::sinusoidal(0.3, p1(1.0));
  const auto transformed = build_spectral_hamiltonian(g, gauge_transform(base_field, chi));
  const auto psi = make_gaussian_packet(g, p1(0.0), 1.0, p1(0.0));
  for (auto mode : {TimeMode::RealTime, TimeMode::ImaginaryTime}) {
    const auto reference = gauge_phase_reference(psi, 1.0, chi, base_field, mode);
    CHECK(l2_distance(reference, oracle_propagate(psi, 1.0, transformed, mode)) < 1e-8);
  }
}

TEST_CASE("gauge phase round trip") {
  const auto g = SpatialGrid::cube(1, -6.0, 6.0, 64);
  const auto psi = make_gaussian_packet(g, p1(0.0), 1.0, p1(0.5));
  const auto chi = GaugeFunction::sinusoidal(0.8, p1(2.0));
  const auto back = apply_gauge_phase(apply_gauge_phase(psi, chi, kUnit, 1.0), chi, kUnit, -1.0);
  CHECK(l2_distance(back, psi) < 1e-14);
}

TEST_CASE("oracle rejects a state on another grid") {
  const auto h = build_spectral_hamiltonian(SpatialGrid::cube(1, -4.0, 4.0, 32), free_particle(kUnit, 1));
  const auto psi = make_gaussian_packet(SpatialGrid::cube(1, -5.0, 5.0, 32), p1(0.0), 1.0, p1(0.0));
  try {
    oracle_propagate(psi, 1.0, h);
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridMismatch);
  }
}
