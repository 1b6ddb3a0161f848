#include <doctest.h>

#include "magprop/analysis.hpp"
#include "magprop/oracles.hpp"
#include "magprop/propagation.hpp"

#include <cmath>

using namespace magprop;

namespace {

const PhysicalConstants kUnit{};

Position p1(Real x) { return Position::Constant(1, x); }

PropagationPlan plan_for(const SpatialGrid& g, const FieldConfiguration& f, Real t, int n,
                         SchemeSpec s = {}) {
  return PropagationPlan{.total_time = t, .steps = n, .field = f, .scheme = s, .grid = g};
}

const SchemeSpec kImag{VectorRule::EndpointAverage, PotentialRule::SymmetricSplit, TimeMode::ImaginaryTime};

}  // namespace

TEST_CASE("one free step is a kernel sum") {
  const auto g = SpatialGrid::cube(1, -8.0, 8.0, 128);
  const auto f = free_particle(kUnit, 1);
  const auto psi = make_gaussian_packet(g, p1(0.0), 1.0, p1(0.5));
  const auto out = propagate_final(psi, plan_for(g, f, 0.5, 1));
  VectorXc manual = VectorXc::Zero(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    for (Index j = 0; j < g.size(); ++j) {
      manual[i] += free_kernel(g.point(i), g.point(j), 0.5, kUnit, TimeMode::RealTime) * psi[j] * g.spacing(0);
    }
  }
  CHECK((out.amplitudes() - manual).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("harmonic revival after one period") {
  const auto g = SpatialGrid::cube(1, -6.0, 6.0, 2048);
  const auto psi = make_gaussian_packet(g, p1(1.0), 0.7071, p1(0.0));
  const auto trace = propagate(psi, plan_for(g, harmonic(kUnit, 1, 1.0), 2.0 * kPi, 256));
  REQUIRE(trace.records.size() == 257);
  CHECK(std::abs(inner_product(psi, trace.final_state)) >= 0.99);
  for (const auto& r : trace.records) CHECK(std::abs(r.norm - 1.0) <= 1e-3);
  // Half a period mirrors the packet.
  CHECK(trace.records[128].mean_position[0] == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("imaginary time relaxes to the ground state") {
  const auto g = SpatialGrid::cube(1, -8.0, 8.0, 256);
  const auto f = harmonic(kUnit, 1, 1.0);
  const auto psi = make_gaussian_packet(g, p1(1.0), 1.0, p1(0.0));
  const auto out = normalized(propagate_final(psi, plan_for(g, f, 12.0, 240, kImag)));
  const auto ground = oracle_ground_state(build_spectral_hamiltonian(g, f));
  CHECK(std::abs(inner_product(ground, out)) >= 0.999);
}

TEST_CASE("free imaginary-time norm is nonincreasing") {
  const auto g = SpatialGrid::cube(1, -10.0, 10.0, 256);
  const auto psi = make_gaussian_packet(g, p1(0.0), 1.0, p1(0.0));
  auto plan = plan_for(g, free_particle(kUnit, 1), 2.0, 16, kImag);
  plan.track_observables = false;
  const auto trace = propagate(psi, plan);
  for (std::size_t k = 1; k < trace.records.size(); ++k) {
    CHECK(trace.records[k].norm <= trace.records[k - 1].norm + 1e-12);
  }
  // The heat kernel conserves mass; the L2 norm follows the spreading Gaussian.
  const Complex mass0 = psi.amplitudes().sum(), mass = trace.final_state.amplitudes().sum();
  CHECK(std::abs(mass / mass0 - 1.0) < 1e-3);
  for (const auto& r : trace.records) {
    CHECK(r.norm == doctest::Approx(std::pow(1.0 + 0.5 * r.time, -0.25)).epsilon(1e-6));
  }
}

TEST_CASE("real-time norm drift in a constant magnetic field") {
  const auto g = SpatialGrid::cube(2, -5.0, 5.0, 48);
  const auto psi = make_gaussian_packet(g, Position::Zero(2), 1.0, Position::Zero(2));
  auto one_step_drift = [&](Real b) {
    auto plan = plan_for(g, constant_b_symmetric(kUnit, 2, b), 0.5, 1);
    plan.track_observables = false;
    return std::abs(propagate(psi, plan).records.back().norm - 1.0);
  };
  // Weak field: the whole run stays within the drift budget.
  auto plan = plan_for(g, constant_b_symmetric(kUnit, 2, 0.05), 2.0, 4);
  plan.track_observables = false;
  const auto trace = propagate(psi, plan);
  for (const auto& r : trace.records) CHECK(std::abs(r.norm - 1.0) <= 1e-3);
  // The per-step defect grows as (omega_c eps)^2.
  const Real strong = one_step_drift(1.0), half = one_step_drift(0.5);
  CHECK(strong / half == doctest::Approx(4.0).epsilon(0.1));
  CHECK(strong == doctest::Approx(0.25 / 8.0).epsilon(0.1));
}

TEST_CASE("free packet drifts with its group velocity") {
  const auto g = SpatialGrid::cube(1, -10.0, 10.0, 512);
  const auto psi = make_gaussian_packet(g, p1(-4.0), 1.0, p1(2.0));
  const auto trace = propagate(psi, plan_for(g, free_particle(kUnit, 1), 2.0, 4));
  const auto x = observable_trace(trace, Observable::MeanPosition);
  std::vector<Real> t;
  for (const auto& r : trace.records) t.push_back(r.time);
  const Real slope = (x.back() - x.front()) / (t.back() - t.front());
  CHECK(slope == doctest::Approx(2.0).epsilon(0.02));
  const auto p = observable_trace(trace, Observable::MeanMomentum);
  for (Real v : p) CHECK(v == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("composition is associative") {
  const auto g = SpatialGrid::cube(1, -8.0, 8.0, 128);
  const auto f = combine(harmonic(kUnit, 1, 1.0), polynomial_vector_potential(kUnit, 1, {0.0, 0.3}));
  const auto psi = make_gaussian_packet(g, p1(0.5), 1.0, p1(0.0));
  const auto t = build_transfer_matrix(g, 0.1, f, kImag);
  const auto stepwise = t.apply(t.apply(t.apply(psi)));
  const WaveFunction grouped(g, (t.entries * t.entries) * (t.entries * psi.amplitudes()));
  const WaveFunction powered(g, matrix_power(t.entries, 3) * psi.amplitudes());
  CHECK(l2_distance(stepwise, grouped) < 1e-9);
  CHECK(l2_distance(stepwise, powered) < 1e-9);
  CHECK((matrix_power(t.entries, 0) - MatrixXc::Identity(g.size(), g.size())).norm() == 0.0);
}

TEST_CASE("precomposed propagation matches stepping") {
  const auto g = SpatialGrid::cube(1, -8.0, 8.0, 128);
  const auto psi = make_gaussian_packet(g, p1(0.5), 1.0, p1(0.0));
  auto plan = plan_for(g, harmonic(kUnit, 1, 1.0), 2.0, 20, kImag);
  const auto stepped = propagate_final(psi, plan);
  plan.precompose = true;
  const auto trace = propagate(psi, plan);
  REQUIRE(trace.records.size() == 2);
  CHECK(trace.records.back().step == 20);
  CHECK(l2_distance(trace.final_state, stepped) < 1e-9);
  CHECK(l2_distance(propagate_precomposed(psi, plan), stepped) < 1e-9);
}

TEST_CASE("energy tracking") {
  const auto g = SpatialGrid::cube(1, -8.0, 8.0, 256);
  const auto psi = make_gaussian_packet(g, p1(0.0), std::sqrt(0.5), p1(0.0));
  auto plan = plan_for(g, harmonic(kUnit, 1, 1.0), 1.0, 10, kImag);
  plan.track_energy = true;
  const auto trace = propagate(psi, plan);
  const auto e = observable_trace(trace, Observable::Energy);
  for (Real v : e) CHECK(v == doctest::Approx(0.5).epsilon(1e-3));
  plan.track_energy = false;
  CHECK(std::isnan(propagate(psi, plan).records.front().energy));
}

TEST_CASE("each scheme reduces to the free propagator without fields") {
  const auto g = SpatialGrid::cube(1, -8.0, 8.0, 128);
  const auto psi = make_gaussian_packet(g, p1(0.0), 1.0, p1(1.0));
  const auto f = free_particle(kUnit, 1);
  const auto ref = propagate_final(psi, plan_for(g, f, 1.0, 4));
  for (auto vr : {VectorRule::NaiveLeft, VectorRule::NaiveRight, VectorRule::Midpoint}) {
    for (auto pr : {PotentialRule::Left, PotentialRule::Right, PotentialRule::Midpoint}) {
      CHECK(l2_distance(propagate_final(psi, plan_for(g, f, 1.0, 4, {vr, pr, TimeMode::RealTime})), ref) == 0.0);
    }
  }
}

TEST_CASE("plan preconditions") {
  const auto g = SpatialGrid::cube(1, -8.0, 8.0, 128);
  const auto f = free_particle(kUnit, 1);
  const auto psi = make_gaussian_packet(g, p1(2.0), 1.0, p1(3.0));
  try {
    propagate(psi, plan_for(g, f, 2.0, 8));
    FAIL("expected BoundaryClash");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoundaryClash);
  }
  auto unchecked = plan_for(g, f, 2.0, 8);
  unchecked.check_boundary = false;
  CHECK_NOTHROW(propagate_final(psi, unchecked));

  CHECK_THROWS_AS(propagate(psi, plan_for(g, f, 1.0, 0)), Error);
  try {
    propagate(psi, plan_for(g, f, 0.0, 4));
    FAIL("expected ZeroStep");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroStep);
  }
  const auto big = SpatialGrid::cube(2, -8.0, 8.0, 65);
  const auto wide = make_gaussian_packet(big, Position::Zero(2), 1.0, Position::Zero(2));
  try {
    propagate(wide, plan_for(big, free_particle(kUnit, 2), 1.0, 4));
    FAIL("expected MatrixTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MatrixTooLarge);
  }
  const auto other = make_gaussian_packet(SpatialGrid::cube(1, -9.0, 9.0, 128), p1(0.0), 1.0, p1(0.0));
  CHECK_THROWS_AS(propagate(other, plan_for(g, f, 1.0, 4)), Error);
}

TEST_CASE("small real-time steps raise an alias warning") {
  const auto g = SpatialGrid::cube(1, -8.0, 8.0, 128);
  const auto psi = make_gaussian_packet(g, p1(0.0), 1.0, p1(0.0));
  const Real bound = real_time_alias_free_step(g, kUnit);
  const auto fine = propagate(psi, plan_for(g, free_particle(kUnit, 1), 0.5 * bound * 4, 4));
  CHECK_FALSE(fine.warnings.empty());
  const auto coarse = propagate(psi, plan_for(g, free_particle(kUnit, 1), 2.0 * bound, 1));
  CHECK(coarse.warnings.empty());
}

TEST_CASE("pure gauge: naive rules stall, endpoint average converges") {
  const auto g = SpatialGrid::cube(1, -4.0 * kPi, 4.0 * kPi, 256);
  const auto chi = GaugeFunction::sinusoidal(0.3, p1(1.0));
  const auto field = gauge_transform(free_particle(kUnit, 1), chi);
  const auto psi = make_gaussian_packet(g, p1(0.0), 1.0, p1(0.0));
  const auto reference = gauge_phase_reference(psi, 1.0, chi, free_particle(kUnit, 1), TimeMode::ImaginaryTime);
  const std::vector<int> steps{16, 32, 64, 128};

  const auto avg = convergence_study(psi, 1.0, field, kImag, steps, reference);
  for (std::size_t k = 1; k < steps.size(); ++k) CHECK(avg.errors[k] < avg.errors[k - 1]);

  const auto naive = convergence_study(
      psi, 1.0, field, {VectorRule::NaiveLeft, PotentialRule::SymmetricSplit, TimeMode::ImaginaryTime},
      steps, reference);
  CHECK(naive.errors.front() / naive.errors.back() < 1.5);
  CHECK(naive.errors.back() > 10.0 * avg.errors.back());
}
