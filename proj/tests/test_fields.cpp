#include <doctest.h>

#include "magprop/fields.hpp"

#include <cmath>

using namespace magprop;

namespace {

const PhysicalConstants kUnit{};

Position p1(Real x) { return Position::Constant(1, x); }
Position p2(Real x, Real y) { return Position(Eigen::Vector2d(x, y)); }

Real observed_order(Real e_coarse, Real e_fine) { return std::log2(e_coarse / e_fine); }

}  // namespace

TEST_CASE("free particle has no fields") {
  const auto f = free_particle(kUnit, 2);
  CHECK(f.kind() == BuiltinField::FreeParticle);
  CHECK(f.reduced_vector_potential(p2(0.7, -3.1)).norm() == 0.0);
  CHECK(f.potential(p2(0.7, -3.1)) == 0.0);
}

TEST_CASE("constant field in the symmetric gauge") {
  const auto f = constant_b_symmetric(kUnit, 2, 2.0);
  const Position a = f.reduced_vector_potential(p2(1.0, 1.0));
  CHECK(a[0] == doctest::Approx(-1.0));
  CHECK(a[1] == doctest::Approx(1.0));
  CHECK(f.divergence(p2(0.3, 0.4)) == 0.0);
  CHECK_THROWS_AS(constant_b_symmetric(kUnit, 1, 2.0), Error);
}

TEST_CASE("constant field in the Landau gauge") {
  const auto f = constant_b_landau(kUnit, 2, 2.0);
  const Position a = f.vector_potential(p2(0.5, 1.5));
  CHECK(a[0] == doctest::Approx(-3.0));
  CHECK(a[1] == 0.0);
  CHECK(central_curl(f, p2(0.5, 1.5), 1e-3)[0] == doctest::Approx(2.0));
}

TEST_CASE("reduced field includes the coupling e/c") {
  const PhysicalConstants c{1.0, 1.0, 3.0, 2.0};
  const auto f = constant_b_symmetric(c, 2, 2.0);
  CHECK(f.reduced_vector_potential(p2(1.0, 1.0))[1] == doctest::Approx(1.5));
}

TEST_CASE("pure gauge field") {
  const auto f = pure_gauge(kUnit, 0.3, p1(1.0));
  CHECK(f.reduced_vector_potential(p1(0.0))[0] == doctest::Approx(0.3));
  CHECK(f.divergence(p1(0.5)) == doctest::Approx(-0.3 * std::sin(0.5)));
  REQUIRE(f.gauge().has_value());
  CHECK(f.gauge()->value(p1(0.5)) == doctest::Approx(0.3 * std::sin(0.5)));
  // Zero magnetic field in 2D.
  const auto g = pure_gauge(kUnit, 0.4, p2(1.0, -2.0));
  CHECK(std::abs(central_curl(g, p2(0.2, 0.9), 1e-3)[0]) < 1e-6);
}

TEST_CASE("harmonic potential") {
  const auto f = harmonic(PhysicalConstants{2.0, 1.0, 1.0, 1.0}, 2, 3.0);
  CHECK(f.potential(p2(1.0, 2.0)) == doctest::Approx(0.5 * 2.0 * 9.0 * 5.0));
  CHECK(f.vector_potential(p2(1.0, 2.0)).norm() == 0.0);
}

TEST_CASE("polynomial vector potential along axis 0") {
  const auto f = polynomial_vector_potential(kUnit, 2, {1.0, 0.0, 2.0});
  const Position a = f.vector_potential(p2(3.0, 5.0));
  CHECK(a[0] == doctest::Approx(19.0));
  CHECK(a[1] == 0.0);
  CHECK(f.divergence(p2(3.0, 5.0)) == doctest::Approx(12.0));
}

TEST_CASE("combine and scale") {
  const auto f = combine(harmonic(kUnit, 2, 1.0), constant_b_symmetric(kUnit, 2, 2.0));
  CHECK(f.potential(p2(1.0, 1.0)) == doctest::Approx(1.0));
  CHECK(f.vector_potential(p2(1.0, 1.0))[0] == doctest::Approx(-1.0));
  const auto s = scale_vector_potential(f, -1.0);
  CHECK(s.vector_potential(p2(1.0, 1.0))[0] == doctest::Approx(1.0));
  CHECK(s.potential(p2(1.0, 1.0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(combine(free_particle(kUnit, 1), free_particle(PhysicalConstants{2, 1, 1, 1}, 1)), Error);
}

TEST_CASE("evaluation outside the grid") {
  const auto grid = SpatialGrid::cube(1, -1.0, 1.0, 16);
  const auto f = pure_gauge(kUnit, 0.3, p1(1.0));
  CHECK_NOTHROW(eval_reduced_vector_potential(f, p1(0.5), grid));
  try {
    eval_reduced_vector_potential(f, p1(1.5), grid);
    FAIL("expected OutOfDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
}

TEST_CASE("gauge transform by zero is the identity") {
  const auto f = constant_b_symmetric(kUnit, 2, 1.3);
  const auto g = gauge_transform(f, GaugeFunction::zero());
  for (Real x : {-1.0, 0.2, 2.5}) {
    const Position p = p2(x, 0.5 * x - 1.0);
    CHECK((g.vector_potential(p) - f.vector_potential(p)).norm() == 0.0);
    CHECK(g.potential(p) == f.potential(p));
  }
}

TEST_CASE("free particle plus sinusoidal gauge equals the pure gauge builtin") {
  const auto grid = SpatialGrid::cube(1, -6.0, 6.0, 64);
  const auto g = gauge_transform(free_particle(kUnit, 1), GaugeFunction::sinusoidal(0.3, p1(1.0)));
  const auto ref = pure_gauge(kUnit, 0.3, p1(1.0));
  Real worst = 0.0;
  for (Index i = 0; i < grid.size(); ++i) {
    const Position x = grid.point(i);
    worst = std::max(worst, (g.vector_potential(x) - ref.vector_potential(x)).norm());
  }
  CHECK(worst == 0.0);
  CHECK(g.gauge().has_value());
}

TEST_CASE("double gauge transform restores A") {
  const auto f = constant_b_symmetric(kUnit, 2, 0.8);
  const auto chi = GaugeFunction::sinusoidal(0.7, p2(1.3, -0.4));
  const auto g = gauge_transform(gauge_transform(f, chi), -chi);
  for (Real x : {-2.0, 0.1, 1.7}) {
    const Position p = p2(x, 1.0 - x);
    CHECK((g.vector_potential(p) - f.vector_potential(p)).norm() < 1e-12);
  }
  REQUIRE(g.gauge().has_value());
  CHECK(std::abs(g.gauge()->value(p2(0.4, 0.4))) < 1e-15);
}

TEST_CASE("analytic divergence matches central differences at second order") {
  const std::vector<std::pair<const char*, FieldConfiguration>> fields{
      {"pure_gauge", pure_gauge(kUnit, 0.3, p2(1.0, 0.5))},
      {"polynomial", polynomial_vector_potential(kUnit, 2, {0.1, 0.0, 1.0, 0.5})},
  };
  for (const auto& [name, f] : fields) {
    CAPTURE(name);
    const Position x = p2(0.37, -0.81);
    const Real e1 = std::abs(central_divergence(f, x, 0.1) - f.divergence(x));
    const Real e2 = std::abs(central_divergence(f, x, 0.05) - f.divergence(x));
    CHECK(observed_order(e1, e2) == doctest::Approx(2.0).epsilon(0.05));
  }
  const auto b = constant_b_symmetric(kUnit, 2, 1.5);
  CHECK(std::abs(central_divergence(b, p2(0.3, 0.2), 0.1)) < 1e-14);
}

TEST_CASE("gauge transform leaves the magnetic field unchanged") {
  const auto f = constant_b_symmetric(kUnit, 2, 1.5);
  const auto g = gauge_transform(f, GaugeFunction::sinusoidal(0.9, p2(1.1, 0.7)));
  const Position x = p2(0.4, -0.3);
  for (Real h : {0.1, 0.05}) {
    CHECK(std::abs(central_curl(g, x, h)[0] - central_curl(f, x, h)[0]) < 3.0 * h * h);
  }
  CHECK(central_curl(f, x, 0.1)[0] == doctest::Approx(1.5));
}

TEST_CASE("curl in three dimensions") {
  const auto f = constant_b_symmetric(kUnit, 3, 2.0);
  const Position c = central_curl(f, Position(Eigen::Vector3d(0.1, 0.2, 0.3)), 1e-3);
  CHECK(std::abs(c[0]) < 1e-10);
  CHECK(std::abs(c[1]) < 1e-10);
  CHECK(c[2] == doctest::Approx(2.0));
}

TEST_CASE("builtin names") {
  CHECK(to_string(BuiltinField::ConstantBSymmetric) == "constant_b_symmetric");
  CHECK(to_string(BuiltinField::PureGauge) == "pure_gauge");
}
