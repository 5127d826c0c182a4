#include <doctest.h>

#include <cmath>
#include <numbers>

#include "torusphase/geometry.hpp"

using namespace torusphase;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("torus geometry rejects invalid radii") {
    CHECK_THROWS_AS(TorusGeometry(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(TorusGeometry(10.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(TorusGeometry(10.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(TorusGeometry(10.0, 12.0), std::invalid_argument);
    CHECK_NOTHROW(TorusGeometry(10.0, 8.0));
}

TEST_CASE("profile values and derivatives") {
    const TorusGeometry geom(10.0, 8.0);

    const Profile at0 = profile(geom, 0.0);
    CHECK(at0.value == doctest::Approx(18.0));
    CHECK(at0.d1 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(at0.d2 == doctest::Approx(-8.0));

    const Profile at_pi = profile(geom, kPi);
    CHECK(at_pi.value == doctest::Approx(2.0));
    CHECK(at_pi.d1 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(at_pi.d2 == doctest::Approx(8.0));

    const Profile at_half = profile(geom, kPi / 2);
    CHECK(at_half.value == doctest::Approx(10.0));
    CHECK(at_half.d1 == doctest::Approx(-8.0));
    CHECK(at_half.d2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("profile is 2pi-periodic after canonicalization") {
    const TorusGeometry geom(3.0, 1.25);
    for (double v : {0.3, 1.9, 4.0, 6.1}) {
        const Profile a = profile(geom, v);
        const Profile b = profile(geom, v + 2 * kPi);
        const Profile c = profile(geom, v - 6 * kPi);
        CHECK(a.value == b.value);
        CHECK(a.d1 == b.d1);
        CHECK(a.value == c.value);
        CHECK(a.d2 == c.d2);
    }
}

TEST_CASE("gaussian curvature: sign pattern and pinned values") {
    const TorusGeometry geom(10.0, 8.0);
    CHECK(gaussian_curvature(geom, 0.0) == doctest::Approx(1.0 / 144.0));
    CHECK(gaussian_curvature(geom, kPi / 2) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(gaussian_curvature(geom, kPi) == doctest::Approx(-1.0 / 16.0));

    // positive on the outer rim, negative on the inner rim
    for (double v = 0.05; v < kPi / 2 - 0.05; v += 0.11) {
        CHECK(gaussian_curvature(geom, v) > 0.0);
        CHECK(gaussian_curvature(geom, 2 * kPi - v) > 0.0);
    }
    for (double v = kPi / 2 + 0.05; v < 3 * kPi / 2 - 0.05; v += 0.11) {
        CHECK(gaussian_curvature(geom, v) < 0.0);
    }
}

TEST_CASE("half-odd-integer detection") {
    CHECK(is_half_odd_integer(0.5));
    CHECK(is_half_odd_integer(-0.5));
    CHECK(is_half_odd_integer(1.5));
    CHECK(is_half_odd_integer(-7.5));
    CHECK_FALSE(is_half_odd_integer(0.0));
    CHECK_FALSE(is_half_odd_integer(1.0));
    CHECK_FALSE(is_half_odd_integer(0.6));
    CHECK_FALSE(is_half_odd_integer(-2.0));
}

TEST_CASE("potential: pinned values and integer-m rejection") {
    const TorusGeometry geom(10.0, 8.0);

    // rho'' = 0 and rho' = -r at v = pi/2 collapse the bracket to r^2 (m - s/2)^2.
    CHECK(potential(geom, 0.5, SpinSign::plus, kPi / 2) == doctest::Approx(0.0).epsilon(1e-14));

    // independent evaluation at v = 0: rho = 18, rho' = 0, rho'' = -8
    CHECK(potential(geom, 0.5, SpinSign::plus, 0.0) == doctest::Approx(88.0 / 324.0));

    CHECK_THROWS_AS(potential(geom, 1.0, SpinSign::plus, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(potential(geom, 0.0, SpinSign::minus, 0.3), std::invalid_argument);
}

TEST_CASE("potential symmetry: s flip equals v reflection, (m,s) flip invariance") {
    const TorusGeometry geom(7.0, 3.0);
    for (double v = 0.0; v < 2 * kPi; v += 0.37) {
        CHECK(potential(geom, 1.5, SpinSign::plus, v) ==
              doctest::Approx(potential(geom, 1.5, SpinSign::minus, -v)).epsilon(1e-14));
        CHECK(potential(geom, 0.5, SpinSign::plus, v) ==
              doctest::Approx(potential(geom, -0.5, SpinSign::minus, v)).epsilon(1e-14));
    }
}

TEST_CASE("weight vector: node values of rho, positivity, trapezoid integral") {
    const TorusGeometry geom(10.0, 8.0);
    const Grid grid(8);
    const Eigen::VectorXd w = weight(geom, grid);
    REQUIRE(w.size() == 8);
    CHECK(w[0] == doctest::Approx(18.0));              // v = 0
    CHECK(w[2] == doctest::Approx(10.0));              // v = pi/2
    CHECK(w[4] == doctest::Approx(2.0));               // v = pi
    CHECK(w[6] == doctest::Approx(10.0));              // v = 3pi/2
    CHECK((w.array() > 0.0).all());

    // Trapezoid rule integrates the degree-1 trig polynomial rho exactly.
    for (int n : {8, 16, 64, 256}) {
        const Grid g(n);
        const double integral = weight(geom, g).sum() * g.spacing();
        CHECK(integral == doctest::Approx(2 * kPi * geom.R).epsilon(1e-13));
    }
}

TEST_CASE("total curvature vanishes for any even N and geometry") {
    for (const auto& [R, r] : {std::pair{10.0, 8.0}, {10.0, 0.4}, {1000.0, 1.0}, {2.0, 1.9}}) {
        const TorusGeometry geom(R, r);
        for (int n : {8, 10, 64, 250, 512}) {
            CHECK(std::abs(total_curvature(geom, Grid(n))) <= 1e-12);
        }
    }
}

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(Grid(7), std::invalid_argument);
    CHECK_THROWS_AS(Grid(6), std::invalid_argument);
    CHECK_THROWS_AS(Grid(0), std::invalid_argument);
    const Grid grid(8);
    CHECK(grid.spacing() == doctest::Approx(kPi / 4));
    CHECK(grid.node(0) == 0.0);
    CHECK(grid.midpoint(7) == doctest::Approx(2 * kPi - kPi / 8));
}
