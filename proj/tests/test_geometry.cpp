#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fivebar/geometry.hpp"

using namespace fivebar;

TEST_CASE("wrap_angle lands in (-pi, pi]") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(3.0 * kPi / 2.0) == doctest::Approx(-kPi / 2.0));
    CHECK(wrap_angle(7.0 * kTwoPi + 0.25) == doctest::Approx(0.25));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-100.0, 100.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = dist(rng);
        const double w = wrap_angle(a);
        CHECK(w > -kPi);
        CHECK(w <= kPi);
        const double turns = (a - w) / kTwoPi;
        CHECK(std::abs(turns - std::round(turns)) < 1e-9);
    }
}

TEST_CASE("angle_difference is the short way round") {
    CHECK(angle_difference(0.1, -0.1) == doctest::Approx(0.2));
    CHECK(angle_difference(-kPi + 0.1, kPi - 0.1) == doctest::Approx(0.2));
    CHECK(angle_difference(kPi - 0.1, -kPi + 0.1) == doctest::Approx(-0.2));
}

TEST_CASE("vector helpers") {
    const Point a{3.0, 4.0};
    CHECK(norm(a) == 5.0);
    CHECK(distance(a, Point{0.0, 0.0}) == 5.0);
    CHECK(dot(a, Point{1.0, 0.0}) == 3.0);
    CHECK(cross(Point{1.0, 0.0}, Point{0.0, 1.0}) == 1.0);
    CHECK(heading(Point{0.0, 2.0}) == doctest::Approx(kPi / 2.0));
    CHECK(unit(kPi).x == doctest::Approx(-1.0));
    CHECK(degrees(kPi) == doctest::Approx(180.0));
    CHECK(radians(90.0) == doctest::Approx(kPi / 2.0));
}
