#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fivebar/errors.hpp"
#include "fivebar/motion.hpp"
#include "oracles.hpp"

using namespace fivebar;

namespace {

MotionProfile sampled(std::size_t k, double (*f)(double), double cv_speed = kTwoPi) {
    MotionProfile p;
    p.cv_speed = cv_speed;
    for (std::size_t i = 0; i < k; ++i) p.values.push_back(f(kTwoPi * static_cast<double>(i) / k));
    return p;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("constant profile has no motion and no harmonics") {
    MotionProfile p;
    p.values.assign(36, 0.7);
    const ProfileDerivatives d = differentiate(p);
    for (std::size_t i = 0; i < 36; ++i) {
        CHECK(d.velocity[i] == 0.0);
        CHECK(d.acceleration[i] == 0.0);
    }
    const HarmonicSpectrum s = fourier(p, 5);
    REQUIRE(s.size() == 5);
    for (const Harmonic& h : s.coefficients) CHECK(h.magnitude() < 1e-12);
}

TEST_CASE("sine profile differentiates to 2pi cos") {
    const MotionProfile p = sampled(360, [](double t) { return std::sin(t); });
    const ProfileDerivatives d = differentiate(p);
    for (std::size_t i = 0; i < 360; ++i) {
        const double t = kTwoPi * i / 360.0;
        CHECK(std::abs(d.velocity[i] - kTwoPi * std::cos(t)) <= 1e-3 * kTwoPi);
        CHECK(std::abs(d.acceleration[i] + kTwoPi * kTwoPi * std::sin(t)) <= 1e-3 * kTwoPi * kTwoPi);
    }
    CHECK(p.time_step() == doctest::Approx(1.0 / 360.0));
}

TEST_CASE("random smooth profiles against fourth-order differences") {
    // Second-order differences need fine sampling to sit within 1e-6 of the
    // fourth-order oracle.
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> amp(-0.5, 0.5);
    const std::size_t k = 20000;
    for (int trial = 0; trial < 5; ++trial) {
        double a[4];
        double b[4];
        for (int j = 0; j < 4; ++j) {
            a[j] = amp(rng);
            b[j] = amp(rng);
        }
        MotionProfile p;
        p.cv_speed = 3.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double t = kTwoPi * i / k;
            double v = 0.2;
            for (int j = 1; j <= 3; ++j) v += a[j] * std::cos(j * t) + b[j] * std::sin(j * t);
            p.values.push_back(v);
        }
        const ProfileDerivatives d = differentiate(p);
        const double dt = p.time_step();
        const std::vector<double> v_ref = oracle::fourth_order_first(p.values, dt);
        const std::vector<double> a_ref = oracle::fourth_order_second(p.values, dt);
        const double v_scale = max_abs(v_ref);
        const double a_scale = max_abs(a_ref);
        for (std::size_t i = 0; i < k; i += 7) {
            CHECK(std::abs(d.velocity[i] - v_ref[i]) <= 1e-6 * v_scale);
            CHECK(std::abs(d.acceleration[i] - a_ref[i]) <= 1e-6 * a_scale);
        }
    }
}

TEST_CASE("differentiation ignores a constant offset") {
    const MotionProfile p = sampled(64, [](double t) { return std::cos(2.0 * t) + 0.3 * std::sin(t); });
    MotionProfile shifted = p;
    for (double& v : shifted.values) v += 4.0;
    const ProfileDerivatives a = differentiate(p);
    const ProfileDerivatives b = differentiate(shifted);
    for (std::size_t i = 0; i < 64; ++i) {
        CHECK(a.velocity[i] == doctest::Approx(b.velocity[i]).epsilon(1e-9));
        CHECK(a.acceleration[i] == doctest::Approx(b.acceleration[i]).epsilon(1e-9));
    }
}

TEST_CASE("a fully rotating crank differentiates across the wrap") {
    MotionProfile p;
    const std::size_t k = 180;
    for (std::size_t i = 0; i < k; ++i) {
        const double t = kTwoPi * i / k;
        p.values.push_back(t + 0.1 * std::sin(t));
    }
    p.cycle_advance = infer_cycle_advance(p.values);
    CHECK(p.cycle_advance == doctest::Approx(kTwoPi));
    const ProfileDerivatives d = differentiate(p);
    for (std::size_t i = 0; i < k; ++i) {
        const double t = kTwoPi * i / k;
        CHECK(d.velocity[i] == doctest::Approx(kTwoPi * (1.0 + 0.1 * std::cos(t))).epsilon(1e-3));
    }
}

TEST_CASE("differentiate needs four samples") {
    MotionProfile p;
    p.values = {0.0, 1.0, 2.0};
    CHECK_THROWS_AS(differentiate(p), ProfileTooShort);
}

TEST_CASE("single harmonic") {
    const MotionProfile p = sampled(360, [](double t) { return 3.0 * std::sin(t); });
    const HarmonicSpectrum s = fourier(p, 4);
    CHECK(s.coefficients[0].b == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(s.coefficients[0].a) < 1e-9);
    for (std::size_t j = 1; j < 4; ++j) {
        CHECK(std::abs(s.coefficients[j].a) < 1e-9);
        CHECK(std::abs(s.coefficients[j].b) < 1e-9);
    }
}

TEST_CASE("spectra match literal summation") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (std::size_t k : {7u, 16u, 72u, 361u}) {
        std::vector<double> x(k);
        for (double& v : x) v = u(rng);
        const std::size_t n = (k - 1) / 2;
        const HarmonicSpectrum s = fourier(x, n);
        const auto ref = oracle::literal_dft(x, n);
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(std::abs(s.coefficients[j].a - ref[j].a) < 1e-9);
            CHECK(std::abs(s.coefficients[j].b - ref[j].b) < 1e-9);
        }
    }
}

TEST_CASE("known spectrum is recovered") {
    const std::size_t k = 128;
    const double a[] = {0.0, 1.25, -0.5, 0.0, 2.0, 0.125};
    const double b[] = {0.0, -0.75, 0.0, 1.5, -0.25, 0.0};
    std::vector<double> x(k, 0.9);
    for (std::size_t i = 0; i < k; ++i) {
        const double t = kTwoPi * i / k;
        for (int j = 1; j <= 5; ++j) x[i] += a[j] * std::cos(j * t) + b[j] * std::sin(j * t);
    }
    const HarmonicSpectrum s = fourier(x, 8);
    for (int j = 1; j <= 8; ++j) {
        const double ea = j <= 5 ? a[j] : 0.0;
        const double eb = j <= 5 ? b[j] : 0.0;
        CHECK(std::abs(s.coefficients[j - 1].a - ea) < 1e-9);
        CHECK(std::abs(s.coefficients[j - 1].b - eb) < 1e-9);
    }
}

TEST_CASE("harmonic count limits") {
    std::vector<double> x(10, 1.0);
    CHECK_THROWS_AS(fourier(x, 5), HarmonicOverflow);
    CHECK_NOTHROW(fourier(x, 4));
    CHECK_THROWS_AS(fourier(x, 0), InputError);
}

TEST_CASE("resolver conversions") {
    CHECK(counts_to_degrees(1135.0) == doctest::Approx(99.76).epsilon(0.005 / 99.76));
    CHECK(std::abs(counts_to_degrees(1135.0) - 99.76) <= 0.005);
    CHECK(std::abs(counts_per_sec_to_rad_per_sec(3072.0) - 4.71) <= 0.005);
    CHECK(std::abs(counts_per_sec_to_rad_per_sec(-12288.0) + 18.85) <= 0.005);
    CHECK(counts_per_sec_to_rpm(4096.0) == 60.0);
    CHECK(counts_to_degrees(4096.0) == 360.0);

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> counts(-100000, 100000);
    for (int i = 0; i < 200; ++i) {
        const double a = counts(rng);
        const double b = counts(rng);
        CHECK(counts_to_degrees(a + b) == counts_to_degrees(a) + counts_to_degrees(b));
        CHECK(counts_per_sec_to_rpm(a + b) == counts_per_sec_to_rpm(a) + counts_per_sec_to_rpm(b));
        const double fa = counts_per_sec_to_rad_per_sec(a);
        const double fb = counts_per_sec_to_rad_per_sec(b);
        CHECK(std::abs(counts_per_sec_to_rad_per_sec(a + b) - fa - fb) <= 4e-16 * (std::abs(fa) + std::abs(fb)));
    }
}
