#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fivebar/geometry.hpp"

namespace fivebar {

// One cycle of an angle sampled at uniform CV-input spacing. Sample i sits
// at theta2 = phase + 2*pi*i/k. The profile is periodic up to
// cycle_advance, the net angle gained per cycle (2*pi*N for a crank that
// rotates fully, 0 for one that oscillates).
struct MotionProfile {
    std::vector<double> values;
    double cv_speed = kTwoPi;  // rad/s
    double phase = 0.0;
    double cycle_advance = 0.0;

    std::size_t size() const { return values.size(); }
    double theta2_at(std::size_t i) const;
    // Time between samples, 2*pi / (cv_speed * k).
    double time_step() const;
};

// Net angle per cycle of a sampled crank angle: the multiple of 2*pi that
// carries the last sample onto the first with the shortest rotation.
double infer_cycle_advance(std::span<const double> values);

struct ProfileDerivatives {
    std::vector<double> velocity;      // rad/s
    std::vector<double> acceleration;  // rad/s^2
};

// Second-order periodic central differences. Throws ProfileTooShort for k < 4.
ProfileDerivatives differentiate(const MotionProfile& profile);

struct Harmonic {
    double a = 0.0;
    double b = 0.0;
    double magnitude() const;
};

// Harmonics 1..n; index 0 of `coefficients` is harmonic 1. DC is excluded.
struct HarmonicSpectrum {
    std::vector<Harmonic> coefficients;
    std::size_t size() const { return coefficients.size(); }
};

// a_j = 2/k sum x_i cos(2 pi j i / k), b_j likewise with sin.
// Throws HarmonicOverflow unless n < k/2.
HarmonicSpectrum fourier(std::span<const double> values, std::size_t n);
inline HarmonicSpectrum fourier(const MotionProfile& profile, std::size_t n) {
    return fourier(profile.values, n);
}

inline constexpr double kCountsPerRev = 4096.0;

constexpr double counts_to_degrees(double counts, double counts_per_rev = kCountsPerRev) {
    return counts * 360.0 / counts_per_rev;
}
constexpr double counts_per_sec_to_rad_per_sec(double cps, double counts_per_rev = kCountsPerRev) {
    return cps * kTwoPi / counts_per_rev;
}
constexpr double counts_per_sec_to_rpm(double cps, double counts_per_rev = kCountsPerRev) {
    return cps * 60.0 / counts_per_rev;
}

}  // namespace fivebar
