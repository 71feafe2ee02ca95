#include "fivebar/motion.hpp"

#include <cmath>
#include <string>

#include "fivebar/errors.hpp"

namespace fivebar {

double MotionProfile::theta2_at(std::size_t i) const {
    return phase + kTwoPi * static_cast<double>(i) / static_cast<double>(values.size());
}

double MotionProfile::time_step() const {
    return kTwoPi / (cv_speed * static_cast<double>(values.size()));
}

double infer_cycle_advance(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const double first = values.front();
    const double last = values.back();
    const double next_cycle = last + angle_difference(first, last);
    return kTwoPi * std::round((next_cycle - first) / kTwoPi);
}

ProfileDerivatives differentiate(const MotionProfile& profile) {
    const std::size_t k = profile.size();
    if (k < 4) {
        throw ProfileTooShort("profile needs at least 4 samples, got " + std::to_string(k));
    }
    if (!(profile.cv_speed > 0.0)) throw InputError("profile cv_speed must be positive");

    const double dt = profile.time_step();
    const auto& x = profile.values;
    const double adv = profile.cycle_advance;
    auto at = [&](std::ptrdiff_t i) {
        const auto n = static_cast<std::ptrdiff_t>(k);
        if (i < 0) return x[static_cast<std::size_t>(i + n)] - adv;
        if (i >= n) return x[static_cast<std::size_t>(i - n)] + adv;
        return x[static_cast<std::size_t>(i)];
    };

    ProfileDerivatives out;
    out.velocity.resize(k);
    out.acceleration.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto si = static_cast<std::ptrdiff_t>(i);
        const double prev = at(si - 1);
        const double next = at(si + 1);
        out.velocity[i] = (next - prev) / (2.0 * dt);
        out.acceleration[i] = (next - 2.0 * x[i] + prev) / (dt * dt);
    }
    return out;
}

double Harmonic::magnitude() const { return std::hypot(a, b); }

HarmonicSpectrum fourier(std::span<const double> values, std::size_t n) {
    const std::size_t k = values.size();
    if (n == 0) throw InputError("harmonic count must be at least 1");
    if (2 * n >= k) {
        throw HarmonicOverflow("need n < k/2, got n=" + std::to_string(n) +
                               " k=" + std::to_string(k));
    }
    // Twiddle table indexed by (j*i) mod k keeps every phase exact.
    std::vector<double> cos_table(k);
    std::vector<double> sin_table(k);
    for (std::size_t m = 0; m < k; ++m) {
        const double angle = kTwoPi * static_cast<double>(m) / static_cast<double>(k);
        cos_table[m] = std::cos(angle);
        sin_table[m] = std::sin(angle);
    }

    HarmonicSpectrum spectrum;
    spectrum.coefficients.resize(n);
    const double scale = 2.0 / static_cast<double>(k);
    for (std::size_t j = 1; j <= n; ++j) {
        double a = 0.0;
        double b = 0.0;
        std::size_t m = 0;
        for (std::size_t i = 0; i < k; ++i) {
            a += values[i] * cos_table[m];
            b += values[i] * sin_table[m];
            m += j;
            if (m >= k) m -= k;
        }
        spectrum.coefficients[j - 1] = {scale * a, scale * b};
    }
    return spectrum;
}

}  // namespace fivebar
