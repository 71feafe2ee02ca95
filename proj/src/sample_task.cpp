#include "fivebar/sample_task.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fivebar/errors.hpp"

namespace fivebar {

namespace {

constexpr double kDemoRise = 285.0;
constexpr double kDemoStroke = 99.78;
// Resolver zero relative to the x axis.
constexpr double kDemoZero = -55.0;

double cycloid(double x) { return x - std::sin(kTwoPi * x) / kTwoPi; }

}  // namespace

MechanismDims reference_mechanism() {
    MechanismDims dims;
    dims.p = 150.0;
    dims.q = 250.0;
    dims.r = 300.0;
    dims.s = 150.0;
    dims.cv_ground = {0.0, 0.0};
    dims.servo_ground = {250.0, 0.0};
    return dims;
}

double demo_servo_angle(double theta2) {
    const double stroke = radians(kDemoStroke);
    const double rise = radians(kDemoRise);
    double t = std::fmod(theta2, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    const double zero = radians(kDemoZero);
    if (t < rise) return zero + stroke * cycloid(t / rise);
    return zero + stroke * (1.0 - cycloid((t - rise) / (kTwoPi - rise)));
}

TaskSpec round_trip_task(const MechanismDims& dims, const std::function<double(double)>& servo_angle,
                         std::size_t k, double cv_speed, Assembly assembly) {
    dims.validate();
    TaskSpec task;
    task.cv_speed = cv_speed;
    task.samples.reserve(k);
    const double side = assembly == Assembly::left ? 1.0 : -1.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double theta2 = kTwoPi * static_cast<double>(i) / static_cast<double>(k);
        const Point a = crank_tip(dims.cv_ground, dims.p, theta2);
        const Point b = crank_tip(dims.servo_ground, dims.s, servo_angle(theta2));
        const Point v = b - a;
        const double d = norm(v);
        if (d <= 0.0 || d > dims.q + dims.r || d < std::abs(dims.q - dims.r)) {
            throw InputError("linkage cannot assemble at sample " + std::to_string(i));
        }
        const double along = (dims.q * dims.q - dims.r * dims.r + d * d) / (2.0 * d);
        const double h = std::sqrt(std::max(0.0, dims.q * dims.q - along * along));
        const Point u = (1.0 / d) * v;
        const Point perp{-u.y, u.x};
        task.samples.push_back({theta2, a + along * u + side * h * perp});
    }
    return task;
}

TaskSpec sample_task(std::size_t k) {
    return round_trip_task(reference_mechanism(), demo_servo_angle, k, kTwoPi);
}

}  // namespace fivebar
