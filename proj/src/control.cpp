#include "fivebar/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fivebar/errors.hpp"

namespace fivebar {

namespace {

constexpr double kDivergenceCounts = 1e6;
constexpr double kMmToM = 1e-3;

Point initial_effector(const MechanismDims& dims, JointVector q, Assembly assembly,
                       std::size_t sample) {
    const Point a = crank_tip(dims.cv_ground, dims.p, q[0]);
    const Point b = crank_tip(dims.servo_ground, dims.s, q[1]);
    const Point v = b - a;
    const double d = norm(v);
    if (d <= 0.0 || d > dims.q + dims.r || d < std::abs(dims.q - dims.r)) {
        throw UnstableSimulation("linkage cannot assemble at the initial state", sample);
    }
    const double along = (dims.q * dims.q - dims.r * dims.r + d * d) / (2.0 * d);
    const double h = std::sqrt(std::max(0.0, dims.q * dims.q - along * along));
    const Point u = (1.0 / d) * v;
    const Point perp{-u.y, u.x};
    const double side = assembly == Assembly::left ? 1.0 : -1.0;
    return a + along * u + side * h * perp;
}

double crank_inertia(double mass_per_length, double length_mm) {
    const double l = kMmToM * length_mm;
    return mass_per_length * l * l * l / 3.0;
}

}  // namespace

void ControllerGains::validate() const {
    for (double g : {kp, ki, kd, kv, kf, divisor}) {
        if (!std::isfinite(g)) throw InputError("controller gains must be finite");
    }
    if (kp < 0.0) throw InputError("K_P must be >= 0");
    if (divisor == 0.0) throw InputError("gain divisor must be non-zero");
}

double controller_step(const ControllerGains& gains, double e, double error_sum, double e_prev,
                       double p, double p_prev, double d, double d_prev) {
    const double raw = (gains.kp * e + gains.ki * error_sum + gains.kd * (e - e_prev) -
                        gains.kv * (p - p_prev) + gains.kf * (d - d_prev)) /
                       gains.divisor;
    const double volts = raw * (kFullScaleVolts / kDacHalfRange);
    return std::clamp(volts, -kFullScaleVolts, kFullScaleVolts);
}

std::int64_t quantize(double angle, double resolution) {
    return static_cast<std::int64_t>(std::floor(angle / kTwoPi * resolution));
}

void PlantConfig::validate() const {
    if (!(sample_period > 0.0) || !std::isfinite(sample_period)) {
        throw InputError("sample_period must be positive");
    }
    if (!(resolution >= 1.0)) throw InputError("resolution must be >= 1");
    if (!(cv_demand_cps >= 0.0) || !std::isfinite(cv_demand_cps)) {
        throw InputError("cv_demand_cps must be >= 0");
    }
    for (const AxisPlant* axis : {&cv, &servo}) {
        if (!(axis->rotor_inertia > 0.0)) throw InputError("rotor inertia must be positive");
        if (!(axis->viscous_friction >= 0.0)) throw InputError("friction must be >= 0");
        if (!std::isfinite(axis->amplifier_gain)) throw InputError("amplifier gain must be finite");
    }
    linkage.validate();
}

std::size_t PlantConfig::samples_per_cycle() const {
    // A stationary CV has no revolution; one second stands in for a cycle.
    if (cv_demand_cps == 0.0) return static_cast<std::size_t>(std::llround(1.0 / sample_period));
    return static_cast<std::size_t>(std::llround(resolution / cv_demand_cps / sample_period));
}

MachinePlant::MachinePlant(const MechanismDims& dims, const PlantConfig& config,
                           JointVector positions, JointVector rates)
    : dims_(dims), config_(config), model_(dims, config.linkage), q_(positions), rates_(rates) {
    config_.validate();
    if (config_.coupled) effector_ = initial_effector(dims_, q_, config_.assembly, 0);
}

JointMatrix MachinePlant::inertia() const {
    JointMatrix m{};
    if (config_.coupled) {
        m = model_.mass_matrix(q_, effector_);
    } else {
        m[0][0] = crank_inertia(config_.linkage.mass_per_length, dims_.p);
        m[1][1] = crank_inertia(config_.linkage.mass_per_length, dims_.s);
    }
    m[0][0] += config_.cv.rotor_inertia;
    m[1][1] += config_.servo.rotor_inertia;
    return m;
}

void MachinePlant::step(JointVector motor_torque, std::size_t sample) {
    JointVector bias{};
    JointMatrix m{};
    try {
        m = inertia();
        if (config_.coupled) bias = model_.bias_forces(q_, rates_, effector_);
    } catch (const ImmobileTrace&) {
        throw UnstableSimulation("linkage lost assembly at sample " + std::to_string(sample), sample);
    }

    const JointVector force{
        motor_torque[0] - config_.cv.viscous_friction * rates_[0] - bias[0],
        motor_torque[1] - config_.servo.viscous_friction * rates_[1] - bias[1]};
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const JointVector accel{(m[1][1] * force[0] - m[0][1] * force[1]) / det,
                            (m[0][0] * force[1] - m[1][0] * force[0]) / det};

    const double dt = config_.sample_period;
    for (std::size_t k = 0; k < 2; ++k) {
        rates_[k] += dt * accel[k];
        q_[k] += dt * rates_[k];
    }
    if (!std::isfinite(q_[0]) || !std::isfinite(q_[1])) {
        throw UnstableSimulation("plant state diverged at sample " + std::to_string(sample), sample);
    }
    if (config_.coupled) {
        const std::optional<Point> e = model_.effector(q_, effector_);
        if (!e) {
            throw UnstableSimulation("linkage lost assembly at sample " + std::to_string(sample),
                                     sample);
        }
        effector_ = *e;
    }
}

double MachinePlant::mechanical_energy() const {
    const JointMatrix m = inertia();
    double kinetic = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < 2; ++k) kinetic += 0.5 * rates_[i] * m[i][k] * rates_[k];
    }
    const double potential = config_.coupled ? model_.potential_energy(q_, effector_) : 0.0;
    return kinetic + potential;
}

double profile_at(const MotionProfile& profile, double theta2) {
    const std::size_t k = profile.size();
    const double position = (theta2 - profile.phase) / kTwoPi * static_cast<double>(k);
    const double base = std::floor(position);
    const double t = position - base;
    const auto i0 = static_cast<std::int64_t>(base);
    const auto n = static_cast<std::int64_t>(k);
    auto sample = [&](std::int64_t i) {
        const std::int64_t cycle = (i >= 0 ? i : i - n + 1) / n;
        const std::int64_t idx = i - cycle * n;
        return profile.values[static_cast<std::size_t>(idx)] +
               static_cast<double>(cycle) * profile.cycle_advance;
    };
    // Catmull-Rom through the four neighbouring samples.
    const double p0 = sample(i0 - 1);
    const double p1 = sample(i0);
    const double p2 = sample(i0 + 1);
    const double p3 = sample(i0 + 2);
    return p1 + 0.5 * t *
                    (p2 - p0 +
                     t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
}

namespace {

struct AxisLoop {
    ControllerGains gains;
    double error_sum = 0.0;
    double sum_limit = 0.0;
    std::int64_t e_prev = 0;
    std::int64_t p_prev = 0;
    std::int64_t d_prev = 0;
    bool first = true;

    explicit AxisLoop(const ControllerGains& g) : gains(g) {
        sum_limit = g.ki != 0.0 ? std::abs(g.divisor * kDacHalfRange / g.ki) : 0.0;
    }

    // Runs one controller sample and returns the log entry.
    AxisLogSample update(double t, std::int64_t d, std::int64_t p, double dt) {
        if (first) {
            e_prev = d - p;
            p_prev = p;
            d_prev = d;
            first = false;
        }
        const std::int64_t e = d - p;
        error_sum += static_cast<double>(e);
        if (gains.ki != 0.0) error_sum = std::clamp(error_sum, -sum_limit, sum_limit);

        AxisLogSample s;
        s.t = t;
        s.demand = d;
        s.measured = p;
        s.error = e;
        s.demand_cps = static_cast<double>(d - d_prev) / dt;
        s.measured_cps = static_cast<double>(p - p_prev) / dt;
        s.volts = controller_step(gains, static_cast<double>(e), error_sum,
                                  static_cast<double>(e_prev), static_cast<double>(p),
                                  static_cast<double>(p_prev), static_cast<double>(d),
                                  static_cast<double>(d_prev));
        e_prev = e;
        p_prev = p;
        d_prev = d;
        return s;
    }
};

}  // namespace

SimLog simulate(const MechanismDims& dims, const PlantConfig& plant,
                const ControllerGains& gains_cv, const ControllerGains& gains_servo,
                const MotionProfile& servo_profile, std::size_t cycles) {
    dims.validate();
    plant.validate();
    gains_cv.validate();
    gains_servo.validate();
    if (servo_profile.size() < 4) throw InputError("servo profile needs at least 4 samples");
    if (cycles < 1) throw InputError("cycles must be >= 1");

    const double dt = plant.sample_period;
    const double res = plant.resolution;
    const double phase0 = servo_profile.phase;
    const std::int64_t cv_origin = quantize(phase0, res);

    MachinePlant machine(dims, plant, {phase0, servo_profile.values.front()}, {0.0, 0.0});
    AxisLoop cv_loop(gains_cv);
    AxisLoop servo_loop(gains_servo);

    SimLog log;
    log.samples_per_cycle = plant.samples_per_cycle();
    const std::size_t total = cycles * log.samples_per_cycle;
    log.cv.reserve(total);
    log.servo.reserve(total);

    for (std::size_t i = 0; i < total; ++i) {
        const double t = static_cast<double>(i) * dt;
        // Demand ramp in whole counts; the slack absorbs rounding of i*cps*dt.
        const double ramp = std::floor(static_cast<double>(i) * plant.cv_demand_cps * dt + 1e-9);
        const std::int64_t d_cv = cv_origin + static_cast<std::int64_t>(ramp);
        const double cv_phase = phase0 + kTwoPi * plant.cv_demand_cps * t / res;
        const std::int64_t d_servo = quantize(profile_at(servo_profile, cv_phase), res);

        const JointVector q = machine.positions();
        const AxisLogSample cv_sample = cv_loop.update(t, d_cv, quantize(q[0], res), dt);
        const AxisLogSample servo_sample = servo_loop.update(t, d_servo, quantize(q[1], res), dt);
        log.cv.push_back(cv_sample);
        log.servo.push_back(servo_sample);

        if (std::abs(static_cast<double>(cv_sample.error)) > kDivergenceCounts ||
            std::abs(static_cast<double>(servo_sample.error)) > kDivergenceCounts) {
            throw UnstableSimulation("position error exceeded 1e6 counts at sample " +
                                         std::to_string(i),
                                     i);
        }
        machine.step({plant.cv.amplifier_gain * cv_sample.volts,
                      plant.servo.amplifier_gain * servo_sample.volts},
                     i);
    }
    return log;
}

std::vector<double> cycle_correlations(std::span<const AxisLogSample> log,
                                       std::size_t samples_per_cycle, std::size_t skip_cycles) {
    std::vector<double> out;
    if (samples_per_cycle == 0) return out;
    const std::size_t cycles = log.size() / samples_per_cycle;
    auto error_at = [&](std::size_t c, std::size_t j) {
        return static_cast<double>(log[c * samples_per_cycle + j].error);
    };
    for (std::size_t c = skip_cycles; c + 1 < cycles; ++c) {
        double mean_a = 0.0;
        double mean_b = 0.0;
        for (std::size_t j = 0; j < samples_per_cycle; ++j) {
            mean_a += error_at(c, j);
            mean_b += error_at(c + 1, j);
        }
        mean_a /= static_cast<double>(samples_per_cycle);
        mean_b /= static_cast<double>(samples_per_cycle);
        double sab = 0.0;
        double saa = 0.0;
        double sbb = 0.0;
        for (std::size_t j = 0; j < samples_per_cycle; ++j) {
            const double a = error_at(c, j) - mean_a;
            const double b = error_at(c + 1, j) - mean_b;
            sab += a * b;
            saa += a * a;
            sbb += b * b;
        }
        if (saa == 0.0 || sbb == 0.0) {
            // Flat traces repeat exactly only if both are flat at the same level.
            out.push_back(saa == sbb && mean_a == mean_b ? 1.0 : 0.0);
        } else {
            out.push_back(sab / std::sqrt(saa * sbb));
        }
    }
    return out;
}

}  // namespace fivebar
