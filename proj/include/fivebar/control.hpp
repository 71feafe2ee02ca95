#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fivebar/dynamics.hpp"
#include "fivebar/mechanism.hpp"
#include "fivebar/motion.hpp"

namespace fivebar {

// Output stage: 12-bit signed DAC, 10 V full scale.
inline constexpr double kDacHalfRange = 2048.0;
inline constexpr double kFullScaleVolts = 10.0;

// Integer-scaled gains of the position loop. Every term is divided by
// `divisor` before the DAC scaling.
struct ControllerGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double kv = 0.0;
    double kf = 0.0;
    double divisor = 256.0;

    void validate() const;
    friend bool operator==(const ControllerGains&, const ControllerGains&) = default;
};

// V = clamp((Kp e + Ki sum_e + Kd (e - e_prev) - Kv (p - p_prev) + Kf (d - d_prev))
//           / divisor * 10 / 2048, -10, 10). All inputs in resolver counts;
// error_sum already includes e.
double controller_step(const ControllerGains& gains, double e, double error_sum, double e_prev,
                       double p, double p_prev, double d, double d_prev);

// floor(angle / 2pi * resolution); keeps counting across revolutions.
std::int64_t quantize(double angle, double resolution = kCountsPerRev);

struct AxisPlant {
    double amplifier_gain = 0.5;     // N m / V
    double rotor_inertia = 1e-4;     // kg m^2
    double viscous_friction = 0.01;  // N m s / rad

    friend bool operator==(const AxisPlant&, const AxisPlant&) = default;
};

struct PlantConfig {
    AxisPlant cv;
    AxisPlant servo;
    InertialParams linkage;
    double sample_period = 1e-3;        // s
    double resolution = kCountsPerRev;  // counts / rev
    double cv_demand_cps = 4096.0;      // CV ramp, counts / s; 0 holds the CV still
    Assembly assembly = Assembly::left;
    // false: each axis sees only its rotor and its own crank, no linkage.
    bool coupled = true;

    void validate() const;
    std::size_t samples_per_cycle() const;
    friend bool operator==(const PlantConfig&, const PlantConfig&) = default;
};

// Rigid-body state of the machine, advanced by semi-implicit Euler.
class MachinePlant {
public:
    MachinePlant(const MechanismDims& dims, const PlantConfig& config, JointVector positions,
                 JointVector rates);

    JointVector positions() const { return q_; }
    JointVector rates() const { return rates_; }
    Point effector() const { return effector_; }

    // Holds the motor torques over one sample period. Throws
    // UnstableSimulation (tagged with `sample`) if the linkage stops
    // assembling or the state blows up.
    void step(JointVector motor_torque, std::size_t sample = 0);

    // Kinetic energy of rotors and links plus linkage potential energy (J).
    double mechanical_energy() const;

private:
    JointMatrix inertia() const;

    MechanismDims dims_;
    PlantConfig config_;
    FiveBarDynamics model_;
    JointVector q_;
    JointVector rates_;
    Point effector_;
};

struct AxisLogSample {
    double t = 0.0;
    std::int64_t demand = 0;
    std::int64_t measured = 0;
    std::int64_t error = 0;
    double demand_cps = 0.0;
    double measured_cps = 0.0;
    double volts = 0.0;
};

struct SimLog {
    std::vector<AxisLogSample> cv;
    std::vector<AxisLogSample> servo;
    std::size_t samples_per_cycle = 0;
};

// Closed-loop run of both axes for `cycles` CV revolutions. The CV axis
// follows a constant-velocity ramp, the servo axis follows `servo_profile`
// indexed by the CV demand phase. Throws UnstableSimulation when a position
// error exceeds 1e6 counts or the linkage loses assembly.
SimLog simulate(const MechanismDims& dims, const PlantConfig& plant,
                const ControllerGains& gains_cv, const ControllerGains& gains_servo,
                const MotionProfile& servo_profile, std::size_t cycles);

// Servo demand angle at CV phase theta2 (periodic cubic interpolation).
double profile_at(const MotionProfile& profile, double theta2);

// Pearson correlation of each cycle's error trace with the next one, after
// dropping `skip_cycles` leading cycles.
std::vector<double> cycle_correlations(std::span<const AxisLogSample> log,
                                       std::size_t samples_per_cycle, std::size_t skip_cycles);

}  // namespace fivebar
