#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "fivebar/execution.hpp"
#include "fivebar/mechanism.hpp"
#include "fivebar/motion.hpp"

namespace fivebar {

// Uniform slender rods for p, q, r, s plus an optional point mass at the
// effector. Gravity in m/s^2; zero means the linkage moves in a horizontal
// plane.
struct InertialParams {
    double mass_per_length = 1.0;  // kg/m
    double effector_mass = 0.0;    // kg
    Point gravity{};

    void validate() const;
    friend bool operator==(const InertialParams&, const InertialParams&) = default;
};

// Generalized coordinates are (theta2, theta5); index 0 is the CV axis.
using JointVector = std::array<double, 2>;
using JointMatrix = std::array<std::array<double, 2>, 2>;

// Lagrangian model of the two-input linkage. Positions are in mm at the
// interface and converted to SI inside, so energies are in J and torques in
// N m. The effector assembly is picked by a hint point (mm): the circle
// intersection nearest to it.
class FiveBarDynamics {
public:
    FiveBarDynamics(const MechanismDims& dims, const InertialParams& inertial);

    const MechanismDims& dims() const { return dims_; }
    const InertialParams& inertial() const { return inertial_; }

    std::optional<Point> effector(JointVector q, Point hint) const;

    // The methods below throw ImmobileTrace when the linkage cannot assemble
    // (or sits on a singular configuration) at q.
    JointMatrix mass_matrix(JointVector q, Point hint) const;
    double kinetic_energy(JointVector q, JointVector rates, Point hint) const;
    double potential_energy(JointVector q, Point hint) const;
    // d/dt(dT/dqdot) - dT/dq + dV/dq with zero joint acceleration.
    JointVector bias_forces(JointVector q, JointVector rates, Point hint) const;
    JointVector generalized_forces(JointVector q, JointVector rates, JointVector accels,
                                   Point hint) const;

    // Finite-difference step in each coordinate (rad).
    static constexpr double kCoordinateStep = 1e-6;

private:
    struct Terms {
        JointMatrix rods{};
        JointMatrix point{};
    };
    struct Potential {
        double rods = 0.0;
        double point = 0.0;
    };
    struct Split {
        JointVector rods{};
        JointVector point{};
    };

    Terms mass_terms(JointVector q, Point hint) const;
    Potential potential_terms(JointVector q, Point hint) const;
    Split bias_terms(JointVector q, JointVector rates, Point hint) const;
    JointVector combine(const Split& split) const;

    MechanismDims dims_;
    InertialParams inertial_;
};

struct TorqueProfile {
    std::vector<double> theta2;
    std::vector<double> tau_cv;     // N m
    std::vector<double> tau_servo;  // N m

    std::size_t size() const { return theta2.size(); }
};

struct TorqueSummary {
    double min = 0.0;
    double max = 0.0;
    double rms = 0.0;
};

struct MotorTorqueSummary {
    TorqueSummary cv;
    TorqueSummary servo;
};

// Servo crank profile of a trace sampled at uniform theta2 spacing. Throws
// InputError when the spacing is not uniform.
MotionProfile servo_profile(const ClosureTrace& trace, double cv_speed);

// Motor torques along a fully mobile trace with the CV crank at cv_speed.
// Throws ImmobileTrace when m > 0.
TorqueProfile inverse_dynamics(const MechanismDims& dims, const InertialParams& inertial,
                               const ClosureTrace& trace, double cv_speed,
                               Execution execution = Execution::parallel);

TorqueSummary torque_summary(std::span<const double> torques);
MotorTorqueSummary torque_summary(const TorqueProfile& profile);

}  // namespace fivebar
