#pragma once

#include <cstddef>
#include <functional>

#include "fivebar/mechanism.hpp"

namespace fivebar {

// p = 150, q = 250, r = 300, s = 150, CV at (0, 0), servo at (250, 0).
MechanismDims reference_mechanism();

// Rise-return servo motion used by the demo task: cycloidal rise of 99.78 deg
// over theta2 in [0, 285 deg), cycloidal return over the rest. The stroke
// starts at -55 deg, which keeps q and r well away from collinear.
double demo_servo_angle(double theta2);

// Forward kinematics: the effector points a mechanism traces when its servo
// crank follows servo_angle(theta2), sampled at k uniform CV angles from 0.
// Throws InputError if the linkage cannot assemble at some sample.
TaskSpec round_trip_task(const MechanismDims& dims, const std::function<double(double)>& servo_angle,
                         std::size_t k, double cv_speed, Assembly assembly = Assembly::left);

// The shipped demo: reference mechanism, demo_servo_angle, 60 rpm.
TaskSpec sample_task(std::size_t k = 72);

}  // namespace fivebar
