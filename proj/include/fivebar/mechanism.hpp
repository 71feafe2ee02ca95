#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fivebar/geometry.hpp"

namespace fivebar {

// Five-bar with a constant-velocity crank p about cv_ground and a servo
// crank s about servo_ground. q joins the tip of p to the effector, r joins
// the effector to the tip of s. Lengths in mm.
struct MechanismDims {
    double p = 0.0;
    double q = 0.0;
    double r = 0.0;
    double s = 0.0;
    Point cv_ground{};
    Point servo_ground{};

    // Virtual ground link t.
    double ground_length() const { return distance(cv_ground, servo_ground); }

    // Throws InputError unless every link length is finite and positive.
    void validate() const;

    friend bool operator==(const MechanismDims&, const MechanismDims&) = default;
};

// Precision point: desired effector position at a CV input angle.
struct TaskSample {
    double theta2 = 0.0;
    Point desired{};

    friend bool operator==(const TaskSample&, const TaskSample&) = default;
};

struct TaskSpec {
    std::vector<TaskSample> samples;
    double cv_speed = kTwoPi;  // rad/s

    std::size_t size() const { return samples.size(); }

    // k >= 3, theta2 strictly increasing inside [0, 2pi), cv_speed > 0.
    void validate() const;

    friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct PoseSample {
    double theta2 = 0.0;
    double theta3 = 0.0;
    double theta4 = 0.0;  // link r, from servo crank tip toward the effector
    double theta5 = 0.0;  // unwrapped along the trace
    Point actual{};
    double structural_error = 0.0;
    bool mobile = true;
};

struct ClosureTrace {
    std::vector<PoseSample> poses;
    std::size_t immobile_count = 0;  // m
    int branch_id = 0;

    std::size_t size() const { return poses.size(); }
    std::vector<double> servo_angles() const;
};

// Zero, one or two servo crank angles closing the r-s dyad.
class DyadClosures {
public:
    DyadClosures() = default;
    explicit DyadClosures(double a) : angles_{a, 0.0}, count_(1) {}
    DyadClosures(double a, double b) : angles_{a, b}, count_(2) {}

    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }
    double operator[](std::size_t i) const { return angles_[i]; }
    const double* begin() const { return angles_.data(); }
    const double* end() const { return angles_.data() + count_; }

private:
    std::array<double, 2> angles_{};
    std::size_t count_ = 0;
};

struct InputDyadSolution {
    double theta3 = 0.0;
    Point actual{};
    double structural_error = 0.0;
};

// Which circle intersection the q-r dyad assembles on, seen along the line
// from the tip of p to the tip of s.
enum class Assembly { left, right };

// Baseline for the swept-area term: displacement about the cycle mean, or
// the raw angle as printed in the original root-sum-square.
enum class SweptMode { centered, raw };

// Controls how the better of the two tracked branches is chosen.
struct TrackingOptions {
    double swept_weight = 0.75;
    double harmonic_weight = 0.5;
    std::size_t n_harmonics = 10;
    SweptMode swept_mode = SweptMode::centered;
};

Point crank_tip(Point ground, double length, double angle);

// Throws DegenerateTarget when the desired point sits on the tip of p.
InputDyadSolution solve_input_dyad(const MechanismDims& dims, double theta2, Point desired);

// Candidates are ordered: [0] = elbow on the counter-clockwise side of the
// servo-ground -> effector line, [1] = clockwise side. A single candidate is
// returned when the dyad is fully stretched or folded.
DyadClosures solve_closing_dyad(const MechanismDims& dims, Point effector);

// Tracks both starting closures by angular continuity and keeps the one with
// the lower weighted swept + harmonic score (ties -> lower swept).
ClosureTrace track_closure(const MechanismDims& dims, const TaskSpec& task,
                           const TrackingOptions& options = {});

// Side of the tip-of-p -> tip-of-s line the effector sits on at (theta2, theta5).
Assembly assembly_side(const MechanismDims& dims, double theta2, double theta5, Point effector);

// Harmonic count usable for a k-sample profile given a requested count.
std::size_t usable_harmonics(std::size_t requested, std::size_t k);

}  // namespace fivebar
