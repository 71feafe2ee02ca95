#include "fivebar/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "fivebar/errors.hpp"
#include "fivebar/motion.hpp"
#include "fivebar/objective.hpp"

namespace fivebar {

namespace {

constexpr double kCoincidentTolerance = 1e-9;
// Slack on the law-of-cosines ratio before a dyad is declared unable to close.
constexpr double kCosineSlack = 1e-12;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

struct BranchTrace {
    std::vector<double> theta5;  // unwrapped
    std::vector<bool> mobile;
};

BranchTrace follow_branch(std::span<const Point> effectors, std::span<const DyadClosures> closures,
                          Point servo_ground, std::size_t start_branch) {
    BranchTrace out;
    out.theta5.reserve(effectors.size());
    out.mobile.reserve(effectors.size());

    std::optional<double> prev;
    for (std::size_t i = 0; i < effectors.size(); ++i) {
        const DyadClosures& cands = closures[i];
        double chosen = 0.0;
        if (cands.empty()) {
            chosen = heading(effectors[i] - servo_ground);
        } else if (!prev) {
            chosen = cands[std::min(start_branch, cands.size() - 1)];
        } else {
            double best = std::abs(angle_difference(cands[0], *prev));
            chosen = cands[0];
            for (std::size_t c = 1; c < cands.size(); ++c) {
                double d = std::abs(angle_difference(cands[c], *prev));
                if (d < best) {
                    best = d;
                    chosen = cands[c];
                }
            }
        }
        double unwrapped = prev ? *prev + angle_difference(chosen, *prev) : wrap_angle(chosen);
        out.theta5.push_back(unwrapped);
        out.mobile.push_back(!cands.empty());
        prev = unwrapped;
    }
    return out;
}

}  // namespace

void MechanismDims::validate() const {
    if (!finite_positive(p) || !finite_positive(q) || !finite_positive(r) || !finite_positive(s)) {
        throw InputError("mechanism link lengths must be finite and positive");
    }
    if (!std::isfinite(cv_ground.x) || !std::isfinite(cv_ground.y) ||
        !std::isfinite(servo_ground.x) || !std::isfinite(servo_ground.y)) {
        throw InputError("mechanism ground points must be finite");
    }
}

void TaskSpec::validate() const {
    if (samples.size() < 3) {
        throw InputError("task needs at least 3 precision points, got " +
                         std::to_string(samples.size()));
    }
    if (!finite_positive(cv_speed)) throw InputError("task cv_speed must be positive");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const TaskSample& s = samples[i];
        if (!std::isfinite(s.theta2) || s.theta2 < 0.0 || s.theta2 >= kTwoPi) {
            throw InputError("task theta2 outside [0, 2pi) at sample " + std::to_string(i));
        }
        if (!std::isfinite(s.desired.x) || !std::isfinite(s.desired.y)) {
            throw InputError("task desired point not finite at sample " + std::to_string(i));
        }
        if (i > 0 && !(s.theta2 > samples[i - 1].theta2)) {
            throw InputError("task theta2 not strictly increasing at sample " + std::to_string(i));
        }
    }
}

std::vector<double> ClosureTrace::servo_angles() const {
    std::vector<double> out;
    out.reserve(poses.size());
    for (const PoseSample& pose : poses) out.push_back(pose.theta5);
    return out;
}

Point crank_tip(Point ground, double length, double angle) {
    return ground + length * unit(angle);
}

InputDyadSolution solve_input_dyad(const MechanismDims& dims, double theta2, Point desired) {
    const Point tip = crank_tip(dims.cv_ground, dims.p, theta2);
    const Point v = desired - tip;
    const double reach = norm(v);
    if (reach < kCoincidentTolerance) {
        throw DegenerateTarget("desired point coincides with the tip of link p");
    }
    InputDyadSolution out;
    out.theta3 = heading(v);
    out.actual = tip + (dims.q / reach) * v;
    out.structural_error = std::abs(reach - dims.q);
    return out;
}

DyadClosures solve_closing_dyad(const MechanismDims& dims, Point effector) {
    const Point v = effector - dims.servo_ground;
    const double d = norm(v);
    const double r = dims.r;
    const double s = dims.s;

    if (d < kCoincidentTolerance * std::max(1.0, s)) {
        if (std::abs(r - s) <= kCoincidentTolerance * std::max(1.0, r)) {
            throw DegenerateDyad("effector on the servo ground with r == s");
        }
        return {};
    }

    double c = (s * s + d * d - r * r) / (2.0 * s * d);
    if (c > 1.0 + kCosineSlack || c < -1.0 - kCosineSlack) return {};

    const double phi = heading(v);
    if (c >= 1.0) return DyadClosures(wrap_angle(phi));
    if (c <= -1.0) return DyadClosures(wrap_angle(phi + kPi));

    const double alpha = std::acos(c);
    return DyadClosures(wrap_angle(phi + alpha), wrap_angle(phi - alpha));
}

Assembly assembly_side(const MechanismDims& dims, double theta2, double theta5, Point effector) {
    const Point a = crank_tip(dims.cv_ground, dims.p, theta2);
    const Point b = crank_tip(dims.servo_ground, dims.s, theta5);
    return cross(b - a, effector - a) >= 0.0 ? Assembly::left : Assembly::right;
}

std::size_t usable_harmonics(std::size_t requested, std::size_t k) {
    return std::max<std::size_t>(1, std::min(requested, (k - 1) / 2));
}

ClosureTrace track_closure(const MechanismDims& dims, const TaskSpec& task,
                           const TrackingOptions& options) {
    const std::size_t k = task.size();
    std::vector<InputDyadSolution> inputs;
    std::vector<Point> effectors;
    std::vector<DyadClosures> closures;
    inputs.reserve(k);
    effectors.reserve(k);
    closures.reserve(k);
    for (const TaskSample& sample : task.samples) {
        inputs.push_back(solve_input_dyad(dims, sample.theta2, sample.desired));
        effectors.push_back(inputs.back().actual);
        closures.push_back(solve_closing_dyad(dims, effectors.back()));
    }

    const std::size_t n = usable_harmonics(options.n_harmonics, k);
    BranchTrace branches[2];
    double score[2];
    double swept[2];
    for (std::size_t b = 0; b < 2; ++b) {
        branches[b] = follow_branch(effectors, closures, dims.servo_ground, b);
        swept[b] = obj_swept(branches[b].theta5, dims.s, options.swept_mode);
        const double harm = obj_harm(fourier(branches[b].theta5, n));
        score[b] = options.swept_weight * swept[b] + options.harmonic_weight * harm;
    }
    int chosen = 0;
    if (score[1] < score[0] || (score[1] == score[0] && swept[1] < swept[0])) chosen = 1;

    ClosureTrace trace;
    trace.branch_id = chosen;
    trace.poses.reserve(k);
    const BranchTrace& branch = branches[chosen];
    for (std::size_t i = 0; i < k; ++i) {
        PoseSample pose;
        pose.theta2 = task.samples[i].theta2;
        pose.theta3 = inputs[i].theta3;
        pose.theta5 = branch.theta5[i];
        pose.actual = inputs[i].actual;
        pose.structural_error = inputs[i].structural_error;
        pose.mobile = branch.mobile[i];
        const Point servo_tip = crank_tip(dims.servo_ground, dims.s, pose.theta5);
        pose.theta4 = heading(pose.actual - servo_tip);
        if (!pose.mobile) ++trace.immobile_count;
        trace.poses.push_back(pose);
    }
    return trace;
}

}  // namespace fivebar
