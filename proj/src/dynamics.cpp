#include "fivebar/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "fivebar/errors.hpp"

namespace fivebar {

namespace {

constexpr double kMmToM = 1e-3;
constexpr double kSingularDet = 1e-12;

// Positions (m) and their Jacobian columns with respect to (theta2, theta5).
struct LinkageState {
    Point cv_ground;
    Point servo_ground;
    Point a;  // tip of p
    Point b;  // tip of s
    Point e;  // effector
    std::array<Point, 2> ja{};
    std::array<Point, 2> jb{};
    std::array<Point, 2> je{};
};

std::optional<Point> circle_intersection(Point c1, double r1, Point c2, double r2, Point hint) {
    const Point v = c2 - c1;
    const double d = norm(v);
    if (d <= 0.0 || d > r1 + r2 || d < std::abs(r1 - r2)) return std::nullopt;
    const double along = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    const double h = std::sqrt(std::max(0.0, r1 * r1 - along * along));
    const Point u = (1.0 / d) * v;
    const Point perp{-u.y, u.x};
    const Point base = c1 + along * u;
    const Point left = base + h * perp;
    const Point right = base - h * perp;
    return distance(left, hint) <= distance(right, hint) ? left : right;
}

double pair_product(const std::array<Point, 2>& j1, const std::array<Point, 2>& j2, int i, int k) {
    return dot(j1[static_cast<std::size_t>(i)], j2[static_cast<std::size_t>(k)]);
}

// Unit mass-per-length rod between two moving points.
void add_rod(JointMatrix& m, double length, const std::array<Point, 2>& j1,
             const std::array<Point, 2>& j2) {
    for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 2; ++k) {
            const double cross_terms = 0.5 * (pair_product(j1, j2, i, k) + pair_product(j2, j1, i, k));
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] +=
                length / 3.0 *
                (pair_product(j1, j1, i, k) + cross_terms + pair_product(j2, j2, i, k));
        }
    }
}

JointVector multiply(const JointMatrix& m, JointVector v) {
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

}  // namespace

void InertialParams::validate() const {
    if (!std::isfinite(mass_per_length) || mass_per_length <= 0.0) {
        throw InputError("mass_per_length must be positive");
    }
    if (!std::isfinite(effector_mass) || effector_mass < 0.0) {
        throw InputError("effector_mass must be >= 0");
    }
    if (!std::isfinite(gravity.x) || !std::isfinite(gravity.y)) {
        throw InputError("gravity must be finite");
    }
}

FiveBarDynamics::FiveBarDynamics(const MechanismDims& dims, const InertialParams& inertial)
    : dims_(dims), inertial_(inertial) {
    dims_.validate();
    inertial_.validate();
}

std::optional<Point> FiveBarDynamics::effector(JointVector q, Point hint) const {
    const Point a = crank_tip(dims_.cv_ground, dims_.p, q[0]);
    const Point b = crank_tip(dims_.servo_ground, dims_.s, q[1]);
    return circle_intersection(a, dims_.q, b, dims_.r, hint);
}

namespace {

LinkageState linkage_state(const MechanismDims& dims, JointVector q, Point effector_mm) {
    LinkageState st;
    st.cv_ground = kMmToM * dims.cv_ground;
    st.servo_ground = kMmToM * dims.servo_ground;
    const double p = kMmToM * dims.p;
    const double s = kMmToM * dims.s;
    st.a = st.cv_ground + p * unit(q[0]);
    st.b = st.servo_ground + s * unit(q[1]);
    st.e = kMmToM * effector_mm;
    st.ja = {Point{-p * std::sin(q[0]), p * std::cos(q[0])}, Point{}};
    st.jb = {Point{}, Point{-s * std::sin(q[1]), s * std::cos(q[1])}};

    // (E - A).dE = (E - A).dA and (E - B).dE = (E - B).dB
    const Point ea = st.e - st.a;
    const Point eb = st.e - st.b;
    const double det = cross(ea, eb);
    if (std::abs(det) <= kSingularDet * norm(ea) * norm(eb)) {
        throw ImmobileTrace("linkage is at a singular configuration");
    }
    for (std::size_t k = 0; k < 2; ++k) {
        const double r1 = dot(ea, st.ja[k]);
        const double r2 = dot(eb, st.jb[k]);
        st.je[k] = {(r1 * eb.y - ea.y * r2) / det, (ea.x * r2 - r1 * eb.x) / det};
    }
    return st;
}

}  // namespace

FiveBarDynamics::Terms FiveBarDynamics::mass_terms(JointVector q, Point hint) const {
    const std::optional<Point> e = effector(q, hint);
    if (!e) throw ImmobileTrace("linkage cannot assemble");
    const LinkageState st = linkage_state(dims_, q, *e);
    const std::array<Point, 2> fixed{};

    Terms t;
    add_rod(t.rods, kMmToM * dims_.p, fixed, st.ja);
    add_rod(t.rods, kMmToM * dims_.q, st.ja, st.je);
    add_rod(t.rods, kMmToM * dims_.r, st.je, st.jb);
    add_rod(t.rods, kMmToM * dims_.s, fixed, st.jb);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < 2; ++k) t.point[i][k] = dot(st.je[i], st.je[k]);
    }
    return t;
}

FiveBarDynamics::Potential FiveBarDynamics::potential_terms(JointVector q, Point hint) const {
    const std::optional<Point> e = effector(q, hint);
    if (!e) throw ImmobileTrace("linkage cannot assemble");
    const Point g = inertial_.gravity;
    const Point cv = kMmToM * dims_.cv_ground;
    const Point sv = kMmToM * dims_.servo_ground;
    const Point a = cv + kMmToM * dims_.p * unit(q[0]);
    const Point b = sv + kMmToM * dims_.s * unit(q[1]);
    const Point em = kMmToM * *e;
    auto rod = [&](double length_mm, Point p1, Point p2) {
        return -kMmToM * length_mm * dot(g, 0.5 * (p1 + p2));
    };
    Potential v;
    v.rods = rod(dims_.p, cv, a) + rod(dims_.q, a, em) + rod(dims_.r, em, b) + rod(dims_.s, sv, b);
    v.point = -dot(g, em);
    return v;
}

FiveBarDynamics::Split FiveBarDynamics::bias_terms(JointVector q, JointVector rates,
                                                   Point hint) const {
    const double h = kCoordinateStep;
    // dM/dq_l and dV/dq_l by central differences.
    std::array<Terms, 2> dm{};
    std::array<Potential, 2> dv{};
    for (std::size_t l = 0; l < 2; ++l) {
        JointVector up = q;
        JointVector down = q;
        up[l] += h;
        down[l] -= h;
        const Terms mu = mass_terms(up, hint);
        const Terms md = mass_terms(down, hint);
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t k = 0; k < 2; ++k) {
                dm[l].rods[i][k] = (mu.rods[i][k] - md.rods[i][k]) / (2.0 * h);
                dm[l].point[i][k] = (mu.point[i][k] - md.point[i][k]) / (2.0 * h);
            }
        }
        const Potential vu = potential_terms(up, hint);
        const Potential vd = potential_terms(down, hint);
        dv[l].rods = (vu.rods - vd.rods) / (2.0 * h);
        dv[l].point = (vu.point - vd.point) / (2.0 * h);
    }

    auto assemble = [&](auto member_m, auto member_v) {
        JointVector out{};
        for (std::size_t k = 0; k < 2; ++k) {
            double coriolis = 0.0;  // sum_j sum_l dM_kj/dq_l qd_j qd_l
            double centrifugal = 0.0;  // 1/2 qd^T dM/dq_k qd
            for (std::size_t j = 0; j < 2; ++j) {
                for (std::size_t l = 0; l < 2; ++l) {
                    coriolis += (dm[l].*member_m)[k][j] * rates[j] * rates[l];
                    centrifugal += 0.5 * (dm[k].*member_m)[j][l] * rates[j] * rates[l];
                }
            }
            out[k] = coriolis - centrifugal + dv[k].*member_v;
        }
        return out;
    };
    Split split;
    split.rods = assemble(&Terms::rods, &Potential::rods);
    split.point = assemble(&Terms::point, &Potential::point);
    return split;
}

JointVector FiveBarDynamics::combine(const Split& split) const {
    const double mu = inertial_.mass_per_length;
    const double mp = inertial_.effector_mass;
    return {mu * split.rods[0] + mp * split.point[0], mu * split.rods[1] + mp * split.point[1]};
}

JointMatrix FiveBarDynamics::mass_matrix(JointVector q, Point hint) const {
    const Terms t = mass_terms(q, hint);
    const double mu = inertial_.mass_per_length;
    const double mp = inertial_.effector_mass;
    JointMatrix m{};
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < 2; ++k) m[i][k] = mu * t.rods[i][k] + mp * t.point[i][k];
    }
    return m;
}

double FiveBarDynamics::kinetic_energy(JointVector q, JointVector rates, Point hint) const {
    const JointVector p = multiply(mass_matrix(q, hint), rates);
    return 0.5 * (rates[0] * p[0] + rates[1] * p[1]);
}

double FiveBarDynamics::potential_energy(JointVector q, Point hint) const {
    const Potential v = potential_terms(q, hint);
    return inertial_.mass_per_length * v.rods + inertial_.effector_mass * v.point;
}

JointVector FiveBarDynamics::bias_forces(JointVector q, JointVector rates, Point hint) const {
    return combine(bias_terms(q, rates, hint));
}

JointVector FiveBarDynamics::generalized_forces(JointVector q, JointVector rates,
                                                JointVector accels, Point hint) const {
    const Terms t = mass_terms(q, hint);
    Split split = bias_terms(q, rates, hint);
    const JointVector rod_inertia = multiply(t.rods, accels);
    const JointVector point_inertia = multiply(t.point, accels);
    for (std::size_t k = 0; k < 2; ++k) {
        split.rods[k] += rod_inertia[k];
        split.point[k] += point_inertia[k];
    }
    return combine(split);
}

MotionProfile servo_profile(const ClosureTrace& trace, double cv_speed) {
    const std::size_t k = trace.size();
    if (k == 0) throw InputError("empty trace");
    MotionProfile profile;
    profile.cv_speed = cv_speed;
    profile.phase = trace.poses.front().theta2;
    profile.values = trace.servo_angles();
    for (std::size_t i = 0; i < k; ++i) {
        if (std::abs(trace.poses[i].theta2 - profile.theta2_at(i)) > 1e-9) {
            throw InputError("trace is not sampled at uniform theta2 spacing (sample " +
                             std::to_string(i) + ")");
        }
    }
    profile.cycle_advance = infer_cycle_advance(profile.values);
    return profile;
}

TorqueProfile inverse_dynamics(const MechanismDims& dims, const InertialParams& inertial,
                               const ClosureTrace& trace, double cv_speed, Execution execution) {
    if (trace.immobile_count > 0) {
        throw ImmobileTrace("trace has " + std::to_string(trace.immobile_count) +
                            " immobile samples");
    }
    const MotionProfile profile = servo_profile(trace, cv_speed);
    const ProfileDerivatives deriv = differentiate(profile);
    const FiveBarDynamics model(dims, inertial);

    const std::size_t k = trace.size();
    TorqueProfile out;
    out.theta2.resize(k);
    out.tau_cv.resize(k);
    out.tau_servo.resize(k);

    auto solve_one = [&](std::size_t i) {
        const PoseSample& pose = trace.poses[i];
        const JointVector q{pose.theta2, pose.theta5};
        const JointVector rates{cv_speed, deriv.velocity[i]};
        const JointVector accels{0.0, deriv.acceleration[i]};
        const JointVector tau = model.generalized_forces(q, rates, accels, pose.actual);
        out.theta2[i] = pose.theta2;
        out.tau_cv[i] = tau[0];
        out.tau_servo[i] = tau[1];
    };

    if (execution == Execution::serial) {
        for (std::size_t i = 0; i < k; ++i) solve_one(i);
        return out;
    }
    std::exception_ptr failure;
    const auto n = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            solve_one(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(fivebar_torque_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

TorqueSummary torque_summary(std::span<const double> torques) {
    if (torques.empty()) throw InputError("torque summary of an empty profile");
    TorqueSummary s;
    s.min = torques.front();
    s.max = torques.front();
    double sum_sq = 0.0;
    for (double t : torques) {
        s.min = std::min(s.min, t);
        s.max = std::max(s.max, t);
        sum_sq += t * t;
    }
    s.rms = std::sqrt(sum_sq / static_cast<double>(torques.size()));
    return s;
}

MotorTorqueSummary torque_summary(const TorqueProfile& profile) {
    return {torque_summary(profile.tau_cv), torque_summary(profile.tau_servo)};
}

}  // namespace fivebar
