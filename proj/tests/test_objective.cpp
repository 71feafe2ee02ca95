#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fivebar/objective.hpp"
#include "fivebar/sample_task.hpp"
#include "oracles.hpp"

using namespace fivebar;

namespace {

HarmonicSpectrum spectrum_of(std::initializer_list<double> magnitudes) {
    HarmonicSpectrum s;
    for (double m : magnitudes) s.coefficients.push_back({m, 0.0});
    return s;
}

// Regression value of the reference mechanism on the 72-point demo task, frozen
// from the literal-summation oracle below.
constexpr double kDemoTotal = 637.0514464835491;

}  // namespace

TEST_CASE("error term") {
    CHECK(obj_error(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
    CHECK(obj_error(std::vector<double>{2.0}) == 4.0);
    CHECK(obj_error(std::vector<double>{3.0, 4.0}) == 49.0);
}

TEST_CASE("error term is monotone in each sample") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> e(6);
        for (double& v : e) v = u(rng);
        const double base = obj_error(e);
        std::vector<double> bumped = e;
        bumped[trial % 6] += 0.01;
        CHECK(obj_error(bumped) > base);
    }
}

TEST_CASE("harmonic term") {
    CHECK(obj_harm(spectrum_of({0.0, 0.0, 0.0})) == 0.0);
    CHECK(obj_harm(spectrum_of({2.0})) == 4.0);
    CHECK(obj_harm(spectrum_of({1.0, 2.0})) == 9.0);
    HarmonicSpectrum mixed;
    mixed.coefficients.push_back({0.6, 0.8});
    CHECK(obj_harm(mixed) == doctest::Approx(1.0));
}

TEST_CASE("swept term") {
    CHECK(obj_swept(std::vector<double>{0.4, 0.4, 0.4}, 150.0) < 1e-12);
    CHECK(obj_swept(std::vector<double>{0.5, 0.5, 0.5}, 150.0) == 0.0);
    CHECK(obj_swept(std::vector<double>{1.0, -1.0}, 150.0) == doctest::Approx(212.13).epsilon(1e-4));
    CHECK(obj_swept(std::vector<double>{2.0, 0.0}, 150.0) == doctest::Approx(150.0 * std::sqrt(2.0)));
    CHECK(obj_swept(std::vector<double>{2.0, 0.0}, 150.0, SweptMode::raw) == doctest::Approx(300.0));
}

TEST_CASE("mobility term") {
    CHECK(obj_mob(0) == 0.0);
    CHECK(obj_mob(1) == 1.0);
    CHECK(obj_mob(2) == 8.0);
    for (std::size_t m = 0; m < 50; ++m) CHECK(obj_mob(m) < obj_mob(m + 1));
}

TEST_CASE("weighted combination") {
    const ObjectiveBreakdown b = combine(1.0, 1.0, 1.0, 1.0, ObjectiveWeights{});
    CHECK(b.total == 3.25);
    CHECK(b.error == 1.0);

    // Linear in each component.
    const ObjectiveWeights w{};
    const ObjectiveBreakdown base = combine(2.0, 3.0, 5.0, 7.0, w);
    CHECK(combine(4.0, 3.0, 5.0, 7.0, w).total - base.total == doctest::Approx(2.0 * w.error));
    CHECK(combine(2.0, 6.0, 5.0, 7.0, w).total - base.total == doctest::Approx(3.0 * w.harmonic));
    CHECK(combine(2.0, 3.0, 10.0, 7.0, w).total - base.total == doctest::Approx(5.0 * w.swept));
    CHECK(combine(2.0, 3.0, 5.0, 14.0, w).total - base.total == doctest::Approx(7.0 * w.mobility));
}

TEST_CASE("shape terms ignore a constant servo offset") {
    std::vector<double> theta5(72);
    for (std::size_t i = 0; i < theta5.size(); ++i) {
        const double t = kTwoPi * i / 72.0;
        theta5[i] = 0.4 * std::sin(t) + 0.1 * std::cos(3.0 * t);
    }
    std::vector<double> shifted = theta5;
    for (double& v : shifted) v += 2.5;
    CHECK(obj_swept(theta5, 150.0) == doctest::Approx(obj_swept(shifted, 150.0)).epsilon(1e-12));
    CHECK(obj_harm(fourier(theta5, 10)) == doctest::Approx(obj_harm(fourier(shifted, 10))).epsilon(1e-12));
}

TEST_CASE("round-trip mechanism has no error and full mobility") {
    const MechanismDims dims = reference_mechanism();
    const TaskSpec task = round_trip_task(dims, [](double t) { return 1.5 + 0.2 * std::sin(t); }, 72, kTwoPi);
    const ObjectiveBreakdown b = evaluate(dims, task);
    CHECK(b.error < 1e-18);
    CHECK(b.mobility == 0.0);
}

TEST_CASE("reference mechanism on the demo task matches literal summation") {
    const MechanismDims dims = reference_mechanism();
    const TaskSpec task = sample_task(72);
    const Evaluation ev = evaluate_detailed(dims, task);

    double err_sum = 0.0;
    std::vector<double> theta5;
    std::size_t m = 0;
    for (const PoseSample& p : ev.trace.poses) {
        err_sum += p.structural_error;
        theta5.push_back(p.theta5);
        if (!p.mobile) ++m;
    }
    double mean = 0.0;
    for (double v : theta5) mean += v;
    mean /= static_cast<double>(theta5.size());
    double ss = 0.0;
    for (double v : theta5) ss += (v - mean) * (v - mean);
    const double swept = dims.s * std::sqrt(ss);
    double harm = 0.0;
    const auto coeffs = oracle::literal_dft(theta5, 10);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        harm += std::pow(std::hypot(coeffs[i].a, coeffs[i].b), static_cast<double>(i + 2));
    }
    const double error = err_sum * err_sum;
    const double mob = static_cast<double>(m * m * m);
    const double total = 1.0 * error + 1.0 * mob + 0.75 * swept + 0.5 * harm;

    CHECK(ev.breakdown.error == doctest::Approx(error).epsilon(1e-9));
    CHECK(ev.breakdown.swept == doctest::Approx(swept).epsilon(1e-9));
    CHECK(ev.breakdown.harmonic == doctest::Approx(harm).epsilon(1e-9));
    CHECK(ev.breakdown.mobility == mob);
    CHECK(ev.breakdown.total == doctest::Approx(total).epsilon(1e-9));
    CHECK(ev.breakdown.total == doctest::Approx(kDemoTotal).epsilon(1e-9));
}

TEST_CASE("evaluation is deterministic") {
    const MechanismDims dims = reference_mechanism();
    const TaskSpec task = sample_task(72);
    CHECK(evaluate(dims, task) == evaluate(dims, task));
}

TEST_CASE("raw swept mode uses the angles as given") {
    const MechanismDims dims = reference_mechanism();
    const TaskSpec task = sample_task(72);
    const Evaluation ev = evaluate_detailed(dims, task, {}, {10, SweptMode::raw});
    double ss = 0.0;
    for (const PoseSample& p : ev.trace.poses) ss += p.theta5 * p.theta5;
    CHECK(ev.breakdown.swept == doctest::Approx(dims.s * std::sqrt(ss)).epsilon(1e-12));
}

TEST_CASE("negative weights are rejected") {
    ObjectiveWeights w;
    w.swept = -0.1;
    CHECK_THROWS(w.validate());
}
