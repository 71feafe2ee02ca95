#include "fivebar/objective.hpp"

#include <cmath>
#include <vector>

#include "fivebar/errors.hpp"

namespace fivebar {

void ObjectiveWeights::validate() const {
    for (double w : {error, mobility, swept, harmonic}) {
        if (!std::isfinite(w) || w < 0.0) throw InputError("objective weights must be >= 0");
    }
}

double obj_error(std::span<const double> structural_errors) {
    double sum = 0.0;
    for (double e : structural_errors) sum += e;
    return sum * sum;
}

double obj_error(const ClosureTrace& trace) {
    double sum = 0.0;
    for (const PoseSample& pose : trace.poses) sum += pose.structural_error;
    return sum * sum;
}

double obj_harm(const HarmonicSpectrum& spectrum) {
    double total = 0.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        total += std::pow(spectrum.coefficients[i].magnitude(), static_cast<double>(i + 2));
    }
    return total;
}

double obj_swept(std::span<const double> theta5, double s, SweptMode mode) {
    if (theta5.empty()) return 0.0;
    double mean = 0.0;
    if (mode == SweptMode::centered) {
        for (double t : theta5) mean += t;
        mean /= static_cast<double>(theta5.size());
    }
    double sum_sq = 0.0;
    for (double t : theta5) sum_sq += (t - mean) * (t - mean);
    return s * std::sqrt(sum_sq);
}

double obj_swept(const ClosureTrace& trace, double s, SweptMode mode) {
    return obj_swept(trace.servo_angles(), s, mode);
}

double obj_mob(std::size_t m) {
    const auto x = static_cast<double>(m);
    return x * x * x;
}

ObjectiveBreakdown combine(double error, double harmonic, double swept, double mobility,
                           const ObjectiveWeights& weights) {
    ObjectiveBreakdown out;
    out.error = error;
    out.harmonic = harmonic;
    out.swept = swept;
    out.mobility = mobility;
    out.total = weights.error * error + weights.mobility * mobility + weights.swept * swept +
                weights.harmonic * harmonic;
    return out;
}

Evaluation evaluate_detailed(const MechanismDims& dims, const TaskSpec& task,
                             const ObjectiveWeights& weights, const EvaluationOptions& options) {
    TrackingOptions tracking;
    tracking.swept_weight = weights.swept;
    tracking.harmonic_weight = weights.harmonic;
    tracking.n_harmonics = options.n_harmonics;
    tracking.swept_mode = options.swept_mode;

    Evaluation out;
    out.trace = track_closure(dims, task, tracking);
    const std::vector<double> theta5 = out.trace.servo_angles();
    const std::size_t n = usable_harmonics(options.n_harmonics, theta5.size());
    out.breakdown = combine(obj_error(out.trace), obj_harm(fourier(theta5, n)),
                            obj_swept(theta5, dims.s, options.swept_mode),
                            obj_mob(out.trace.immobile_count), weights);
    return out;
}

}  // namespace fivebar
