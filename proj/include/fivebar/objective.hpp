#pragma once

#include <cstddef>
#include <span>

#include "fivebar/mechanism.hpp"
#include "fivebar/motion.hpp"

namespace fivebar {

struct ObjectiveWeights {
    double error = 1.0;
    double mobility = 1.0;
    double swept = 0.75;
    double harmonic = 0.5;

    void validate() const;
    friend bool operator==(const ObjectiveWeights&, const ObjectiveWeights&) = default;
};

struct ObjectiveBreakdown {
    double error = 0.0;
    double harmonic = 0.0;
    double swept = 0.0;
    double mobility = 0.0;
    double total = 0.0;

    friend bool operator==(const ObjectiveBreakdown&, const ObjectiveBreakdown&) = default;
};

struct EvaluationOptions {
    std::size_t n_harmonics = 10;
    SweptMode swept_mode = SweptMode::centered;
};

// (sum of structural errors)^2
double obj_error(std::span<const double> structural_errors);
double obj_error(const ClosureTrace& trace);

// sum over harmonics i = 1..n of |c_i|^(i+1)
double obj_harm(const HarmonicSpectrum& spectrum);

// s * sqrt(sum d_i^2) with d_i = theta5_i - mean (centered) or theta5_i (raw).
double obj_swept(std::span<const double> theta5, double s, SweptMode mode = SweptMode::centered);
double obj_swept(const ClosureTrace& trace, double s, SweptMode mode = SweptMode::centered);

// m^3
double obj_mob(std::size_t m);

ObjectiveBreakdown combine(double error, double harmonic, double swept, double mobility,
                           const ObjectiveWeights& weights);

struct Evaluation {
    ClosureTrace trace;
    ObjectiveBreakdown breakdown;
};

// Tracks the closure, takes the spectrum of the servo profile and weighs the
// four terms. Geometric errors propagate.
Evaluation evaluate_detailed(const MechanismDims& dims, const TaskSpec& task,
                             const ObjectiveWeights& weights = {},
                             const EvaluationOptions& options = {});

inline ObjectiveBreakdown evaluate(const MechanismDims& dims, const TaskSpec& task,
                                   const ObjectiveWeights& weights = {},
                                   const EvaluationOptions& options = {}) {
    return evaluate_detailed(dims, task, weights, options).breakdown;
}

}  // namespace fivebar
