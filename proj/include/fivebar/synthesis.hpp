#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "fivebar/execution.hpp"
#include "fivebar/mechanism.hpp"
#include "fivebar/objective.hpp"

namespace fivebar {

struct GAConfig {
    std::size_t population_size = 40;
    double crossover_rate = 0.85;
    double mutation_rate = 0.03;
    std::size_t generations = 200;
    std::uint64_t rng_seed = 1;
    unsigned bits_per_gene = 16;
    double scaling_multiple = 2.0;

    void validate() const;
    friend bool operator==(const GAConfig&, const GAConfig&) = default;
};

struct GeneRange {
    double lower = 0.0;
    double upper = 1.0;

    double span() const { return upper - lower; }
    friend bool operator==(const GeneRange&, const GeneRange&) = default;
};

// Search box for the eight design genes. When cv_fixed is set the CV ground
// is pinned at cv_fixed_at and only six genes are searched.
struct DesignBounds {
    GeneRange p{10.0, 500.0};
    GeneRange q{10.0, 500.0};
    GeneRange r{10.0, 500.0};
    GeneRange s{10.0, 500.0};
    GeneRange servo_x{-500.0, 500.0};
    GeneRange servo_y{-500.0, 500.0};
    GeneRange cv_x{-500.0, 500.0};
    GeneRange cv_y{-500.0, 500.0};
    bool cv_fixed = true;
    Point cv_fixed_at{};

    void validate() const;
    std::vector<GeneRange> genes() const;
    MechanismDims decode(std::span<const double> genes) const;
    std::vector<double> encode(const MechanismDims& dims) const;

    friend bool operator==(const DesignBounds&, const DesignBounds&) = default;
};

// Every stochastic draw of a run comes from one of these.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) from the top 53 bits of one engine draw.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // Uniform in [0, n).
    std::size_t index(std::size_t n);

private:
    std::mt19937_64 engine_;
};

// Affine map f' = a f + b keeping the mean and sending the max to
// multiple * mean; if that would make anything negative, pins min f' = 0
// instead. Outputs are never negative.
std::vector<double> linear_scale(std::span<const double> raw, double scaling_multiple);

// Index i with probability f_i / sum f; uniform when the sum is not positive.
std::size_t roulette_select(std::span<const double> scaled, Rng& rng);

// Gray-coded fixed point, most significant bit first.
double decode_gene(std::span<const std::uint8_t> bits, GeneRange range);

// Lower is better; +inf marks an infeasible individual.
using GeneObjective = std::function<double(std::span<const double>)>;

// Objective of every row of `population`. Both execution modes give
// identical results; the parallel one spreads rows over OpenMP threads.
std::vector<double> evaluate_population(const std::vector<std::vector<double>>& population,
                                        const GeneObjective& objective, Execution execution);

struct GAOutcome {
    std::vector<double> best_genes;
    double best_value = 0.0;
    std::vector<double> history;  // best-so-far per generation
};

// Generational binary GA: roulette on linearly scaled 1/(1+f) fitness,
// one-point crossover, per-bit mutation, elitism of one.
GAOutcome minimize_ga(std::span<const GeneRange> ranges, const GAConfig& config,
                      const GeneObjective& objective, Execution execution = Execution::parallel);

struct DescentConfig {
    double fd_step = 1e-4;  // fraction of each gene range
    double initial_rate = 1.0;
    double min_rate = 1e-10;
    double relative_tolerance = 1e-9;
    std::size_t max_iterations = 500;

    friend bool operator==(const DescentConfig&, const DescentConfig&) = default;
};

struct DescentResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    std::vector<double> accepted;  // objective at the start and after each accepted step
};

using ScalarFunction = std::function<double(std::span<const double>)>;

std::vector<double> central_gradient(const ScalarFunction& f, std::span<const double> x,
                                     std::span<const double> steps);

// Steepest descent in range-normalized coordinates, projected onto the box.
// The direction comes from `smooth`; a step is accepted only when `full`
// strictly improves, halving the rate until it does or falls below min_rate.
DescentResult steepest_descent(std::span<const double> start, const ScalarFunction& smooth,
                               const ScalarFunction& full, std::span<const GeneRange> ranges,
                               const DescentConfig& config = {});

struct SynthesisResult {
    MechanismDims best_dims;
    ObjectiveBreakdown best;
    std::vector<double> history;
    MechanismDims refined_dims;
    ObjectiveBreakdown refined;
    std::size_t refine_iterations = 0;
};

struct SynthesisOptions {
    EvaluationOptions evaluation;
    DescentConfig descent;
    Execution execution = Execution::parallel;
};

// Hill-climbs a mechanism with the smooth objective terms and the full
// objective as acceptance test.
MechanismDims refine_mechanism(const MechanismDims& start, const TaskSpec& task,
                               const ObjectiveWeights& weights, const DesignBounds& bounds,
                               const SynthesisOptions& options = {},
                               std::size_t* iterations = nullptr);

// GA over the design bounds followed by refine_mechanism on the GA best.
SynthesisResult ga_run(const TaskSpec& task, const DesignBounds& bounds, const GAConfig& config,
                       const ObjectiveWeights& weights, const SynthesisOptions& options = {});

}  // namespace fivebar
