#include "fivebar/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <string>

#include "fivebar/errors.hpp"

namespace fivebar {

namespace {

constexpr double kInfeasible = std::numeric_limits<double>::infinity();

using Chromosome = std::vector<std::uint8_t>;

void check_range(const GeneRange& g, const char* name) {
    if (!std::isfinite(g.lower) || !std::isfinite(g.upper) || !(g.lower < g.upper)) {
        throw InputError(std::string("design bound '") + name + "' needs lower < upper");
    }
}

double clamp01(double u) { return std::clamp(u, 0.0, 1.0); }

}  // namespace

void GAConfig::validate() const {
    if (population_size < 4 || population_size % 2 != 0) {
        throw InputError("population_size must be even and >= 4");
    }
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
        throw InputError("crossover_rate must lie in [0, 1]");
    }
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
        throw InputError("mutation_rate must lie in [0, 1]");
    }
    if (generations < 1) throw InputError("generations must be >= 1");
    if (bits_per_gene < 1 || bits_per_gene > 32) throw InputError("bits_per_gene must be 1..32");
    if (!(scaling_multiple >= 1.0) || !std::isfinite(scaling_multiple)) {
        throw InputError("scaling_multiple must be >= 1");
    }
}

void DesignBounds::validate() const {
    check_range(p, "p");
    check_range(q, "q");
    check_range(r, "r");
    check_range(s, "s");
    check_range(servo_x, "servo_x");
    check_range(servo_y, "servo_y");
    if (!cv_fixed) {
        check_range(cv_x, "cv_x");
        check_range(cv_y, "cv_y");
    }
    for (const GeneRange* g : {&p, &q, &r, &s}) {
        if (g->lower <= 0.0) throw InputError("link length bounds must be positive");
    }
}

std::vector<GeneRange> DesignBounds::genes() const {
    std::vector<GeneRange> out{p, q, r, s, servo_x, servo_y};
    if (!cv_fixed) {
        out.push_back(cv_x);
        out.push_back(cv_y);
    }
    return out;
}

MechanismDims DesignBounds::decode(std::span<const double> genes) const {
    MechanismDims dims;
    dims.p = genes[0];
    dims.q = genes[1];
    dims.r = genes[2];
    dims.s = genes[3];
    dims.servo_ground = {genes[4], genes[5]};
    dims.cv_ground = cv_fixed ? cv_fixed_at : Point{genes[6], genes[7]};
    return dims;
}

std::vector<double> DesignBounds::encode(const MechanismDims& dims) const {
    std::vector<double> out{dims.p, dims.q, dims.r, dims.s, dims.servo_ground.x,
                            dims.servo_ground.y};
    if (!cv_fixed) {
        out.push_back(dims.cv_ground.x);
        out.push_back(dims.cv_ground.y);
    }
    return out;
}

std::size_t Rng::index(std::size_t n) {
    const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return std::min(i, n - 1);
}

std::vector<double> linear_scale(std::span<const double> raw, double scaling_multiple) {
    std::vector<double> out(raw.begin(), raw.end());
    if (raw.empty()) return out;

    const auto [min_it, max_it] = std::minmax_element(raw.begin(), raw.end());
    const double fmin = *min_it;
    const double fmax = *max_it;
    const double avg = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(raw.size());

    if (fmax - avg <= 0.0 || avg - fmin <= 0.0) return out;  // uniform population

    double a = 0.0;
    double b = 0.0;
    if (fmin > (scaling_multiple * avg - fmax) / (scaling_multiple - 1.0)) {
        const double delta = fmax - avg;
        a = (scaling_multiple - 1.0) * avg / delta;
        b = avg * (fmax - scaling_multiple * avg) / delta;
    } else {
        const double delta = avg - fmin;
        a = avg / delta;
        b = -fmin * avg / delta;
    }
    for (double& f : out) f = std::max(0.0, a * f + b);
    return out;
}

std::size_t roulette_select(std::span<const double> scaled, Rng& rng) {
    const double total = std::accumulate(scaled.begin(), scaled.end(), 0.0);
    if (!(total > 0.0)) return rng.index(scaled.size());

    const double spin = rng.uniform() * total;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        cumulative += scaled[i];
        if (cumulative > spin) return i;
    }
    // Rounding can leave the spin just past the last partial sum.
    for (std::size_t i = scaled.size(); i-- > 0;) {
        if (scaled[i] > 0.0) return i;
    }
    return scaled.size() - 1;
}

double decode_gene(std::span<const std::uint8_t> bits, GeneRange range) {
    std::uint64_t value = 0;
    std::uint8_t bit = 0;
    for (std::uint8_t g : bits) {
        bit ^= g;
        value = (value << 1) | bit;
    }
    const double max_value = std::ldexp(1.0, static_cast<int>(bits.size())) - 1.0;
    return range.lower + range.span() * (static_cast<double>(value) / max_value);
}

std::vector<double> evaluate_population(const std::vector<std::vector<double>>& population,
                                        const GeneObjective& objective, Execution execution) {
    std::vector<double> values(population.size(), kInfeasible);
    auto evaluate_one = [&](std::size_t i) {
        try {
            const double v = objective(population[i]);
            values[i] = std::isnan(v) ? kInfeasible : v;
        } catch (const Error&) {
            values[i] = kInfeasible;
        }
    };

    if (execution == Execution::serial) {
        for (std::size_t i = 0; i < population.size(); ++i) evaluate_one(i);
        return values;
    }

    std::exception_ptr failure;
    const auto n = static_cast<std::ptrdiff_t>(population.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            evaluate_one(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(fivebar_population_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return values;
}

GAOutcome minimize_ga(std::span<const GeneRange> ranges, const GAConfig& config,
                      const GeneObjective& objective, Execution execution) {
    config.validate();
    if (ranges.empty()) throw InputError("GA needs at least one gene");

    const std::size_t n_genes = ranges.size();
    const std::size_t bits = config.bits_per_gene;
    const std::size_t length = n_genes * bits;
    const std::size_t pop_size = config.population_size;

    Rng rng(config.rng_seed);
    std::vector<Chromosome> population(pop_size, Chromosome(length));
    for (Chromosome& c : population) {
        for (std::uint8_t& b : c) b = rng.uniform() < 0.5 ? 1 : 0;
    }

    auto decode = [&](const Chromosome& c) {
        std::vector<double> genes(n_genes);
        for (std::size_t g = 0; g < n_genes; ++g) {
            genes[g] = decode_gene(std::span<const std::uint8_t>(c).subspan(g * bits, bits), ranges[g]);
        }
        return genes;
    };

    GAOutcome outcome;
    outcome.best_value = kInfeasible;
    outcome.history.reserve(config.generations);
    bool any_feasible = false;

    std::vector<std::vector<double>> decoded(pop_size);
    std::vector<double> fitness(pop_size);
    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        for (std::size_t i = 0; i < pop_size; ++i) decoded[i] = decode(population[i]);
        const std::vector<double> values = evaluate_population(decoded, objective, execution);

        std::size_t gen_best = 0;
        for (std::size_t i = 0; i < pop_size; ++i) {
            if (values[i] < values[gen_best]) gen_best = i;
            fitness[i] = std::isfinite(values[i]) ? 1.0 / (1.0 + std::max(0.0, values[i])) : 0.0;
        }
        if (std::isfinite(values[gen_best])) {
            any_feasible = true;
            if (values[gen_best] < outcome.best_value) {
                outcome.best_value = values[gen_best];
                outcome.best_genes = decoded[gen_best];
            }
        }
        outcome.history.push_back(outcome.best_value);

        if (gen + 1 == config.generations) break;

        const std::vector<double> scaled = linear_scale(fitness, config.scaling_multiple);
        std::vector<Chromosome> next;
        next.reserve(pop_size);
        next.push_back(population[gen_best]);
        while (next.size() < pop_size) {
            Chromosome a = population[roulette_select(scaled, rng)];
            Chromosome b = population[roulette_select(scaled, rng)];
            if (rng.uniform() < config.crossover_rate && length > 1) {
                const std::size_t cut = 1 + rng.index(length - 1);
                std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(cut), a.end(),
                                 b.begin() + static_cast<std::ptrdiff_t>(cut));
            }
            for (Chromosome* child : {&a, &b}) {
                for (std::uint8_t& bit : *child) {
                    if (rng.uniform() < config.mutation_rate) bit ^= 1;
                }
            }
            next.push_back(std::move(a));
            if (next.size() < pop_size) next.push_back(std::move(b));
        }
        population = std::move(next);
    }

    if (!any_feasible) throw InfeasiblePopulation("every individual of every generation was infeasible");
    return outcome;
}

std::vector<double> central_gradient(const ScalarFunction& f, std::span<const double> x,
                                     std::span<const double> steps) {
    std::vector<double> grad(x.size());
    std::vector<double> probe(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = steps[i];
        probe[i] = x[i] + h;
        const double up = f(probe);
        probe[i] = x[i] - h;
        const double down = f(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

constexpr double kSufficientDecrease = 1e-4;

DescentResult steepest_descent(std::span<const double> start, const ScalarFunction& smooth,
                               const ScalarFunction& full, std::span<const GeneRange> ranges,
                               const DescentConfig& config) {
    const std::size_t n = start.size();
    // Work in u in [0, 1]^n: x = lower + u * span.
    auto to_x = [&](std::span<const double> u) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = ranges[i].lower + u[i] * ranges[i].span();
        return x;
    };
    auto smooth_u = [&](std::span<const double> u) { return smooth(to_x(u)); };

    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = clamp01((start[i] - ranges[i].lower) / ranges[i].span());
    }
    const std::vector<double> steps(n, config.fd_step);

    DescentResult result;
    result.x = to_x(u);
    result.value = full(result.x);
    result.accepted.push_back(result.value);
    if (!std::isfinite(result.value)) return result;

    for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
        double rate = config.initial_rate;
        std::vector<double> grad = central_gradient(smooth_u, u, steps);
        if (std::any_of(grad.begin(), grad.end(), [](double g) { return !std::isfinite(g); })) break;
        if (std::all_of(grad.begin(), grad.end(), [](double g) { return g == 0.0; })) break;

        bool improved = false;
        std::vector<double> trial(n);
        double trial_value = result.value;
        while (rate >= config.min_rate) {
            double predicted = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = clamp01(u[i] - rate * grad[i]);
                predicted += grad[i] * (u[i] - trial[i]);
            }
            trial_value = full(to_x(trial));
            // Sufficient decrease; plain decrease lets clamped steps bounce
            // between mirror points of the box.
            if (trial_value < result.value - kSufficientDecrease * predicted) {
                improved = true;
                break;
            }
            rate *= 0.5;
        }
        if (!improved) break;

        const double previous = result.value;
        u = trial;
        result.x = to_x(u);
        result.value = trial_value;
        result.accepted.push_back(trial_value);
        result.iterations = iter + 1;

        const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
        if ((previous - trial_value) / scale < config.relative_tolerance) break;
    }
    return result;
}

namespace {

ScalarFunction mechanism_objective(const TaskSpec& task, const ObjectiveWeights& weights,
                                   const DesignBounds& bounds, const EvaluationOptions& options,
                                   bool include_mobility) {
    return [&task, weights, &bounds, options, include_mobility](std::span<const double> genes) {
        try {
            const ObjectiveBreakdown b = evaluate(bounds.decode(genes), task, weights, options);
            return include_mobility ? b.total : b.total - weights.mobility * b.mobility;
        } catch (const Error&) {
            return kInfeasible;
        }
    };
}

}  // namespace

MechanismDims refine_mechanism(const MechanismDims& start, const TaskSpec& task,
                               const ObjectiveWeights& weights, const DesignBounds& bounds,
                               const SynthesisOptions& options, std::size_t* iterations) {
    const std::vector<GeneRange> ranges = bounds.genes();
    const ScalarFunction smooth = mechanism_objective(task, weights, bounds, options.evaluation, false);
    const ScalarFunction full = mechanism_objective(task, weights, bounds, options.evaluation, true);
    const DescentResult result =
        steepest_descent(bounds.encode(start), smooth, full, ranges, options.descent);
    if (iterations) *iterations = result.iterations;
    // Never hand back something worse than the start.
    if (!(result.value <= full(bounds.encode(start)))) return start;
    return bounds.decode(result.x);
}

SynthesisResult ga_run(const TaskSpec& task, const DesignBounds& bounds, const GAConfig& config,
                       const ObjectiveWeights& weights, const SynthesisOptions& options) {
    task.validate();
    bounds.validate();
    config.validate();
    weights.validate();

    const std::vector<GeneRange> ranges = bounds.genes();
    const GAOutcome ga = minimize_ga(
        ranges, config, mechanism_objective(task, weights, bounds, options.evaluation, true),
        options.execution);

    SynthesisResult result;
    result.best_dims = bounds.decode(ga.best_genes);
    result.best = evaluate(result.best_dims, task, weights, options.evaluation);
    result.history = ga.history;
    result.refined_dims = refine_mechanism(result.best_dims, task, weights, bounds, options,
                                           &result.refine_iterations);
    result.refined = evaluate(result.refined_dims, task, weights, options.evaluation);
    return result;
}

}  // namespace fivebar
