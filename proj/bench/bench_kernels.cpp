// Serial vs parallel timing of the two data-parallel kernels: GA population
// evaluation and per-sample inverse dynamics.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fivebar/dynamics.hpp"
#include "fivebar/errors.hpp"
#include "fivebar/objective.hpp"
#include "fivebar/sample_task.hpp"
#include "fivebar/synthesis.hpp"

using namespace fivebar;

namespace {

template <typename F>
double best_of(int repeats, F&& work) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < repeats; ++i) {
        const auto start = std::chrono::steady_clock::now();
        work();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

void report(const char* kernel, double serial, double parallel) {
    std::printf("%-24s serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx\n", kernel, serial * 1e3, parallel * 1e3,
                serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("threads: %d, best of %d\n", threads, repeats);

    const TaskSpec task = sample_task(72);
    const DesignBounds bounds;
    std::mt19937_64 rng(1);
    std::vector<std::vector<double>> population;
    for (int i = 0; i < 400; ++i) {
        std::vector<double> genes;
        for (const GeneRange& g : bounds.genes()) {
            genes.push_back(std::uniform_real_distribution<double>(g.lower, g.upper)(rng));
        }
        population.push_back(genes);
    }
    auto objective = [&](std::span<const double> genes) {
        try {
            return evaluate(bounds.decode(genes), task).total;
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    std::vector<double> sink;
    const double pop_serial = best_of(repeats, [&] { sink = evaluate_population(population, objective, Execution::serial); });
    const double pop_parallel =
        best_of(repeats, [&] { sink = evaluate_population(population, objective, Execution::parallel); });
    report("population (400)", pop_serial, pop_parallel);

    const MechanismDims dims = reference_mechanism();
    const TaskSpec dense = sample_task(3600);
    const ClosureTrace trace = track_closure(dims, dense);
    TorqueProfile torques;
    const double dyn_serial = best_of(
        repeats, [&] { torques = inverse_dynamics(dims, InertialParams{}, trace, dense.cv_speed, Execution::serial); });
    const double dyn_parallel = best_of(
        repeats, [&] { torques = inverse_dynamics(dims, InertialParams{}, trace, dense.cv_speed, Execution::parallel); });
    report("inverse dynamics (3600)", dyn_serial, dyn_parallel);
    return 0;
}
