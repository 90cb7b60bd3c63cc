#pragma once

// Whole-problem classical solvers: simulated annealing, steepest greedy
// descent, and an exhaustive oracle.

#include "lnls/ising.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace lnls {

/// Geometric annealing schedule with a terminal zero-temperature sweep.
struct SaSchedule {
    double t_max = 1.0;
    double t_min = 0.1;
    std::uint64_t sweeps = 1;

    /// Temperature of sweep s in 1..sweeps. The last sweep is the quench (0).
    double temperature(std::uint64_t s) const;
};

/// T_max = k / ln 2, T_min = 2 / ln(100 N).
SaSchedule default_schedule(int connectivity, std::size_t num_variables, std::uint64_t sweeps);
SaSchedule default_schedule(const IsingModel& model, std::uint64_t sweeps);

struct SaRun {
    std::uint64_t samples = 1;
    std::uint64_t sweeps = 1;
    std::uint64_t seed = 0;
    std::optional<double> t_max;
    std::optional<double> t_min;
    /// Keep every sample's final state (used by subsolvers returning proposal sets).
    bool keep_samples = false;
};

struct SaResult {
    SpinState best_state;
    double best_energy = 0.0;
    std::uint64_t spin_updates = 0;
    std::vector<SpinState> samples;
    std::vector<double> energies;
};

/// Samples start from independent uniform random states drawn from the
/// stream (seed, sample index). Each sweep visits variables in ascending
/// order. The best sample wins; ties go to the lowest sample index.
SaResult run_sa(const SparseIsing& problem, const SaSchedule& schedule, const SaRun& run);
SaResult run_sa(const IsingModel& model, const SaRun& run);

/// Metropolis sweeps at a fixed temperature (T > 0) from `state`, updating it
/// in place. Used for equilibrium tests of the acceptance rule.
void metropolis_sweeps(const SparseIsing& problem, SpinState& state, double temperature,
                       std::uint64_t sweeps, std::uint64_t seed);

/// Steepest single-flip descent in place: repeatedly flips the variable with
/// the most negative energy change (lowest index on ties) until none is
/// negative. Returns the number of flips.
std::uint64_t sgd_descend(const SparseIsing& problem, SpinState& state);

struct SgdResult {
    SpinState best_state;
    double best_energy = 0.0;
    std::uint64_t flips = 0;
};

/// Best of n_restarts descents from independent uniform random starts.
SgdResult run_sgd(const SparseIsing& problem, std::uint64_t n_restarts, std::uint64_t seed);
SgdResult run_sgd(const IsingModel& model, std::uint64_t n_restarts, std::uint64_t seed);

inline constexpr std::size_t brute_force_limit = 24;

struct BruteForceResult {
    SpinState state;
    double energy = 0.0;
};

/// Exhaustive minimum over 2^N states, N <= 24. Among optimal states the
/// lexicographically smallest (with -1 < +1) is returned.
BruteForceResult brute_force(const SparseIsing& problem);
BruteForceResult brute_force(const IsingModel& model);

/// Wall-clock nanoseconds per spin update of run_sa with n = 1 and the given
/// sweep count.
double measure_update_rate(const IsingModel& model, std::uint64_t sweeps, std::uint64_t seed = 0);

}  // namespace lnls
