#pragma once

// Greedy large-neighborhood local search over lattice subspaces with
// classical subsolvers and a simulated QPU access-time clock.

#include "lnls/embedding.hpp"
#include "lnls/ising.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lnls {

enum class SubsolverKind { sa, greedy, brute_force, programmed_sa, programmed_random };

std::string_view to_string(SubsolverKind kind);
SubsolverKind parse_subsolver_kind(std::string_view text);

struct SubsolverSpec {
    SubsolverKind kind = SubsolverKind::sa;
    /// SA sweeps per sample (sa, programmed-sa).
    std::uint64_t sweeps = 198;
    /// Independent samples or restarts (sa, greedy).
    std::uint64_t samples = 1;
    /// Reads per simulated QPU call, n_R (programmed kinds, and the QPU clock).
    std::uint64_t reads = 25;
    double chain_strength = 2.0;
    /// Rescale programmed problems into the hardware ranges instead of failing.
    bool auto_scale = false;
};

/// Eq. (4) parameters in milliseconds, plus the classical update rate.
struct TimingModel {
    double t_p = 10.0;
    double t_ro = 0.2;
    double t_a = 0.1;
    double network_overhead = 0.0;
    double ns_per_update = 33.0;
};

/// t_p + (t_ro + t_a) n_r + network_overhead.
double accumulate_qpu_time(const TimingModel& timing, std::uint64_t n_r);

/// How simulated time is attributed per subsolver call. automatic: QPU model
/// for programmed kinds, spin updates times the rate otherwise.
enum class ClockMode { automatic, qpu, updates };

enum class WorkflowVariant { standard, post_process, parallel_process };

std::string_view to_string(WorkflowVariant v);
WorkflowVariant parse_workflow_variant(std::string_view text);
std::string_view to_string(ClockMode c);
ClockMode parse_clock_mode(std::string_view text);

struct LnlsConfig {
    /// Region templates used without hardware (classical subsolvers).
    std::vector<SubspaceShape> shapes;
    /// Origin embeddings; when non-empty they replace `shapes` and their
    /// vacancies are excluded from the subspace.
    std::vector<OriginEmbedding> embeddings;
    std::shared_ptr<const HardwareGraph> hardware;

    double e_target = -std::numeric_limits<double>::infinity();
    std::uint64_t max_iterations = 128;
    SubsolverSpec subsolver;
    TimingModel timing;
    ClockMode clock = ClockMode::automatic;
    WorkflowVariant variant = WorkflowVariant::standard;
    std::uint64_t seed = 0;
    /// Start state; uniform random when absent.
    std::optional<SpinState> initial_state;
};

struct IterationRecord {
    std::uint64_t iteration = 0;
    double energy = 0.0;
    bool accepted = false;
    double sim_time_ms = 0.0;
    double wall_time_ms = 0.0;
    double qpu_time_ms = 0.0;
    /// Driver time outside the subsolver call.
    double overhead_ms = 0.0;
    std::size_t region = 0;
    Displacement offset{};
};

struct BurnDownRecord {
    double initial_energy = 0.0;
    std::vector<IterationRecord> iterations;

    double final_energy() const {
        return iterations.empty() ? initial_energy : iterations.back().energy;
    }
};

struct LnlsResult {
    SpinState state;
    double energy = 0.0;
    BurnDownRecord trace;
};

struct Proposal {
    /// Candidate assignments of the subproblem variables.
    std::vector<SpinState> assignments;
    double sim_time_ms = 0.0;
    double qpu_time_ms = 0.0;
    std::uint64_t spin_updates = 0;
};

struct SubsolveContext {
    const OriginEmbedding* embedding = nullptr;
    const HardwareGraph* hardware = nullptr;
    /// Lattice connectivity for the SA schedule.
    int connectivity = 6;
    TimingModel timing;
    ClockMode clock = ClockMode::automatic;
};

Proposal subsolve(const Subproblem& subproblem, const SubsolverSpec& spec,
                  const SubsolveContext& context, std::uint64_t seed);

/// Validates the configuration against the model; throws std::invalid_argument.
void validate_config(const IsingModel& model, const LnlsConfig& config);

/// One iteration of the search on an explicit region (index into the
/// configured embeddings or shapes) and offset. Updates state and energy.
IterationRecord lnls_iteration(const IsingModel& model, const LnlsConfig& config, SpinState& state,
                               double& energy, std::size_t region, const Displacement& offset,
                               std::uint64_t iteration);

/// Algorithm 1 with the configured workflow variant.
LnlsResult run_lnls(const IsingModel& model, const LnlsConfig& config);

/// Same as run_lnls; named for the workflow-variant entry point.
inline LnlsResult run_workflow_variant(const IsingModel& model, const LnlsConfig& config) {
    return run_lnls(model, config);
}

}  // namespace lnls
