#include "lnls/lnls.hpp"

#include "lnls/rng.hpp"
#include "lnls/samplers.hpp"

#include <chrono>
#include <stdexcept>
#include <string>

namespace lnls {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool is_programmed(SubsolverKind k) {
    return k == SubsolverKind::programmed_sa || k == SubsolverKind::programmed_random;
}

}  // namespace

std::string_view to_string(SubsolverKind kind) {
    switch (kind) {
        case SubsolverKind::sa: return "sa";
        case SubsolverKind::greedy: return "greedy";
        case SubsolverKind::brute_force: return "brute-force";
        case SubsolverKind::programmed_sa: return "programmed-sa";
        case SubsolverKind::programmed_random: return "programmed-random";
    }
    return "sa";
}

SubsolverKind parse_subsolver_kind(std::string_view text) {
    for (auto k : {SubsolverKind::sa, SubsolverKind::greedy, SubsolverKind::brute_force,
                   SubsolverKind::programmed_sa, SubsolverKind::programmed_random}) {
        if (text == to_string(k)) {
            return k;
        }
    }
    throw std::invalid_argument("unknown subsolver '" + std::string{text} +
                                "' (expected sa, greedy, brute-force, programmed-sa or "
                                "programmed-random)");
}

std::string_view to_string(WorkflowVariant v) {
    switch (v) {
        case WorkflowVariant::standard: return "default";
        case WorkflowVariant::post_process: return "post-process";
        case WorkflowVariant::parallel_process: return "parallel-process";
    }
    return "default";
}

WorkflowVariant parse_workflow_variant(std::string_view text) {
    for (auto v : {WorkflowVariant::standard, WorkflowVariant::post_process,
                   WorkflowVariant::parallel_process}) {
        if (text == to_string(v)) {
            return v;
        }
    }
    throw std::invalid_argument("unknown workflow variant '" + std::string{text} +
                                "' (expected default, post-process or parallel-process)");
}

std::string_view to_string(ClockMode c) {
    switch (c) {
        case ClockMode::automatic: return "auto";
        case ClockMode::qpu: return "qpu";
        case ClockMode::updates: return "updates";
    }
    return "auto";
}

ClockMode parse_clock_mode(std::string_view text) {
    for (auto c : {ClockMode::automatic, ClockMode::qpu, ClockMode::updates}) {
        if (text == to_string(c)) {
            return c;
        }
    }
    throw std::invalid_argument("unknown clock '" + std::string{text} +
                                "' (expected auto, qpu or updates)");
}

double accumulate_qpu_time(const TimingModel& timing, std::uint64_t n_r) {
    return timing.t_p + (timing.t_ro + timing.t_a) * static_cast<double>(n_r) +
           timing.network_overhead;
}

// ---------------------------------------------------------------------------
// Subsolvers

Proposal subsolve(const Subproblem& subproblem, const SubsolverSpec& spec,
                  const SubsolveContext& context, std::uint64_t seed) {
    Proposal out;
    const auto& p = subproblem.problem;
    const std::size_t n = p.size();
    if (n == 0) {
        out.assignments.emplace_back();
    } else {
        switch (spec.kind) {
            case SubsolverKind::sa: {
                SaRun run;
                run.samples = spec.samples;
                run.sweeps = spec.sweeps;
                run.seed = seed;
                const auto schedule = default_schedule(context.connectivity, n, spec.sweeps);
                auto res = run_sa(p, schedule, run);
                out.assignments.push_back(std::move(res.best_state));
                out.spin_updates = res.spin_updates;
                break;
            }
            case SubsolverKind::greedy: {
                auto res = run_sgd(p, spec.samples, seed);
                out.assignments.push_back(std::move(res.best_state));
                // Each descent step scans all n candidates.
                out.spin_updates = (res.flips + spec.samples) * n;
                break;
            }
            case SubsolverKind::brute_force: {
                auto res = brute_force(p);
                out.assignments.push_back(std::move(res.state));
                out.spin_updates = std::uint64_t{1} << n;
                break;
            }
            case SubsolverKind::programmed_sa:
            case SubsolverKind::programmed_random: {
                if (!context.embedding || !context.hardware) {
                    throw std::invalid_argument(std::string{to_string(spec.kind)} +
                                                " subsolver requires an embedding and hardware");
                }
                const auto prog = program(subproblem, *context.embedding, *context.hardware,
                                          spec.chain_strength, spec.auto_scale);
                const std::size_t nq = prog.qubits.size();
                std::vector<SpinState> samples;
                if (spec.kind == SubsolverKind::programmed_random) {
                    Rng rng(seed);
                    samples.assign(spec.reads, SpinState(nq));
                    for (auto& s : samples) {
                        for (auto& x : s) {
                            x = rng.spin();
                        }
                    }
                } else {
                    SaRun run;
                    run.samples = spec.reads;
                    run.sweeps = spec.sweeps;
                    run.seed = seed;
                    run.keep_samples = true;
                    const auto sparse = prog.sparse();
                    const auto schedule = default_schedule(15, nq, spec.sweeps);
                    auto res = run_sa(sparse, schedule, run);
                    samples = std::move(res.samples);
                    out.spin_updates = res.spin_updates;
                }
                out.assignments = readout(samples, prog);
                break;
            }
        }
    }
    const bool qpu_clock =
        context.clock == ClockMode::qpu ||
        (context.clock == ClockMode::automatic && is_programmed(spec.kind));
    if (qpu_clock) {
        out.qpu_time_ms = accumulate_qpu_time(context.timing, spec.reads);
        out.sim_time_ms = out.qpu_time_ms;
    } else {
        out.sim_time_ms = static_cast<double>(out.spin_updates) * context.timing.ns_per_update * 1e-6;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Driver

void validate_config(const IsingModel& model, const LnlsConfig& config) {
    const auto& topo = model.topology();
    if (config.max_iterations < 1) {
        throw std::invalid_argument("max_iterations must be at least 1");
    }
    if (config.subsolver.sweeps < 1 || config.subsolver.samples < 1) {
        throw std::invalid_argument("subsolver sweeps and samples must be positive");
    }
    const auto& t = config.timing;
    if (t.t_p < 0 || t.t_ro < 0 || t.t_a < 0 || t.network_overhead < 0 || t.ns_per_update < 0) {
        throw std::invalid_argument("timing parameters must be non-negative");
    }
    if (config.embeddings.empty() && config.shapes.empty()) {
        throw std::invalid_argument("LNLS needs at least one subspace shape or embedding");
    }
    for (const auto& s : config.shapes) {
        check_shape_fits(topo, s);
    }
    for (const auto& e : config.embeddings) {
        check_shape_fits(topo, e.shape);
        if (is_programmed(config.subsolver.kind)) {
            check_embedding_lattice(e, topo);
        }
    }
    if (is_programmed(config.subsolver.kind)) {
        if (config.embeddings.empty() || !config.hardware) {
            throw std::invalid_argument(std::string{to_string(config.subsolver.kind)} +
                                        " subsolver requires embeddings and a hardware graph");
        }
        if (config.subsolver.reads < 1) {
            throw std::invalid_argument("programmed subsolvers need at least one read");
        }
    }
    if (config.initial_state && config.initial_state->size() != model.size()) {
        throw std::invalid_argument("initial state size does not match the model");
    }
}

IterationRecord lnls_iteration(const IsingModel& model, const LnlsConfig& config, SpinState& state,
                               double& energy, std::size_t region, const Displacement& offset,
                               std::uint64_t iteration) {
    const auto t0 = Clock::now();
    double solver_ms = 0.0;
    const bool use_embeddings = !config.embeddings.empty();
    const OriginEmbedding* emb = use_embeddings ? &config.embeddings.at(region) : nullptr;
    const SubspaceShape& shape = use_embeddings ? emb->shape : config.shapes.at(region);

    const auto selection = select_subspace(model.topology(), shape, offset,
                                           emb ? std::span<const std::uint8_t>(emb->vacant)
                                               : std::span<const std::uint8_t>{});
    const auto sub = build_subproblem(model, state, selection);

    SubsolveContext ctx;
    ctx.embedding = emb;
    ctx.hardware = config.hardware.get();
    ctx.connectivity = model.topology().connectivity();
    ctx.timing = config.timing;
    ctx.clock = config.clock;
    const std::uint64_t call_seed = derive_seed(config.seed, iteration + 1);

    const auto ts = Clock::now();
    auto proposal = subsolve(sub, config.subsolver, ctx, call_seed);
    solver_ms += ms_since(ts);

    // Best proposal by subproblem energy; the first wins ties.
    std::size_t best = 0;
    double best_e = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < proposal.assignments.size(); ++i) {
        const double e = sub.problem.energy(proposal.assignments[i]);
        if (e < best_e) {
            best_e = e;
            best = i;
        }
    }
    SpinState candidate = std::move(proposal.assignments[best]);
    if (config.variant == WorkflowVariant::post_process && !candidate.empty()) {
        const auto tp = Clock::now();
        sgd_descend(sub.problem, candidate);
        solver_ms += ms_since(tp);
        best_e = sub.problem.energy(candidate);
    }

    IterationRecord rec;
    rec.iteration = iteration;
    rec.region = region;
    rec.offset = offset;
    rec.sim_time_ms = proposal.sim_time_ms;
    rec.qpu_time_ms = proposal.qpu_time_ms;

    const double current_e = sub.problem.energy(sub.current);
    if (best_e < current_e) {
        apply_proposal(model, state, selection, candidate);
        const double e = lnls::energy(model, state);
        // Floating-point guard: subproblem and full energies differ by a constant.
        if (e < energy) {
            energy = e;
            rec.accepted = true;
        } else {
            for (std::size_t i = 0; i < sub.members.size(); ++i) {
                state[sub.members[i]] = sub.current[i];
            }
        }
    }

    if (config.variant == WorkflowVariant::parallel_process) {
        const auto tp = Clock::now();
        SpinState trial = state;
        sgd_descend(model.sparse(), trial);
        const double e = lnls::energy(model, trial);
        solver_ms += ms_since(tp);
        if (e < energy) {
            state = std::move(trial);
            energy = e;
            rec.accepted = true;
        }
    }
    rec.energy = energy;
    rec.overhead_ms = ms_since(t0) - solver_ms;
    return rec;
}

LnlsResult run_lnls(const IsingModel& model, const LnlsConfig& config) {
    validate_config(model, config);
    const auto t0 = Clock::now();
    Rng rng(config.seed);

    LnlsResult out;
    if (config.initial_state) {
        out.state = *config.initial_state;
    } else {
        out.state.resize(model.size());
        for (auto& s : out.state) {
            s = rng.spin();
        }
    }
    out.energy = energy(model, out.state);
    out.trace.initial_energy = out.energy;

    const auto& topo = model.topology();
    const std::size_t regions =
        config.embeddings.empty() ? config.shapes.size() : config.embeddings.size();
    double sim = 0.0;
    double qpu = 0.0;
    for (std::uint64_t it = 0; it < config.max_iterations && out.energy > config.e_target; ++it) {
        const std::size_t region = regions == 1 ? 0 : static_cast<std::size_t>(rng.below(regions));
        const auto offset = topo.displacement(static_cast<std::size_t>(rng.below(topo.num_displacements())));
        auto rec = lnls_iteration(model, config, out.state, out.energy, region, offset, it + 1);
        sim += rec.sim_time_ms;
        qpu += rec.qpu_time_ms;
        rec.sim_time_ms = sim;
        rec.qpu_time_ms = qpu;
        rec.wall_time_ms = ms_since(t0);
        out.trace.iterations.push_back(rec);
    }
    return out;
}

}  // namespace lnls
