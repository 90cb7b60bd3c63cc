#include "lnls/samplers.hpp"

#include "lnls/kernels.hpp"
#include "lnls/rng.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lnls {

double SaSchedule::temperature(std::uint64_t s) const {
    if (s >= sweeps) {
        return 0.0;
    }
    return t_max * std::pow(t_min / t_max, static_cast<double>(s) / static_cast<double>(sweeps));
}

SaSchedule default_schedule(int connectivity, std::size_t num_variables, std::uint64_t sweeps) {
    if (sweeps < 1) {
        throw std::invalid_argument("SA needs at least one sweep");
    }
    SaSchedule s;
    s.t_max = connectivity / std::log(2.0);
    s.t_min = 2.0 / std::log(100.0 * static_cast<double>(std::max<std::size_t>(num_variables, 1)));
    s.sweeps = sweeps;
    return s;
}

SaSchedule default_schedule(const IsingModel& model, std::uint64_t sweeps) {
    return default_schedule(model.topology().connectivity(), model.size(), sweeps);
}

namespace {

/// Spin state plus maintained local fields f_i = h_i + sum_j J_ij x_j.
class FieldState {
public:
    FieldState(const SparseIsing& p, SpinState& x) : p_(p), x_(x), f_(x.size()) {
        p_.local_fields(x_, f_);
    }

    double delta(std::size_t i) const { return -2.0 * x_[i] * f_[i]; }

    void flip(std::size_t i) {
        x_[i] = static_cast<std::int8_t>(-x_[i]);
        const double two_x = 2.0 * x_[i];
        const auto off = p_.offsets();
        const auto nbr = p_.adjacency();
        const auto w = p_.weights();
        for (std::uint32_t k = off[i]; k < off[i + 1]; ++k) {
            f_[nbr[k]] += two_x * w[k];
        }
    }

    std::span<const double> fields() const { return f_; }

private:
    const SparseIsing& p_;
    SpinState& x_;
    std::vector<double> f_;
};

void sweep(FieldState& fs, std::size_t n, double T, Rng& rng) {
    if (T <= 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            if (fs.delta(i) < 0.0) {
                fs.flip(i);
            }
        }
        return;
    }
    const double beta = 1.0 / T;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = fs.delta(i);
        if (d <= 0.0 || rng.uniform() < std::exp(-d * beta)) {
            fs.flip(i);
        }
    }
}

SpinState random_state(std::size_t n, Rng& rng) {
    SpinState x(n);
    for (auto& s : x) {
        s = rng.spin();
    }
    return x;
}

}  // namespace

SaResult run_sa(const SparseIsing& problem, const SaSchedule& schedule, const SaRun& run) {
    if (run.samples < 1 || schedule.sweeps < 1) {
        throw std::invalid_argument("SA needs at least one sample and one sweep");
    }
    if (schedule.sweeps > 1 && !(schedule.t_max > 0.0 && schedule.t_min > 0.0)) {
        throw std::invalid_argument("SA temperatures must be positive");
    }
    const std::size_t n = problem.size();
    SaResult out;
    out.best_energy = std::numeric_limits<double>::infinity();
    for (std::uint64_t sample = 0; sample < run.samples; ++sample) {
        Rng rng(run.seed, sample);
        SpinState x = random_state(n, rng);
        {
            FieldState fs(problem, x);
            for (std::uint64_t s = 1; s <= schedule.sweeps; ++s) {
                sweep(fs, n, schedule.temperature(s), rng);
            }
        }
        const double e = problem.energy(x);
        if (e < out.best_energy) {
            out.best_energy = e;
            out.best_state = x;
        }
        if (run.keep_samples) {
            out.samples.push_back(std::move(x));
            out.energies.push_back(e);
        }
    }
    out.spin_updates = run.samples * schedule.sweeps * n;
    return out;
}

SaResult run_sa(const IsingModel& model, const SaRun& run) {
    auto schedule = default_schedule(model, run.sweeps);
    if (run.t_max) {
        schedule.t_max = *run.t_max;
    }
    if (run.t_min) {
        schedule.t_min = *run.t_min;
    }
    return run_sa(model.sparse(), schedule, run);
}

void metropolis_sweeps(const SparseIsing& problem, SpinState& state, double temperature,
                       std::uint64_t sweeps, std::uint64_t seed) {
    if (!(temperature > 0.0)) {
        throw std::invalid_argument("fixed-temperature sweeps need T > 0");
    }
    Rng rng(seed);
    FieldState fs(problem, state);
    for (std::uint64_t s = 0; s < sweeps; ++s) {
        sweep(fs, problem.size(), temperature, rng);
    }
}

std::uint64_t sgd_descend(const SparseIsing& problem, SpinState& state) {
    const std::size_t n = problem.size();
    if (state.size() != n) {
        throw std::invalid_argument("sgd_descend: state size mismatch");
    }
    if (n == 0) {
        return 0;
    }
    FieldState fs(problem, state);
    std::vector<double> xd(n);
    kernels::widen_spins(state, xd);
    std::uint64_t flips = 0;
    for (;;) {
        const auto choice = kernels::best_flip(xd, fs.fields());
        if (!(choice.delta < 0.0)) {
            break;
        }
        fs.flip(choice.index);
        xd[choice.index] = -xd[choice.index];
        ++flips;
    }
    return flips;
}

SgdResult run_sgd(const SparseIsing& problem, std::uint64_t n_restarts, std::uint64_t seed) {
    if (n_restarts < 1) {
        throw std::invalid_argument("SGD needs at least one restart");
    }
    SgdResult out;
    out.best_energy = std::numeric_limits<double>::infinity();
    for (std::uint64_t r = 0; r < n_restarts; ++r) {
        Rng rng(seed, r);
        SpinState x = random_state(problem.size(), rng);
        out.flips += sgd_descend(problem, x);
        const double e = problem.energy(x);
        if (e < out.best_energy) {
            out.best_energy = e;
            out.best_state = std::move(x);
        }
    }
    return out;
}

SgdResult run_sgd(const IsingModel& model, std::uint64_t n_restarts, std::uint64_t seed) {
    return run_sgd(model.sparse(), n_restarts, seed);
}

BruteForceResult brute_force(const SparseIsing& problem) {
    const std::size_t n = problem.size();
    if (n > brute_force_limit) {
        throw std::invalid_argument("brute force limited to " + std::to_string(brute_force_limit) +
                                    " variables, got " + std::to_string(n));
    }
    // Gray-code walk from the all -1 state. Variable v is bit (n - 1 - v) of
    // the key, so the smallest key is the lexicographically smallest state.
    SpinState x(n, -1);
    double scale = 1.0;
    for (double v : problem.fields()) {
        scale += std::abs(v);
    }
    for (double v : problem.edge_J()) {
        scale += std::abs(v);
    }
    const double tol = 1e-12 * scale;

    double e = problem.energy(x);
    double best = e;
    std::uint64_t best_key = 0;
    std::uint64_t key = 0;
    {
        FieldState fs(problem, x);
        const std::uint64_t total = std::uint64_t{1} << n;
        for (std::uint64_t i = 1; i < total; ++i) {
            const int bit = std::countr_zero(i);
            const std::size_t v = n - 1 - static_cast<std::size_t>(bit);
            e += fs.delta(v);
            fs.flip(v);
            key ^= std::uint64_t{1} << bit;
            if (e < best - tol) {
                best = e;
                best_key = key;
            } else if (e <= best + tol && key < best_key) {
                best = std::min(best, e);
                best_key = key;
            }
        }
    }
    BruteForceResult out;
    out.state.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        out.state[v] = (best_key >> (n - 1 - v)) & 1 ? 1 : -1;
    }
    out.energy = problem.energy(out.state);
    return out;
}

BruteForceResult brute_force(const IsingModel& model) { return brute_force(model.sparse()); }

double measure_update_rate(const IsingModel& model, std::uint64_t sweeps, std::uint64_t seed) {
    SaRun run;
    run.samples = 1;
    run.sweeps = sweeps;
    run.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_sa(model, run);
    const auto t1 = std::chrono::steady_clock::now();
    const double ns = std::chrono::duration<double, std::nano>(t1 - t0).count();
    return ns / static_cast<double>(res.spin_updates);
}

}  // namespace lnls
