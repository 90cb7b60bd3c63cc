#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's solvers or kernels.

#include "lnls/ising.hpp"

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace oracle {

/// Energy of a coupling list, term by term.
inline double energy(const std::vector<double>& h, const std::vector<lnls::Coupling>& c,
                     const std::vector<std::int8_t>& x) {
    double e = 0.0;
    for (const auto& k : c) {
        e += k.J * x[k.a] * x[k.b];
    }
    for (std::size_t i = 0; i < h.size(); ++i) {
        e += h[i] * x[i];
    }
    return e;
}

/// Full lattice energy from the model's raw arrays.
inline double model_energy(const lnls::IsingModel& m, const std::vector<std::int8_t>& x) {
    double e = 0.0;
    const auto edges = m.topology().edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        e += m.J()[k] * x[edges[k].a] * x[edges[k].b];
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        e += m.h()[i] * x[i];
    }
    return e;
}

inline std::vector<std::int8_t> state_of(std::uint64_t bits, std::size_t n) {
    std::vector<std::int8_t> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = (bits >> i & 1) ? 1 : -1;
    }
    return x;
}

/// Minimum over all states with the variables in `free` enumerated and the
/// rest held at `state`. Returns the minimizing full state and energy.
inline std::pair<std::vector<std::int8_t>, double> restricted_minimum(
    const lnls::IsingModel& m, const std::vector<std::int8_t>& state,
    const std::vector<lnls::VertexId>& free) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::int8_t> arg = state;
    std::vector<std::int8_t> x = state;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << free.size()); ++bits) {
        for (std::size_t i = 0; i < free.size(); ++i) {
            x[free[i]] = (bits >> i & 1) ? 1 : -1;
        }
        const double e = model_energy(m, x);
        if (e < best) {
            best = e;
            arg = x;
        }
    }
    return {arg, best};
}

/// Minimum vertex cover size by enumerating vertex subsets.
inline std::size_t min_cover_size(std::uint32_t n,
                                  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    std::size_t best = n;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        bool ok = true;
        for (const auto& [a, b] : edges) {
            if (!(s >> a & 1) && !(s >> b & 1)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            best = std::min<std::size_t>(best, static_cast<std::size_t>(__builtin_popcountll(s)));
        }
    }
    return best;
}

}  // namespace oracle
