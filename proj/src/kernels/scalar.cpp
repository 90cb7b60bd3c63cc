#include "lnls/kernels.hpp"

#include <limits>

namespace lnls::kernels::scalar {

double edge_energy(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                   std::span<const double> J, std::span<const double> x) {
    double sum = 0.0;
    for (std::size_t e = 0; e < J.size(); ++e) {
        sum += J[e] * x[a[e]] * x[b[e]];
    }
    return sum;
}

double dot(std::span<const double> h, std::span<const double> x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        sum += h[i] * x[i];
    }
    return sum;
}

void local_fields(std::span<const std::uint32_t> offsets, std::span<const std::uint32_t> nbr,
                  std::span<const double> w, std::span<const double> h, std::span<const double> x,
                  std::span<double> out) {
    const std::size_t n = h.size();
    for (std::size_t i = 0; i < n; ++i) {
        double f = 0.0;
        for (std::uint32_t k = offsets[i]; k < offsets[i + 1]; ++k) {
            f += w[k] * x[nbr[k]];
        }
        out[i] = h[i] + f;
    }
}

FlipChoice best_flip(std::span<const double> x, std::span<const double> f) {
    FlipChoice best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = -2.0 * x[i] * f[i];
        if (d < best.delta) {
            best = {i, d};
        }
    }
    return best;
}

void widen_spins(std::span<const std::int8_t> s, std::span<double> out) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = static_cast<double>(s[i]);
    }
}

}  // namespace lnls::kernels::scalar
