#pragma once

// Data-parallel inner loops shared by the samplers and the LNLS driver.
//
// Every kernel has a scalar reference implementation and an AVX2 variant.
// The variant is chosen once at runtime from the CPU feature flags (override
// with LNLS_SIMD=scalar|avx2) and can be forced from tests with set_level().
// The two paths agree exactly on integer-valued inputs and to rounding on
// real-valued inputs; tests/test_kernels.cpp pins both properties.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace lnls::kernels {

enum class SimdLevel { scalar, avx2 };

std::string_view to_string(SimdLevel level);

/// True when the CPU (and the build) support the given level.
bool supported(SimdLevel level);

/// Best level supported by this CPU, honoring LNLS_SIMD.
SimdLevel detect();

SimdLevel active_level();

/// Switches the dispatch table. Throws if the level is unsupported.
void set_level(SimdLevel level);

/// Lowest flip energy change found by best_flip().
struct FlipChoice {
    std::size_t index;
    double delta;
};

/// Sum over edges e of J[e] * x[a[e]] * x[b[e]].
double edge_energy(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                   std::span<const double> J, std::span<const double> x);

/// Sum of h[i] * x[i].
double dot(std::span<const double> h, std::span<const double> x);

/// out[i] = h[i] + sum_{k in row i} w[k] * x[nbr[k]] over a CSR adjacency.
void local_fields(std::span<const std::uint32_t> offsets, std::span<const std::uint32_t> nbr,
                  std::span<const double> w, std::span<const double> h, std::span<const double> x,
                  std::span<double> out);

/// argmin_i of -2 x[i] f[i]; ties go to the lowest index. Empty input gives
/// {0, +inf}.
FlipChoice best_flip(std::span<const double> x, std::span<const double> f);

/// Widens +-1 int8 spins to doubles.
void widen_spins(std::span<const std::int8_t> s, std::span<double> out);

// Fixed-level entry points, used by the equivalence tests.
namespace scalar {
double edge_energy(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                   std::span<const double> J, std::span<const double> x);
double dot(std::span<const double> h, std::span<const double> x);
void local_fields(std::span<const std::uint32_t> offsets, std::span<const std::uint32_t> nbr,
                  std::span<const double> w, std::span<const double> h, std::span<const double> x,
                  std::span<double> out);
FlipChoice best_flip(std::span<const double> x, std::span<const double> f);
void widen_spins(std::span<const std::int8_t> s, std::span<double> out);
}  // namespace scalar

namespace avx2 {
double edge_energy(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                   std::span<const double> J, std::span<const double> x);
double dot(std::span<const double> h, std::span<const double> x);
void local_fields(std::span<const std::uint32_t> offsets, std::span<const std::uint32_t> nbr,
                  std::span<const double> w, std::span<const double> h, std::span<const double> x,
                  std::span<double> out);
FlipChoice best_flip(std::span<const double> x, std::span<const double> f);
void widen_spins(std::span<const std::int8_t> s, std::span<double> out);
}  // namespace avx2

}  // namespace lnls::kernels
