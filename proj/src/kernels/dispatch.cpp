#include "lnls/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace lnls::kernels {

namespace {

struct Table {
    double (*edge_energy)(std::span<const std::uint32_t>, std::span<const std::uint32_t>,
                          std::span<const double>, std::span<const double>);
    double (*dot)(std::span<const double>, std::span<const double>);
    void (*local_fields)(std::span<const std::uint32_t>, std::span<const std::uint32_t>,
                         std::span<const double>, std::span<const double>,
                         std::span<const double>, std::span<double>);
    FlipChoice (*best_flip)(std::span<const double>, std::span<const double>);
    void (*widen_spins)(std::span<const std::int8_t>, std::span<double>);
};

constexpr Table scalar_table{scalar::edge_energy, scalar::dot, scalar::local_fields,
                             scalar::best_flip, scalar::widen_spins};
#if defined(LNLS_HAVE_AVX2)
constexpr Table avx2_table{avx2::edge_energy, avx2::dot, avx2::local_fields, avx2::best_flip,
                           avx2::widen_spins};
#endif

const Table* table_for(SimdLevel level) {
#if defined(LNLS_HAVE_AVX2)
    if (level == SimdLevel::avx2) {
        return &avx2_table;
    }
#endif
    (void)level;
    return &scalar_table;
}

std::atomic<SimdLevel>& level_slot() {
    static std::atomic<SimdLevel> level{detect()};
    return level;
}

const Table& current() { return *table_for(level_slot().load(std::memory_order_relaxed)); }

}  // namespace

std::string_view to_string(SimdLevel level) {
    return level == SimdLevel::avx2 ? "avx2" : "scalar";
}

bool supported(SimdLevel level) {
    if (level == SimdLevel::scalar) {
        return true;
    }
#if defined(LNLS_HAVE_AVX2)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

SimdLevel detect() {
    if (const char* env = std::getenv("LNLS_SIMD")) {
        const std::string want{env};
        if (want == "scalar") {
            return SimdLevel::scalar;
        }
        if (want == "avx2" && supported(SimdLevel::avx2)) {
            return SimdLevel::avx2;
        }
    }
    return supported(SimdLevel::avx2) ? SimdLevel::avx2 : SimdLevel::scalar;
}

SimdLevel active_level() { return level_slot().load(std::memory_order_relaxed); }

void set_level(SimdLevel level) {
    if (!supported(level)) {
        throw std::invalid_argument("SIMD level not supported on this CPU: " +
                                    std::string{to_string(level)});
    }
    level_slot().store(level, std::memory_order_relaxed);
}

double edge_energy(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                   std::span<const double> J, std::span<const double> x) {
    return current().edge_energy(a, b, J, x);
}

double dot(std::span<const double> h, std::span<const double> x) { return current().dot(h, x); }

void local_fields(std::span<const std::uint32_t> offsets, std::span<const std::uint32_t> nbr,
                  std::span<const double> w, std::span<const double> h, std::span<const double> x,
                  std::span<double> out) {
    current().local_fields(offsets, nbr, w, h, x, out);
}

FlipChoice best_flip(std::span<const double> x, std::span<const double> f) {
    return current().best_flip(x, f);
}

void widen_spins(std::span<const std::int8_t> s, std::span<double> out) {
    current().widen_spins(s, out);
}

}  // namespace lnls::kernels
