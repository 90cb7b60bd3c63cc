#include "lnls/kernels.hpp"
#include "lnls/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace lnls;
namespace k = lnls::kernels;

namespace {

struct Csr {
    std::vector<std::uint32_t> offsets{0};
    std::vector<std::uint32_t> nbr;
    std::vector<double> w;
};

Csr random_csr(std::size_t n, Rng& rng, bool integer) {
    Csr c;
    for (std::size_t i = 0; i < n; ++i) {
        const auto deg = rng.below(18);
        for (std::uint64_t d = 0; d < deg; ++d) {
            c.nbr.push_back(static_cast<std::uint32_t>(rng.below(n)));
            c.w.push_back(integer ? static_cast<double>(static_cast<int>(rng.below(5)) - 2)
                                  : rng.uniform() * 4 - 2);
        }
        c.offsets.push_back(static_cast<std::uint32_t>(c.nbr.size()));
    }
    return c;
}

std::vector<double> spins(std::size_t n, Rng& rng) {
    std::vector<double> x(n);
    for (auto& v : x) {
        v = rng.spin();
    }
    return x;
}

}  // namespace

TEST_CASE("scalar best_flip picks the lowest index on ties and handles empty input") {
    const std::vector<double> x{1, -1, 1, -1};
    const std::vector<double> f{1, -1, 1, 0};
    const auto c = k::scalar::best_flip(x, f);
    CHECK(c.index == 0);
    CHECK(c.delta == -2.0);
    const auto e = k::scalar::best_flip({}, {});
    CHECK(e.index == 0);
    CHECK(std::isinf(e.delta));
}

TEST_CASE("dispatch honours set_level and reports support") {
    CHECK(k::supported(k::SimdLevel::scalar));
    const auto before = k::active_level();
    k::set_level(k::SimdLevel::scalar);
    CHECK(k::active_level() == k::SimdLevel::scalar);
    if (!k::supported(k::SimdLevel::avx2)) {
        CHECK_THROWS(k::set_level(k::SimdLevel::avx2));
    }
    k::set_level(before);
}

TEST_CASE("AVX2 kernels match the scalar reference") {
    if (!k::supported(k::SimdLevel::avx2)) {
        MESSAGE("AVX2 not available on this machine; equivalence not exercised");
        return;
    }
    Rng rng(42);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 64u, 257u, 1000u}) {
        for (const bool integer : {true, false}) {
            CAPTURE(n);
            CAPTURE(integer);
            const auto x = spins(n, rng);
            std::vector<double> h(n);
            for (auto& v : h) {
                v = integer ? static_cast<double>(static_cast<int>(rng.below(9)) - 4)
                            : rng.uniform() * 2 - 1;
            }
            const auto csr = n ? random_csr(n, rng, integer) : Csr{};

            // Edge list from the CSR rows.
            std::vector<std::uint32_t> a;
            std::vector<std::uint32_t> b;
            for (std::size_t i = 0; i < n; ++i) {
                for (auto q = csr.offsets[i]; q < csr.offsets[i + 1]; ++q) {
                    a.push_back(static_cast<std::uint32_t>(i));
                    b.push_back(csr.nbr[q]);
                }
            }
            const double tol = integer ? 0.0 : 1e-12 * (1.0 + static_cast<double>(csr.w.size()));

            CHECK(std::abs(k::avx2::edge_energy(a, b, csr.w, x) -
                           k::scalar::edge_energy(a, b, csr.w, x)) <= tol);
            CHECK(std::abs(k::avx2::dot(h, x) - k::scalar::dot(h, x)) <= tol);

            if (n) {
                std::vector<double> f1(n);
                std::vector<double> f2(n);
                k::scalar::local_fields(csr.offsets, csr.nbr, csr.w, h, x, f1);
                k::avx2::local_fields(csr.offsets, csr.nbr, csr.w, h, x, f2);
                for (std::size_t i = 0; i < n; ++i) {
                    REQUIRE(std::abs(f1[i] - f2[i]) <= tol);
                }
                if (integer) {
                    const auto s = k::scalar::best_flip(x, f1);
                    const auto v = k::avx2::best_flip(x, f1);
                    CHECK(s.index == v.index);
                    CHECK(s.delta == v.delta);
                }
            }

            std::vector<std::int8_t> s8(n);
            for (std::size_t i = 0; i < n; ++i) {
                s8[i] = static_cast<std::int8_t>(x[i]);
            }
            std::vector<double> w1(n);
            std::vector<double> w2(n);
            k::scalar::widen_spins(s8, w1);
            k::avx2::widen_spins(s8, w2);
            CHECK(w1 == w2);
            CHECK(w1 == x);
        }
    }
}

TEST_CASE("AVX2 best_flip keeps the lowest index among many ties") {
    if (!k::supported(k::SimdLevel::avx2)) {
        return;
    }
    for (std::size_t n = 1; n < 40; ++n) {
        for (std::size_t first = 0; first < n; ++first) {
            std::vector<double> x(n, 1.0);
            std::vector<double> f(n, -1.0);
            for (std::size_t i = first; i < n; i += 3) {
                f[i] = 2.0;
            }
            const auto s = k::scalar::best_flip(x, f);
            const auto v = k::avx2::best_flip(x, f);
            REQUIRE(s.index == v.index);
            REQUIRE(s.index == first);
        }
    }
}
