// Compiled with -mavx2 only; callers reach these through the dispatch table
// after checking the CPU flags.

#include "lnls/kernels.hpp"

#include <immintrin.h>

#include <limits>

namespace lnls::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m128i load4(const std::uint32_t* p) {
    return _mm_loadu_si128(reinterpret_cast<const __m128i*>(p));
}

}  // namespace

double edge_energy(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                   std::span<const double> J, std::span<const double> x) {
    const std::size_t n = J.size();
    const double* xp = x.data();
    __m256d acc = _mm256_setzero_pd();
    std::size_t e = 0;
    for (; e + 4 <= n; e += 4) {
        const __m256d xa = _mm256_i32gather_pd(xp, load4(a.data() + e), 8);
        const __m256d xb = _mm256_i32gather_pd(xp, load4(b.data() + e), 8);
        const __m256d j = _mm256_loadu_pd(J.data() + e);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_mul_pd(j, xa), xb));
    }
    double sum = hsum(acc);
    for (; e < n; ++e) {
        sum += J[e] * x[a[e]] * x[b[e]];
    }
    return sum;
}

double dot(std::span<const double> h, std::span<const double> x) {
    const std::size_t n = h.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(h.data() + i),
                                               _mm256_loadu_pd(x.data() + i)));
    }
    double sum = hsum(acc);
    for (; i < n; ++i) {
        sum += h[i] * x[i];
    }
    return sum;
}

void local_fields(std::span<const std::uint32_t> offsets, std::span<const std::uint32_t> nbr,
                  std::span<const double> w, std::span<const double> h, std::span<const double> x,
                  std::span<double> out) {
    const std::size_t n = h.size();
    const double* xp = x.data();
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t k = offsets[i];
        const std::uint32_t end = offsets[i + 1];
        __m256d acc = _mm256_setzero_pd();
        for (; k + 4 <= end; k += 4) {
            const __m256d xv = _mm256_i32gather_pd(xp, load4(nbr.data() + k), 8);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w.data() + k), xv));
        }
        double f = hsum(acc);
        for (; k < end; ++k) {
            f += w[k] * x[nbr[k]];
        }
        out[i] = h[i] + f;
    }
}

FlipChoice best_flip(std::span<const double> x, std::span<const double> f) {
    const std::size_t n = x.size();
    FlipChoice best{0, std::numeric_limits<double>::infinity()};
    std::size_t i = 0;
    if (n >= 4) {
        const __m256d minus_two = _mm256_set1_pd(-2.0);
        __m256d best_v = _mm256_set1_pd(std::numeric_limits<double>::infinity());
        // Lane indices carried as doubles; exact below 2^53.
        __m256d best_i = _mm256_setzero_pd();
        __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
        const __m256d step = _mm256_set1_pd(4.0);
        for (; i + 4 <= n; i += 4) {
            const __m256d d = _mm256_mul_pd(
                _mm256_mul_pd(minus_two, _mm256_loadu_pd(x.data() + i)),
                _mm256_loadu_pd(f.data() + i));
            const __m256d lt = _mm256_cmp_pd(d, best_v, _CMP_LT_OQ);
            best_v = _mm256_blendv_pd(best_v, d, lt);
            best_i = _mm256_blendv_pd(best_i, idx, lt);
            idx = _mm256_add_pd(idx, step);
        }
        alignas(32) double vals[4];
        alignas(32) double inds[4];
        _mm256_store_pd(vals, best_v);
        _mm256_store_pd(inds, best_i);
        for (int lane = 0; lane < 4; ++lane) {
            const auto li = static_cast<std::size_t>(inds[lane]);
            if (vals[lane] < best.delta || (vals[lane] == best.delta && li < best.index)) {
                best = {li, vals[lane]};
            }
        }
    }
    for (; i < n; ++i) {
        const double d = -2.0 * x[i] * f[i];
        if (d < best.delta) {
            best = {i, d};
        }
    }
    return best;
}

void widen_spins(std::span<const std::int8_t> s, std::span<double> out) {
    const std::size_t n = s.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        std::int32_t packed;
        __builtin_memcpy(&packed, s.data() + i, 4);
        const __m128i bytes = _mm_cvtsi32_si128(packed);
        const __m128i ints = _mm_cvtepi8_epi32(bytes);
        _mm256_storeu_pd(out.data() + i, _mm256_cvtepi32_pd(ints));
    }
    for (; i < n; ++i) {
        out[i] = static_cast<double>(s[i]);
    }
}

}  // namespace lnls::kernels::avx2
