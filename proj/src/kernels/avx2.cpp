#include "glueforge/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>

// Compiled with -mavx2; only reached after a runtime CPU check.

namespace glueforge::kernels {
namespace {

inline int32_t hmax(__m256i v) {
    __m128i m = _mm_max_epi32(_mm256_castsi256_si128(v), _mm256_extracti128_si256(v, 1));
    m = _mm_max_epi32(m, _mm_shuffle_epi32(m, _MM_SHUFFLE(1, 0, 3, 2)));
    m = _mm_max_epi32(m, _mm_shuffle_epi32(m, _MM_SHUFFLE(2, 3, 0, 1)));
    return _mm_cvtsi128_si32(m);
}

inline __m256i load(const int32_t* p) {
    return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

int32_t four_point_gap(const int32_t* row_i, const int32_t* row_j, const int32_t* row_k,
                       int32_t dij, int32_t dik, int32_t djk, std::size_t begin,
                       std::size_t end) {
    const __m256i vij = _mm256_set1_epi32(dij);
    const __m256i vik = _mm256_set1_epi32(dik);
    const __m256i vjk = _mm256_set1_epi32(djk);
    __m256i best = _mm256_setzero_si256();
    std::size_t l = begin;
    for (; l + 8 <= end; l += 8) {
        const __m256i s1 = _mm256_add_epi32(vij, load(row_k + l));
        const __m256i s2 = _mm256_add_epi32(vik, load(row_j + l));
        const __m256i s3 = _mm256_add_epi32(vjk, load(row_i + l));
        const __m256i lo12 = _mm256_min_epi32(s1, s2);
        const __m256i hi12 = _mm256_max_epi32(s1, s2);
        const __m256i hi = _mm256_max_epi32(hi12, s3);
        const __m256i mid = _mm256_max_epi32(lo12, _mm256_min_epi32(hi12, s3));
        best = _mm256_max_epi32(best, _mm256_sub_epi32(hi, mid));
    }
    int32_t result = hmax(best);
    if (l < end)
        result = std::max(result, detail::scalar_table.four_point_gap(row_i, row_j, row_k, dij,
                                                                      dik, djk, l, end));
    return result;
}

void min_accumulate(int32_t* acc, const int32_t* row, std::size_t n) {
    std::size_t v = 0;
    for (; v + 8 <= n; v += 8) {
        const __m256i m = _mm256_min_epi32(load(acc + v), load(row + v));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(acc + v), m);
    }
    for (; v < n; ++v) acc[v] = std::min(acc[v], row[v]);
}

std::size_t triangle_violations(const int32_t* row_i, const int32_t* row_k, int32_t dik,
                                std::size_t n) {
    const __m256i vik = _mm256_set1_epi32(dik);
    std::size_t count = 0;
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        const __m256i bound = _mm256_add_epi32(vik, load(row_k + j));
        const __m256i gt = _mm256_cmpgt_epi32(load(row_i + j), bound);
        count += static_cast<std::size_t>(
            __builtin_popcount(static_cast<unsigned>(_mm256_movemask_ps(_mm256_castsi256_ps(gt)))));
    }
    if (j < n)
        count += detail::scalar_table.triangle_violations(row_i + j, row_k + j, dik, n - j);
    return count;
}

int32_t interval_max(const int32_t* row_x, const int32_t* row_y, int32_t dxy,
                     const int32_t* weight, std::size_t n) {
    const __m256i target = _mm256_set1_epi32(dxy);
    const __m256i none = _mm256_set1_epi32(-1);
    __m256i best = none;
    std::size_t v = 0;
    for (; v + 8 <= n; v += 8) {
        const __m256i sum = _mm256_add_epi32(load(row_x + v), load(row_y + v));
        const __m256i on = _mm256_cmpeq_epi32(sum, target);
        best = _mm256_max_epi32(best, _mm256_blendv_epi8(none, load(weight + v), on));
    }
    int32_t result = hmax(best);
    if (v < n)
        result = std::max(result, detail::scalar_table.interval_max(row_x + v, row_y + v, dxy,
                                                                    weight + v, n - v));
    return result;
}

int32_t near_interval_reach(const int32_t* row_y, const int32_t* row_z, int32_t dyz,
                            const int32_t* to_set, int32_t slack, std::size_t n) {
    const __m256i target = _mm256_set1_epi32(dyz);
    const __m256i vslack = _mm256_set1_epi32(slack);
    const __m256i none = _mm256_set1_epi32(-1);
    __m256i best = none;
    std::size_t x = 0;
    for (; x + 8 <= n; x += 8) {
        const __m256i ry = load(row_y + x);
        const __m256i on = _mm256_cmpeq_epi32(_mm256_add_epi32(ry, load(row_z + x)), target);
        const __m256i far = _mm256_cmpgt_epi32(ry, _mm256_add_epi32(load(to_set + x), vslack));
        const __m256i keep = _mm256_andnot_si256(far, on);
        best = _mm256_max_epi32(best, _mm256_blendv_epi8(none, ry, keep));
    }
    int32_t result = hmax(best);
    if (x < n)
        result = std::max(result, detail::scalar_table.near_interval_reach(
                                      row_y + x, row_z + x, dyz, to_set + x, slack, n - x));
    return result;
}

}  // namespace

namespace detail {
const KernelTable avx2_table{four_point_gap, min_accumulate, triangle_violations, interval_max,
                             near_interval_reach};
}

}  // namespace glueforge::kernels

#endif
