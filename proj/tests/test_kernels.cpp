#include "doctest.h"

#include <random>
#include <vector>

#include "glueforge/kernels.hpp"

using namespace glueforge::kernels;

namespace {

std::vector<int32_t> random_row(std::mt19937& rng, std::size_t n, int32_t hi) {
    std::uniform_int_distribution<int32_t> dist(0, hi);
    std::vector<int32_t> row(n);
    for (auto& x : row) x = dist(rng);
    return row;
}

}  // namespace

TEST_CASE("vector kernels agree with the scalar reference") {
    if (!supported(Isa::avx2)) return;
    const auto& ref = table(Isa::scalar);
    const auto& vec = table(Isa::avx2);
    std::mt19937 rng(7);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 1 + trial % 71;
        const int32_t hi = 1 + trial % 9;
        auto a = random_row(rng, n, hi), b = random_row(rng, n, hi), c = random_row(rng, n, hi);
        auto w = random_row(rng, n, hi);
        std::uniform_int_distribution<int32_t> small(0, hi);
        const int32_t d1 = small(rng), d2 = small(rng), d3 = small(rng);
        const std::size_t begin = trial % (n + 1);

        CHECK(ref.four_point_gap(a.data(), b.data(), c.data(), d1, d2, d3, begin, n) ==
              vec.four_point_gap(a.data(), b.data(), c.data(), d1, d2, d3, begin, n));
        CHECK(ref.triangle_violations(a.data(), b.data(), d1, n) ==
              vec.triangle_violations(a.data(), b.data(), d1, n));
        CHECK(ref.interval_max(a.data(), b.data(), d1 + d2, w.data(), n) ==
              vec.interval_max(a.data(), b.data(), d1 + d2, w.data(), n));
        CHECK(ref.near_interval_reach(a.data(), b.data(), d1 + d2, w.data(), d3 % 3, n) ==
              vec.near_interval_reach(a.data(), b.data(), d1 + d2, w.data(), d3 % 3, n));

        auto acc1 = w, acc2 = w;
        ref.min_accumulate(acc1.data(), a.data(), n);
        vec.min_accumulate(acc2.data(), a.data(), n);
        CHECK(acc1 == acc2);
    }
}

TEST_CASE("scalar kernels on hand-built rows") {
    const auto& k = table(Isa::scalar);
    // path 0-1-2-3 rows
    const int32_t r0[] = {0, 1, 2, 3}, r1[] = {1, 0, 1, 2}, r2[] = {2, 1, 0, 1}, r3[] = {3, 2, 1, 0};
    CHECK(k.four_point_gap(r0, r1, r2, 1, 2, 1, 3, 4) == 0);
    CHECK(k.interval_max(r0, r3, 3, r1, 4) == 2);
    CHECK(k.triangle_violations(r0, r3, 3, 4) == 0);
    CHECK(k.near_interval_reach(r0, r3, 3, r0, 0, 4) == 3);
    (void)r2;
}
