#include "glueforge/kernels.hpp"

#include <algorithm>

namespace glueforge::kernels {
namespace {

int32_t four_point_gap(const int32_t* row_i, const int32_t* row_j, const int32_t* row_k,
                       int32_t dij, int32_t dik, int32_t djk, std::size_t begin,
                       std::size_t end) {
    int32_t best = 0;
    for (std::size_t l = begin; l < end; ++l) {
        const int32_t s1 = dij + row_k[l];
        const int32_t s2 = dik + row_j[l];
        const int32_t s3 = djk + row_i[l];
        const int32_t hi = std::max({s1, s2, s3});
        const int32_t mid = std::max(std::min(s1, s2), std::min(std::max(s1, s2), s3));
        best = std::max(best, hi - mid);
    }
    return best;
}

void min_accumulate(int32_t* acc, const int32_t* row, std::size_t n) {
    for (std::size_t v = 0; v < n; ++v) acc[v] = std::min(acc[v], row[v]);
}

std::size_t triangle_violations(const int32_t* row_i, const int32_t* row_k, int32_t dik,
                                std::size_t n) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) count += row_i[j] > dik + row_k[j] ? 1 : 0;
    return count;
}

int32_t interval_max(const int32_t* row_x, const int32_t* row_y, int32_t dxy,
                     const int32_t* weight, std::size_t n) {
    int32_t best = -1;
    for (std::size_t v = 0; v < n; ++v)
        if (row_x[v] + row_y[v] == dxy) best = std::max(best, weight[v]);
    return best;
}

int32_t near_interval_reach(const int32_t* row_y, const int32_t* row_z, int32_t dyz,
                            const int32_t* to_set, int32_t slack, std::size_t n) {
    int32_t best = -1;
    for (std::size_t x = 0; x < n; ++x)
        if (row_y[x] + row_z[x] == dyz && row_y[x] <= to_set[x] + slack)
            best = std::max(best, row_y[x]);
    return best;
}

}  // namespace

namespace detail {
const KernelTable scalar_table{four_point_gap, min_accumulate, triangle_violations, interval_max,
                               near_interval_reach};
}

}  // namespace glueforge::kernels
