#pragma once

// Row kernels over dense int32 distance tables. Every kernel has a scalar
// reference implementation; vector variants are selected at runtime and must
// agree with the reference bit for bit.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace glueforge::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
    // max over l in [begin, end) of (largest - median) of the three pair sums
    //   dij + row_k[l], dik + row_j[l], djk + row_i[l]
    int32_t (*four_point_gap)(const int32_t* row_i, const int32_t* row_j, const int32_t* row_k,
                              int32_t dij, int32_t dik, int32_t djk, std::size_t begin,
                              std::size_t end);

    // acc[v] = min(acc[v], row[v])
    void (*min_accumulate)(int32_t* acc, const int32_t* row, std::size_t n);

    // number of j with row_i[j] > dik + row_k[j]
    std::size_t (*triangle_violations)(const int32_t* row_i, const int32_t* row_k, int32_t dik,
                                       std::size_t n);

    // max of weight[v] over v with row_x[v] + row_y[v] == dxy; -1 if none
    int32_t (*interval_max)(const int32_t* row_x, const int32_t* row_y, int32_t dxy,
                            const int32_t* weight, std::size_t n);

    // max of row_y[x] over x with row_y[x] + row_z[x] == dyz and
    // row_y[x] <= to_set[x] + slack; -1 if none
    int32_t (*near_interval_reach)(const int32_t* row_y, const int32_t* row_z, int32_t dyz,
                                   const int32_t* to_set, int32_t slack, std::size_t n);
};

const KernelTable& table(Isa isa);
bool supported(Isa isa);

// Best supported ISA, unless GLUEFORGE_ISA=scalar is set in the environment.
Isa active_isa();
const KernelTable& active();

std::string_view name(Isa isa);

namespace detail {
extern const KernelTable scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace glueforge::kernels
