#pragma once

// Finite-graph coarse geometry: exact distances, four-point hyperbolicity,
// quasiconvexity of vertex subsets and quasigeodesic measurements of paths.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glueforge/kernels.hpp"

namespace glueforge::hyp {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Simple connected undirected graph. Construction rejects self-loops, duplicate
/// edges, out-of-range endpoints and disconnected inputs.
class FiniteGraph {
public:
    FiniteGraph(std::size_t vertex_count, std::vector<Edge> edges);

    /// Plain edge list: first line `n m`, then `m` lines `u v` (0-based).
    static FiniteGraph parse_edge_list(std::istream& in);
    static FiniteGraph parse_edge_list(const std::string& text);

    std::size_t vertex_count() const { return offsets_.size() - 1; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::span<const Vertex> neighbors(Vertex v) const {
        return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
    }
    bool adjacent(Vertex u, Vertex v) const;

    std::string to_edge_list() const;

    friend bool operator==(const FiniteGraph& a, const FiniteGraph& b) {
        return a.vertex_count() == b.vertex_count() && a.edges_ == b.edges_;
    }

private:
    std::vector<Edge> edges_;  // normalized u < v, sorted
    std::vector<std::size_t> offsets_;
    std::vector<Vertex> adjacency_;
};

/// Dense symmetric matrix of shortest-path distances.
class DistanceTable {
public:
    /// Validates symmetry, zero diagonal, positivity off the diagonal and the
    /// triangle inequality.
    static DistanceTable from_matrix(std::size_t n, std::vector<std::int32_t> entries);

    std::size_t size() const { return n_; }
    std::int32_t operator()(Vertex i, Vertex j) const { return data_[i * n_ + j]; }
    const std::int32_t* row(Vertex i) const { return data_.data() + i * n_; }
    std::int32_t diameter() const;

    /// Number of (i, k, j) triples violating d(i,j) <= d(i,k) + d(k,j).
    std::size_t triangle_violations(const kernels::KernelTable& k = kernels::active()) const;

    /// Pointwise min over the rows of `subset`: d(v, subset) for every v.
    std::vector<std::int32_t> distance_to_set(std::span<const Vertex> subset,
                                              const kernels::KernelTable& k = kernels::active()) const;

private:
    friend DistanceTable all_pairs_distances(const FiniteGraph& g);
    DistanceTable(std::size_t n, std::vector<std::int32_t> data) : n_(n), data_(std::move(data)) {}

    std::size_t n_ = 0;
    std::vector<std::int32_t> data_;
};

DistanceTable all_pairs_distances(const FiniteGraph& g);

struct FourPointResult {
    std::int64_t twice_delta = 0;           // delta = twice_delta / 2
    std::array<Vertex, 4> witness{0, 0, 0, 0};  // extremal quadruple
    double delta() const { return static_cast<double>(twice_delta) / 2.0; }
    std::string delta_string() const;  // "0", "1", "1/2", ...
};

/// Exhaustive four-point condition over all quadruples.
FourPointResult four_point_delta(const DistanceTable& d,
                                 const kernels::KernelTable& k = kernels::active());

struct QuasiconvexityResult {
    std::int32_t constant = 0;
    // subset pair and the geodesic vertex realizing the constant
    std::array<Vertex, 3> witness{0, 0, 0};
    double geodesics_examined = 0;  // number of subset-pair geodesics covered
    bool sampled = false;
};

/// Least a such that every geodesic between points of `subset` lies in the
/// closed a-neighborhood of `subset`. Exact: the union of all geodesics between
/// x and y is recovered by walking the BFS predecessor DAG back from y.
QuasiconvexityResult quasiconvexity_constant(const DistanceTable& d, std::span<const Vertex> subset,
                                             const kernels::KernelTable& k = kernels::active());

struct StabilityConfiguration {
    Vertex x = 0, y = 0, z = 0;
};

struct StabilityRow {
    std::int32_t h0 = 0;
    std::int32_t r_prime = 0;
    std::optional<StabilityConfiguration> witness;
};

/// Witnessed constants for: y in C, d(x,y) <= d(x,C) + r, x on a geodesic [y,z],
/// d(x,y) > h0  ==>  d(z,y) <= d(z,C) + r'.
struct StabilityReport {
    std::int32_t r = 0;
    std::vector<StabilityRow> table;  // h0 = 0 .. diameter
    std::optional<StabilityConfiguration> extremal;
    std::uint64_t configurations = 0;  // admissible (x, y, z) with d(x,y) > 0
    bool degenerate = false;           // no admissible configuration at all
    bool monotone() const;
};

StabilityReport check_qconvex_stability(const DistanceTable& d, std::span<const Vertex> subset,
                                        std::int32_t r,
                                        const kernels::KernelTable& k = kernels::active());

enum class PathClaim { geodesic, local_quasigeodesic, quasigeodesic };

struct PathWitness {
    std::vector<Vertex> vertices;
    PathClaim claim = PathClaim::quasigeodesic;
};

/// Exact ratio num/den with den > 0.
struct Ratio {
    std::int64_t num = 1;
    std::int64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator<(const Ratio& a, const Ratio& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator==(const Ratio& a, const Ratio& b) {
        return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
    }
};

struct Interval {
    std::size_t begin = 0, end = 0;  // path indices, begin < end
};

/// Per sub-interval [s,t] the constant is max(1, (t-s) / (d(v_s, v_t) + 1)), so
/// that d(v_s, v_t) >= (t-s)/K - K holds with K the reported value.
struct QuasigeodesicReport {
    std::size_t window = 0;           // L
    Ratio local_k;                    // over sub-intervals of length <= L
    Ratio global_k;                   // over all sub-intervals
    Interval local_witness, global_witness;
    bool quasigeodesic = true;        // false iff some nondegenerate interval has d = 0
    std::optional<Interval> offending;
    bool claim_holds = true;
};

/// Generic form: `dist(s, t)` returns the distance between path vertices s and t.
QuasigeodesicReport measure_quasigeodesic(std::size_t path_vertices, std::size_t window,
                                          const std::function<std::int64_t(std::size_t, std::size_t)>& dist,
                                          PathClaim claim = PathClaim::quasigeodesic);

/// Throws invariant error if consecutive vertices are not adjacent.
QuasigeodesicReport local_to_global_report(const DistanceTable& d, const PathWitness& path,
                                           std::size_t window);

struct GeodesicEnumeration {
    std::vector<std::vector<Vertex>> paths;
    double total = 0;  // exact count of geodesics from x to y (as double)
    bool sampled = false;
};

/// All geodesics from x to y when there are at most `limit`; otherwise `limit`
/// geodesics drawn uniformly (seeded) and the result is flagged sampled.
GeodesicEnumeration enumerate_geodesics(const DistanceTable& d, Vertex x, Vertex y,
                                        std::size_t limit = 1'000'000, std::uint64_t seed = 0);

}  // namespace glueforge::hyp
