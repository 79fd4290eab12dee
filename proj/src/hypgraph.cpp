#include "glueforge/hypgraph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <limits>
#include <random>
#include <sstream>

#include "glueforge/error.hpp"

namespace glueforge::hyp {

namespace {

constexpr std::int32_t kUnreached = -1;

std::vector<std::int32_t> bfs(const FiniteGraph& g, Vertex source) {
    std::vector<std::int32_t> dist(g.vertex_count(), kUnreached);
    std::deque<Vertex> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        const Vertex u = queue.front();
        queue.pop_front();
        for (Vertex v : g.neighbors(u)) {
            if (dist[v] != kUnreached) continue;
            dist[v] = dist[u] + 1;
            queue.push_back(v);
        }
    }
    return dist;
}

}  // namespace

FiniteGraph::FiniteGraph(std::size_t vertex_count, std::vector<Edge> edges) {
    if (vertex_count == 0) fail(ErrorKind::invariant, "graph must have at least one vertex");
    for (auto& [u, v] : edges) {
        if (u >= vertex_count || v >= vertex_count)
            fail(ErrorKind::invariant, "edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                           ") references a vertex outside 0.." +
                                           std::to_string(vertex_count - 1));
        if (u == v) fail(ErrorKind::invariant, "self-loop at vertex " + std::to_string(u));
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end())
        fail(ErrorKind::invariant, "duplicate edge (" + std::to_string(dup->first) + ", " +
                                       std::to_string(dup->second) + ")");
    edges_ = std::move(edges);

    std::vector<std::size_t> degree(vertex_count, 0);
    for (const auto& [u, v] : edges_) {
        ++degree[u];
        ++degree[v];
    }
    offsets_.assign(vertex_count + 1, 0);
    for (std::size_t v = 0; v < vertex_count; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
    adjacency_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges_) {
        adjacency_[fill[u]++] = v;
        adjacency_[fill[v]++] = u;
    }
    for (std::size_t v = 0; v < vertex_count; ++v)
        std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                  adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));

    const auto reach = bfs(*this, 0);
    if (auto it = std::find(reach.begin(), reach.end(), kUnreached); it != reach.end())
        fail(ErrorKind::invariant, "graph is disconnected: vertices 0 and " +
                                       std::to_string(it - reach.begin()) + " are unreachable");
}

bool FiniteGraph::adjacent(Vertex u, Vertex v) const {
    auto n = neighbors(u);
    return std::binary_search(n.begin(), n.end(), v);
}

FiniteGraph FiniteGraph::parse_edge_list(std::istream& in) {
    long long n = 0, m = 0;
    if (!(in >> n >> m) || n <= 0 || m < 0)
        fail(ErrorKind::parse, "edge list: expected header `n m` with n > 0, m >= 0");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long long e = 0; e < m; ++e) {
        long long u = 0, v = 0;
        if (!(in >> u >> v))
            fail(ErrorKind::parse, "edge list: expected " + std::to_string(m) + " edges, got " +
                                       std::to_string(e));
        if (u < 0 || v < 0)
            fail(ErrorKind::parse, "edge list: negative vertex index on edge " + std::to_string(e));
        edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    std::string trailing;
    if (in >> trailing) fail(ErrorKind::parse, "edge list: trailing data `" + trailing + "`");
    return FiniteGraph(static_cast<std::size_t>(n), std::move(edges));
}

FiniteGraph FiniteGraph::parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    return parse_edge_list(in);
}

std::string FiniteGraph::to_edge_list() const {
    std::ostringstream out;
    out << vertex_count() << ' ' << edges_.size() << '\n';
    for (const auto& [u, v] : edges_) out << u << ' ' << v << '\n';
    return out.str();
}

DistanceTable all_pairs_distances(const FiniteGraph& g) {
    const std::size_t n = g.vertex_count();
    std::vector<std::int32_t> data(n * n);
    for (Vertex s = 0; s < n; ++s) {
        const auto dist = bfs(g, s);
        for (Vertex t = 0; t < n; ++t) {
            if (dist[t] == kUnreached)
                fail(ErrorKind::invariant, "graph is disconnected: vertices " + std::to_string(s) +
                                               " and " + std::to_string(t) + " are unreachable");
            data[s * n + t] = dist[t];
        }
    }
    return DistanceTable(n, std::move(data));
}

DistanceTable DistanceTable::from_matrix(std::size_t n, std::vector<std::int32_t> entries) {
    if (n == 0 || entries.size() != n * n)
        fail(ErrorKind::invariant, "distance table must be a non-empty square matrix");
    DistanceTable d(n, std::move(entries));
    for (Vertex i = 0; i < n; ++i) {
        if (d(i, i) != 0) fail(ErrorKind::invariant, "distance table: non-zero diagonal");
        for (Vertex j = i + 1; j < n; ++j) {
            if (d(i, j) != d(j, i)) fail(ErrorKind::invariant, "distance table: not symmetric");
            if (d(i, j) <= 0) fail(ErrorKind::invariant, "distance table: non-positive off-diagonal");
        }
    }
    if (d.triangle_violations() != 0)
        fail(ErrorKind::invariant, "distance table: triangle inequality fails");
    return d;
}

std::int32_t DistanceTable::diameter() const {
    return data_.empty() ? 0 : *std::max_element(data_.begin(), data_.end());
}

std::size_t DistanceTable::triangle_violations(const kernels::KernelTable& k) const {
    std::size_t total = 0;
    for (Vertex i = 0; i < n_; ++i)
        for (Vertex m = 0; m < n_; ++m) total += k.triangle_violations(row(i), row(m), (*this)(i, m), n_);
    return total;
}

std::vector<std::int32_t> DistanceTable::distance_to_set(std::span<const Vertex> subset,
                                                         const kernels::KernelTable& k) const {
    std::vector<std::int32_t> acc(n_, std::numeric_limits<std::int32_t>::max());
    for (Vertex c : subset) k.min_accumulate(acc.data(), row(c), n_);
    return acc;
}

std::string FourPointResult::delta_string() const {
    if (twice_delta % 2 == 0) return std::to_string(twice_delta / 2);
    return std::to_string(twice_delta) + "/2";
}

FourPointResult four_point_delta(const DistanceTable& d, const kernels::KernelTable& k) {
    const std::size_t n = d.size();
    FourPointResult result;
    result.witness = {0, 0, 0, 0};
    for (Vertex i = 0; i < n; ++i) {
        for (Vertex j = i + 1; j < n; ++j) {
            for (Vertex m = j + 1; m < n; ++m) {
                const auto gap = k.four_point_gap(d.row(i), d.row(j), d.row(m), d(i, j), d(i, m),
                                                  d(j, m), m + 1, n);
                if (gap <= result.twice_delta) continue;
                result.twice_delta = gap;
                for (Vertex l = m + 1; l < n; ++l) {
                    if (kernels::detail::scalar_table.four_point_gap(d.row(i), d.row(j), d.row(m),
                                                                     d(i, j), d(i, m), d(j, m), l,
                                                                     l + 1) == gap) {
                        result.witness = {i, j, m, l};
                        break;
                    }
                }
            }
        }
    }
    return result;
}

namespace {

// Number of geodesics from x to y, by dynamic programming over the interval.
double count_geodesics(const DistanceTable& d, Vertex x, Vertex y) {
    const std::size_t n = d.size();
    const std::int32_t dxy = d(x, y);
    std::vector<std::vector<Vertex>> layers(static_cast<std::size_t>(dxy) + 1);
    for (Vertex v = 0; v < n; ++v)
        if (d(x, v) + d(v, y) == dxy) layers[static_cast<std::size_t>(d(x, v))].push_back(v);
    std::vector<double> count(n, 0.0);
    count[x] = 1.0;
    for (std::size_t level = 1; level < layers.size(); ++level)
        for (Vertex v : layers[level])
            for (Vertex u : layers[level - 1])
                if (d(u, v) == 1) count[v] += count[u];
    return count[y];
}

}  // namespace

QuasiconvexityResult quasiconvexity_constant(const DistanceTable& d, std::span<const Vertex> subset,
                                             const kernels::KernelTable& k) {
    if (subset.empty()) fail(ErrorKind::domain, "quasiconvexity: subset must be non-empty");
    const std::size_t n = d.size();
    for (Vertex c : subset)
        if (c >= n) fail(ErrorKind::domain, "quasiconvexity: subset vertex out of range");
    const auto to_set = d.distance_to_set(subset, k);
    QuasiconvexityResult result;
    result.witness = {subset[0], subset[0], subset[0]};
    for (std::size_t a = 0; a < subset.size(); ++a) {
        for (std::size_t b = a; b < subset.size(); ++b) {
            const Vertex x = subset[a], y = subset[b];
            result.geodesics_examined += count_geodesics(d, x, y);
            const auto reach = k.interval_max(d.row(x), d.row(y), d(x, y), to_set.data(), n);
            if (reach <= result.constant) continue;
            result.constant = reach;
            for (Vertex v = 0; v < n; ++v) {
                if (d(x, v) + d(v, y) == d(x, y) && to_set[v] == reach) {
                    result.witness = {x, y, v};
                    break;
                }
            }
        }
    }
    return result;
}

bool StabilityReport::monotone() const {
    for (std::size_t i = 1; i < table.size(); ++i)
        if (table[i].r_prime > table[i - 1].r_prime) return false;
    return true;
}

StabilityReport check_qconvex_stability(const DistanceTable& d, std::span<const Vertex> subset,
                                        std::int32_t r, const kernels::KernelTable& k) {
    if (subset.empty()) fail(ErrorKind::domain, "stability: subset must be non-empty");
    if (r < 0) fail(ErrorKind::domain, "stability: r must be non-negative");
    const std::size_t n = d.size();
    const auto to_set = d.distance_to_set(subset, k);
    const std::int32_t diam = d.diameter();

    StabilityReport report;
    report.r = r;
    report.table.resize(static_cast<std::size_t>(diam) + 1);
    for (std::int32_t h = 0; h <= diam; ++h) report.table[static_cast<std::size_t>(h)].h0 = h;

    for (Vertex y : subset) {
        for (Vertex z = 0; z < n; ++z) {
            // max d(x,y) over admissible x; the conclusion only depends on (y, z)
            const auto reach =
                k.near_interval_reach(d.row(y), d.row(z), d(y, z), to_set.data(), r, n);
            if (reach <= 0) continue;
            const std::int32_t excess = d(z, y) - to_set[z];
            std::optional<StabilityConfiguration> config;
            for (Vertex x = 0; x < n; ++x) {
                if (d(y, x) == reach && d(y, x) + d(x, z) == d(y, z) && d(y, x) <= to_set[x] + r) {
                    config = StabilityConfiguration{x, y, z};
                    break;
                }
            }
            for (Vertex x = 0; x < n; ++x)
                if (d(y, x) > 0 && d(y, x) + d(x, z) == d(y, z) && d(y, x) <= to_set[x] + r)
                    ++report.configurations;
            for (std::int32_t h = 0; h < reach; ++h) {
                auto& row = report.table[static_cast<std::size_t>(h)];
                if (!row.witness || excess > row.r_prime) {
                    row.r_prime = excess;
                    row.witness = config;
                }
            }
        }
    }
    report.degenerate = report.configurations == 0;
    if (!report.table.empty()) report.extremal = report.table.front().witness;
    return report;
}

QuasigeodesicReport measure_quasigeodesic(std::size_t path_vertices, std::size_t window,
                                          const std::function<std::int64_t(std::size_t, std::size_t)>& dist,
                                          PathClaim claim) {
    QuasigeodesicReport report;
    report.window = window;
    report.local_k = {1, 1};
    report.global_k = {1, 1};
    bool endpoints_geodesic = true;
    for (std::size_t s = 0; s < path_vertices; ++s) {
        for (std::size_t t = s + 1; t < path_vertices; ++t) {
            const std::int64_t len = static_cast<std::int64_t>(t - s);
            const std::int64_t gap = dist(s, t);
            if (gap != len) endpoints_geodesic = false;
            if (gap == 0 && report.quasigeodesic) {
                report.quasigeodesic = false;
                report.offending = Interval{s, t};
            }
            const Ratio k{len, gap + 1};
            if (report.global_k < k) {
                report.global_k = k;
                report.global_witness = {s, t};
            }
            if (t - s <= window && report.local_k < k) {
                report.local_k = k;
                report.local_witness = {s, t};
            }
        }
    }
    switch (claim) {
        case PathClaim::geodesic:
            report.claim_holds = endpoints_geodesic;
            break;
        case PathClaim::local_quasigeodesic:
            report.claim_holds = !report.offending || report.offending->end - report.offending->begin > window;
            break;
        case PathClaim::quasigeodesic:
            report.claim_holds = report.quasigeodesic;
            break;
    }
    return report;
}

QuasigeodesicReport local_to_global_report(const DistanceTable& d, const PathWitness& path,
                                           std::size_t window) {
    const auto& v = path.vertices;
    if (v.empty()) fail(ErrorKind::domain, "path witness is empty");
    for (Vertex x : v)
        if (x >= d.size()) fail(ErrorKind::invariant, "path vertex out of range");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (d(v[i - 1], v[i]) != 1)
            fail(ErrorKind::invariant, "path witness: vertices " + std::to_string(v[i - 1]) + " and " +
                                           std::to_string(v[i]) + " are not adjacent");
    return measure_quasigeodesic(
        v.size(), window, [&](std::size_t s, std::size_t t) { return std::int64_t{d(v[s], v[t])}; },
        path.claim);
}

GeodesicEnumeration enumerate_geodesics(const DistanceTable& d, Vertex x, Vertex y,
                                        std::size_t limit, std::uint64_t seed) {
    const std::size_t n = d.size();
    if (x >= n || y >= n) fail(ErrorKind::domain, "geodesic endpoints out of range");
    const std::int32_t dxy = d(x, y);
    // successors in the predecessor DAG restricted to the x..y interval
    auto on_interval = [&](Vertex v) { return d(x, v) + d(v, y) == dxy; };
    std::vector<double> to_y(n, 0.0);
    std::vector<Vertex> order;
    for (Vertex v = 0; v < n; ++v)
        if (on_interval(v)) order.push_back(v);
    std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return d(a, y) < d(b, y); });
    auto next_steps = [&](Vertex u) {
        std::vector<Vertex> out;
        for (Vertex w : order)
            if (d(u, w) == 1 && d(w, y) == d(u, y) - 1) out.push_back(w);
        std::sort(out.begin(), out.end());
        return out;
    };
    for (Vertex v : order) {
        if (v == y) {
            to_y[v] = 1.0;
            continue;
        }
        for (Vertex w : next_steps(v)) to_y[v] += to_y[w];
    }

    GeodesicEnumeration result;
    result.total = to_y[x];
    if (result.total <= static_cast<double>(limit)) {
        std::vector<Vertex> path{x};
        std::function<void(Vertex)> walk = [&](Vertex u) {
            if (u == y) {
                result.paths.push_back(path);
                return;
            }
            for (Vertex w : next_steps(u)) {
                path.push_back(w);
                walk(w);
                path.pop_back();
            }
        };
        walk(x);
        return result;
    }
    result.sampled = true;
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < limit; ++s) {
        std::vector<Vertex> path{x};
        Vertex u = x;
        while (u != y) {
            const auto steps = next_steps(u);
            std::vector<double> weights;
            for (Vertex w : steps) weights.push_back(to_y[w]);
            std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
            u = steps[pick(rng)];
            path.push_back(u);
        }
        result.paths.push_back(std::move(path));
    }
    return result;
}

}  // namespace glueforge::hyp
