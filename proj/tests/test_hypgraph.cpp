#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "glueforge/error.hpp"
#include "glueforge/hypgraph.hpp"

using namespace glueforge;
using namespace glueforge::hyp;

namespace {

FiniteGraph path_graph(std::size_t n) {
    std::vector<Edge> e;
    for (Vertex v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
    return FiniteGraph(n, e);
}

FiniteGraph cycle_graph(std::size_t n) {
    std::vector<Edge> e;
    for (Vertex v = 0; v < n; ++v) e.emplace_back(v, static_cast<Vertex>((v + 1) % n));
    return FiniteGraph(n, e);
}

FiniteGraph complete_graph(std::size_t n) {
    std::vector<Edge> e;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return FiniteGraph(n, e);
}

FiniteGraph random_tree(std::mt19937& rng, std::size_t n) {
    std::vector<Edge> e;
    for (Vertex v = 1; v < n; ++v) e.emplace_back(std::uniform_int_distribution<Vertex>(0, v - 1)(rng), v);
    return FiniteGraph(n, e);
}

// Oracle for the four-point constant: straight quadruple loop, no kernels.
std::int64_t naive_twice_delta(const DistanceTable& d) {
    const auto n = static_cast<Vertex>(d.size());
    std::int64_t best = 0;
    for (Vertex i = 0; i < n; ++i)
        for (Vertex j = 0; j < n; ++j)
            for (Vertex k = 0; k < n; ++k)
                for (Vertex l = 0; l < n; ++l) {
                    std::array<std::int64_t, 3> s{d(i, j) + d(k, l), d(i, k) + d(j, l), d(i, l) + d(j, k)};
                    std::sort(s.begin(), s.end());
                    best = std::max(best, s[2] - s[1]);
                }
    return best;
}

// Oracle for quasiconvexity: enumerate every geodesic explicitly.
std::int32_t naive_quasiconvexity(const DistanceTable& d, const std::vector<Vertex>& subset) {
    auto to_set = [&](Vertex v) {
        std::int32_t m = 1 << 30;
        for (auto c : subset) m = std::min(m, d(v, c));
        return m;
    };
    std::int32_t best = 0;
    for (auto x : subset)
        for (auto y : subset)
            for (const auto& path : enumerate_geodesics(d, x, y).paths)
                for (auto v : path) best = std::max(best, to_set(v));
    return best;
}

}  // namespace

TEST_CASE("distances on small graphs") {
    CHECK(all_pairs_distances(path_graph(4))(0, 3) == 3);
    const auto k4 = all_pairs_distances(complete_graph(4));
    for (Vertex u = 0; u < 4; ++u)
        for (Vertex v = 0; v < 4; ++v) CHECK(k4(u, v) == (u == v ? 0 : 1));
    CHECK(all_pairs_distances(cycle_graph(6))(0, 3) == 3);
}

TEST_CASE("graph validation") {
    CHECK_THROWS_AS(FiniteGraph(3, {{0, 0}}), Error);
    CHECK_THROWS_AS(FiniteGraph(3, {{0, 1}, {1, 0}, {1, 2}}), Error);
    CHECK_THROWS_AS(FiniteGraph(3, {{0, 5}}), Error);
    try {
        FiniteGraph(4, {{0, 1}, {2, 3}});
        FAIL("expected disconnected error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invariant);
        CHECK(std::string(e.what()).find("0 and 2") != std::string::npos);
    }
    const auto g = FiniteGraph::parse_edge_list("4 3\n0 1\n1 2\n2 3\n");
    CHECK(g == path_graph(4));
    CHECK(FiniteGraph::parse_edge_list(g.to_edge_list()) == g);
    CHECK_THROWS_AS(FiniteGraph::parse_edge_list("3 2\n0 1\n"), Error);
    CHECK_THROWS_AS(FiniteGraph::parse_edge_list("x"), Error);
}

TEST_CASE("distance table from a matrix is validated") {
    CHECK_NOTHROW(DistanceTable::from_matrix(2, {0, 1, 1, 0}));
    CHECK_THROWS_AS(DistanceTable::from_matrix(2, {0, 1, 2, 0}), Error);
    CHECK_THROWS_AS(DistanceTable::from_matrix(3, {0, 1, 5, 1, 0, 1, 5, 1, 0}), Error);
}

TEST_CASE("four point constant") {
    CHECK(four_point_delta(all_pairs_distances(complete_graph(4))).twice_delta == 0);
    const auto c6 = four_point_delta(all_pairs_distances(cycle_graph(6)));
    CHECK(c6.twice_delta == 2);
    CHECK(c6.delta_string() == "1");
    CHECK(four_point_delta(all_pairs_distances(cycle_graph(5))).delta_string() == "1/2");

    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = random_tree(rng, 2 + rng() % 60);
        CHECK(four_point_delta(all_pairs_distances(g)).twice_delta == 0);
    }
    for (int trial = 0; trial < 3; ++trial)
        CHECK(four_point_delta(all_pairs_distances(random_tree(rng, 200))).twice_delta == 0);

    // random graphs: kernel scan equals naive oracle, witness realizes it, and
    // relabeling the vertices does not change the value
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 3 + rng() % 12;
        std::vector<Edge> e;
        for (Vertex v = 1; v < n; ++v) e.emplace_back(rng() % v, v);
        for (int extra = 0; extra < 6; ++extra) {
            Vertex u = rng() % n, v = rng() % n;
            if (u != v && std::find(e.begin(), e.end(), Edge{std::min(u, v), std::max(u, v)}) == e.end() &&
                std::find(e.begin(), e.end(), Edge{std::max(u, v), std::min(u, v)}) == e.end())
                e.emplace_back(u, v);
        }
        const FiniteGraph g(n, e);
        const auto d = all_pairs_distances(g);
        const auto res = four_point_delta(d);
        CHECK(res.twice_delta == naive_twice_delta(d));
        CHECK(four_point_delta(d, kernels::table(kernels::Isa::scalar)).twice_delta == res.twice_delta);
        if (res.twice_delta > 0) {
            const auto [i, j, k, l] = res.witness;
            std::array<std::int64_t, 3> s{d(i, j) + d(k, l), d(i, k) + d(j, l), d(i, l) + d(j, k)};
            std::sort(s.begin(), s.end());
            CHECK(s[2] - s[1] == res.twice_delta);
        }
        std::vector<Vertex> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Edge> pe;
        for (auto [u, v] : g.edges()) pe.emplace_back(perm[u], perm[v]);
        CHECK(four_point_delta(all_pairs_distances(FiniteGraph(n, pe))).twice_delta == res.twice_delta);
    }
}

TEST_CASE("quasiconvexity constant") {
    const auto c6 = all_pairs_distances(cycle_graph(6));
    const std::vector<Vertex> single{2};
    CHECK(quasiconvexity_constant(c6, single).constant == 0);
    std::vector<Vertex> all(6);
    std::iota(all.begin(), all.end(), 0);
    CHECK(quasiconvexity_constant(c6, all).constant == 0);
    const std::vector<Vertex> antipodal{0, 3};
    const auto r = quasiconvexity_constant(c6, antipodal);
    CHECK(r.constant == 1);
    CHECK(!r.sampled);
    CHECK(r.geodesics_examined == doctest::Approx(4.0));  // two each way plus two trivial
    CHECK(c6(r.witness[2], 0) == 1);

    std::mt19937 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + rng() % 10;
        std::vector<Edge> e;
        for (Vertex v = 1; v < n; ++v) e.emplace_back(rng() % v, v);
        for (int extra = 0; extra < 4; ++extra) {
            Vertex u = rng() % n, v = rng() % n;
            if (u == v) continue;
            Edge ed{std::min(u, v), std::max(u, v)};
            bool dup = false;
            for (auto x : e)
                if (Edge{std::min(x.first, x.second), std::max(x.first, x.second)} == ed) dup = true;
            if (!dup) e.push_back(ed);
        }
        const auto d = all_pairs_distances(FiniteGraph(n, e));
        std::vector<Vertex> subset;
        for (Vertex v = 0; v < n; ++v)
            if (rng() % 3 == 0) subset.push_back(v);
        if (subset.empty()) subset.push_back(0);
        CHECK(quasiconvexity_constant(d, subset).constant == naive_quasiconvexity(d, subset));
    }
}

TEST_CASE("geodesically closed subsets are 0-quasiconvex") {
    // the interval between two vertices of a random tree contains all its geodesics
    std::mt19937 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = random_tree(rng, 5 + rng() % 30);
        const auto d = all_pairs_distances(g);
        const Vertex x = 0, y = static_cast<Vertex>(g.vertex_count() - 1);
        std::vector<Vertex> interval;
        for (Vertex v = 0; v < g.vertex_count(); ++v)
            if (d(x, v) + d(v, y) == d(x, y)) interval.push_back(v);
        CHECK(quasiconvexity_constant(d, interval).constant == 0);
    }
}

TEST_CASE("stability reports") {
    const auto c6 = all_pairs_distances(cycle_graph(6));
    std::vector<Vertex> all(6);
    std::iota(all.begin(), all.end(), 0);
    const auto every = check_qconvex_stability(c6, all, 0);
    for (const auto& row : every.table) CHECK(row.r_prime == 0);

    const auto p5 = all_pairs_distances(path_graph(5));
    const std::vector<Vertex> leaf{0};
    const auto tree = check_qconvex_stability(p5, leaf, 0);
    CHECK(tree.table.at(0).r_prime == 0);
    CHECK(tree.monotone());

    const std::vector<Vertex> antipodal{0, 3};
    const auto cyc = check_qconvex_stability(c6, antipodal, 1);
    CHECK(cyc.table.size() == 4);
    CHECK(cyc.monotone());
    CHECK(!cyc.degenerate);
    // brute-force oracle for every h0
    for (const auto& row : cyc.table) {
        std::int32_t expect = 0;
        for (Vertex y : antipodal)
            for (Vertex x = 0; x < 6; ++x)
                for (Vertex z = 0; z < 6; ++z) {
                    const auto dxc = std::min(c6(x, 0), c6(x, 3));
                    const auto dzc = std::min(c6(z, 0), c6(z, 3));
                    if (c6(x, y) <= dxc + 1 && c6(y, x) + c6(x, z) == c6(y, z) && c6(x, y) > row.h0)
                        expect = std::max(expect, c6(z, y) - dzc);
                }
        CHECK(row.r_prime == expect);
    }
}

TEST_CASE("quasigeodesic measurement") {
    const auto c6 = all_pairs_distances(cycle_graph(6));
    const auto geo = local_to_global_report(c6, {{0, 1, 2, 3}, PathClaim::geodesic}, 2);
    CHECK(geo.global_k == Ratio{1, 1});
    CHECK(geo.local_k == Ratio{1, 1});
    CHECK(geo.claim_holds);
    CHECK(geo.quasigeodesic);

    const auto back = local_to_global_report(c6, {{0, 1, 0}, PathClaim::quasigeodesic}, 2);
    CHECK(!back.quasigeodesic);
    REQUIRE(back.offending);
    CHECK(back.offending->begin == 0);
    CHECK(back.offending->end == 2);
    CHECK(!back.claim_holds);

    // two geodesics 0..3 and 3..5 meeting at the antipode
    const auto bent = local_to_global_report(c6, {{0, 1, 2, 3, 4, 5}, PathClaim::quasigeodesic}, 3);
    CHECK(bent.quasigeodesic);
    CHECK(bent.global_k == Ratio{5, 2});  // t - s = 5 with d(0,5) = 1
    CHECK_THROWS_AS(local_to_global_report(c6, {{0, 2}, PathClaim::geodesic}, 2), Error);

    const auto p10 = all_pairs_distances(path_graph(10));
    std::vector<Vertex> line(10);
    std::iota(line.begin(), line.end(), 0);
    for (std::size_t L = 1; L < 10; ++L) CHECK(local_to_global_report(p10, {line, PathClaim::geodesic}, L).global_k == Ratio{1, 1});
}

TEST_CASE("geodesic enumeration") {
    // grid 4x4: number of monotone paths corner to corner is C(6,3)
    std::vector<Edge> e;
    for (Vertex r = 0; r < 4; ++r)
        for (Vertex c = 0; c < 4; ++c) {
            if (c + 1 < 4) e.emplace_back(r * 4 + c, r * 4 + c + 1);
            if (r + 1 < 4) e.emplace_back(r * 4 + c, (r + 1) * 4 + c);
        }
    const auto d = all_pairs_distances(FiniteGraph(16, e));
    const auto all = enumerate_geodesics(d, 0, 15);
    CHECK(all.total == doctest::Approx(20.0));
    CHECK(all.paths.size() == 20);
    CHECK(!all.sampled);
    std::set<std::vector<Vertex>> unique(all.paths.begin(), all.paths.end());
    CHECK(unique.size() == 20);

    const auto some = enumerate_geodesics(d, 0, 15, 5, 42);
    CHECK(some.sampled);
    CHECK(some.paths.size() == 5);
    for (const auto& p : some.paths) CHECK(unique.count(p) == 1);
    CHECK(enumerate_geodesics(d, 0, 15, 5, 42).paths == some.paths);
}
