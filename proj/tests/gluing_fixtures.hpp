#pragma once

// Small gluing-spec builders shared by the tests.

#include <string>
#include <vector>

#include "glueforge/gluing.hpp"

namespace fixtures {

using glueforge::surface::json;

inline json mat(long a, long b, long c, long d) { return json::array({json::array({a, b}), json::array({c, d})}); }

inline json torus_boundary(const std::string& id, const std::string& base = "0", const std::string& trans = "inf") {
    return json{{"id", id}, {"backend", "torus"}, {"marking", {base, trans}}};
}

inline json manifold(const std::string& id, std::vector<json> boundaries, const std::string& kind = "generic") {
    return json{{"id", id}, {"kind", kind}, {"boundary", boundaries}};
}

inline json ident(const std::string& pa, const std::string& ea, const std::string& pb, const std::string& eb,
                  const json& map) {
    return json{{"a", {pa, ea}}, {"b", {pb, eb}}, {"map", map}};
}

/// Two one-boundary pieces glued by `map`, both decorated (0, inf).
inline json two_piece(const json& map) {
    return json{{"manifolds", {manifold("M", {torus_boundary("E")})}},
                {"pieces", {{{"id", "p1"}, {"manifold", "M"}}, {{"id", "p2"}, {"manifold", "M"}}}},
                {"identifications", {ident("p1", "E", "p2", "E", map)}}};
}

/// The running example: [[13,8],[8,5]] composed with the reflection.
inline json psi_example() { return mat(13, -8, 8, -5); }

/// c1 - b1 - ... - bn - c2 with trivial I-bundles b_k; maps[k] glues the k-th surface.
inline json bundle_chain(const std::vector<json>& maps) {
    json spec{{"manifolds",
               {manifold("M", {torus_boundary("E")}),
                manifold("B", {torus_boundary("E0"), torus_boundary("E1")}, "trivial-I-bundle")}},
              {"pieces", json::array()},
              {"identifications", json::array()}};
    const std::size_t n = maps.size() - 1;
    spec["pieces"].push_back({{"id", "c1"}, {"manifold", "M"}});
    for (std::size_t k = 1; k <= n; ++k) spec["pieces"].push_back({{"id", "b" + std::to_string(k)}, {"manifold", "B"}});
    spec["pieces"].push_back({{"id", "c2"}, {"manifold", "M"}});
    auto name = [&](std::size_t k) { return k == 0 ? std::string("c1") : "b" + std::to_string(k); };
    for (std::size_t k = 0; k <= n; ++k) {
        const std::string from = name(k), from_end = k == 0 ? "E" : "E1";
        const std::string to = k == n ? std::string("c2") : name(k + 1), to_end = k == n ? "E" : "E0";
        spec["identifications"].push_back(ident(from, from_end, to, to_end, maps[k]));
    }
    return spec;
}

}  // namespace fixtures
