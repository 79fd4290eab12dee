#pragma once

// Induced markings, heights and the bounded-combinatorics certificate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glueforge/gluing.hpp"

namespace glueforge::gluing {

enum class NuSource { buried, lambda, empty };
std::string to_string(NuSource s);

struct InducedEntry {
    Slot slot;
    NuSource source = NuSource::empty;
    std::optional<AbstractMarking> nu;
};

struct InducedMarkingTable {
    std::vector<InducedEntry> entries;  // in GluingGraph::slots() order
    std::vector<Slot> missing;          // unburied slots without lambda
    const InducedEntry& at(const Slot& s) const;
    bool complete() const { return missing.empty(); }
};

InducedMarkingTable induced_markings(const GluingGraph& X);

struct HeightEntry {
    Slot slot;
    std::optional<std::int64_t> height;  // empty nu: undefined
};

std::vector<HeightEntry> heights(const GluingGraph& X, const InducedMarkingTable& nu);
std::vector<HeightEntry> heights(const GluingGraph& X);

/// Canonical geodesic between the closest curves of two markings: Farey
/// geodesic on the torus, least-vertex BFS descent on a graph.
std::vector<Curve> canonical_geodesic(const BackendHandle& b, const Curve& x, const Curve& y);
std::vector<Curve> canonical_geodesic(const AbstractMarking& from, const AbstractMarking& to);
/// min over marking curves and geodesic vertices
std::int64_t distance_to_path(const AbstractMarking& m, const std::vector<Curve>& path);

struct SlotClauses {
    Slot slot;
    NuSource source = NuSource::empty;
    std::optional<AbstractMarking> mu, nu;
    std::optional<std::int64_t> height;
    bool height_ok = true;  // height >= D, vacuous when undefined
    std::optional<surface::SupProjection> sup;
    bool clause_a = true;
    // clause (b), compressible slots with nu
    bool meridian_applicable = false;
    std::int64_t meridian_distance = 0;
    bool clause_b = true;
};

struct GeodesicClause {
    bool applicable = false;
    bool pass = true;
    std::string note;
    std::vector<Curve> geodesic;
    std::int64_t d_first = 0, d_second = 0;
};

struct PieceClauses {
    std::string piece;
    ManifoldKind kind = ManifoldKind::generic;
    GeodesicClause clause_c;  // trivial I-bundles
    GeodesicClause clause_d;  // twisted I-bundles
    struct Record {
        std::string kind;
        std::vector<std::string> boundaries;
        std::vector<std::string> covering;  // boundaries with non-empty nu
        bool pass = true;
    };
    std::vector<Record> clause_e;
    bool pass = true;
};

struct CombinatoricsCertificate {
    std::int64_t R = 0, D = 0, denominator_bound = 0;
    std::vector<SlotClauses> slots;
    std::vector<PieceClauses> pieces;
    std::vector<std::string> failures;
    bool pass() const { return failures.empty(); }
    json to_json() const;
};

CombinatoricsCertificate check_bounded_combinatorics(const GluingGraph& X, std::int64_t R, std::int64_t D,
                                                     std::int64_t denominator_bound = torus::kDefaultDenominatorBound);

}  // namespace glueforge::gluing
