#pragma once

// Backend-neutral marked-surface interface. The torus backend is exact; the
// finite-graph backend stands in for curve graphs we cannot build, and carries
// no Teichmuller structure.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "glueforge/hypgraph.hpp"
#include "glueforge/torus.hpp"
#include "json.hpp"

namespace glueforge::surface {

using json = nlohmann::ordered_json;

enum class BackendKind { torus, graph };

struct ProjectionEntry {
    std::vector<hyp::Vertex> a, b;  // sorted marking vertex sets
    std::string label;
    std::int64_t value = 0;
};

struct GraphBackend {
    hyp::FiniteGraph graph;
    hyp::DistanceTable distances;
    std::vector<ProjectionEntry> projections;
};

class BackendHandle {
public:
    static BackendHandle torus();
    static BackendHandle graph(hyp::FiniteGraph g, std::vector<ProjectionEntry> projections = {});
    /// {"kind":"torus"} or {"kind":"graph","edges":[[u,v],...],"vertices":n,"projections":[...]}
    static BackendHandle from_json(const json& j);
    json to_json() const;

    BackendKind kind() const { return kind_; }
    bool is_torus() const { return kind_ == BackendKind::torus; }
    const GraphBackend& graph_data() const;
    std::string name() const;

    friend bool operator==(const BackendHandle& a, const BackendHandle& b);

private:
    BackendKind kind_ = BackendKind::torus;
    std::shared_ptr<const GraphBackend> graph_;
};

using Curve = std::variant<torus::Slope, hyp::Vertex>;

std::string curve_to_string(const Curve& c);
Curve curve_from_json(const BackendHandle& b, const json& j);
json curve_to_json(const Curve& c);

struct AbstractMarking {
    BackendHandle backend;
    std::vector<Curve> curves;  // torus: {base, transversal}

    static AbstractMarking from_torus(const torus::FareyMarking& m);
    /// Validates the payload: a Farey pair on the torus; 1..3 vertices of
    /// diameter <= 2 on a graph.
    static AbstractMarking make(const BackendHandle& b, std::vector<Curve> curves);
    static AbstractMarking from_json(const BackendHandle& b, const json& j);
    json to_json() const;

    torus::FareyMarking farey() const;  // torus backend only
    std::string to_string() const;
    friend bool operator==(const AbstractMarking& a, const AbstractMarking& b) {
        return a.backend == b.backend && a.curves == b.curves;
    }
};

struct DiskSet {
    std::vector<Curve> curves;
    bool empty() const { return curves.empty(); }
};

DiskSet disk_set_from_json(const BackendHandle& b, const json& j);

std::int64_t curve_distance(const BackendHandle& b, const Curve& x, const Curve& y);
std::int64_t marking_distance(const AbstractMarking& m1, const AbstractMarking& m2);

struct SupProjection {
    std::string label;          // "annulus(p/q)" on the torus
    torus::Int value;
    bool unmodeled = false;     // graph backend without a table entry
    bool certified = true;
    std::int64_t denominator_bound = 0;
    std::optional<torus::AnnulusLabel> annulus;
};

SupProjection sup_projection(const AbstractMarking& m1, const AbstractMarking& m2,
                             std::int64_t denominator_bound = torus::kDefaultDenominatorBound);

std::int64_t disk_distance(const AbstractMarking& m, const DiskSet& delta,
                           const std::string& boundary = "boundary");
/// min over disk-set elements of the distance to a single curve
std::int64_t disk_distance(const BackendHandle& b, const Curve& c, const DiskSet& delta,
                           const std::string& boundary = "boundary");

/// Torus: a SurfaceMap; graph: a vertex bijection that must be an automorphism.
using MapDescriptor = std::variant<torus::SurfaceMap, std::vector<hyp::Vertex>>;

MapDescriptor map_from_json(const BackendHandle& b, const json& j);
json map_to_json(const MapDescriptor& m);
void validate_map(const BackendHandle& b, const MapDescriptor& m);
MapDescriptor compose(const MapDescriptor& outer, const MapDescriptor& inner);
MapDescriptor inverse(const MapDescriptor& m);
bool is_identity(const MapDescriptor& m);
bool orientation_reversing(const MapDescriptor& m);  // graph maps: true by convention

Curve pushforward(const MapDescriptor& map, const Curve& c);
AbstractMarking pushforward(const MapDescriptor& map, const AbstractMarking& m);
DiskSet pushforward(const MapDescriptor& map, const DiskSet& d);

}  // namespace glueforge::surface
