#include "glueforge/surface.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "glueforge/error.hpp"

namespace glueforge::surface {

using torus::Int;
using torus::Slope;
using hyp::Vertex;

namespace {

Int int_from_json(const json& j) {
    if (j.is_number_integer()) return Int(static_cast<long>(j.get<std::int64_t>()));
    if (j.is_string()) {
        Int v;
        const auto s = j.get<std::string>();
        if (s.empty() || v.set_str(s, 10) != 0) fail(ErrorKind::parse, "malformed integer `" + s + "`");
        return v;
    }
    fail(ErrorKind::parse, "expected an integer, got " + j.dump());
}

json int_to_json(const Int& v) {
    if (v.fits_slong_p()) return json(static_cast<std::int64_t>(v.get_si()));
    return json(v.get_str());
}

Vertex vertex_from_json(const GraphBackend& g, const json& j) {
    if (!j.is_number_integer()) fail(ErrorKind::parse, "expected a vertex index, got " + j.dump());
    const auto v = j.get<std::int64_t>();
    if (v < 0 || static_cast<std::size_t>(v) >= g.graph.vertex_count())
        fail(ErrorKind::invariant, "vertex " + std::to_string(v) + " is not in the graph backend");
    return static_cast<Vertex>(v);
}

std::vector<Vertex> sorted_vertices(const std::vector<Curve>& c) {
    std::vector<Vertex> out;
    for (const auto& x : c) out.push_back(std::get<Vertex>(x));
    std::sort(out.begin(), out.end());
    return out;
}

void require_same(const BackendHandle& a, const BackendHandle& b) {
    if (!(a == b))
        fail(ErrorKind::backend_mismatch, "markings live on different backends (" + a.name() + " vs " + b.name() + ")");
}

}  // namespace

BackendHandle BackendHandle::torus() { return {}; }

BackendHandle BackendHandle::graph(hyp::FiniteGraph g, std::vector<ProjectionEntry> projections) {
    auto dist = hyp::all_pairs_distances(g);
    for (auto& p : projections) {
        std::sort(p.a.begin(), p.a.end());
        std::sort(p.b.begin(), p.b.end());
        for (const auto* set : {&p.a, &p.b})
            for (Vertex v : *set)
                if (v >= g.vertex_count()) fail(ErrorKind::invariant, "projection table references a missing vertex");
        if (p.value < 0) fail(ErrorKind::invariant, "projection values must be non-negative");
    }
    BackendHandle h;
    h.kind_ = BackendKind::graph;
    h.graph_ = std::make_shared<const GraphBackend>(GraphBackend{std::move(g), std::move(dist), std::move(projections)});
    return h;
}

BackendHandle BackendHandle::from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        fail(ErrorKind::parse, "backend declaration needs a string `kind`");
    const auto kind = j["kind"].get<std::string>();
    if (kind == "torus") return torus();
    if (kind != "graph") fail(ErrorKind::parse, "unknown backend kind `" + kind + "`");
    if (!j.contains("edges") || !j["edges"].is_array()) fail(ErrorKind::parse, "graph backend needs `edges`");
    std::vector<hyp::Edge> edges;
    std::int64_t max_vertex = -1;
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            fail(ErrorKind::parse, "graph edge must be a pair of vertex indices");
        const auto u = e[0].get<std::int64_t>(), v = e[1].get<std::int64_t>();
        if (u < 0 || v < 0) fail(ErrorKind::parse, "negative vertex index in graph backend");
        max_vertex = std::max({max_vertex, u, v});
        edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    std::int64_t n = max_vertex + 1;
    if (j.contains("vertices")) {
        if (!j["vertices"].is_number_integer()) fail(ErrorKind::parse, "`vertices` must be an integer");
        n = j["vertices"].get<std::int64_t>();
    }
    if (n <= 0) fail(ErrorKind::parse, "graph backend has no vertices");
    std::vector<ProjectionEntry> table;
    if (j.contains("projections")) {
        for (const auto& p : j["projections"]) {
            ProjectionEntry e;
            try {
                e.a = p.at("a").get<std::vector<Vertex>>();
                e.b = p.at("b").get<std::vector<Vertex>>();
                e.label = p.at("label").get<std::string>();
                e.value = p.at("value").get<std::int64_t>();
            } catch (const json::exception& ex) {
                fail(ErrorKind::parse, std::string("projection entry: ") + ex.what());
            }
            table.push_back(std::move(e));
        }
    }
    return graph(hyp::FiniteGraph(static_cast<std::size_t>(n), std::move(edges)), std::move(table));
}

json BackendHandle::to_json() const {
    if (is_torus()) return json{{"kind", "torus"}};
    json edges = json::array();
    for (const auto& [u, v] : graph_->graph.edges()) edges.push_back({u, v});
    json out{{"kind", "graph"}, {"vertices", graph_->graph.vertex_count()}, {"edges", edges}};
    if (!graph_->projections.empty()) {
        json table = json::array();
        for (const auto& p : graph_->projections)
            table.push_back({{"a", p.a}, {"b", p.b}, {"label", p.label}, {"value", p.value}});
        out["projections"] = table;
    }
    return out;
}

const GraphBackend& BackendHandle::graph_data() const {
    if (!graph_) fail(ErrorKind::unsupported, "torus backend has no graph data");
    return *graph_;
}

std::string BackendHandle::name() const {
    if (is_torus()) return "torus";
    return "graph(" + std::to_string(graph_->graph.vertex_count()) + " vertices)";
}

bool operator==(const BackendHandle& a, const BackendHandle& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.is_torus()) return true;
    if (a.graph_ == b.graph_) return true;
    if (!(a.graph_->graph == b.graph_->graph)) return false;
    const auto& pa = a.graph_->projections;
    const auto& pb = b.graph_->projections;
    if (pa.size() != pb.size()) return false;
    for (std::size_t i = 0; i < pa.size(); ++i)
        if (pa[i].a != pb[i].a || pa[i].b != pb[i].b || pa[i].label != pb[i].label || pa[i].value != pb[i].value)
            return false;
    return true;
}

std::string curve_to_string(const Curve& c) {
    if (const auto* s = std::get_if<Slope>(&c)) return s->to_string();
    return std::to_string(std::get<Vertex>(c));
}

Curve curve_from_json(const BackendHandle& b, const json& j) {
    if (b.is_torus()) {
        if (!j.is_string()) fail(ErrorKind::parse, "torus curve must be a slope string, got " + j.dump());
        return Slope::parse(j.get<std::string>());
    }
    return vertex_from_json(b.graph_data(), j);
}

json curve_to_json(const Curve& c) {
    if (const auto* s = std::get_if<Slope>(&c)) return s->to_string();
    return std::get<Vertex>(c);
}

AbstractMarking AbstractMarking::from_torus(const torus::FareyMarking& m) {
    return {BackendHandle::torus(), {m.base, m.transversal}};
}

AbstractMarking AbstractMarking::make(const BackendHandle& b, std::vector<Curve> curves) {
    if (b.is_torus()) {
        if (curves.size() != 2) fail(ErrorKind::invariant, "torus marking needs exactly two slopes");
        return from_torus(torus::FareyMarking(std::get<Slope>(curves[0]), std::get<Slope>(curves[1])));
    }
    if (curves.empty() || curves.size() > 3) fail(ErrorKind::invariant, "graph marking needs 1 to 3 vertices");
    const auto& d = b.graph_data().distances;
    for (const auto& x : curves)
        for (const auto& y : curves) {
            if (x != y && d(std::get<Vertex>(x), std::get<Vertex>(y)) > 2)
                fail(ErrorKind::invariant, "graph marking has diameter larger than 2");
        }
    return {b, std::move(curves)};
}

AbstractMarking AbstractMarking::from_json(const BackendHandle& b, const json& j) {
    if (!j.is_array()) fail(ErrorKind::parse, "marking must be an array, got " + j.dump());
    std::vector<Curve> c;
    for (const auto& x : j) c.push_back(curve_from_json(b, x));
    return make(b, std::move(c));
}

json AbstractMarking::to_json() const {
    json out = json::array();
    for (const auto& c : curves) out.push_back(curve_to_json(c));
    return out;
}

torus::FareyMarking AbstractMarking::farey() const {
    if (!backend.is_torus()) fail(ErrorKind::unsupported, "marking is not on the torus backend");
    return torus::FareyMarking(std::get<Slope>(curves[0]), std::get<Slope>(curves[1]));
}

std::string AbstractMarking::to_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < curves.size(); ++i) out += (i ? ", " : "") + curve_to_string(curves[i]);
    return out + ")";
}

DiskSet disk_set_from_json(const BackendHandle& b, const json& j) {
    if (!j.is_array()) fail(ErrorKind::parse, "disk set must be an array");
    DiskSet d;
    for (const auto& x : j) d.curves.push_back(curve_from_json(b, x));
    return d;
}

std::int64_t curve_distance(const BackendHandle& b, const Curve& x, const Curve& y) {
    if (b.is_torus()) return torus::farey_distance(std::get<Slope>(x), std::get<Slope>(y));
    return b.graph_data().distances(std::get<Vertex>(x), std::get<Vertex>(y));
}

std::int64_t marking_distance(const AbstractMarking& m1, const AbstractMarking& m2) {
    require_same(m1.backend, m2.backend);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto& x : m1.curves)
        for (const auto& y : m2.curves) best = std::min(best, curve_distance(m1.backend, x, y));
    return best;
}

SupProjection sup_projection(const AbstractMarking& m1, const AbstractMarking& m2,
                             std::int64_t denominator_bound) {
    require_same(m1.backend, m2.backend);
    SupProjection out;
    if (m1.backend.is_torus()) {
        const auto r = torus::max_subsurface_projection(m1.farey(), m2.farey(), denominator_bound);
        out.label = "annulus(" + r.annulus.core.to_string() + ")";
        out.value = r.value;
        out.certified = r.certified;
        out.denominator_bound = denominator_bound;
        out.annulus = r.annulus;
        return out;
    }
    const auto a = sorted_vertices(m1.curves), b = sorted_vertices(m2.curves);
    for (const auto& e : m1.backend.graph_data().projections) {
        if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) {
            out.label = e.label;
            out.value = static_cast<long>(e.value);
            return out;
        }
    }
    out.label = "unmodeled";
    out.value = 0;
    out.unmodeled = true;
    return out;
}

std::int64_t disk_distance(const BackendHandle& b, const Curve& c, const DiskSet& delta,
                           const std::string& boundary) {
    if (delta.empty()) fail(ErrorKind::domain, "disk set on " + boundary + " is empty");
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto& x : delta.curves) best = std::min(best, curve_distance(b, x, c));
    return best;
}

std::int64_t disk_distance(const AbstractMarking& m, const DiskSet& delta, const std::string& boundary) {
    if (delta.empty()) fail(ErrorKind::domain, "disk set on " + boundary + " is empty");
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto& c : m.curves) best = std::min(best, disk_distance(m.backend, c, delta, boundary));
    return best;
}

MapDescriptor map_from_json(const BackendHandle& b, const json& j) {
    if (b.is_torus()) {
        if (!j.is_array() || j.size() != 2 || !j[0].is_array() || !j[1].is_array() || j[0].size() != 2 ||
            j[1].size() != 2)
            fail(ErrorKind::parse, "surface map must be [[a,b],[c,d]], got " + j.dump());
        return torus::SurfaceMap(int_from_json(j[0][0]), int_from_json(j[0][1]), int_from_json(j[1][0]),
                                 int_from_json(j[1][1]));
    }
    if (!j.is_array()) fail(ErrorKind::parse, "graph map must be a vertex table");
    std::vector<Vertex> table;
    for (const auto& v : j) table.push_back(vertex_from_json(b.graph_data(), v));
    MapDescriptor m = table;
    validate_map(b, m);
    return m;
}

json map_to_json(const MapDescriptor& m) {
    if (const auto* s = std::get_if<torus::SurfaceMap>(&m))
        return json::array({json::array({int_to_json(s->a), int_to_json(s->b)}),
                            json::array({int_to_json(s->c), int_to_json(s->d)})});
    return std::get<std::vector<Vertex>>(m);
}

void validate_map(const BackendHandle& b, const MapDescriptor& m) {
    if (b.is_torus()) {
        if (!std::holds_alternative<torus::SurfaceMap>(m)) fail(ErrorKind::invariant, "torus map must be a matrix");
        return;
    }
    const auto* table = std::get_if<std::vector<Vertex>>(&m);
    if (!table) fail(ErrorKind::invariant, "graph map must be a vertex table");
    const auto& g = b.graph_data().graph;
    if (table->size() != g.vertex_count()) fail(ErrorKind::invariant, "vertex map has the wrong size");
    std::vector<bool> hit(g.vertex_count(), false);
    for (Vertex v : *table) {
        if (v >= g.vertex_count() || hit[v]) fail(ErrorKind::invariant, "vertex map is not a bijection");
        hit[v] = true;
    }
    for (const auto& [u, v] : g.edges())
        if (!g.adjacent((*table)[u], (*table)[v])) fail(ErrorKind::invariant, "vertex map is not a graph automorphism");
}

MapDescriptor compose(const MapDescriptor& outer, const MapDescriptor& inner) {
    if (const auto* a = std::get_if<torus::SurfaceMap>(&outer)) return *a * std::get<torus::SurfaceMap>(inner);
    const auto& a = std::get<std::vector<Vertex>>(outer);
    const auto& b = std::get<std::vector<Vertex>>(inner);
    std::vector<Vertex> out(b.size());
    for (std::size_t v = 0; v < b.size(); ++v) out[v] = a[b[v]];
    return out;
}

MapDescriptor inverse(const MapDescriptor& m) {
    if (const auto* a = std::get_if<torus::SurfaceMap>(&m)) return a->inverse();
    const auto& t = std::get<std::vector<Vertex>>(m);
    std::vector<Vertex> out(t.size());
    for (std::size_t v = 0; v < t.size(); ++v) out[t[v]] = static_cast<Vertex>(v);
    return out;
}

bool is_identity(const MapDescriptor& m) {
    if (const auto* a = std::get_if<torus::SurfaceMap>(&m)) return a->is_identity();
    const auto& t = std::get<std::vector<Vertex>>(m);
    for (std::size_t v = 0; v < t.size(); ++v)
        if (t[v] != v) return false;
    return true;
}

bool orientation_reversing(const MapDescriptor& m) {
    if (const auto* a = std::get_if<torus::SurfaceMap>(&m)) return !a->orientation_preserving();
    return true;
}

Curve pushforward(const MapDescriptor& map, const Curve& c) {
    if (const auto* a = std::get_if<torus::SurfaceMap>(&map)) return torus::apply_map(*a, std::get<Slope>(c));
    return std::get<std::vector<Vertex>>(map).at(std::get<Vertex>(c));
}

AbstractMarking pushforward(const MapDescriptor& map, const AbstractMarking& m) {
    AbstractMarking out{m.backend, {}};
    for (const auto& c : m.curves) out.curves.push_back(pushforward(map, c));
    return out;
}

DiskSet pushforward(const MapDescriptor& map, const DiskSet& d) {
    DiskSet out;
    for (const auto& c : d.curves) out.curves.push_back(pushforward(map, c));
    return out;
}

}  // namespace glueforge::surface
