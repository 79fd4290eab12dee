#include "glueforge/gluing.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "glueforge/error.hpp"

namespace glueforge::gluing {

using torus::SurfaceMap;

namespace {

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) fail(ErrorKind::parse, where + ": missing `" + key + "`");
    return j.at(key);
}

std::string need_string(const json& j, const char* key, const std::string& where) {
    const auto& v = need(j, key, where);
    if (!v.is_string()) fail(ErrorKind::parse, where + ": `" + key + "` must be a string");
    return v.get<std::string>();
}

bool opt_bool(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) return false;
    if (!j[key].is_boolean()) fail(ErrorKind::parse, where + ": `" + key + "` must be a boolean");
    return j[key].get<bool>();
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
    if (!j.is_array()) fail(ErrorKind::parse, where + ": expected an array of names");
    std::vector<std::string> out;
    for (const auto& x : j) {
        if (!x.is_string()) fail(ErrorKind::parse, where + ": expected an array of names");
        out.push_back(x.get<std::string>());
    }
    return out;
}

ManifoldKind kind_from_string(const std::string& s, const std::string& where) {
    if (s == "generic") return ManifoldKind::generic;
    if (s == "trivial-I-bundle") return ManifoldKind::trivial_ibundle;
    if (s == "twisted-I-bundle") return ManifoldKind::twisted_ibundle;
    if (s == "compression-body") return ManifoldKind::compression_body;
    fail(ErrorKind::parse, where + ": unknown manifold kind `" + s + "`");
}

BackendHandle backend_from(const json& j, const std::map<std::string, BackendHandle>& named,
                           const std::string& where) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "torus") return BackendHandle::torus();
        auto it = named.find(name);
        if (it == named.end()) fail(ErrorKind::invariant, where + ": unknown backend `" + name + "`");
        return it->second;
    }
    return BackendHandle::from_json(j);
}

Slot slot_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string())
        fail(ErrorKind::parse, where + ": slot must be [piece, boundary]");
    return {j[0].get<std::string>(), j[1].get<std::string>()};
}

json slot_to_json(const Slot& s) { return json::array({s.piece, s.boundary}); }

Slot slot_from_key(const std::string& key) {
    const auto colon = key.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == key.size())
        fail(ErrorKind::parse, "lambda key `" + key + "` must read piece:boundary");
    return {key.substr(0, colon), key.substr(colon + 1)};
}

ManifoldSpec parse_manifold(const json& j, const std::map<std::string, BackendHandle>& named) {
    ManifoldSpec m;
    m.id = need_string(j, "id", "manifold");
    const std::string where = "manifold " + m.id;
    m.kind = j.contains("kind") ? kind_from_string(need_string(j, "kind", where), where) : ManifoldKind::generic;
    const auto& bs = need(j, "boundary", where);
    if (!bs.is_array()) fail(ErrorKind::parse, where + ": `boundary` must be an array");
    for (const auto& b : bs) {
        BoundarySpec e;
        e.id = need_string(b, "id", where + " boundary");
        const std::string bw = where + " boundary " + e.id;
        e.backend = b.contains("backend") ? backend_from(b["backend"], named, bw) : BackendHandle::torus();
        e.toroidal = opt_bool(b, "toroidal", bw);
        e.compressible = opt_bool(b, "compressible", bw);
        e.exterior = opt_bool(b, "exterior", bw);
        if (b.contains("marking")) e.decoration = AbstractMarking::from_json(e.backend, b["marking"]);
        if (b.contains("disks")) e.disks = surface::disk_set_from_json(e.backend, b["disks"]);
        if (b.contains("genus")) {
            if (!b["genus"].is_number_integer()) fail(ErrorKind::parse, bw + ": `genus` must be an integer");
            e.genus = b["genus"].get<int>();
        }
        if (b.contains("window_frames")) {
            if (!b["window_frames"].is_array()) fail(ErrorKind::parse, bw + ": `window_frames` must be an array");
            for (const auto& c : b["window_frames"]) e.window_frames.push_back(surface::curve_from_json(e.backend, c));
        }
        m.boundaries.push_back(std::move(e));
    }
    if (j.contains("essential")) {
        for (const auto& r : j["essential"]) {
            EssentialRecord rec;
            rec.kind = need_string(r, "kind", where + " essential record");
            rec.boundaries = string_list(need(r, "boundaries", where + " essential record"), where);
            m.essential.push_back(std::move(rec));
        }
    }
    if (j.contains("jsj")) {
        for (const auto& c : j["jsj"]) {
            CharPiece cp;
            cp.id = need_string(c, "id", where + " jsj piece");
            cp.type = need_string(c, "type", where + " jsj piece " + cp.id);
            for (const auto& f : need(c, "footprint", where + " jsj piece " + cp.id)) {
                if (!f.is_array() || f.size() != 2 || !f[0].is_string() || !f[1].is_string())
                    fail(ErrorKind::parse, where + " jsj piece " + cp.id + ": footprint entries are [boundary, label]");
                cp.footprint.push_back({f[0].get<std::string>(), f[1].get<std::string>()});
            }
            if (c.contains("parallel_class")) cp.parallel_class = need_string(c, "parallel_class", where);
            m.jsj.push_back(std::move(cp));
        }
    }
    // maps act on the non-toroidal boundary backend
    auto first_backend = [&]() -> BackendHandle {
        for (const auto& e : m.boundaries)
            if (!e.toroidal) return e.backend;
        fail(ErrorKind::invariant, where + ": no non-toroidal boundary");
    };
    if (j.contains("exchange")) m.exchange = surface::map_from_json(first_backend(), j["exchange"]);
    if (j.contains("cover")) m.deck = surface::map_from_json(first_backend(), need(j["cover"], "deck", where + " cover"));
    if (j.contains("splitting")) {
        const auto& s = j["splitting"];
        m.splitting.declared = true;
        for (const auto& p : need(s, "parts", where + " splitting")) {
            SplitPart part;
            part.id = need_string(p, "id", where + " splitting part");
            part.kind = need_string(p, "kind", where + " splitting part " + part.id);
            if (p.contains("boundaries")) part.boundaries = string_list(p["boundaries"], where);
            if (p.contains("exterior")) part.exterior = need_string(p, "exterior", where);
            if (p.contains("interior")) part.interior = string_list(p["interior"], where);
            m.splitting.parts.push_back(std::move(part));
        }
        if (s.contains("internal")) {
            for (const auto& g : s["internal"]) {
                const auto a = slot_from_json(need(g, "a", where + " internal gluing"), where);
                const auto b = slot_from_json(need(g, "b", where + " internal gluing"), where);
                m.splitting.internal.push_back({a.piece, a.boundary, b.piece, b.boundary});
            }
        }
    }
    return m;
}

Params parse_params(const json& j) {
    Params p;
    if (!j.is_object()) fail(ErrorKind::parse, "`params` must be an object");
    auto int_field = [&](const char* k, std::optional<std::int64_t>& out) {
        if (!j.contains(k)) return;
        if (!j[k].is_number_integer()) fail(ErrorKind::parse, std::string("param `") + k + "` must be an integer");
        out = j[k].get<std::int64_t>();
    };
    int_field("R", p.R);
    int_field("D", p.D);
    int_field("h", p.h);
    int_field("samples", p.samples);
    int_field("denom_bound", p.denom_bound);
    int_field("seed", p.seed);
    int_field("budget", p.budget);
    if (j.contains("eps0")) {
        if (!j["eps0"].is_number()) fail(ErrorKind::parse, "param `eps0` must be a number");
        p.eps0 = j["eps0"].get<double>();
    }
    return p;
}

}  // namespace

std::string to_string(ManifoldKind k) {
    switch (k) {
        case ManifoldKind::generic: return "generic";
        case ManifoldKind::trivial_ibundle: return "trivial-I-bundle";
        case ManifoldKind::twisted_ibundle: return "twisted-I-bundle";
        case ManifoldKind::compression_body: return "compression-body";
    }
    return "generic";
}

const BoundarySpec* ManifoldSpec::find(const std::string& boundary) const {
    for (const auto& e : boundaries)
        if (e.id == boundary) return &e;
    return nullptr;
}

const BoundarySpec& ManifoldSpec::at(const std::string& boundary) const {
    if (const auto* e = find(boundary)) return *e;
    fail(ErrorKind::invariant, "manifold " + id + " has no boundary `" + boundary + "`");
}

std::vector<const BoundarySpec*> ManifoldSpec::nontoroidal() const {
    std::vector<const BoundarySpec*> out;
    for (const auto& e : boundaries)
        if (!e.toroidal) out.push_back(&e);
    return out;
}

bool free_involution(const MapDescriptor& m) {
    if (const auto* s = std::get_if<SurfaceMap>(&m)) {
        if (!(*s * *s).is_identity() || s->det() != -1) return false;
        auto odd = [](const torus::Int& v) { return mpz_odd_p(v.get_mpz_t()) != 0; };
        return odd(s->a) && !odd(s->b) && !odd(s->c) && odd(s->d);
    }
    const auto& t = std::get<std::vector<hyp::Vertex>>(m);
    for (std::size_t v = 0; v < t.size(); ++v)
        if (t[v] == v || t[t[v]] != v) return false;
    return true;
}

void validate_manifold(const ManifoldSpec& m) {
    const std::string where = "manifold " + m.id;
    if (m.id.empty()) fail(ErrorKind::invariant, "manifold with empty id");
    std::set<std::string> ids;
    for (const auto& e : m.boundaries) {
        const std::string bw = where + " boundary " + e.id;
        if (e.id.empty() || e.id.find(':') != std::string::npos)
            fail(ErrorKind::invariant, where + ": boundary ids must be non-empty and free of ':'");
        if (!ids.insert(e.id).second) fail(ErrorKind::invariant, bw + ": duplicate boundary id");
        if (e.toroidal) {
            if (e.compressible) fail(ErrorKind::invariant, bw + ": toroidal boundary flagged compressible");
            continue;
        }
        if (!e.decoration) fail(ErrorKind::invariant, bw + ": missing decoration marking");
        if (!(e.decoration->backend == e.backend)) fail(ErrorKind::backend_mismatch, bw + ": marking backend differs");
        if (e.compressible && e.disks.empty())
            fail(ErrorKind::invariant, bw + ": compressible boundary has no disk set");
        if (!e.compressible && !e.disks.empty())
            fail(ErrorKind::invariant, bw + ": disk set on an incompressible boundary");
        if (e.exterior && m.kind != ManifoldKind::compression_body)
            fail(ErrorKind::invariant, bw + ": exterior flag outside a compression body");
        if (e.genus < 1) fail(ErrorKind::invariant, bw + ": genus must be at least 1");
    }
    const auto nt = m.nontoroidal();
    switch (m.kind) {
        case ManifoldKind::trivial_ibundle: {
            if (nt.size() != 2) fail(ErrorKind::invariant, where + ": trivial I-bundle needs exactly two non-toroidal boundaries");
            if (!(nt[0]->backend == nt[1]->backend))
                fail(ErrorKind::backend_mismatch, where + ": I-bundle ends use different backends");
            for (const auto* e : nt)
                if (e->compressible) fail(ErrorKind::invariant, where + ": I-bundle end " + e->id + " flagged compressible");
            if (m.exchange) {
                surface::validate_map(nt[0]->backend, *m.exchange);
                if (!surface::orientation_reversing(*m.exchange))
                    fail(ErrorKind::invariant, where + ": end exchange must reverse orientation");
            }
            break;
        }
        case ManifoldKind::twisted_ibundle:
            if (nt.size() != 1) fail(ErrorKind::invariant, where + ": twisted I-bundle needs exactly one non-toroidal boundary");
            if (m.deck) {
                surface::validate_map(nt[0]->backend, *m.deck);
                if (!free_involution(*m.deck)) fail(ErrorKind::invariant, where + ": cover deck map is not a free involution");
            }
            break;
        case ManifoldKind::compression_body: {
            std::size_t ext = 0;
            for (const auto* e : nt)
                if (e->exterior) {
                    ++ext;
                    if (!e->compressible) fail(ErrorKind::invariant, where + ": exterior boundary " + e->id + " must be compressible");
                }
            if (ext != 1) fail(ErrorKind::invariant, where + ": compression body needs exactly one exterior boundary");
            break;
        }
        case ManifoldKind::generic: break;
    }
    if (m.kind != ManifoldKind::trivial_ibundle && m.exchange)
        fail(ErrorKind::invariant, where + ": `exchange` only applies to trivial I-bundles");
    if (m.kind != ManifoldKind::twisted_ibundle && m.deck)
        fail(ErrorKind::invariant, where + ": `cover` only applies to twisted I-bundles");
    for (const auto& r : m.essential) {
        if (r.kind != "disk" && r.kind != "annulus")
            fail(ErrorKind::invariant, where + ": essential record kind must be disk or annulus");
        if (r.boundaries.empty()) fail(ErrorKind::invariant, where + ": essential record without boundaries");
        for (const auto& b : r.boundaries)
            if (!m.find(b)) fail(ErrorKind::invariant, where + ": essential record references unknown boundary `" + b + "`");
    }
    std::set<std::string> jsj_ids;
    for (const auto& c : m.jsj) {
        if (!jsj_ids.insert(c.id).second) fail(ErrorKind::invariant, where + ": duplicate jsj piece " + c.id);
        if (c.type != "ibundle" && c.type != "solidtorus" && c.type != "acylindrical")
            fail(ErrorKind::invariant, where + " jsj piece " + c.id + ": unknown type `" + c.type + "`");
        for (const auto& f : c.footprint)
            if (!m.find(f.boundary))
                fail(ErrorKind::invariant, where + " jsj piece " + c.id + ": footprint references unknown boundary `" + f.boundary + "`");
    }
    if (m.splitting.declared) {
        std::set<std::string> parts, owned, interiors;
        std::map<std::string, const SplitPart*> by_id;
        for (const auto& p : m.splitting.parts) {
            const std::string pw = where + " splitting part " + p.id;
            if (p.id.empty() || !parts.insert(p.id).second) fail(ErrorKind::invariant, pw + ": missing or duplicate id");
            by_id[p.id] = &p;
            if (p.kind != "core" && p.kind != "compression-body")
                fail(ErrorKind::invariant, pw + ": kind must be core or compression-body");
            for (const auto& b : p.boundaries) {
                const auto* e = m.find(b);
                if (!e) fail(ErrorKind::invariant, pw + ": unknown boundary `" + b + "`");
                if (!owned.insert(b).second) fail(ErrorKind::invariant, pw + ": boundary " + b + " owned twice");
            }
            if (p.kind == "compression-body") {
                if (std::find(p.boundaries.begin(), p.boundaries.end(), p.exterior) == p.boundaries.end())
                    fail(ErrorKind::invariant, pw + ": exterior must be one of the part's boundaries");
                if (!m.at(p.exterior).compressible)
                    fail(ErrorKind::invariant, pw + ": exterior boundary must be compressible");
            } else {
                if (!p.exterior.empty()) fail(ErrorKind::invariant, pw + ": a core has no exterior");
                for (const auto& b : p.boundaries)
                    if (m.at(b).compressible)
                        fail(ErrorKind::invariant, pw + ": core owns compressible boundary " + b);
            }
            for (const auto& i : p.interior)
                if (!interiors.insert(p.id + ":" + i).second) fail(ErrorKind::invariant, pw + ": duplicate interior " + i);
        }
        for (const auto& e : m.boundaries)
            if (!e.toroidal && !owned.count(e.id))
                fail(ErrorKind::invariant, where + " splitting: boundary " + e.id + " belongs to no part");
        std::set<std::string> used;
        for (const auto& g : m.splitting.internal) {
            for (const auto& key : {g.part_a + ":" + g.boundary_a, g.part_b + ":" + g.boundary_b}) {
                if (!interiors.count(key)) fail(ErrorKind::invariant, where + " splitting: unknown interior boundary " + key);
                if (!used.insert(key).second) fail(ErrorKind::invariant, where + " splitting: interior " + key + " glued twice");
            }
            if (g.part_a == g.part_b) fail(ErrorKind::invariant, where + " splitting: part " + g.part_a + " glued to itself");
            const bool core_a = by_id[g.part_a]->kind == "core", core_b = by_id[g.part_b]->kind == "core";
            if (core_a == core_b)
                fail(ErrorKind::invariant, where + " splitting: internal gluing must join a core and a compression body");
        }
        if (used.size() != interiors.size()) fail(ErrorKind::invariant, where + " splitting: unglued interior boundary");
    }
}

ManifoldSpec manifold_from_json(const json& j) {
    auto m = parse_manifold(j, {});
    validate_manifold(m);
    return m;
}

json manifold_to_json(const ManifoldSpec& m) {
    json bs = json::array();
    for (const auto& e : m.boundaries) {
        json b{{"id", e.id}, {"backend", e.backend.to_json()}};
        if (e.toroidal) b["toroidal"] = true;
        if (e.decoration) b["marking"] = e.decoration->to_json();
        if (e.compressible) b["compressible"] = true;
        if (e.exterior) b["exterior"] = true;
        if (!e.disks.empty()) {
            json d = json::array();
            for (const auto& c : e.disks.curves) d.push_back(surface::curve_to_json(c));
            b["disks"] = d;
        }
        if (e.genus != 1) b["genus"] = e.genus;
        if (!e.window_frames.empty()) {
            json w = json::array();
            for (const auto& c : e.window_frames) w.push_back(surface::curve_to_json(c));
            b["window_frames"] = w;
        }
        bs.push_back(b);
    }
    json out{{"id", m.id}, {"kind", to_string(m.kind)}, {"boundary", bs}};
    if (!m.essential.empty()) {
        json es = json::array();
        for (const auto& r : m.essential) es.push_back({{"kind", r.kind}, {"boundaries", r.boundaries}});
        out["essential"] = es;
    }
    if (!m.jsj.empty()) {
        json js = json::array();
        for (const auto& c : m.jsj) {
            json fp = json::array();
            for (const auto& f : c.footprint) fp.push_back({f.boundary, f.label});
            json x{{"id", c.id}, {"type", c.type}, {"footprint", fp}};
            if (!c.parallel_class.empty()) x["parallel_class"] = c.parallel_class;
            js.push_back(x);
        }
        out["jsj"] = js;
    }
    if (m.exchange) out["exchange"] = surface::map_to_json(*m.exchange);
    if (m.deck) out["cover"] = {{"deck", surface::map_to_json(*m.deck)}};
    if (m.splitting.declared) {
        json parts = json::array();
        for (const auto& p : m.splitting.parts) {
            json x{{"id", p.id}, {"kind", p.kind}, {"boundaries", p.boundaries}};
            if (!p.exterior.empty()) x["exterior"] = p.exterior;
            if (!p.interior.empty()) x["interior"] = p.interior;
            parts.push_back(x);
        }
        json internal = json::array();
        for (const auto& g : m.splitting.internal)
            internal.push_back({{"a", {g.part_a, g.boundary_a}}, {"b", {g.part_b, g.boundary_b}}});
        out["splitting"] = {{"parts", parts}, {"internal", internal}};
    }
    return out;
}

const ManifoldSpec& GluingGraph::manifold(const std::string& id) const {
    auto it = manifold_index_.find(id);
    if (it == manifold_index_.end()) fail(ErrorKind::invariant, "unknown manifold `" + id + "`");
    return manifolds[it->second];
}

const Piece& GluingGraph::piece(const std::string& id) const {
    auto it = piece_index_.find(id);
    if (it == piece_index_.end()) fail(ErrorKind::invariant, "dangling reference: unknown piece `" + id + "`");
    return pieces[it->second];
}

const ManifoldSpec& GluingGraph::manifold_of(const std::string& p) const { return manifold(piece(p).manifold); }

const BoundarySpec& GluingGraph::boundary(const Slot& s) const {
    const auto* e = manifold_of(s.piece).find(s.boundary);
    if (!e) fail(ErrorKind::invariant, "dangling reference: slot " + s.to_string() + " names no boundary");
    return *e;
}

std::vector<Slot> GluingGraph::slots() const {
    std::vector<Slot> out;
    for (const auto& p : pieces)
        for (const auto* e : manifold(p.manifold).nontoroidal()) out.push_back({p.id, e->id});
    return out;
}

bool GluingGraph::fibered() const {
    for (const auto& p : pieces) {
        const auto k = manifold(p.manifold).kind;
        if (k != ManifoldKind::trivial_ibundle && k != ManifoldKind::twisted_ibundle) return false;
    }
    return !pieces.empty();
}

void GluingGraph::finalize() {
    manifold_index_.clear();
    piece_index_.clear();
    psi_.clear();
    stacks_.clear();
    for (std::size_t i = 0; i < manifolds.size(); ++i) {
        validate_manifold(manifolds[i]);
        if (!manifold_index_.emplace(manifolds[i].id, i).second)
            fail(ErrorKind::invariant, "duplicate manifold id `" + manifolds[i].id + "`");
    }
    if (pieces.empty()) fail(ErrorKind::invariant, "gluing has no pieces");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& p = pieces[i];
        if (p.id.empty() || p.id.find(':') != std::string::npos)
            fail(ErrorKind::invariant, "piece ids must be non-empty and free of ':'");
        if (!piece_index_.emplace(p.id, i).second) fail(ErrorKind::invariant, "duplicate piece id `" + p.id + "`");
        if (!manifold_index_.count(p.manifold))
            fail(ErrorKind::invariant, "dangling reference: piece " + p.id + " uses unknown manifold `" + p.manifold + "`");
    }

    std::vector<Identification> kept;
    for (std::size_t i = 0; i < identifications.size(); ++i) {
        const auto& id = identifications[i];
        const auto& ea = boundary(id.a);
        const auto& eb = boundary(id.b);
        if (ea.toroidal || eb.toroidal)
            fail(ErrorKind::invariant, "toroidal boundary cannot be glued: " + (ea.toroidal ? id.a : id.b).to_string());
        if (!(ea.backend == eb.backend))
            fail(ErrorKind::backend_mismatch, "identification " + id.a.to_string() + " ~ " + id.b.to_string() +
                                                  " joins different backends");
        surface::validate_map(ea.backend, id.map);
        if (!surface::orientation_reversing(id.map))
            fail(ErrorKind::invariant, "orientation-preserving gluing map on " + id.a.to_string());
        if (id.a == id.b && !free_involution(id.map))
            fail(ErrorKind::invariant, "fixed point: slot " + id.a.to_string() + " glued to itself by a map that is not a free involution");
        auto ia = psi_.find(id.a);
        if (ia != psi_.end()) {
            // a reverse listing is fine when it is the exact inverse of the first
            const bool reverse = ia->second.other == id.b &&
                                 surface::map_to_json(ia->second.to_other) == surface::map_to_json(id.map);
            if (reverse) continue;
            fail(ErrorKind::invariant, "non-involutive identifications: slot " + id.a.to_string() + " glued twice");
        }
        if (psi_.count(id.b))
            fail(ErrorKind::invariant, "non-involutive identifications: slot " + id.b.to_string() + " glued twice");
        const std::size_t idx = kept.size();
        psi_.emplace(id.a, Partner{id.b, id.map, idx});
        if (!(id.a == id.b)) psi_.emplace(id.b, Partner{id.a, surface::inverse(id.map), idx});
        kept.push_back(id);
    }
    identifications = std::move(kept);

    for (const auto& [slot, m] : lambda) {
        const auto& e = boundary(slot);
        if (e.toroidal) fail(ErrorKind::invariant, "lambda on toroidal slot " + slot.to_string());
        if (buried(slot)) fail(ErrorKind::invariant, "lambda on buried slot " + slot.to_string());
        if (!(m.backend == e.backend)) fail(ErrorKind::backend_mismatch, "lambda on " + slot.to_string() + " uses another backend");
    }

    // connectivity of the piece adjacency graph
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& id : identifications) {
        adj[id.a.piece].push_back(id.b.piece);
        adj[id.b.piece].push_back(id.a.piece);
    }
    std::set<std::string> seen{pieces.front().id};
    std::vector<std::string> todo{pieces.front().id};
    while (!todo.empty()) {
        auto p = todo.back();
        todo.pop_back();
        for (const auto& q : adj[p])
            if (seen.insert(q).second) todo.push_back(q);
    }
    for (const auto& p : pieces)
        if (!seen.count(p.id)) fail(ErrorKind::invariant, "disconnected: piece " + p.id + " is not reachable from " + pieces.front().id);

    // maximal chains of trivial I-bundles
    auto is_bundle = [&](const std::string& p) { return manifold_of(p).kind == ManifoldKind::trivial_ibundle; };
    auto bundle_neighbors = [&](const std::string& p) {
        std::vector<std::string> out;
        for (const auto* e : manifold_of(p).nontoroidal()) {
            auto it = psi_.find({p, e->id});
            if (it != psi_.end() && it->second.other.piece != p && is_bundle(it->second.other.piece))
                out.push_back(it->second.other.piece);
        }
        return out;
    };
    std::set<std::string> placed;
    std::vector<std::string> order;
    for (const auto& p : pieces) order.push_back(p.id);
    std::sort(order.begin(), order.end());
    auto walk = [&](const std::string& start, Stack& st) {
        std::string cur = start;
        while (true) {
            st.pieces.push_back(cur);
            placed.insert(cur);
            std::string next;
            for (const auto& n : bundle_neighbors(cur))
                if (!placed.count(n)) {
                    next = n;
                    break;
                }
            if (next.empty()) break;
            cur = next;
        }
    };
    for (const auto& p : order) {
        if (!is_bundle(p) || placed.count(p) || bundle_neighbors(p).size() == 2) continue;
        Stack st;
        walk(p, st);
        stacks_.push_back(std::move(st));
    }
    for (const auto& p : order) {
        if (!is_bundle(p) || placed.count(p)) continue;
        Stack st;
        st.cyclic = true;
        walk(p, st);
        stacks_.push_back(std::move(st));
    }
}

GluingGraph validate_gluing(const json& spec) {
    if (!spec.is_object()) fail(ErrorKind::parse, "gluing spec must be a JSON object");
    std::map<std::string, BackendHandle> named;
    if (spec.contains("backends")) {
        if (!spec["backends"].is_object()) fail(ErrorKind::parse, "`backends` must be an object");
        for (const auto& [k, v] : spec["backends"].items()) named.emplace(k, BackendHandle::from_json(v));
    }
    GluingGraph g;
    const auto& ms = need(spec, "manifolds", "gluing");
    if (!ms.is_array()) fail(ErrorKind::parse, "`manifolds` must be an array");
    for (const auto& m : ms) g.manifolds.push_back(parse_manifold(m, named));
    const auto& ps = need(spec, "pieces", "gluing");
    if (!ps.is_array()) fail(ErrorKind::parse, "`pieces` must be an array");
    for (const auto& p : ps) g.pieces.push_back({need_string(p, "id", "piece"), need_string(p, "manifold", "piece")});

    // manifolds and pieces must index before maps parse against a boundary's backend
    std::map<std::string, const ManifoldSpec*> mi;
    for (const auto& m : g.manifolds) mi[m.id] = &m;
    std::map<std::string, const ManifoldSpec*> pi;
    for (const auto& p : g.pieces) {
        auto it = mi.find(p.manifold);
        if (it == mi.end())
            fail(ErrorKind::invariant, "dangling reference: piece " + p.id + " uses unknown manifold `" + p.manifold + "`");
        pi[p.id] = it->second;
    }
    auto boundary_of = [&](const Slot& s) -> const BoundarySpec& {
        auto it = pi.find(s.piece);
        if (it == pi.end()) fail(ErrorKind::invariant, "dangling reference: unknown piece in slot " + s.to_string());
        const auto* e = it->second->find(s.boundary);
        if (!e) fail(ErrorKind::invariant, "dangling reference: slot " + s.to_string() + " names no boundary");
        return *e;
    };
    if (spec.contains("identifications")) {
        for (const auto& id : spec["identifications"]) {
            Identification x;
            x.a = slot_from_json(need(id, "a", "identification"), "identification");
            x.b = slot_from_json(need(id, "b", "identification"), "identification");
            const auto& ea = boundary_of(x.a);
            boundary_of(x.b);
            if (id.contains("map"))
                x.map = surface::map_from_json(ea.backend, id["map"]);
            else if (ea.backend.is_torus())
                x.map = SurfaceMap::reflection();
            else
                fail(ErrorKind::parse, "identification " + x.a.to_string() + " needs a map");
            g.identifications.push_back(std::move(x));
        }
    }
    if (spec.contains("lambda")) {
        if (!spec["lambda"].is_object()) fail(ErrorKind::parse, "`lambda` must be an object keyed piece:boundary");
        for (const auto& [k, v] : spec["lambda"].items()) {
            const auto s = slot_from_key(k);
            g.lambda.emplace(s, AbstractMarking::from_json(boundary_of(s).backend, v));
        }
    }
    if (spec.contains("params")) g.params = parse_params(spec["params"]);
    g.finalize();
    return g;
}

GluingGraph load_gluing_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::parse, "cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        fail(ErrorKind::parse, path + ": " + e.what());
    }
    return validate_gluing(j);
}

MapDescriptor end_exchange(const ManifoldSpec& m) {
    if (m.kind != ManifoldKind::trivial_ibundle) fail(ErrorKind::domain, "manifold " + m.id + " is not a trivial I-bundle");
    if (m.exchange) return *m.exchange;
    const auto& b = m.nontoroidal().front()->backend;
    if (b.is_torus()) return SurfaceMap::reflection();
    std::vector<hyp::Vertex> id(b.graph_data().graph.vertex_count());
    for (std::size_t v = 0; v < id.size(); ++v) id[v] = static_cast<hyp::Vertex>(v);
    return id;
}

json params_to_json(const Params& p) {
    json out = json::object();
    if (p.R) out["R"] = *p.R;
    if (p.D) out["D"] = *p.D;
    if (p.h) out["h"] = *p.h;
    if (p.eps0) out["eps0"] = *p.eps0;
    if (p.samples) out["samples"] = *p.samples;
    if (p.denom_bound) out["denom_bound"] = *p.denom_bound;
    if (p.seed) out["seed"] = *p.seed;
    if (p.budget) out["budget"] = *p.budget;
    return out;
}

json to_json(const GluingGraph& g) {
    json ms = json::array();
    for (const auto& m : g.manifolds) ms.push_back(manifold_to_json(m));
    json ps = json::array();
    for (const auto& p : g.pieces) ps.push_back({{"id", p.id}, {"manifold", p.manifold}});
    json ids = json::array();
    for (const auto& id : g.identifications)
        ids.push_back({{"a", slot_to_json(id.a)}, {"b", slot_to_json(id.b)}, {"map", surface::map_to_json(id.map)}});
    json out{{"manifolds", ms}, {"pieces", ps}, {"identifications", ids}};
    if (!g.lambda.empty()) {
        json l = json::object();
        for (const auto& [s, m] : g.lambda) l[s.to_string()] = m.to_json();
        out["lambda"] = l;
    }
    out["params"] = params_to_json(g.params);
    return out;
}

}  // namespace glueforge::gluing
