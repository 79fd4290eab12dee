#include "glueforge/certificate.hpp"

#include <algorithm>
#include <limits>

#include "glueforge/error.hpp"

namespace glueforge::gluing {

using torus::Slope;
using torus::SurfaceMap;

std::string to_string(NuSource s) {
    switch (s) {
        case NuSource::buried: return "buried";
        case NuSource::lambda: return "lambda";
        case NuSource::empty: return "empty";
    }
    return "empty";
}

const InducedEntry& InducedMarkingTable::at(const Slot& s) const {
    for (const auto& e : entries)
        if (e.slot == s) return e;
    fail(ErrorKind::invariant, "no induced marking for slot " + s.to_string());
}

InducedMarkingTable induced_markings(const GluingGraph& X) {
    InducedMarkingTable t;
    for (const auto& s : X.slots()) {
        InducedEntry e{s, NuSource::empty, std::nullopt};
        auto it = X.psi().find(s);
        if (it != X.psi().end()) {
            const auto& o = it->second.other;
            // the partner's map carries its own decoration over to this slot
            e.source = NuSource::buried;
            e.nu = surface::pushforward(X.psi().at(o).to_other, *X.boundary(o).decoration);
        } else if (auto l = X.lambda.find(s); l != X.lambda.end()) {
            e.source = NuSource::lambda;
            e.nu = l->second;
        } else {
            t.missing.push_back(s);
        }
        t.entries.push_back(std::move(e));
    }
    return t;
}

std::vector<HeightEntry> heights(const GluingGraph& X, const InducedMarkingTable& nu) {
    std::vector<HeightEntry> out;
    for (const auto& e : nu.entries) {
        HeightEntry h{e.slot, std::nullopt};
        if (e.nu) h.height = surface::marking_distance(*X.boundary(e.slot).decoration, *e.nu);
        out.push_back(h);
    }
    return out;
}

std::vector<HeightEntry> heights(const GluingGraph& X) { return heights(X, induced_markings(X)); }

std::vector<Curve> canonical_geodesic(const BackendHandle& b, const Curve& x, const Curve& y) {
    std::vector<Curve> out;
    if (b.is_torus()) {
        for (auto& s : torus::farey_geodesic(std::get<Slope>(x), std::get<Slope>(y))) out.push_back(s);
        return out;
    }
    const auto& g = b.graph_data();
    auto cur = std::get<hyp::Vertex>(x);
    const auto target = std::get<hyp::Vertex>(y);
    out.push_back(cur);
    while (cur != target) {
        const auto d = g.distances(cur, target);
        hyp::Vertex next = cur;
        for (auto v : g.graph.neighbors(cur))
            if (g.distances(v, target) == d - 1 && (next == cur || v < next)) next = v;
        cur = next;
        out.push_back(cur);
    }
    return out;
}

std::vector<Curve> canonical_geodesic(const AbstractMarking& from, const AbstractMarking& to) {
    if (!(from.backend == to.backend)) fail(ErrorKind::backend_mismatch, "geodesic between markings on different backends");
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    const Curve *bx = nullptr, *by = nullptr;
    for (const auto& x : from.curves)
        for (const auto& y : to.curves) {
            const auto d = surface::curve_distance(from.backend, x, y);
            if (d < best) best = d, bx = &x, by = &y;
        }
    return canonical_geodesic(from.backend, *bx, *by);
}

std::int64_t distance_to_path(const AbstractMarking& m, const std::vector<Curve>& path) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto& c : m.curves)
        for (const auto& v : path) best = std::min(best, surface::curve_distance(m.backend, c, v));
    return best;
}

namespace {

json curves_json(const std::vector<Curve>& cs) {
    json out = json::array();
    for (const auto& c : cs) out.push_back(surface::curve_to_json(c));
    return out;
}

json geodesic_clause_json(const GeodesicClause& c) {
    json out{{"applicable", c.applicable}, {"pass", c.pass}};
    if (!c.note.empty()) out["note"] = c.note;
    if (c.applicable) {
        out["geodesic"] = curves_json(c.geodesic);
        out["distances"] = {c.d_first, c.d_second};
    }
    return out;
}

}  // namespace

CombinatoricsCertificate check_bounded_combinatorics(const GluingGraph& X, std::int64_t R, std::int64_t D,
                                                     std::int64_t denominator_bound) {
    if (R <= 0) fail(ErrorKind::domain, "R must be positive");
    if (D < 0) fail(ErrorKind::domain, "D must be non-negative");
    CombinatoricsCertificate cert;
    cert.R = R;
    cert.D = D;
    cert.denominator_bound = denominator_bound;
    const auto table = induced_markings(X);

    for (const auto& e : table.entries) {
        const auto& bs = X.boundary(e.slot);
        SlotClauses sc;
        sc.slot = e.slot;
        sc.source = e.source;
        sc.mu = bs.decoration;
        sc.nu = e.nu;
        const auto name = e.slot.to_string();
        if (e.nu) {
            sc.height = surface::marking_distance(*bs.decoration, *e.nu);
            sc.height_ok = *sc.height >= D;
            if (!sc.height_ok)
                cert.failures.push_back("slot " + name + ": height " + std::to_string(*sc.height) + " < D=" + std::to_string(D));
            sc.sup = surface::sup_projection(*bs.decoration, *e.nu, denominator_bound);
            sc.clause_a = sc.sup->value <= R;
            if (!sc.clause_a)
                cert.failures.push_back("slot " + name + ": clause (a) " + sc.sup->label + " projection " +
                                        sc.sup->value.get_str() + " > R=" + std::to_string(R));
            if (bs.compressible) {
                sc.meridian_applicable = true;
                sc.meridian_distance = surface::disk_distance(*e.nu, bs.disks, name);
                sc.clause_b = *sc.height <= sc.meridian_distance + R;
                if (!sc.clause_b)
                    cert.failures.push_back("slot " + name + ": clause (b) height " + std::to_string(*sc.height) +
                                            " > disk distance " + std::to_string(sc.meridian_distance) + " + R");
            }
        }
        cert.slots.push_back(std::move(sc));
    }

    auto nu_of = [&](const Slot& s) -> const std::optional<AbstractMarking>& { return table.at(s).nu; };
    for (const auto& p : X.pieces) {
        const auto& m = X.manifold(p.manifold);
        PieceClauses pc;
        pc.piece = p.id;
        pc.kind = m.kind;
        const auto nt = m.nontoroidal();
        if (m.kind == ManifoldKind::trivial_ibundle) {
            const Slot s0{p.id, nt[0]->id}, s1{p.id, nt[1]->id};
            const auto phi = end_exchange(m);
            const auto back = surface::inverse(phi);
            auto& c = pc.clause_c;
            if (nu_of(s0) && nu_of(s1)) {
                c.applicable = true;
                c.geodesic = canonical_geodesic(*nu_of(s0), surface::pushforward(back, *nu_of(s1)));
                c.d_first = distance_to_path(*nt[0]->decoration, c.geodesic);
                c.d_second = distance_to_path(surface::pushforward(back, *nt[1]->decoration), c.geodesic);
                c.pass = c.d_first <= R && c.d_second <= R;
                if (!c.pass) cert.failures.push_back("piece " + p.id + ": clause (c) decoration off the end-to-end geodesic");
            } else {
                c.note = "vacuous: an end has empty nu";
            }
        }
        if (m.kind == ManifoldKind::twisted_ibundle) {
            const Slot s{p.id, nt[0]->id};
            auto& c = pc.clause_d;
            if (!m.deck) {
                c.pass = false;
                c.note = "cover data missing";
                cert.failures.push_back("piece " + p.id + ": clause (d) cover data missing");
            } else if (nu_of(s)) {
                c.applicable = true;
                c.geodesic = canonical_geodesic(*nu_of(s), surface::pushforward(*m.deck, *nu_of(s)));
                c.d_first = distance_to_path(*nt[0]->decoration, c.geodesic);
                c.d_second = distance_to_path(surface::pushforward(*m.deck, *nt[0]->decoration), c.geodesic);
                c.pass = c.d_first <= R && c.d_second <= R;
                if (!c.pass) cert.failures.push_back("piece " + p.id + ": clause (d) lifted decoration off the cover geodesic");
            } else {
                c.note = "vacuous: empty nu";
            }
        }
        for (const auto& r : m.essential) {
            PieceClauses::Record rec{r.kind, r.boundaries, {}, false};
            for (const auto& b : r.boundaries) {
                if (m.at(b).toroidal) continue;
                if (nu_of({p.id, b})) rec.covering.push_back(b);
            }
            rec.pass = !rec.covering.empty();
            if (!rec.pass) cert.failures.push_back("piece " + p.id + ": clause (e) " + r.kind + " record has no boundary with non-empty nu");
            pc.clause_e.push_back(std::move(rec));
        }
        pc.pass = pc.clause_c.pass && pc.clause_d.pass &&
                  std::all_of(pc.clause_e.begin(), pc.clause_e.end(), [](const auto& r) { return r.pass; });
        cert.pieces.push_back(std::move(pc));
    }
    return cert;
}

json CombinatoricsCertificate::to_json() const {
    json slots_j = json::array();
    for (const auto& s : slots) {
        json x{{"slot", s.slot.to_string()}, {"source", gluing::to_string(s.source)}};
        x["mu"] = s.mu ? s.mu->to_json() : json(nullptr);
        x["nu"] = s.nu ? s.nu->to_json() : json(nullptr);
        x["height"] = s.height ? json(*s.height) : json(nullptr);
        x["height_ok"] = s.height_ok;
        if (s.sup) {
            json sup{{"label", s.sup->label}, {"value", s.sup->value.get_str()}, {"certified", s.sup->certified},
                     {"denominator_bound", s.sup->denominator_bound}};
            if (s.sup->unmodeled) sup["unmodeled"] = true;
            x["clause_a"] = {{"pass", s.clause_a}, {"sup_projection", sup}};
        } else {
            x["clause_a"] = {{"pass", true}, {"note", "vacuous: empty nu"}};
        }
        if (s.meridian_applicable)
            x["clause_b"] = {{"pass", s.clause_b}, {"height", *s.height}, {"disk_distance", s.meridian_distance},
                             {"relative_to", "declared disk set"}};
        slots_j.push_back(x);
    }
    json pieces_j = json::array();
    for (const auto& p : pieces) {
        json x{{"piece", p.piece}, {"kind", gluing::to_string(p.kind)}, {"pass", p.pass}};
        if (p.kind == ManifoldKind::trivial_ibundle) x["clause_c"] = geodesic_clause_json(p.clause_c);
        if (p.kind == ManifoldKind::twisted_ibundle) x["clause_d"] = geodesic_clause_json(p.clause_d);
        json e = json::array();
        for (const auto& r : p.clause_e)
            e.push_back({{"kind", r.kind}, {"boundaries", r.boundaries}, {"covering", r.covering}, {"pass", r.pass}});
        x["clause_e"] = e;
        pieces_j.push_back(x);
    }
    return json{{"schema", "certificate/1"},
                {"params", {{"R", R}, {"D", D}, {"denominator_bound", denominator_bound}}},
                {"conventions",
                 {{"height", "min curve distance between mu and nu"},
                  {"clause_b", "height <= disk_distance(nu, declared disks) + R"},
                  {"projection", "annular, floor-difference + 2"}}},
                {"slots", slots_j},
                {"pieces", pieces_j},
                {"failures", failures},
                {"verdict", pass() ? "pass" : "fail"}};
}

}  // namespace glueforge::gluing
