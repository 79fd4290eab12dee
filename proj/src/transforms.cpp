#include "glueforge/transforms.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "glueforge/error.hpp"

namespace glueforge::transforms {

using gluing::BoundarySpec;
using gluing::Identification;
using gluing::ManifoldKind;
using gluing::ManifoldSpec;
using gluing::Piece;
using gluing::Stack;
using surface::Curve;
using surface::MapDescriptor;
using surface::pushforward;

namespace {

bool is_bundle(const ManifoldSpec& m) {
    return m.kind == ManifoldKind::trivial_ibundle || m.kind == ManifoldKind::twisted_ibundle;
}

json slot_json(const Slot& s) { return json::array({s.piece, s.boundary}); }

json curves_json(const std::vector<Curve>& cs) {
    json out = json::array();
    for (const auto& c : cs) out.push_back(surface::curve_to_json(c));
    return out;
}

json sup_json(const surface::SupProjection& s) {
    json out{{"label", s.label}, {"value", s.value.get_str()}, {"certified", s.certified}};
    if (s.unmodeled) out["unmodeled"] = true;
    return out;
}

json ratio_json(const hyp::Ratio& r) { return json{{"num", r.num}, {"den", r.den}, {"value", r.value()}}; }

// the other end of a trivial I-bundle, and the map carrying coordinates there
std::pair<Slot, MapDescriptor> cross_bundle(const GluingGraph& X, const Slot& at) {
    const auto& m = X.manifold_of(at.piece);
    const auto nt = m.nontoroidal();
    if (m.kind == ManifoldKind::twisted_ibundle) {
        if (!m.deck) fail(ErrorKind::invariant, "twisted piece " + at.piece + " without cover data");
        return {at, *m.deck};
    }
    const auto phi = gluing::end_exchange(m);
    if (at.boundary == nt[0]->id) return {{at.piece, nt[1]->id}, phi};
    return {{at.piece, nt[0]->id}, surface::inverse(phi)};
}

std::map<Slot, std::optional<std::int64_t>> height_map(const GluingGraph& X) {
    std::map<Slot, std::optional<std::int64_t>> out;
    for (const auto& h : gluing::heights(X)) out[h.slot] = h.height;
    return out;
}

}  // namespace

StackCertificate certify_sequence(const std::vector<AbstractMarking>& nu, std::int64_t h, std::int64_t R,
                                  std::int64_t denominator_bound) {
    if (nu.empty()) fail(ErrorKind::domain, "stack certificate needs at least one marking");
    StackCertificate c;
    c.h = h;
    c.R = R;
    c.nu = nu;
    const auto& backend = nu.front().backend;
    for (const auto& m : nu)
        if (!(m.backend == backend)) fail(ErrorKind::backend_mismatch, "backend mismatch along the stack");
    const std::size_t n = nu.size() - 1;

    for (std::size_t i = 0; i < n; ++i) {
        c.heights.push_back(surface::marking_distance(nu[i], nu[i + 1]));
        if (c.heights.back() <= h && c.cond_i) c.cond_i = false, c.witness_i = i;
        c.step_projections.push_back(surface::sup_projection(nu[i], nu[i + 1], denominator_bound));
        if (!(c.step_projections.back().value < R) && c.cond_ii) c.cond_ii = false, c.witness_ii = i;
    }
    for (std::size_t i = 1; i < n; ++i) {
        const auto g = gluing::canonical_geodesic(nu[i - 1], nu[i + 1]);
        c.middle_distances.push_back(gluing::distance_to_path(nu[i], g));
        if (!(c.middle_distances.back() < R) && c.cond_iii) c.cond_iii = false, c.witness_iii = i;
    }

    // concatenated geodesic; consecutive segments may meet in different curves of one marking
    std::size_t longest = 1;
    if (n == 0) c.path.push_back(nu[0].curves[0]);
    for (std::size_t i = 0; i < n; ++i) {
        const auto seg = gluing::canonical_geodesic(nu[i], nu[i + 1]);
        longest = std::max(longest, seg.size());
        if (!c.path.empty() && !(c.path.back() == seg.front())) {
            const auto bridge = gluing::canonical_geodesic(backend, c.path.back(), seg.front());
            c.path.insert(c.path.end(), bridge.begin() + 1, bridge.end() - 1);
        }
        for (std::size_t k = 0; k < seg.size(); ++k)
            if (c.path.empty() || !(c.path.back() == seg[k])) c.path.push_back(seg[k]);
    }
    const std::size_t L = c.path.size();
    std::vector<std::int64_t> memo(L * L, -1);
    // the two ends of the path stand for the markings nu_0 and nu_n, not for the curve the segment happened to leave from
    auto from_marking = [&](const AbstractMarking& m, const Curve& x) {
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        for (const auto& y : m.curves) best = std::min(best, surface::curve_distance(backend, x, y));
        return best;
    };
    auto dist = [&](std::size_t s, std::size_t t) {
        if (s > t) std::swap(s, t);
        auto& m = memo[s * L + t];
        if (m >= 0) return m;
        if (s == 0 && t == L - 1) m = surface::marking_distance(nu.front(), nu.back());
        else if (s == 0) m = from_marking(nu.front(), c.path[t]);
        else if (t == L - 1) m = from_marking(nu.back(), c.path[s]);
        else m = surface::curve_distance(backend, c.path[s], c.path[t]);
        return m;
    };
    c.quasi = hyp::measure_quasigeodesic(L, longest, dist);

    c.combined = surface::marking_distance(nu.front(), nu.back());
    c.sum_heights = std::accumulate(c.heights.begin(), c.heights.end(), std::int64_t{0});
    const auto K = c.quasi.global_k;
    c.lower_bound = static_cast<double>(c.sum_heights) * K.den / K.num - K.value();
    // combined >= sum/K - K  <=>  combined*num*den >= sum*den^2 - num^2
    const __int128 lhs = static_cast<__int128>(c.combined) * K.num * K.den;
    const __int128 rhs = static_cast<__int128>(c.sum_heights) * K.den * K.den - static_cast<__int128>(K.num) * K.num;
    c.lower_bound_holds = lhs >= rhs;
    if (n >= 1) c.end_projection = surface::sup_projection(nu.front(), nu.back(), denominator_bound);

    const auto direct = gluing::canonical_geodesic(nu.front(), nu.back());
    auto to_set = [&](const Curve& x, const std::vector<Curve>& set) {
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        for (const auto& y : set) best = std::min(best, surface::curve_distance(backend, x, y));
        return best;
    };
    for (const auto& v : c.path) c.farey_fellow = std::max(c.farey_fellow, to_set(v, direct));
    for (const auto& v : direct) c.farey_fellow = std::max(c.farey_fellow, to_set(v, c.path));

    if (backend.is_torus()) {
        std::vector<torus::SurfaceMap> frames;
        for (const auto& m : nu) frames.push_back(torus::marking_frame(m.farey()));
        c.teich = torus::broken_path_report(frames);
    }
    return c;
}

json StackCertificate::to_json() const {
    json nus = json::array();
    for (const auto& m : nu) nus.push_back(m.to_json());
    json steps = json::array();
    for (const auto& s : step_projections) steps.push_back(sup_json(s));
    auto witness = [](const std::optional<std::size_t>& w) { return w ? json(*w) : json(nullptr); };
    json out{{"h", h},
             {"R", R},
             {"nu", nus},
             {"heights", heights},
             {"surface_heights", surface_heights},
             {"conditions",
              {{"i", {{"pass", cond_i}, {"witness", witness(witness_i)}}},
               {"ii", {{"pass", cond_ii}, {"witness", witness(witness_ii)}, {"projections", steps}}},
               {"iii", {{"pass", cond_iii}, {"witness", witness(witness_iii)}, {"distances", middle_distances}}}}},
             {"path_length", path.size()},
             {"K_prime", ratio_json(quasi.global_k)},
             {"local_K", ratio_json(quasi.local_k)},
             {"window", quasi.window},
             {"combined_height", combined},
             {"sum_heights", sum_heights},
             {"lower_bound", lower_bound},
             {"lower_bound_holds", lower_bound_holds},
             {"end_projection", end_projection ? sup_json(*end_projection) : json(nullptr)},
             {"farey_fellow_travel", farey_fellow}};
    if (teich)
        out["teichmuller_fellow_travel"] = {{"concat_length", teich->concat_length},
                                            {"direct_length", teich->direct_length},
                                            {"deviation_sum", teich->deviation_sum},
                                            {"max_deviation", teich->max_deviation},
                                            {"backtrack", teich->backtrack},
                                            {"bound", teich->bound}};
    return out;
}

namespace {

struct StackWalk {
    Slot entry, exit;
    MapDescriptor through;  // entry coordinates to exit coordinates
    std::vector<AbstractMarking> nu;
    std::vector<std::int64_t> surface_heights;
};

StackWalk walk_stack(const GluingGraph& X, const Stack& stack) {
    if (stack.pieces.empty()) fail(ErrorKind::domain, "empty stack");
    for (const auto& p : stack.pieces)
        if (X.manifold_of(p).kind != ManifoldKind::trivial_ibundle)
            fail(ErrorKind::domain, "stack piece " + p + " is not a trivial I-bundle");
    const auto hm = height_map(X);
    const auto table = gluing::induced_markings(X);
    const auto& first = X.manifold_of(stack.pieces[0]);
    const auto ends = first.nontoroidal();
    Slot entry{stack.pieces[0], ends[0]->id};
    if (stack.pieces.size() >= 2) {
        // the end facing the next piece is the exit
        for (int k : {1, 0}) {
            auto it = X.psi().find({stack.pieces[0], ends[k]->id});
            if (it != X.psi().end() && it->second.other.piece == stack.pieces[1]) {
                entry = {stack.pieces[0], ends[1 - k]->id};
                break;
            }
        }
    }
    StackWalk w;
    w.entry = entry;
    const auto& e0 = table.at(entry);
    if (e0.nu) {
        w.nu.push_back(*e0.nu);
        if (auto h = hm.at(entry)) w.surface_heights.push_back(*h);
    } else {
        w.nu.push_back(*X.boundary(entry).decoration);
    }
    const auto phi0 = gluing::end_exchange(first);
    MapDescriptor G = surface::compose(surface::inverse(phi0), phi0);  // identity of the right kind
    Slot cur = entry;
    for (std::size_t j = 0; j < stack.pieces.size(); ++j) {
        if (cur.piece != stack.pieces[j]) fail(ErrorKind::invariant, "stack is not glued end to end at " + cur.to_string());
        auto [exit, phi] = cross_bundle(X, cur);
        G = surface::compose(phi, G);
        const auto it = X.psi().find(exit);
        const bool last = j + 1 == stack.pieces.size();
        if (!last) {
            if (it == X.psi().end() || it->second.other.piece != stack.pieces[j + 1])
                fail(ErrorKind::invariant, "stack is not glued end to end at " + exit.to_string());
        }
        if (it != X.psi().end()) {
            if (last) w.exit = exit;
            G = surface::compose(it->second.to_other, G);
            cur = it->second.other;
            w.nu.push_back(pushforward(surface::inverse(G), *X.boundary(cur).decoration));
            if (auto h = hm.at(cur)) w.surface_heights.push_back(*h);
            if (last) {
                // undo the final crossing: `through` ends on the exit slot
                G = surface::compose(surface::inverse(it->second.to_other), G);
            }
        } else {
            w.exit = exit;
            auto l = X.lambda.find(exit);
            const auto& far = l != X.lambda.end() ? l->second : *X.boundary(exit).decoration;
            w.nu.push_back(pushforward(surface::inverse(G), far));
        }
    }
    w.through = G;
    return w;
}

}  // namespace

StackCertificate combine_stack(const GluingGraph& X, const Stack& stack, std::int64_t h, std::int64_t R,
                               std::int64_t denominator_bound) {
    auto w = walk_stack(X, stack);
    auto c = certify_sequence(w.nu, h, R, denominator_bound);
    c.surface_heights = w.surface_heights;
    return c;
}

json CollapseResult::to_json(bool emit_correspondence) const {
    json certs = json::array();
    for (const auto& c : certificates) certs.push_back(c.to_json());
    json slots_j = json::array();
    for (const auto& s : slots) {
        json x{{"slot", s.slot.to_string()},
               {"height", s.height ? json(*s.height) : json(nullptr)},
               {"surface_height_sum", s.surface_sum},
               {"lower_bound", s.lower_bound},
               {"lower_bound_holds", s.lower_bound_holds},
               {"sup_projection", s.sup ? sup_json(*s.sup) : json(nullptr)},
               {"within_2R", s.within_2R}};
        if (s.meridian_applicable)
            x["meridian"] = {{"disk_distance", s.disk_distance}, {"excess", s.meridian_excess},
                             {"clause_b_at_R", s.meridian_excess <= R}};
        slots_j.push_back(x);
    }
    json out{{"schema", "collapse/1"},
             {"R", R},
             {"h", h},
             {"fibered", fibered},
             {"R_prime", R_prime},
             {"collapsed", gluing::to_json(collapsed)},
             {"new_slots", slots_j},
             {"certificates", certs}};
    if (emit_correspondence) {
        json blocks = json::array();
        for (const auto& b : correspondence)
            blocks.push_back({{"from", slot_json(b.from)},
                              {"to", b.to ? slot_json(*b.to) : json(nullptr)},
                              {"bundles", b.bundles},
                              {"identifications", b.identifications}});
        out["correspondence"] = blocks;
    }
    return out;
}

namespace {

CollapseResult fibered_collapse(const GluingGraph& X, std::int64_t R, std::int64_t h, std::int64_t db) {
    CollapseResult out;
    out.fibered = true;
    out.R = R;
    out.h = h;
    GluingGraph g;
    std::map<Slot, Slot> rename;
    std::set<std::string> stacked;
    std::map<std::string, std::size_t> stack_of_first;
    std::vector<StackWalk> walks;
    for (const auto& st : X.stacks()) {
        walks.push_back(walk_stack(X, st));
        for (const auto& p : st.pieces) stacked.insert(p);
        stack_of_first[st.pieces.front()] = walks.size() - 1;
        auto cert = certify_sequence(walks.back().nu, h, R, db);
        cert.surface_heights = walks.back().surface_heights;
        out.certificates.push_back(std::move(cert));
    }
    std::set<std::string> used;
    for (const auto& p : X.pieces) {
        if (auto it = stack_of_first.find(p.id); it != stack_of_first.end()) {
            const auto& w = walks[it->second];
            const auto& st = X.stacks()[it->second];
            ManifoldSpec m;
            m.id = "stack";
            for (const auto& q : st.pieces) m.id += "." + q;
            m.kind = ManifoldKind::trivial_ibundle;
            BoundarySpec b0 = X.boundary(w.entry), b1 = X.boundary(w.exit);
            b0.id = "E0";
            b1.id = "E1";
            m.boundaries = {b0, b1};
            m.exchange = w.through;
            g.manifolds.push_back(m);
            g.pieces.push_back({p.id, m.id});
            rename[w.entry] = {p.id, "E0"};
            rename[w.exit] = {p.id, "E1"};
            out.correspondence.push_back({{p.id, "E0"}, Slot{p.id, "E1"}, st.pieces, {}});
        } else if (!stacked.count(p.id)) {
            g.pieces.push_back(p);
            used.insert(p.manifold);
            for (const auto* e : X.manifold(p.manifold).nontoroidal()) rename[{p.id, e->id}] = {p.id, e->id};
        }
    }
    for (const auto& m : X.manifolds)
        if (used.count(m.id)) g.manifolds.push_back(m);
    for (std::size_t i = 0; i < X.identifications.size(); ++i) {
        const auto& id = X.identifications[i];
        auto a = rename.find(id.a), b = rename.find(id.b);
        if (a == rename.end() || b == rename.end()) {
            for (auto& blk : out.correspondence)
                if (std::find(blk.bundles.begin(), blk.bundles.end(), id.a.piece) != blk.bundles.end())
                    blk.identifications.push_back(i);
            continue;
        }
        g.identifications.push_back({a->second, b->second, id.map});
    }
    for (const auto& [s, m] : X.lambda)
        if (auto it = rename.find(s); it != rename.end()) g.lambda.emplace(it->second, m);
    g.params = X.params;
    g.finalize();
    out.collapsed = std::move(g);
    out.R_prime = R;
    return out;
}

}  // namespace

CollapseResult collapse_ibundles(const GluingGraph& X, std::int64_t R, std::int64_t h, std::int64_t db) {
    if (X.fibered()) return fibered_collapse(X, R, h, db);
    CollapseResult out;
    out.R = R;
    out.h = h;
    const auto hm = height_map(X);
    auto bundle_piece = [&](const std::string& p) { return is_bundle(X.manifold_of(p)); };

    GluingGraph g;
    std::set<std::string> used;
    for (const auto& p : X.pieces)
        if (!bundle_piece(p.id)) {
            g.pieces.push_back(p);
            used.insert(p.manifold);
        }
    for (const auto& m : X.manifolds)
        if (used.count(m.id)) g.manifolds.push_back(m);
    for (const auto& id : X.identifications)
        if (!bundle_piece(id.a.piece) && !bundle_piece(id.b.piece)) g.identifications.push_back(id);
    for (const auto& [s, m] : X.lambda)
        if (!bundle_piece(s.piece)) g.lambda.emplace(s, m);

    std::set<Slot> handled;
    std::vector<std::vector<std::int64_t>> surfaces;
    for (const auto& s : X.slots()) {
        if (bundle_piece(s.piece) || handled.count(s)) continue;
        auto it = X.psi().find(s);
        if (it == X.psi().end() || !bundle_piece(it->second.other.piece)) continue;
        Block blk{s, std::nullopt, {}, {it->second.identification}};
        MapDescriptor G = it->second.to_other;
        Slot cur = it->second.other;
        std::vector<AbstractMarking> seq{*X.boundary(s).decoration};
        std::vector<std::int64_t> surf;
        if (auto hh = hm.at(cur)) surf.push_back(*hh);
        std::size_t guard = 0;
        while (bundle_piece(cur.piece)) {
            if (++guard > 4 * X.pieces.size() + 4) fail(ErrorKind::invariant, "I-bundle walk does not terminate");
            blk.bundles.push_back(cur.piece);
            auto [exit, phi] = cross_bundle(X, cur);
            G = surface::compose(phi, G);
            auto nx = X.psi().find(exit);
            if (nx == X.psi().end()) {
                // leaves through an unburied end: lambda comes back to s
                if (auto l = X.lambda.find(exit); l != X.lambda.end()) {
                    g.lambda.emplace(s, pushforward(surface::inverse(G), l->second));
                    seq.push_back(pushforward(surface::inverse(G), l->second));
                }
                break;
            }
            G = surface::compose(nx->second.to_other, G);
            blk.identifications.push_back(nx->second.identification);
            cur = nx->second.other;
            seq.push_back(pushforward(surface::inverse(G), *X.boundary(cur).decoration));
            if (auto hh = hm.at(cur)) surf.push_back(*hh);
        }
        handled.insert(s);
        if (!bundle_piece(cur.piece) && !blk.bundles.empty()) {
            blk.to = cur;
            handled.insert(cur);
            g.identifications.push_back({s, cur, G});
        }
        auto cert = certify_sequence(seq, h, R, db);
        cert.surface_heights = surf;
        out.certificates.push_back(std::move(cert));
        out.correspondence.push_back(std::move(blk));
    }
    g.params = X.params;
    g.finalize();

    const auto table = gluing::induced_markings(g);
    const auto hs = height_map(g);
    out.R_prime = 1;
    for (std::size_t k = 0; k < out.correspondence.size(); ++k) {
        const auto& blk = out.correspondence[k];
        const auto& cert = out.certificates[k];
        std::vector<Slot> ends{blk.from};
        if (blk.to && !(*blk.to == blk.from)) ends.push_back(*blk.to);
        for (const auto& s : ends) {
            NewSlotReport r;
            r.slot = s;
            r.height = hs.at(s);
            r.surface_sum = std::accumulate(cert.surface_heights.begin(), cert.surface_heights.end(), std::int64_t{0});
            r.lower_bound = cert.lower_bound;
            r.lower_bound_holds = cert.lower_bound_holds;
            const auto& e = table.at(s);
            const auto& bs = g.boundary(s);
            if (e.nu) {
                r.sup = surface::sup_projection(*bs.decoration, *e.nu, db);
                r.within_2R = r.sup->value <= 2 * R;
                out.R_prime = std::max<std::int64_t>(out.R_prime, r.sup->value.get_si());
                if (bs.compressible) {
                    r.meridian_applicable = true;
                    r.disk_distance = surface::disk_distance(*e.nu, bs.disks, s.to_string());
                    r.meridian_excess = std::max<std::int64_t>(0, *r.height - r.disk_distance);
                    out.R_prime = std::max(out.R_prime, r.meridian_excess);
                }
            }
            out.slots.push_back(std::move(r));
        }
    }
    out.collapsed = std::move(g);
    return out;
}

SingleCollapseCheck single_collapse_check(const GluingGraph& X, const std::string& bundle, std::int64_t R) {
    const auto& m = X.manifold_of(bundle);
    if (m.kind != ManifoldKind::trivial_ibundle) fail(ErrorKind::domain, bundle + " is not a trivial I-bundle");
    const auto ends = m.nontoroidal();
    const Slot s0{bundle, ends[0]->id}, s1{bundle, ends[1]->id};
    const auto table = gluing::induced_markings(X);
    if (!table.at(s0).nu || !table.at(s1).nu) fail(ErrorKind::domain, "bundle " + bundle + " has an empty end");
    const auto back = surface::inverse(gluing::end_exchange(m));
    const auto& mu0 = *ends[0]->decoration;
    const auto mu1 = pushforward(back, *ends[1]->decoration);
    const auto& nu0 = *table.at(s0).nu;
    const auto nu1 = pushforward(back, *table.at(s1).nu);
    SingleCollapseCheck c;
    c.new_height = surface::marking_distance(nu0, nu1);
    c.d_mu0_nu0 = surface::marking_distance(mu0, nu0);
    c.d_mu0_nu1 = surface::marking_distance(mu0, nu1);
    const auto g = gluing::canonical_geodesic(nu0, nu1);
    c.clause_c = std::max(gluing::distance_to_path(mu0, g), gluing::distance_to_path(mu1, g));
    std::vector<Curve> all = mu0.curves;
    all.insert(all.end(), mu1.curves.begin(), mu1.curves.end());
    for (const auto& x : all)
        for (const auto& y : all) c.diam = std::max(c.diam, surface::curve_distance(mu0.backend, x, y));
    c.rhs = c.d_mu0_nu0 + c.d_mu0_nu1 - 2 * R - c.diam;
    c.holds = c.new_height >= c.rhs;
    return c;
}

GluingGraph build_compression(const ManifoldSpec& M, const std::vector<CompressionStep>& steps,
                              std::optional<std::int64_t> budget, const std::string& core_piece) {
    gluing::validate_manifold(M);
    std::int64_t limit = 0;
    for (const auto* e : M.nontoroidal()) limit += e->genus;
    if (budget) limit = *budget;
    if (static_cast<std::int64_t>(steps.size()) > limit)
        fail(ErrorKind::invariant, "compression exceeds the declared budget of " + std::to_string(limit) + " attachments");
    GluingGraph X;
    X.manifolds.push_back(M);
    X.pieces.push_back({core_piece, M.id});
    std::map<std::string, const ManifoldSpec*> pieces{{core_piece, &X.manifolds.front()}};
    std::set<Slot> buried;
    for (const auto& st : steps) {
        if (st.body.kind != ManifoldKind::compression_body)
            fail(ErrorKind::invariant, "attachment " + st.piece + " is not a compression body");
        gluing::validate_manifold(st.body);
        if (pieces.count(st.piece)) fail(ErrorKind::invariant, "duplicate piece id `" + st.piece + "`");
        auto tp = pieces.find(st.target.piece);
        if (tp == pieces.end() || !tp->second->find(st.target.boundary) || tp->second->at(st.target.boundary).toroidal)
            fail(ErrorKind::invariant, "dangling reference: attachment target " + st.target.to_string());
        if (buried.count(st.target)) fail(ErrorKind::invariant, "attachment to buried slot " + st.target.to_string());
        const BoundarySpec* ext = nullptr;
        for (const auto& e : st.body.boundaries)
            if (e.exterior) ext = &e;
        bool known = false;
        for (const auto& m : X.manifolds)
            if (m.id == st.body.id) {
                if (gluing::manifold_to_json(m) != gluing::manifold_to_json(st.body))
                    fail(ErrorKind::invariant, "manifold id `" + st.body.id + "` redefined");
                known = true;
            }
        if (!known) X.manifolds.push_back(st.body);
        X.pieces.push_back({st.piece, st.body.id});
        const Slot from{st.piece, ext->id};
        X.identifications.push_back({from, st.target, st.map});
        buried.insert(from);
        buried.insert(st.target);
        pieces.clear();
        for (const auto& p : X.pieces)
            for (const auto& m : X.manifolds)
                if (m.id == p.manifold) pieces[p.id] = &m;
    }
    X.finalize();
    return X;
}

namespace {

struct PartNode {
    std::string name;  // piece/part
    std::string piece, kind;
    std::optional<Slot> exterior;
};

}  // namespace

DecompositionResult full_and_maximal_decomposition(const GluingGraph& X) {
    if (X.fibered()) fail(ErrorKind::domain, "fibered gluing: no non-bundle pieces to decompose");
    DecompositionResult out;
    std::vector<PartNode> nodes;
    std::map<Slot, std::size_t> owner;
    std::set<Slot> exterior;
    for (const auto& p : X.pieces) {
        const auto& m = X.manifold(p.manifold);
        if (is_bundle(m)) {
            out.dropped.push_back(p.id);
            continue;
        }
        auto add = [&](const std::string& part, const std::string& kind, const std::vector<std::string>& owned,
                       const std::string& ext) {
            nodes.push_back({p.id + "/" + part, p.id, kind, std::nullopt});
            if (!ext.empty()) {
                nodes.back().exterior = Slot{p.id, ext};
                exterior.insert({p.id, ext});
            }
            for (const auto& b : owned) owner[{p.id, b}] = nodes.size() - 1;
        };
        std::vector<std::string> nt;
        for (const auto* e : m.nontoroidal()) nt.push_back(e->id);
        if (m.splitting.declared) {
            for (const auto& part : m.splitting.parts) {
                std::vector<std::string> owned;
                for (const auto& b : part.boundaries)
                    if (!m.at(b).toroidal) owned.push_back(b);
                add(part.id, part.kind, owned, part.kind == "compression-body" ? part.exterior : "");
            }
            for (const auto& gl : m.splitting.internal)
                out.internal_cuts.push_back(p.id + ": " + gl.part_a + "." + gl.boundary_a + " ~ " + gl.part_b + "." +
                                            gl.boundary_b);
        } else if (m.kind == ManifoldKind::compression_body) {
            std::string ext;
            for (const auto* e : m.nontoroidal())
                if (e->exterior) ext = e->id;
            add("body", "compression-body", nt, ext);
        } else {
            for (const auto* e : m.nontoroidal())
                if (e->compressible)
                    fail(ErrorKind::invariant, "piece " + p.id + ": splitting metadata missing (compressible boundary " +
                                                   e->id + ")");
            add("core", "core", nt, "");
        }
    }

    // merged edges: pass through I-bundles
    struct Edge {
        Slot s;
        std::optional<Slot> r;
        std::vector<std::size_t> ids;
        std::vector<std::string> bundles;
    };
    std::vector<Edge> edges;
    std::set<std::size_t> assigned;
    for (std::size_t i = 0; i < X.identifications.size(); ++i) {
        const auto& id = X.identifications[i];
        if (owner.count(id.a) && owner.count(id.b)) {
            edges.push_back({id.a, id.b, {i}, {}});
            assigned.insert(i);
        }
    }
    for (const auto& s : X.slots()) {
        if (!owner.count(s)) continue;
        auto it = X.psi().find(s);
        if (it == X.psi().end() || owner.count(it->second.other) || assigned.count(it->second.identification)) continue;
        Edge e{s, std::nullopt, {it->second.identification}, {}};
        Slot cur = it->second.other;
        std::size_t guard = 0;
        while (!owner.count(cur)) {
            if (++guard > 4 * X.pieces.size() + 4) fail(ErrorKind::invariant, "I-bundle walk does not terminate");
            e.bundles.push_back(cur.piece);
            const auto& m = X.manifold_of(cur.piece);
            Slot exit = cur;
            if (m.kind == ManifoldKind::trivial_ibundle) {
                const auto ends = m.nontoroidal();
                exit = {cur.piece, cur.boundary == ends[0]->id ? ends[1]->id : ends[0]->id};
            }
            auto nx = X.psi().find(exit);
            if (nx == X.psi().end()) break;
            e.ids.push_back(nx->second.identification);
            cur = nx->second.other;
        }
        if (owner.count(cur)) e.r = cur;
        for (auto i : e.ids) assigned.insert(i);
        edges.push_back(std::move(e));
    }

    std::vector<std::size_t> parent(nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<bool> performed(edges.size(), false);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto& e = edges[k];
        if (!e.r) {
            performed[k] = true;  // absorbed into the component of s
            continue;
        }
        if (exterior.count(e.s) || exterior.count(*e.r)) {
            performed[k] = true;
            parent[find(owner.at(e.s))] = find(owner.at(*e.r));
        }
    }
    std::map<std::size_t, std::size_t> comp_of_root;
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        const auto r = find(v);
        if (!comp_of_root.count(r)) {
            comp_of_root[r] = out.components.size();
            out.components.emplace_back();
        }
        auto& c = out.components[comp_of_root[r]];
        c.parts.push_back(nodes[v].name);
        if (std::find(c.pieces.begin(), c.pieces.end(), nodes[v].piece) == c.pieces.end()) c.pieces.push_back(nodes[v].piece);
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto& e = edges[k];
        if (!performed[k]) {
            out.cut.insert(out.cut.end(), e.ids.begin(), e.ids.end());
            continue;
        }
        auto& c = out.components[comp_of_root[find(owner.at(e.s))]];
        c.identifications.insert(c.identifications.end(), e.ids.begin(), e.ids.end());
        for (const auto& b : e.bundles)
            if (std::find(c.pieces.begin(), c.pieces.end(), b) == c.pieces.end()) c.pieces.push_back(b);
        if (e.r && exterior.count(e.s) && exterior.count(*e.r)) {
            c.central.push_back(nodes[owner.at(e.s)].name);
            c.central.push_back(nodes[owner.at(*e.r)].name);
        }
    }
    std::sort(out.cut.begin(), out.cut.end());
    for (auto& c : out.components) {
        std::sort(c.identifications.begin(), c.identifications.end());
        bool core = false;
        for (const auto& part : c.parts)
            for (const auto& n : nodes)
                if (n.name == part && n.kind == "core") core = true;
        c.kind = core ? "compression-of-core" : c.central.size() == 2 ? "compression-body-chain" : "compression-body-tree";
    }
    return out;
}

GluingGraph reglue(const GluingGraph& X, const DecompositionResult& d) {
    std::vector<int> seen(X.identifications.size(), 0);
    auto mark = [&](std::size_t i) {
        if (i >= seen.size()) fail(ErrorKind::invariant, "decomposition names identification " + std::to_string(i) + " out of range");
        ++seen[i];
    };
    std::set<std::string> pieces(d.dropped.begin(), d.dropped.end());
    for (const auto& c : d.components) {
        for (auto i : c.identifications) mark(i);
        pieces.insert(c.pieces.begin(), c.pieces.end());
    }
    for (auto i : d.cut) mark(i);
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (seen[i] != 1)
            fail(ErrorKind::invariant, "identification " + std::to_string(i) + " appears " + std::to_string(seen[i]) +
                                           " times in the decomposition");
    GluingGraph g;
    g.manifolds = X.manifolds;
    for (const auto& p : X.pieces) {
        if (!pieces.count(p.id)) fail(ErrorKind::invariant, "piece " + p.id + " missing from the decomposition");
        g.pieces.push_back(p);
    }
    for (std::size_t i = 0; i < X.identifications.size(); ++i) g.identifications.push_back(X.identifications[i]);
    g.lambda = X.lambda;
    g.params = X.params;
    g.finalize();
    return g;
}

json DecompositionResult::to_json() const {
    json comps = json::array();
    for (const auto& c : components)
        comps.push_back({{"kind", c.kind},
                         {"parts", c.parts},
                         {"pieces", c.pieces},
                         {"identifications", c.identifications},
                         {"central", c.central}});
    return json{{"schema", "decomposition/1"},
                {"components", comps},
                {"cut", cut},
                {"internal_cuts", internal_cuts},
                {"dropped_ibundles", dropped}};
}

TransparencyReport transparency_and_induced_charsub(const GluingGraph& X, const std::string& piece) {
    const auto& m = X.manifold_of(piece);
    if (m.jsj.empty()) fail(ErrorKind::domain, "piece " + piece + " has no JSJ metadata");
    TransparencyReport out;
    out.piece = piece;
    for (const auto& c : m.jsj) {
        TransparencyEntry e{c.id, c.type, c.footprint, {}, false, ""};
        for (const auto& f : c.footprint)
            if (!X.buried({piece, f.boundary})) e.adjusted.push_back(f);
        if (c.type == "ibundle")
            e.transparent = !c.footprint.empty() && e.adjusted.size() == c.footprint.size();
        else if (c.type == "solidtorus")
            e.transparent = e.adjusted.size() >= 2;
        out.entries.push_back(std::move(e));
    }
    // parallel adjusted solid tori: keep the first id of each declared class
    std::map<std::string, std::string> keeper;
    for (std::size_t k = 0; k < m.jsj.size(); ++k) {
        const auto& c = m.jsj[k];
        if (c.type != "solidtorus" || c.parallel_class.empty() || !out.entries[k].transparent) continue;
        auto it = keeper.find(c.parallel_class);
        if (it == keeper.end() || c.id < it->second) keeper[c.parallel_class] = c.id;
    }
    for (std::size_t k = 0; k < m.jsj.size(); ++k) {
        const auto& c = m.jsj[k];
        if (c.type != "solidtorus" || c.parallel_class.empty() || !out.entries[k].transparent) continue;
        if (keeper[c.parallel_class] != c.id) out.entries[k].redundant_with = keeper[c.parallel_class];
    }
    json pieces_j = json::array();
    for (const auto& e : out.entries) {
        if (!e.transparent || !e.redundant_with.empty()) continue;
        json fp = json::array();
        json frames = json::object();
        for (const auto& f : e.adjusted) {
            fp.push_back({f.boundary, f.label});
            const auto& b = m.at(f.boundary);
            if (!b.window_frames.empty()) frames[f.boundary] = curves_json(b.window_frames);
        }
        pieces_j.push_back({{"id", e.id}, {"type", e.type}, {"footprint", fp}, {"window_frames", frames}});
    }
    out.induced = {{"piece", piece}, {"characteristic", pieces_j}};
    return out;
}

json TransparencyReport::to_json() const {
    json es = json::array();
    for (const auto& e : entries) {
        auto fp = [](const std::vector<gluing::FootprintEntry>& v) {
            json a = json::array();
            for (const auto& f : v) a.push_back({f.boundary, f.label});
            return a;
        };
        json x{{"id", e.id}, {"type", e.type}, {"footprint", fp(e.footprint)}, {"adjusted", fp(e.adjusted)},
               {"transparent", e.transparent}};
        if (!e.redundant_with.empty()) x["removed_parallel_to"] = e.redundant_with;
        es.push_back(x);
    }
    return json{{"schema", "transparency/1"}, {"piece", piece}, {"entries", es}, {"induced", induced}};
}

}  // namespace glueforge::transforms
