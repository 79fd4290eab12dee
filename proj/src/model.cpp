#include "glueforge/model.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "glueforge/error.hpp"

namespace glueforge::model {

using torus::FareyMarking;

std::string to_string(TubeKind k) {
    switch (k) {
        case TubeKind::gluing: return "gluing";
        case TubeKind::self_gluing: return "self-gluing";
        case TubeKind::boundary: return "boundary";
    }
    return "?";
}

std::string TubeBlock::name() const {
    return at.to_string() + "~" + (across ? across->to_string() : std::string("lambda"));
}

namespace {

json point_json(const TeichPoint& z) { return json::array({z.x, z.y}); }
TeichPoint point_from(const json& j) { return TeichPoint(j.at(0).get<double>(), j.at(1).get<double>()); }
json slot_json(const Slot& s) { return json::array({s.piece, s.boundary}); }
Slot slot_from(const json& j) { return {j.at(0).get<std::string>(), j.at(1).get<std::string>()}; }
json marking_json(const FareyMarking& m) { return json::array({m.base.to_string(), m.transversal.to_string()}); }
FareyMarking marking_from(const json& j) {
    return FareyMarking(torus::Slope::parse(j.at(0).get<std::string>()), torus::Slope::parse(j.at(1).get<std::string>()));
}

TubeKind kind_from(const std::string& s) {
    if (s == "gluing") return TubeKind::gluing;
    if (s == "self-gluing") return TubeKind::self_gluing;
    if (s == "boundary") return TubeKind::boundary;
    fail(ErrorKind::parse, "unknown tube kind `" + s + "`");
}

TubeBlock make_tube(TubeKind kind, const Slot& at, std::optional<Slot> across, const gluing::AbstractMarking& mu,
                    const gluing::AbstractMarking& nu, int samples) {
    TubeBlock t;
    t.kind = kind;
    t.at = at;
    t.across = std::move(across);
    t.farey_height = surface::marking_distance(mu, nu);
    if (!mu.backend.is_torus()) {
        t.geometric = false;
        t.degenerate = *t.farey_height == 0;
        return t;
    }
    t.mu = mu.farey();
    t.nu = nu.farey();
    t.sigma_a = torus::sigma_of_marking(*t.mu);
    t.sigma_b = torus::sigma_of_marking(*t.nu);
    t.degenerate = torus::same_sigma(*t.mu, *t.nu);
    t.length = t.degenerate ? 0.0 : torus::frame_distance(torus::marking_frame(*t.mu), torus::marking_frame(*t.nu));
    t.samples = sample_tube(t, samples);
    return t;
}

}  // namespace

std::vector<TubeSample> sample_tube(const TubeBlock& t, int n) {
    if (n < 2) fail(ErrorKind::domain, "a tube needs at least 2 samples");
    if (!t.geometric) return {};
    auto at = [&](double s) {
        if (t.mu && t.nu) {
            const auto f = torus::sample_between_frames(torus::marking_frame(*t.mu), torus::marking_frame(*t.nu), s);
            return TubeSample{s, f.point, f.systole, f.shortest};
        }
        // bare endpoints: double precision is all there is
        const auto z = torus::teich_geodesic(t.sigma_a, t.sigma_b, s);
        return TubeSample{s, z, torus::systole(z), torus::shortest_marking(z).base};
    };
    if (t.degenerate) {
        auto first = at(0.0);
        auto second = first;
        second.t = 1.0;
        return {first, second};
    }
    std::vector<TubeSample> out;
    for (int k = 0; k < n; ++k) out.push_back(at(static_cast<double>(k) / (n - 1)));
    return out;
}

ModelSkeleton build_skeleton(const GluingGraph& X, int samples) {
    if (samples < 2) fail(ErrorKind::domain, "a tube needs at least 2 samples");
    ModelSkeleton s;
    s.samples_per_tube = samples;
    std::map<std::string, std::size_t> piece_index;
    for (const auto& p : X.pieces) {
        PieceBlock b{p.id, p.manifold, {}, {}};
        for (const auto* e : X.manifold(p.manifold).nontoroidal()) {
            Anchor a{e->id, std::nullopt};
            if (e->backend.is_torus() && e->decoration) a.sigma = torus::sigma_of_marking(e->decoration->farey());
            b.anchors.push_back(a);
        }
        piece_index[p.id] = s.pieces.size();
        s.pieces.push_back(std::move(b));
    }
    auto attach = [&](const Slot& slot) {
        auto& inc = s.pieces[piece_index.at(slot.piece)].tubes;
        if (inc.empty() || inc.back() != s.tubes.size() - 1) inc.push_back(s.tubes.size() - 1);
    };
    for (std::size_t i = 0; i < X.identifications.size(); ++i) {
        const auto& id = X.identifications[i];
        const auto& mu_b = *X.boundary(id.b).decoration;
        const auto nu_b = surface::pushforward(id.map, *X.boundary(id.a).decoration);
        const bool self = id.a == id.b;
        auto t = make_tube(self ? TubeKind::self_gluing : TubeKind::gluing, id.b, id.a, mu_b, nu_b, samples);
        t.identification = i;
        if (self && t.geometric) {
            const auto& psi = std::get<SurfaceMap>(id.map);
            t.involution = psi;
            // the involution must swap the ends and fix the midpoint
            const bool swaps = torus::same_sigma(torus::apply_map(psi, *t.mu), *t.nu) &&
                               torus::same_sigma(torus::apply_map(psi, *t.nu), *t.mu);
            bool mid = true;
            if (!t.degenerate) {
                const auto m = torus::sample_between_frames(torus::marking_frame(*t.mu), torus::marking_frame(*t.nu), 0.5);
                mid = torus::teich_distance(torus::apply_map(psi, m.point), m.point) < 1e-6;
            }
            t.involution_ok = swaps && mid;
            if (!t.involution_ok)
                fail(ErrorKind::invariant, "self-gluing of " + id.a.to_string() + ": the involution does not swap the tube ends");
        }
        s.tubes.push_back(std::move(t));
        attach(id.b);
        attach(id.a);
    }
    for (const auto& slot : X.slots()) {
        if (X.buried(slot)) continue;
        auto l = X.lambda.find(slot);
        if (l == X.lambda.end()) {
            s.warnings.push_back("boundary tube omitted: no lambda on " + slot.to_string());
            continue;
        }
        s.tubes.push_back(make_tube(TubeKind::boundary, slot, std::nullopt, *X.boundary(slot).decoration, l->second, samples));
        attach(slot);
    }
    for (const auto& t : s.tubes) {
        s.total_length += t.length;
        for (const auto& x : t.samples)
            if (!s.min_systole || x.systole < *s.min_systole) s.min_systole = x.systole;
    }
    return s;
}

json ModelSkeleton::to_json() const {
    json ps = json::array();
    for (const auto& p : pieces) {
        json anchors = json::array();
        for (const auto& a : p.anchors)
            anchors.push_back({{"boundary", a.boundary}, {"sigma", a.sigma ? point_json(*a.sigma) : json(nullptr)}});
        ps.push_back({{"piece", p.piece}, {"manifold", p.manifold}, {"volume", "opaque"}, {"anchors", anchors}, {"tubes", p.tubes}});
    }
    json ts = json::array();
    for (const auto& t : tubes) {
        json samples_j = json::array();
        for (const auto& x : t.samples)
            samples_j.push_back({{"t", x.t}, {"point", point_json(x.point)}, {"systole", x.systole}, {"shortest", x.shortest.to_string()}});
        json j{{"name", t.name()},
               {"kind", model::to_string(t.kind)},
               {"at", slot_json(t.at)},
               {"across", t.across ? slot_json(*t.across) : json(nullptr)},
               {"identification", t.identification ? json(*t.identification) : json(nullptr)},
               {"geometric", t.geometric},
               {"mu", t.mu ? marking_json(*t.mu) : json(nullptr)},
               {"nu", t.nu ? marking_json(*t.nu) : json(nullptr)},
               {"sigma_a", t.geometric ? point_json(t.sigma_a) : json(nullptr)},
               {"sigma_b", t.geometric ? point_json(t.sigma_b) : json(nullptr)},
               {"length", t.length},
               {"degenerate", t.degenerate},
               {"farey_height", t.farey_height ? json(*t.farey_height) : json(nullptr)},
               {"involution", t.involution ? surface::map_to_json(*t.involution) : json(nullptr)},
               {"involution_ok", t.involution_ok},
               {"samples", samples_j}};
        ts.push_back(j);
    }
    return json{{"schema", "skeleton/1"},
                {"horizontal", "zero-connection product split"},
                {"samples_per_tube", samples_per_tube},
                {"total_length", total_length},
                {"min_systole", min_systole ? json(*min_systole) : json(nullptr)},
                {"pieces", ps},
                {"tubes", ts},
                {"warnings", warnings}};
}

ModelSkeleton skeleton_from_json(const json& j) {
    try {
        if (j.at("schema") != "skeleton/1") fail(ErrorKind::parse, "not a skeleton/1 document");
        ModelSkeleton s;
        s.samples_per_tube = j.at("samples_per_tube").get<int>();
        s.total_length = j.at("total_length").get<double>();
        if (!j.at("min_systole").is_null()) s.min_systole = j["min_systole"].get<double>();
        for (const auto& p : j.at("pieces")) {
            PieceBlock b{p.at("piece").get<std::string>(), p.at("manifold").get<std::string>(), {}, {}};
            for (const auto& a : p.at("anchors")) {
                Anchor x{a.at("boundary").get<std::string>(), std::nullopt};
                if (!a.at("sigma").is_null()) x.sigma = point_from(a["sigma"]);
                b.anchors.push_back(x);
            }
            b.tubes = p.at("tubes").get<std::vector<std::size_t>>();
            s.pieces.push_back(std::move(b));
        }
        const auto torus_backend = surface::BackendHandle::torus();
        for (const auto& t : j.at("tubes")) {
            TubeBlock b;
            b.kind = kind_from(t.at("kind").get<std::string>());
            b.at = slot_from(t.at("at"));
            if (!t.at("across").is_null()) b.across = slot_from(t["across"]);
            if (!t.at("identification").is_null()) b.identification = t["identification"].get<std::size_t>();
            b.geometric = t.at("geometric").get<bool>();
            if (!t.at("mu").is_null()) b.mu = marking_from(t["mu"]);
            if (!t.at("nu").is_null()) b.nu = marking_from(t["nu"]);
            if (b.geometric) {
                b.sigma_a = point_from(t.at("sigma_a"));
                b.sigma_b = point_from(t.at("sigma_b"));
            }
            b.length = t.at("length").get<double>();
            b.degenerate = t.at("degenerate").get<bool>();
            if (!t.at("farey_height").is_null()) b.farey_height = t["farey_height"].get<std::int64_t>();
            if (!t.at("involution").is_null())
                b.involution = std::get<SurfaceMap>(surface::map_from_json(torus_backend, t["involution"]));
            b.involution_ok = t.at("involution_ok").get<bool>();
            for (const auto& x : t.at("samples"))
                b.samples.push_back({x.at("t").get<double>(), point_from(x.at("point")), x.at("systole").get<double>(),
                                     torus::Slope::parse(x.at("shortest").get<std::string>())});
            s.tubes.push_back(std::move(b));
        }
        s.warnings = j.at("warnings").get<std::vector<std::string>>();
        return s;
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, std::string("skeleton: ") + e.what());
    }
}

ThicknessReport verify_thickness(const ModelSkeleton& s, double eps0) {
    if (!(eps0 > 0)) fail(ErrorKind::domain, "eps0 must be positive");
    ThicknessReport r;
    r.eps0 = eps0;
    std::optional<torus::Int> thin_min, thick_max;
    for (const auto& t : s.tubes) {
        TubeThickness x{t.name(), std::nullopt, 0, true, std::nullopt, std::nullopt};
        for (const auto& p : t.samples)
            if (!x.min_systole || p.systole < *x.min_systole) x.min_systole = p.systole, x.argmin_t = p.t;
        if (x.min_systole) x.thick = *x.min_systole >= eps0;
        if (t.mu && t.nu) {
            const auto cf = torus::relative_cf_bound(*t.mu, *t.nu);
            x.max_cf_coefficient = cf.get_str();
            x.sup_projection = torus::max_subsurface_projection(*t.mu, *t.nu).value.get_str();
            if (x.min_systole) {
                auto& slot = x.thick ? thick_max : thin_min;
                if (!slot || (x.thick ? cf > *slot : cf < *slot)) slot = cf;
            }
        }
        r.pass = r.pass && x.thick;
        r.tubes.push_back(std::move(x));
    }
    if (thin_min) r.min_coefficient_thin = thin_min->get_str();
    if (thick_max) r.max_coefficient_thick = thick_max->get_str();
    r.separated = !thin_min || !thick_max || *thin_min > *thick_max;
    return r;
}

json ThicknessReport::to_json() const {
    json ts = json::array();
    for (const auto& t : tubes)
        ts.push_back({{"tube", t.tube},
                      {"min_systole", t.min_systole ? json(*t.min_systole) : json(nullptr)},
                      {"argmin_t", t.argmin_t},
                      {"thick", t.thick},
                      {"max_cf_coefficient", t.max_cf_coefficient ? json(*t.max_cf_coefficient) : json(nullptr)},
                      {"sup_projection", t.sup_projection ? json(*t.sup_projection) : json(nullptr)}});
    auto opt = [](const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); };
    return json{{"schema", "thickness/1"},
                {"eps0", eps0},
                {"pass", pass},
                {"tubes", ts},
                {"cross_check",
                 {{"min_coefficient_thin", opt(min_coefficient_thin)},
                  {"max_coefficient_thick", opt(max_coefficient_thick)},
                  {"separated", separated}}}};
}

std::string export_skeleton(const ModelSkeleton& s, const std::string& format, int fiber_resolution) {
    if (format == "json") return s.to_json().dump(2) + "\n";
    if (format != "obj") fail(ErrorKind::domain, "unknown export format `" + format + "` (json|obj)");
    if (fiber_resolution < 3) fail(ErrorKind::domain, "fiber resolution must be at least 3");
    std::ostringstream out;
    out.precision(17);
    out << "# glueforge skeleton/1\n# horizontal: zero-connection product split\n";
    std::size_t base = 1;
    const int F = fiber_resolution;
    for (const auto& t : s.tubes) {
        if (t.samples.empty()) continue;
        out << "o " << t.name() << "\n";
        // ring k: the fiber at sample k, radius from its systole
        for (const auto& x : t.samples) {
            const double r = x.systole / (2 * std::numbers::pi);
            for (int j = 0; j < F; ++j) {
                const double th = 2 * std::numbers::pi * j / F;
                out << "v " << x.t * t.length << " " << r * std::cos(th) << " " << r * std::sin(th) << "\n";
            }
        }
        for (std::size_t k = 0; k + 1 < t.samples.size(); ++k)
            for (int j = 0; j < F; ++j) {
                const std::size_t a = base + k * F + j, b = base + k * F + (j + 1) % F;
                const std::size_t c = a + F, d = b + F;
                out << "f " << a << " " << b << " " << d << "\n" << "f " << a << " " << d << " " << c << "\n";
            }
        base += t.samples.size() * F;
    }
    return out.str();
}

ChainCompatibility chain_compatibility(const GluingGraph& X, const std::string& bundle) {
    const auto& m = X.manifold_of(bundle);
    if (m.kind != gluing::ManifoldKind::trivial_ibundle) fail(ErrorKind::domain, bundle + " is not a trivial I-bundle");
    const auto ends = m.nontoroidal();
    const Slot e0{bundle, ends[0]->id}, e1{bundle, ends[1]->id};
    auto in = X.psi().find(e0), out = X.psi().find(e1);
    if (in == X.psi().end() || out == X.psi().end()) fail(ErrorKind::domain, "bundle " + bundle + " has an unglued end");
    const Slot s = in->second.other, r = out->second.other;
    for (const auto& x : {s, r})
        if (X.manifold_of(x.piece).kind == gluing::ManifoldKind::trivial_ibundle ||
            X.manifold_of(x.piece).kind == gluing::ManifoldKind::twisted_ibundle)
            fail(ErrorKind::domain, "bundle " + bundle + " is not between two non-bundle pieces");
    if (!X.boundary(s).backend.is_torus()) fail(ErrorKind::domain, "chain compatibility needs the torus backend");
    auto sm = [](const surface::MapDescriptor& d) { return std::get<SurfaceMap>(d); };
    const auto P1 = sm(X.psi().at(s).to_other);
    const auto P2 = sm(out->second.to_other);
    const auto phi = sm(gluing::end_exchange(m));
    const SurfaceMap back0 = P1.inverse(), back1 = P1.inverse() * phi.inverse(), back2 = back1 * P2.inverse();
    auto frame = [](const SurfaceMap& g, const gluing::AbstractMarking& mu) {
        return torus::marking_frame(torus::apply_map(g, mu.farey()));
    };
    const std::vector<SurfaceMap> frames{frame(SurfaceMap{}, *X.boundary(s).decoration), frame(back0, *ends[0]->decoration),
                                         frame(back1, *ends[1]->decoration), frame(back2, *X.boundary(r).decoration)};
    const auto rep = torus::broken_path_report(frames);
    ChainCompatibility c{rep.concat_length, rep.direct_length, rep.bound, true};
    c.holds = c.direct <= c.concat + 1e-9 && c.concat - c.direct <= c.bound + 1e-9;
    return c;
}

}  // namespace glueforge::model
