#include <regex>

#include "doctest.h"
#include "glueforge/error.hpp"
#include "glueforge/model.hpp"
#include "gluing_fixtures.hpp"

using namespace glueforge;
using namespace glueforge::gluing;
using namespace glueforge::model;
using namespace fixtures;
using torus::SurfaceMap;
using torus::TeichPoint;

namespace {

const SurfaceMap A(2, 1, 1, 1);
const SurfaceMap refl = SurfaceMap::reflection();
json mj(const SurfaceMap& m) { return surface::map_to_json(m); }

TubeBlock bare_tube(TeichPoint a, TeichPoint b) {
    TubeBlock t;
    t.sigma_a = a;
    t.sigma_b = b;
    t.degenerate = a.approx_equal(b);
    t.length = torus::teich_distance(a, b);
    return t;
}

}  // namespace

TEST_CASE("skeleton: degenerate and A^3 tubes") {
    auto s0 = build_skeleton(validate_gluing(two_piece(mj(refl))));
    REQUIRE(s0.tubes.size() == 1);
    CHECK(s0.tubes[0].degenerate);
    CHECK(s0.tubes[0].length == 0);
    CHECK(s0.tubes[0].samples.size() == 2);

    auto s = build_skeleton(validate_gluing(two_piece(mj(A.power(3) * refl))), 5);
    REQUIRE(s.tubes.size() == 1);
    const auto& t = s.tubes[0];
    CHECK_FALSE(t.degenerate);
    CHECK(t.sigma_a.approx_equal(TeichPoint(0, 1)));
    const auto target = torus::apply_map(A.power(3), TeichPoint(0, 1));
    CHECK(t.sigma_b.approx_equal(target, 1e-9));
    CHECK(t.length == doctest::Approx(torus::teich_distance(TeichPoint(0, 1), target)).epsilon(1e-12));
    CHECK(t.length == doctest::Approx(torus::teich_distance(t.sigma_a, t.sigma_b)).epsilon(1e-12));
    REQUIRE(t.samples.size() == 5);
    CHECK(t.samples.front().point.approx_equal(t.sigma_a));
    CHECK(t.samples.back().point.approx_equal(t.sigma_b, 1e-9));
    // incidence: one tube on both pieces
    CHECK(s.pieces[0].tubes == std::vector<std::size_t>{0});
    CHECK(s.pieces[1].tubes == std::vector<std::size_t>{0});
}

TEST_CASE("skeleton: self-gluing builds a twisted tube") {
    json spec{{"manifolds", {manifold("M", {torus_boundary("E")})}},
              {"pieces", {{{"id", "p"}, {"manifold", "M"}}}},
              {"identifications", {ident("p", "E", "p", "E", mat(1, 2, 0, -1))}}};
    auto s = build_skeleton(validate_gluing(spec));
    REQUIRE(s.tubes.size() == 1);
    const auto& t = s.tubes[0];
    CHECK(t.kind == TubeKind::self_gluing);
    REQUIRE(t.involution);
    CHECK(t.involution_ok);
    CHECK(torus::apply_map(*t.involution, t.sigma_a).approx_equal(t.sigma_b, 1e-9));
    CHECK(torus::apply_map(*t.involution, t.sigma_b).approx_equal(t.sigma_a, 1e-9));
}

TEST_CASE("skeleton: boundary tubes follow lambda") {
    json spec{{"manifolds", {manifold("M", {torus_boundary("E"), torus_boundary("F")})}},
              {"pieces", {{{"id", "p"}, {"manifold", "M"}}}},
              {"lambda", {{"p:F", {"1", "inf"}}}}};
    auto s = build_skeleton(validate_gluing(spec));
    REQUIRE(s.tubes.size() == 1);
    CHECK(s.tubes[0].kind == TubeKind::boundary);
    CHECK(s.tubes[0].name() == "p:F~lambda");
    REQUIRE(s.warnings.size() == 1);
    CHECK(s.warnings[0].find("p:E") != std::string::npos);
}

TEST_CASE("sample_tube: vertical tube and degenerate tube") {
    auto t = bare_tube(TeichPoint(0, 1), TeichPoint(0, 4));
    auto xs = sample_tube(t, 3);
    REQUIRE(xs.size() == 3);
    CHECK(xs[0].point.y == doctest::Approx(1));
    CHECK(xs[1].point.y == doctest::Approx(2));
    CHECK(xs[2].point.y == doctest::Approx(4));
    for (const auto& x : xs) CHECK(x.point.x == doctest::Approx(0));
    CHECK(xs[2].systole == doctest::Approx(0.5));
    CHECK(xs[2].shortest == torus::Slope::infinity());  // |1 - 0 z| / sqrt(4)
    auto d = sample_tube(bare_tube(TeichPoint(0, 1), TeichPoint(0, 1)), 7);
    REQUIRE(d.size() == 2);
    CHECK(d[0].point.approx_equal(TeichPoint(0, 1)));
    CHECK(d[1].point.approx_equal(TeichPoint(0, 1)));
    CHECK_THROWS_AS(sample_tube(t, 1), Error);
}

TEST_CASE("thickness: degenerate, long coefficient, A^3") {
    auto s0 = build_skeleton(validate_gluing(two_piece(mj(refl))));
    CHECK(verify_thickness(s0, 1.0).pass);

    auto thin = build_skeleton(validate_gluing(two_piece(mj(SurfaceMap(1, 50, 0, 1) * refl))), 21);
    auto r = verify_thickness(thin, 0.3);
    CHECK_FALSE(r.pass);
    CHECK(*r.tubes[0].min_systole < 0.3);
    CHECK(*r.tubes[0].max_cf_coefficient == "50");

    auto a3 = build_skeleton(validate_gluing(two_piece(mj(A.power(3) * refl))), 33);
    auto ra = verify_thickness(a3, 0.3);
    CHECK(ra.pass);
    CHECK(ra.to_json()["cross_check"]["separated"] == true);
}

TEST_CASE("export: json round trip and obj counts") {
    json lone{{"manifolds", {manifold("M", {})}}, {"pieces", {{{"id", "p"}, {"manifold", "M"}}}}};
    auto s0 = build_skeleton(validate_gluing(lone));
    auto j0 = json::parse(export_skeleton(s0, "json"));
    CHECK(j0["schema"] == "skeleton/1");
    CHECK(j0["pieces"].size() == 1);
    CHECK(j0["tubes"].empty());

    auto s = build_skeleton(validate_gluing(two_piece(mj(A.power(3) * refl))), 6);
    const auto text = export_skeleton(s, "json");
    CHECK(json::parse(text)["tubes"].size() == 1);
    CHECK(export_skeleton(skeleton_from_json(json::parse(text)), "json") == text);

    const auto obj = export_skeleton(s, "obj", 12);
    std::size_t v = 0, f = 0, o = 0;
    std::istringstream in(obj);
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("v ", 0) == 0) ++v;
        if (line.rfind("f ", 0) == 0) ++f;
        if (line.rfind("o ", 0) == 0) ++o;
    }
    CHECK(o == 1);
    CHECK(v == 6 * 12);
    CHECK(f == 2 * 12 * 5);
    CHECK(obj.find("o p2:E~p1:E") != std::string::npos);
    CHECK_THROWS_AS(export_skeleton(s, "stl"), Error);
}

TEST_CASE("skeleton: naturality under relabelling") {
    auto spec = two_piece(mj(A.power(2) * refl));
    auto s = build_skeleton(validate_gluing(spec)).to_json().dump();
    auto renamed = spec.dump();
    renamed = std::regex_replace(renamed, std::regex("\"p1\""), "\"q1\"");
    renamed = std::regex_replace(renamed, std::regex("\"p2\""), "\"q2\"");
    auto r = build_skeleton(validate_gluing(json::parse(renamed))).to_json().dump();
    r = std::regex_replace(r, std::regex("q1"), "p1");
    r = std::regex_replace(r, std::regex("q2"), "p2");
    CHECK(r == s);
}

TEST_CASE("skeleton: collapse compatibility on chains") {
    for (int k = 1; k <= 4; ++k) {
        auto X = validate_gluing(bundle_chain({mj(A.power(k) * refl), mj(A.power(k + 1) * refl)}));
        auto c = chain_compatibility(X, "b1");
        CHECK(c.holds);
        CHECK(c.direct <= c.concat + 1e-9);
    }
}
