#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "farey_oracle.hpp"
#include "glueforge/error.hpp"
#include "glueforge/torus.hpp"

using namespace glueforge;
using namespace glueforge::torus;

namespace {

Slope S(const char* s) { return Slope::parse(s); }

const SurfaceMap kA(2, 1, 1, 1);

SurfaceMap random_map(std::mt19937& rng, int steps) {
    const SurfaceMap t(1, 1, 0, 1), u(1, 0, 1, 1), ti(1, -1, 0, 1), ui(1, 0, -1, 1);
    SurfaceMap m;
    for (int i = 0; i < steps; ++i) {
        switch (rng() % 4) {
            case 0: m = m * t; break;
            case 1: m = m * u; break;
            case 2: m = m * ti; break;
            default: m = m * ui; break;
        }
    }
    if (rng() % 2) m = m * SurfaceMap::reflection();
    return m;
}

std::set<std::string> as_set(const FareyMarking& m) { return {m.base.to_string(), m.transversal.to_string()}; }

}  // namespace

TEST_CASE("slope parsing and canonical form") {
    CHECK(S("2/4") == Slope(1, 2));
    CHECK(S("-3/6").to_string() == "-1/2");
    CHECK_THROWS_AS(S("3/-6"), Error);
    CHECK(Slope(3, -6).to_string() == "-1/2");
    CHECK(S("inf").is_infinite());
    CHECK(Slope(-5, 0) == Slope::infinity());
    CHECK(S("7").to_string() == "7/1");
    CHECK_THROWS_AS(S("1/x"), Error);
    CHECK_THROWS_AS(S(""), Error);
    CHECK_THROWS_AS(S("3/0"), Error);
    CHECK_THROWS_AS(Slope(0, 0), Error);
}

TEST_CASE("intersection numbers") {
    CHECK(intersection_number(S("0/1"), S("inf")) == 1);
    CHECK(intersection_number(S("1/2"), S("1/3")) == 1);
    CHECK(intersection_number(S("2/5"), S("inf")) == 5);
    CHECK(intersection_number(S("2/5"), S("2/5")) == 0);
}

TEST_CASE("continued fractions") {
    CHECK(cf_expansion(S("5/8")) == std::vector<Int>{0, 1, 1, 1, 2});
    CHECK(cf_expansion(S("3/1")) == std::vector<Int>{3});
    CHECK(cf_expansion(S("-1/2")) == std::vector<Int>{-1, 2});
    CHECK_THROWS_AS(cf_expansion(Slope::infinity()), Error);
    std::mt19937 rng(3);
    for (int i = 0; i < 500; ++i) {
        const Slope s(static_cast<long>(rng() % 2001) - 1000, 1 + static_cast<long>(rng() % 500));
        const auto cf = cf_expansion(s);
        CHECK(cf_value(cf) == s);
        for (std::size_t k = 1; k < cf.size(); ++k) CHECK(cf[k] >= 1);
        if (cf.size() > 1) CHECK(cf.back() >= 2);
    }
}

TEST_CASE("farey distance examples") {
    CHECK(farey_distance(S("0/1"), S("inf")) == 1);
    CHECK(farey_distance(S("2/5"), S("inf")) == 3);
    CHECK(farey_distance(S("3/7"), S("3/7")) == 0);
    CHECK(farey_distance(S("0/1"), S("8/5")) == 3);
    CHECK(farey_distance(S("0/1"), S("13/8")) == 4);  // 0, 1, 3/2, 8/5, 13/8
    CHECK(farey_distance(S("inf"), S("8/5")) == 3);
    CHECK(farey_distance(S("inf"), S("13/8")) == 3);
}

TEST_CASE("farey distance matches the breadth-first oracle") {
    const oracle::FareyPatch patch(13, -1, 1);
    const auto& sl = patch.slopes();
    std::vector<Slope> mine;
    for (const auto& s : sl) mine.emplace_back(Int(static_cast<long>(s.p)), Int(static_cast<long>(s.q)));
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < sl.size(); ++i) {
        const auto dist = patch.bfs(i);
        for (std::size_t j = 0; j < sl.size(); ++j)
            if (farey_distance(mine[i], mine[j]) != dist[j]) ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("farey geodesics") {
    auto str = [](const std::vector<Slope>& v) {
        std::vector<std::string> out;
        for (const auto& s : v) out.push_back(s.to_string());
        return out;
    };
    CHECK(str(farey_geodesic(S("0/1"), S("inf"))) == std::vector<std::string>{"0/1", "inf"});
    CHECK(str(farey_geodesic(S("2/5"), S("inf"))) == std::vector<std::string>{"2/5", "1/2", "0/1", "inf"});
    CHECK(str(farey_geodesic(S("3/4"), S("3/4"))) == std::vector<std::string>{"3/4"});
    std::mt19937 rng(17);
    for (int i = 0; i < 300; ++i) {
        const Slope a(static_cast<long>(rng() % 201) - 100, 1 + static_cast<long>(rng() % 60));
        const Slope b(static_cast<long>(rng() % 201) - 100, 1 + static_cast<long>(rng() % 60));
        const auto g = farey_geodesic(a, b);
        REQUIRE(g.size() == static_cast<std::size_t>(farey_distance(a, b)) + 1);
        CHECK(g.front() == a);
        CHECK(g.back() == b);
        for (std::size_t k = 1; k < g.size(); ++k) CHECK(intersection_number(g[k - 1], g[k]) == 1);
    }
}

TEST_CASE("annular projection") {
    const AnnulusLabel inf{Slope::infinity()};
    CHECK(annular_projection_distance(inf, S("1/3"), S("7/2")) == 5);
    CHECK(annular_projection_distance(inf, S("1/3"), S("2/3")) == 2);
    CHECK_THROWS_AS(annular_projection_distance(inf, S("inf"), S("2/3")), Error);
    // core 0: any orientation-preserving normalizer gives the same value
    const AnnulusLabel zero{S("0/1")};
    const auto v = annular_projection_distance(zero, S("3/1"), S("3/4"));
    for (long k = -3; k <= 3; ++k) {
        const SurfaceMap n(k, 1, -1, 0);
        const Slope x = apply_map(n, S("3/1")), y = apply_map(n, S("3/4"));
        auto fl = [](const Slope& s) {
            Int f;
            mpz_fdiv_q(f.get_mpz_t(), s.p().get_mpz_t(), s.q().get_mpz_t());
            return f;
        };
        CHECK(v == abs(fl(x) - fl(y)) + 2);
    }
    CHECK(v == 3);
    // invariance under orientation-preserving maps
    std::mt19937 rng(21);
    for (int i = 0; i < 300; ++i) {
        SurfaceMap m = random_map(rng, 8);
        if (!m.orientation_preserving()) m = m * SurfaceMap(0, -1, 1, 0) * SurfaceMap::reflection() * SurfaceMap(0, 1, -1, 0).inverse();
        if (!m.orientation_preserving()) continue;
        const Slope c(static_cast<long>(rng() % 41) - 20, 1 + static_cast<long>(rng() % 9));
        const Slope a(static_cast<long>(rng() % 41) - 20, 1 + static_cast<long>(rng() % 9));
        const Slope b(static_cast<long>(rng() % 41) - 20, 1 + static_cast<long>(rng() % 9));
        if (a == c || b == c) continue;
        CHECK(annular_projection_distance({c}, a, b) ==
              annular_projection_distance({apply_map(m, c)}, apply_map(m, a), apply_map(m, b)));
    }
}

TEST_CASE("largest subsurface projection") {
    const FareyMarking base(S("0/1"), S("inf"));
    for (long n = 1; n <= 6; ++n) {
        const auto r = max_subsurface_projection(base, FareyMarking(Slope::integer(n), S("inf")), 16);
        CHECK(r.annulus.core.is_infinite());
        CHECK(r.value == n + 2);
        CHECK(r.certified);
    }
    const auto same = max_subsurface_projection(base, base, 16);
    CHECK(same.value <= 3);
    const auto cube = max_subsurface_projection(base, apply_map(kA.power(3), base), 64);
    CHECK(cube.certified);
    CHECK(cube.sweep_value <= cube.value);
    CHECK(cube.swept > 1000);
}

TEST_CASE("group action") {
    CHECK(apply_map(kA, S("0/1")) == S("1/1"));
    const SurfaceMap a3 = kA.power(3);
    CHECK(a3 == SurfaceMap(13, 8, 8, 5));
    CHECK(apply_map(a3, S("0/1")) == S("8/5"));
    CHECK(apply_map(a3, S("inf")) == S("13/8"));
    CHECK(apply_map(SurfaceMap::reflection(), TeichPoint(0, 1)).approx_equal(TeichPoint(0, 1)));
    CHECK_THROWS_AS(SurfaceMap(2, 0, 0, 1), Error);
    CHECK(kA * kA.inverse() == SurfaceMap::identity());
    std::mt19937 rng(8);
    for (int i = 0; i < 200; ++i) {
        const auto m = random_map(rng, 10);
        const Slope a(static_cast<long>(rng() % 41) - 20, 1 + static_cast<long>(rng() % 20));
        const Slope b(static_cast<long>(rng() % 41) - 20, 1 + static_cast<long>(rng() % 20));
        CHECK(intersection_number(a, b) == intersection_number(apply_map(m, a), apply_map(m, b)));
        CHECK(farey_distance(a, b) == farey_distance(apply_map(m, a), apply_map(m, b)));
    }
}

TEST_CASE("sigma points") {
    CHECK(sigma_of_marking(FareyMarking(S("0/1"), S("inf"))).approx_equal(TeichPoint(0, 1)));
    CHECK(sigma_of_marking(FareyMarking(S("1/1"), S("inf"))).approx_equal(TeichPoint(1, 1)));
    std::mt19937 rng(4);
    const FareyMarking base(S("0/1"), S("inf"));
    for (int i = 0; i < 200; ++i) {
        const auto m = random_map(rng, 5);
        const auto lhs = sigma_of_marking(apply_map(m, base));
        const auto rhs = apply_map(m, TeichPoint(0, 1));
        CHECK(lhs.approx_equal(rhs, 1e-9));
        // swapping base and transversal leaves the point fixed
        const auto mm = apply_map(m, base);
        CHECK(same_sigma(mm, FareyMarking(mm.transversal, mm.base)));
    }
    CHECK(!same_sigma(base, FareyMarking(S("1/1"), S("inf"))));
}

TEST_CASE("curve lengths") {
    const TeichPoint i(0, 1);
    CHECK(curve_length(i, S("0/1")) == doctest::Approx(1.0));
    CHECK(curve_length(i, S("inf")) == doctest::Approx(1.0));
    CHECK(curve_length(i, S("1/1")) == doctest::Approx(std::sqrt(2.0)));
    // at 2i the two basis curves have lengths {sqrt 2, 1/sqrt 2}
    const TeichPoint two_i(0, 2);
    std::multiset<double> got{curve_length(two_i, S("0/1")), curve_length(two_i, S("inf"))};
    CHECK(*got.begin() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(*got.rbegin() == doctest::Approx(std::sqrt(2.0)));

    std::mt19937 rng(12);
    std::uniform_real_distribution<double> ux(-2, 2), uy(0.2, 3);
    for (int k = 0; k < 400; ++k) {
        const TeichPoint z(ux(rng), uy(rng));
        const Slope a(static_cast<long>(rng() % 21) - 10, 1 + static_cast<long>(rng() % 10));
        const long bp = static_cast<long>(rng() % 21) - 10, bq = static_cast<long>(rng() % 10);
        const Slope b(bq == 0 ? 1 : bp, bq);
        CHECK(curve_length(z, a) * curve_length(z, b) >= intersection_number(a, b).get_d() * (1 - 1e-12));
        const auto m = random_map(rng, 4);
        CHECK(curve_length(apply_map(m, z), apply_map(m, a)) == doctest::Approx(curve_length(z, a)).epsilon(1e-9));
    }
}

TEST_CASE("shortest markings") {
    CHECK(as_set(shortest_marking(TeichPoint(0, 1))) == std::set<std::string>{"0/1", "inf"});
    CHECK(as_set(shortest_marking(TeichPoint(0, 3))) == std::set<std::string>{"0/1", "inf"});
    CHECK(as_set(shortest_marking(TeichPoint(1, 1))) == std::set<std::string>{"1/1", "inf"});
    const auto deep = shortest_marking(TeichPoint(0, 3));
    CHECK(curve_length(TeichPoint(0, 3), deep.base) == doctest::Approx(1 / std::sqrt(3.0)));

    // sigma then shortest marking recovers every marking with small denominators
    std::size_t checked = 0;
    for (long q = 1; q <= 34; ++q)
        for (long p = 0; p <= q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            const Slope b(p, q);
            const SurfaceMap n = normalizer(b).inverse();
            const FareyMarking m(b, apply_map(n, S("0/1")));
            CHECK(as_set(shortest_marking(sigma_of_marking(m))) == as_set(m));
            ++checked;
        }
    CHECK(checked > 300);
}

TEST_CASE("teichmuller distance and geodesics") {
    CHECK(teich_distance(TeichPoint(0, 1), TeichPoint(0, 2)) == doctest::Approx(0.5 * std::log(2.0)));
    CHECK(teich_distance(TeichPoint(0.3, 0.7), TeichPoint(0.3, 0.7)) == 0.0);
    CHECK(teich_geodesic(TeichPoint(0, 1), TeichPoint(0, 4), 0.5).approx_equal(TeichPoint(0, 2)));
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> ux(-3, 3), uy(0.05, 5), ut(0, 1);
    for (int k = 0; k < 300; ++k) {
        const TeichPoint z(ux(rng), uy(rng)), w(ux(rng), uy(rng));
        const double d = teich_distance(z, w), t = ut(rng);
        CHECK(teich_geodesic(z, w, 0).approx_equal(z));
        CHECK(teich_geodesic(z, w, 1).approx_equal(w, 1e-8));
        const auto g = teich_geodesic(z, w, t);
        CHECK(teich_distance(z, g) == doctest::Approx(t * d).epsilon(1e-7));
        CHECK(teich_distance(g, w) == doctest::Approx((1 - t) * d).epsilon(1e-7));
        const TeichPoint u(ux(rng), uy(rng));
        CHECK(teich_distance(z, w) <= teich_distance(z, u) + teich_distance(u, w) + 1e-12);
    }
    // nearly vertical geodesic far from the origin
    const TeichPoint a(0.0, 1e-3), b(1e-9, 1e5);
    const auto mid = teich_geodesic(a, b, 0.5);
    CHECK(teich_distance(a, mid) == doctest::Approx(0.5 * teich_distance(a, b)).epsilon(1e-7));
}

TEST_CASE("exact frame distances and framed samples") {
    const SurfaceMap id;
    const auto a3 = kA.power(3);
    CHECK(frame_distance(id, a3) == doctest::Approx(teich_distance(TeichPoint(0, 1), apply_map(a3, TeichPoint(0, 1)))));
    CHECK(frame_distance(a3, a3) == 0.0);
    const auto s = sample_between_frames(id, a3, 0.5);
    const auto plain = teich_geodesic(TeichPoint(0, 1), apply_map(a3, TeichPoint(0, 1)), 0.5);
    CHECK(s.point.approx_equal(plain, 1e-9));
    CHECK(s.systole == doctest::Approx(systole(plain)));

    // a deep frame: endpoints keep systole 1 and the midpoint stays accurate
    const auto deep = kA.power(120);
    CHECK(sample_between_frames(id, deep, 0.0).systole == doctest::Approx(1.0));
    CHECK(sample_between_frames(id, deep, 1.0).systole == doctest::Approx(1.0));
    const double expect = 1 / std::sqrt(std::sqrt(1.25));  // the axis of A passes at height sqrt(5)/2
    for (double t : {0.25, 0.5, 0.75}) CHECK(sample_between_frames(id, deep, t).systole == doctest::Approx(expect).epsilon(0.2));
}

TEST_CASE("thickness") {
    CHECK(thick_check(TeichPoint(0, 1), 0.5));
    CHECK(!thick_check(TeichPoint(0, 100), 0.5));
    CHECK(systole(TeichPoint(0, 100)) == doctest::Approx(0.1));
    const auto seg = segment_thick_check(TeichPoint(0, 1), TeichPoint(0.3, 1), 0.5, 16);
    CHECK(seg.thick);
    CHECK(seg.min_systole >= 0.9);
    CHECK_THROWS_AS(thick_check(TeichPoint(0, 1), 0), Error);
}
