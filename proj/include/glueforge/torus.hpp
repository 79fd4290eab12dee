#pragma once

// Exact slope geometry on the torus: Farey graph distances and geodesics,
// annular projections, the SL2/GL2 action, and upper half-plane moduli.

#include <gmpxx.h>

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace glueforge::torus {

using Int = mpz_class;

/// p/q in lowest terms with q > 0, or 1/0 for infinity.
class Slope {
public:
    Slope() : p_(1), q_(0) {}
    Slope(Int p, Int q);  // canonicalizes; throws on 0/0
    static Slope infinity() { return {}; }
    static Slope integer(long n) { return Slope(Int(n), Int(1)); }
    static Slope parse(const std::string& text);  // "p/q", "n", "inf"

    const Int& p() const { return p_; }
    const Int& q() const { return q_; }
    bool is_infinite() const { return q_ == 0; }
    std::string to_string() const;

    friend bool operator==(const Slope& a, const Slope& b) { return a.p_ == b.p_ && a.q_ == b.q_; }
    // lexicographic on (q, p)
    friend bool operator<(const Slope& a, const Slope& b) {
        if (a.q_ != b.q_) return a.q_ < b.q_;
        return a.p_ < b.p_;
    }

private:
    Int p_, q_;
};

/// Ordered pair of Farey neighbors.
struct FareyMarking {
    Slope base, transversal;
    FareyMarking() : base(Slope::integer(0)), transversal(Slope::infinity()) {}
    FareyMarking(Slope b, Slope t);  // throws unless i(b, t) = 1
    friend bool operator==(const FareyMarking&, const FareyMarking&) = default;
    std::string to_string() const;
};

/// Upper half-plane point.
struct TeichPoint {
    double x = 0.0, y = 1.0;
    TeichPoint() = default;
    TeichPoint(double x_, double y_);  // throws unless y > 0 and both finite
    bool approx_equal(const TeichPoint& o, double tol = 1e-9) const;
};

/// Integer matrix [[a,b],[c,d]] with determinant +-1.
struct SurfaceMap {
    Int a{1}, b{0}, c{0}, d{1};
    SurfaceMap() = default;
    SurfaceMap(Int a_, Int b_, Int c_, Int d_);  // throws unless |det| = 1
    static SurfaceMap identity() { return {}; }
    static SurfaceMap reflection() { return {1, 0, 0, -1}; }

    Int det() const { return a * d - b * c; }
    bool orientation_preserving() const { return det() == 1; }
    SurfaceMap inverse() const;
    SurfaceMap power(unsigned k) const;
    bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
    std::string to_string() const;

    friend SurfaceMap operator*(const SurfaceMap& m, const SurfaceMap& n);
    friend bool operator==(const SurfaceMap& m, const SurfaceMap& n) {
        return m.a == n.a && m.b == n.b && m.c == n.c && m.d == n.d;
    }
};

struct AnnulusLabel {
    Slope core;
    friend bool operator==(const AnnulusLabel&, const AnnulusLabel&) = default;
};

Int intersection_number(const Slope& a, const Slope& b);
std::vector<Int> cf_expansion(const Slope& a);
Slope cf_value(const std::vector<Int>& coefficients);

/// Orientation-preserving map sending `a` to infinity and a fixed Farey
/// neighbor of `a` to 0. The identity for `a` = infinity.
SurfaceMap normalizer(const Slope& a);

std::int64_t farey_distance(const Slope& a, const Slope& b);
std::vector<Slope> farey_geodesic(const Slope& a, const Slope& b);

Int annular_projection_distance(const AnnulusLabel& w, const Slope& a, const Slope& b);
/// Max over the slope pairs not meeting the core; nullopt if every pair does.
std::optional<Int> annular_marking_distance(const AnnulusLabel& w, const FareyMarking& m1,
                                            const FareyMarking& m2);

struct ProjectionMaximum {
    AnnulusLabel annulus;
    Int value;
    std::size_t candidates = 0;       // cores examined in the structured search
    std::size_t swept = 0;            // cores examined in the certification sweep
    std::int64_t denominator_bound = 0;
    bool certified = true;            // sweep found nothing larger
    Int sweep_value;                  // largest value found by the sweep
};

inline constexpr std::int64_t kDefaultDenominatorBound = 64;

ProjectionMaximum max_subsurface_projection(const FareyMarking& m1, const FareyMarking& m2,
                                            std::int64_t denominator_bound = kDefaultDenominatorBound);

Slope apply_map(const SurfaceMap& m, const Slope& s);
FareyMarking apply_map(const SurfaceMap& m, const FareyMarking& s);
TeichPoint apply_map(const SurfaceMap& m, const TeichPoint& z);

/// The orientation-preserving A with columns (base, +-transversal).
SurfaceMap marking_frame(const FareyMarking& m);
TeichPoint sigma_of_marking(const FareyMarking& m);
/// True iff the two markings have identical sigma points (exact test).
bool same_sigma(const FareyMarking& m1, const FareyMarking& m2);

double curve_length(const TeichPoint& z, const Slope& a);
double systole(const TeichPoint& z);
FareyMarking shortest_marking(const TeichPoint& z);

/// Half the hyperbolic distance.
double teich_distance(const TeichPoint& z, const TeichPoint& w);
TeichPoint teich_geodesic(const TeichPoint& z, const TeichPoint& w, double t);
/// Distance between sigma points A.i and B.i computed from the exact
/// relative matrix A^-1 B.
double frame_distance(const SurfaceMap& A, const SurfaceMap& B);

struct FramedSample {
    double t = 0;
    TeichPoint point;   // approximate, in the original coordinates
    double systole = 0;
    Slope shortest;
};

/// Sample at parameter t of the geodesic from A.i to B.i. Evaluated in
/// multiprecision sized to the matrix entries, then reduced exactly, so deep
/// samples keep their systole and shortest curve.
FramedSample sample_between_frames(const SurfaceMap& A, const SurfaceMap& B, double t);

/// Broken Teichmuller path through frames[0].i, frames[1].i, ... against the
/// direct geodesic between its ends. With dev_k the distance of vertex k to
/// that geodesic and backtrack the excess of the projected path over the
/// direct length, concat - direct <= 2 sum dev + backtrack.
struct BrokenPathReport {
    double concat_length = 0, direct_length = 0;
    double deviation_sum = 0, max_deviation = 0, backtrack = 0;
    double bound = 0;
    std::vector<double> deviations;
};

BrokenPathReport broken_path_report(const std::vector<SurfaceMap>& frames);

bool thick_check(const TeichPoint& z, double eps0);

struct SegmentThickness {
    double min_systole = 0;
    double argmin_t = 0;
    bool thick = true;
    Int max_cf_coefficient;  // relative position of the endpoint markings
};

SegmentThickness segment_thick_check(const TeichPoint& z, const TeichPoint& w, double eps0,
                                     int samples);

/// Largest |a_k| in the expansions of m2's slopes in m1's frame.
Int relative_cf_bound(const FareyMarking& m1, const FareyMarking& m2);

}  // namespace glueforge::torus
