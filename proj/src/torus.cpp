#include "glueforge/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "bigfloat.hpp"
#include "glueforge/error.hpp"

namespace glueforge::torus {

namespace {

using real = long double;

Int floor_div(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

real to_real(const Int& v) {
    if (v.fits_slong_p()) return static_cast<real>(v.get_si());
    const long bits = static_cast<long>(mpz_sizeinbase(v.get_mpz_t(), 2));
    const long shift = bits - 64;
    Int top = abs(v);
    mpz_tdiv_q_2exp(top.get_mpz_t(), top.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
    const real r = std::ldexp(static_cast<real>(mpz_get_ui(top.get_mpz_t())), static_cast<int>(shift));
    return sgn(v) < 0 ? -r : r;
}

// num/den to long double without losing the fractional part of huge quotients
real ratio_to_real(const Int& num, const Int& den) {
    const Int q = floor_div(num, den);
    Int rem = num - q * den;
    rem <<= 64;
    return to_real(q) + std::ldexp(to_real(floor_div(rem, den)), -64);
}

Int from_real(real v) {
    Int out;
    mpz_set_d(out.get_mpz_t(), static_cast<double>(std::round(v)));
    return out;
}

template <class T>
struct CxT {
    T x, y;
};
using Cx = CxT<real>;
using detail::Big;

Int round_to_int(real v) { return from_real(v); }
Int round_to_int(const Big& v) { return v.round_int(); }
real as_real(real v) { return v; }
real as_real(const Big& v) { return v.ld(); }

Cx sigma_point(const SurfaceMap& m) {
    // m.i for det +1: ((ac + bd) + i) / (c^2 + d^2)
    const Int den = m.c * m.c + m.d * m.d;
    return {ratio_to_real(m.a * m.c + m.b * m.d, den), 1.0L / to_real(den)};
}

CxT<Big> sigma_point_big(const SurfaceMap& m) {
    const Big den(m.c * m.c + m.d * m.d);
    return {Big(m.a * m.c + m.b * m.d) / den, Big(1) / den};
}

// Reduction to the standard fundamental domain: returns G with z = G.z0.
struct Reduced {
    SurfaceMap frame;
    Cx z0;
};

template <class T>
Reduced reduce(CxT<T> z) {
    SurfaceMap g;
    const SurfaceMap s(0, -1, 1, 0);
    const T half(0.5L + 1e-15L), one(1.0L - 1e-15L);
    for (int guard = 0; guard < 100000; ++guard) {
        bool moved = false;
        if (half < fabs(z.x)) {
            const T k = round(z.x);
            z.x -= k;
            g = g * SurfaceMap(1, round_to_int(k), 0, 1);
            moved = true;
        }
        const T n2 = z.x * z.x + z.y * z.y;
        if (n2 < one) {
            z = {-z.x / n2, z.y / n2};
            g = g * s;
            moved = true;
        }
        if (!moved) break;
    }
    return {g, {as_real(z.x), as_real(z.y)}};
}

real length_at(const Cx& z, const Int& p, const Int& q) {
    const real pr = to_real(p), qr = to_real(q);
    return std::hypot(pr - qr * z.x, qr * z.y) / std::sqrt(z.y);
}

// order used for shortest-curve ties: (q, |p|, p)
bool tie_less(const Slope& a, const Slope& b) {
    if (a.q() != b.q()) return a.q() < b.q();
    if (abs(a.p()) != abs(b.p())) return abs(a.p()) < abs(b.p());
    return a.p() < b.p();
}

constexpr real kTieTolerance = 1e-9L;

struct Candidate {
    Slope slope;
    real length;
};

const Candidate& pick(const std::vector<Candidate>& c) {
    real best = c.front().length;
    for (const auto& x : c) best = std::min(best, x.length);
    const Candidate* chosen = nullptr;
    for (const auto& x : c) {
        if (x.length > best * (1 + kTieTolerance)) continue;
        if (!chosen || tie_less(x.slope, chosen->slope)) chosen = &x;
    }
    return *chosen;
}

// shortest marking at a reduced point z0, mapped out by g
FareyMarking shortest_in_frame(const SurfaceMap& g, const Cx& z0) {
    const std::array<std::pair<int, int>, 4> local{{{1, 0}, {0, 1}, {1, 1}, {-1, 1}}};
    std::vector<Candidate> bases;
    std::vector<std::pair<int, int>> base_vec;
    for (auto [p, q] : local) {
        bases.push_back({apply_map(g, Slope(p, q)), length_at(z0, p, q)});
        base_vec.emplace_back(p, q);
    }
    const auto& base = pick(bases);
    const auto idx = static_cast<std::size_t>(&base - bases.data());
    const auto [bp, bq] = base_vec[idx];
    // a neighbor (np, nq) of (bp, bq), then the best translate along the base
    int np = 0, nq = 0;
    if (bq == 0) {
        np = 0;
        nq = 1;
    } else {
        np = 1;
        nq = 0;
    }
    const real vbx = bp - bq * z0.x, vby = -bq * z0.y;
    const real vnx = np - nq * z0.x, vny = -nq * z0.y;
    const real kstar = -(vnx * vbx + vny * vby) / (vbx * vbx + vby * vby);
    const long k0 = static_cast<long>(std::floor(kstar));
    std::vector<Candidate> trans;
    for (long k = k0 - 1; k <= k0 + 2; ++k) {
        const Int p = Int(np) + Int(k) * bp, q = Int(nq) + Int(k) * bq;
        trans.push_back({apply_map(g, Slope(p, q)), length_at(z0, p, q)});
    }
    return FareyMarking(base.slope, pick(trans).slope);
}

Cx to_cx(const TeichPoint& z) { return {z.x, z.y}; }

Cx mobius(const SurfaceMap& m, const Cx& z) {
    const real a = to_real(m.a), b = to_real(m.b), c = to_real(m.c), d = to_real(m.d);
    real x = z.x, y = z.y;
    if (!m.orientation_preserving()) y = -y;
    // (a z + b) / (c z + d)
    const real dx = c * x + d, dy = c * y;
    const real den = dx * dx + dy * dy;
    return {((a * x + b) * dx + a * c * y * y) / den, std::fabs(y) / den};
}

// unit-speed point at fraction t of the hyperbolic geodesic from a to b
template <class T>
CxT<T> geodesic_point(CxT<T> a, CxT<T> b, real t) {
    using std::asinh, std::cosh, std::exp, std::hypot, std::log, std::tanh;
    using C = CxT<T>;
    if (t <= 0) return a;
    if (t >= 1) return b;
    const T tt(t);
    auto vertical = [&](const C& u, const C& v) {
        return C{u.x, exp(log(u.y) + tt * (log(v.y) - log(u.y)))};
    };
    if (a.x == b.x) return vertical(a, b);
    // Conjugating by u = -1/(z - k) keeps the circle well conditioned when one
    // endpoint of the geodesic lies near infinity.
    struct Frame {
        T k;
        bool inverted;
        C a, b;
        T c, r;
    };
    auto circle = [](Frame& f) {
        const T two(2);
        f.c = (f.a.x + f.b.x) / two + (f.b.y - f.a.y) * (f.b.y + f.a.y) / (two * (f.b.x - f.a.x));
        f.r = hypot(f.a.x - f.c, f.a.y);
    };
    auto invert = [](const C& z, const T& k) {
        const T dx = z.x - k, n2 = dx * dx + z.y * z.y;
        return C{-dx / n2, z.y / n2};
    };
    Frame best{T(0), false, a, b, T(0), T(0)};
    circle(best);
    bool vertical_frame = false;
    if (!(best.r <= T(1e4L))) {
        for (real k : {0.0L, 1.0L, -1.0L, 2.0L, -2.0L, 0.5L}) {
            Frame f{T(k), true, invert(a, T(k)), invert(b, T(k)), T(0), T(0)};
            if (f.a.x == f.b.x) {
                best = f;
                vertical_frame = true;
                break;
            }
            circle(f);
            if (f.r < best.r) best = f;
        }
    }
    C out;
    if (vertical_frame) {
        out = vertical(best.a, best.b);
    } else {
        const T sa = asinh((best.a.x - best.c) / best.a.y);
        const T sb = asinh((best.b.x - best.c) / best.b.y);
        const T s = sa + tt * (sb - sa);
        out = {best.c + best.r * tanh(s), best.r / cosh(s)};
    }
    if (!best.inverted) return out;
    // z = k - 1/u
    const T n2 = out.x * out.x + out.y * out.y;
    return {best.k - out.x / n2, out.y / n2};
}

}  // namespace

Slope::Slope(Int p, Int q) : p_(std::move(p)), q_(std::move(q)) {
    if (p_ == 0 && q_ == 0) fail(ErrorKind::domain, "slope 0/0 is undefined");
    if (q_ < 0) {
        p_ = -p_;
        q_ = -q_;
    }
    if (q_ == 0) {
        p_ = 1;
        return;
    }
    Int g;
    mpz_gcd(g.get_mpz_t(), p_.get_mpz_t(), q_.get_mpz_t());
    if (g != 1) {
        p_ /= g;
        q_ /= g;
    }
}

Slope Slope::parse(const std::string& text) {
    if (text == "inf" || text == "1/0" || text == "-1/0") return infinity();
    auto parse_int = [&](const std::string& s) {
        Int v;
        const bool digits = !s.empty() && s.find_first_not_of("+-0123456789") == std::string::npos &&
                            s.find_first_of("0123456789") != std::string::npos;
        if (!digits || v.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0)
            fail(ErrorKind::parse, "malformed slope `" + text + "`");
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string::npos) return Slope(parse_int(text), 1);
    const Int q = parse_int(text.substr(slash + 1));
    if (q < 0) fail(ErrorKind::parse, "slope `" + text + "` has a negative denominator");
    if (q == 0) fail(ErrorKind::parse, "slope `" + text + "`: write infinity as `inf`");
    return Slope(parse_int(text.substr(0, slash)), q);
}

std::string Slope::to_string() const {
    if (is_infinite()) return "inf";
    return p_.get_str() + "/" + q_.get_str();
}

FareyMarking::FareyMarking(Slope b, Slope t) : base(std::move(b)), transversal(std::move(t)) {
    if (intersection_number(base, transversal) != 1)
        fail(ErrorKind::invariant, "marking (" + base.to_string() + ", " + transversal.to_string() +
                                       ") is not a pair of Farey neighbors");
}

std::string FareyMarking::to_string() const {
    return "(" + base.to_string() + ", " + transversal.to_string() + ")";
}

TeichPoint::TeichPoint(double x_, double y_) : x(x_), y(y_) {
    if (!std::isfinite(x) || !std::isfinite(y) || !(y > 0))
        fail(ErrorKind::domain, "point must lie in the upper half-plane");
}

bool TeichPoint::approx_equal(const TeichPoint& o, double tol) const {
    return std::fabs(x - o.x) <= tol && std::fabs(y - o.y) <= tol;
}

SurfaceMap::SurfaceMap(Int a_, Int b_, Int c_, Int d_)
    : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
    const Int det = a * d - b * c;
    if (det != 1 && det != -1)
        fail(ErrorKind::invariant, "map " + to_string() + " has determinant " + det.get_str());
}

SurfaceMap SurfaceMap::inverse() const {
    const Int e = det();  // inverse of +-1 is itself
    return {e * d, -e * b, -e * c, e * a};
}

SurfaceMap SurfaceMap::power(unsigned k) const {
    SurfaceMap out, base = *this;
    while (k) {
        if (k & 1) out = out * base;
        base = base * base;
        k >>= 1;
    }
    return out;
}

std::string SurfaceMap::to_string() const {
    return "[[" + a.get_str() + "," + b.get_str() + "],[" + c.get_str() + "," + d.get_str() + "]]";
}

SurfaceMap operator*(const SurfaceMap& m, const SurfaceMap& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

Int intersection_number(const Slope& a, const Slope& b) { return abs(a.p() * b.q() - b.p() * a.q()); }

std::vector<Int> cf_expansion(const Slope& a) {
    if (a.is_infinite()) fail(ErrorKind::domain, "continued fraction of inf is undefined");
    std::vector<Int> out;
    Int p = a.p(), q = a.q();
    while (q != 0) {
        const Int k = floor_div(p, q);
        out.push_back(k);
        const Int r = p - k * q;
        p = q;
        q = r;
    }
    return out;
}

Slope cf_value(const std::vector<Int>& coefficients) {
    if (coefficients.empty()) fail(ErrorKind::domain, "empty continued fraction");
    Int p = 1, q = 0;  // value of the empty tail
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
        const Int np = *it * p + q;
        q = p;
        p = np;
    }
    return Slope(p, q);
}

SurfaceMap normalizer(const Slope& a) {
    if (a.is_infinite()) return SurfaceMap::identity();
    Int g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.p().get_mpz_t(), a.q().get_mpz_t());
    // s p + t q = 1
    return {s, t, -a.q(), a.p()};
}

Slope apply_map(const SurfaceMap& m, const Slope& s) {
    return Slope(m.a * s.p() + m.b * s.q(), m.c * s.p() + m.d * s.q());
}

FareyMarking apply_map(const SurfaceMap& m, const FareyMarking& s) {
    return FareyMarking(apply_map(m, s.base), apply_map(m, s.transversal));
}

TeichPoint apply_map(const SurfaceMap& m, const TeichPoint& z) {
    const Cx w = mobius(m, to_cx(z));
    return TeichPoint(static_cast<double>(w.x), static_cast<double>(w.y));
}

std::int64_t farey_distance(const Slope& a, const Slope& b) {
    if (a == b) return 0;
    const Slope x = apply_map(normalizer(a), b);
    const auto cf = cf_expansion(x);
    // D_k: distance from infinity to the k-th convergent
    Int before = 0, last = 1;
    for (std::size_t k = 1; k < cf.size(); ++k) {
        Int next = last + 1;
        if (before + cf[k] < next) next = before + cf[k];
        before = last;
        last = next;
    }
    return last.get_si();
}

std::vector<Slope> farey_geodesic(const Slope& a, const Slope& b) {
    std::vector<Slope> path{a};
    std::int64_t remaining = farey_distance(a, b);
    Slope cur = a;
    while (remaining > 0) {
        const SurfaceMap m = normalizer(cur);
        const SurfaceMap back = m.inverse();
        const Slope x = apply_map(m, b);
        const Int fl = floor_div(x.p(), x.q());
        std::optional<Slope> next;
        for (const Int& k : {fl, Int(fl + 1)}) {
            const Slope c = apply_map(back, Slope(k, 1));
            if (farey_distance(c, b) != remaining - 1) continue;
            if (!next || c < *next) next = c;
        }
        if (!next) fail(ErrorKind::invariant, "farey geodesic step failed at " + cur.to_string());
        cur = *next;
        path.push_back(cur);
        --remaining;
    }
    return path;
}

Int annular_projection_distance(const AnnulusLabel& w, const Slope& a, const Slope& b) {
    if (a == w.core || b == w.core)
        fail(ErrorKind::domain, "projection of the core " + w.core.to_string() + " to its own annulus is empty");
    const SurfaceMap n = normalizer(w.core);
    const Slope x = apply_map(n, a), y = apply_map(n, b);
    return abs(floor_div(x.p(), x.q()) - floor_div(y.p(), y.q())) + 2;
}

std::optional<Int> annular_marking_distance(const AnnulusLabel& w, const FareyMarking& m1,
                                            const FareyMarking& m2) {
    std::optional<Int> best;
    for (const Slope* x : {&m1.base, &m1.transversal})
        for (const Slope* y : {&m2.base, &m2.transversal}) {
            if (*x == w.core || *y == w.core) continue;
            const Int v = annular_projection_distance(w, *x, *y);
            if (!best || v > *best) best = v;
        }
    return best;
}

namespace {

void consider(const AnnulusLabel& w, const FareyMarking& m1, const FareyMarking& m2,
              std::optional<std::pair<AnnulusLabel, Int>>& best) {
    const auto v = annular_marking_distance(w, m1, m2);
    if (!v) return;
    if (!best || *v > best->second || (*v == best->second && w.core < best->first.core))
        best = std::make_pair(w, *v);
}

}  // namespace

ProjectionMaximum max_subsurface_projection(const FareyMarking& m1, const FareyMarking& m2,
                                            std::int64_t denominator_bound) {
    const std::array<Slope, 2> s1{m1.base, m1.transversal}, s2{m2.base, m2.transversal};
    std::set<Slope> cores(s1.begin(), s1.end());
    cores.insert(s2.begin(), s2.end());
    for (const auto& x : s1)
        for (const auto& y : s2) {
            for (const auto& v : farey_geodesic(x, y)) cores.insert(v);
            if (x == y) continue;
            // pivots of the ladder between x and y are the convergents in x's frame
            const SurfaceMap n = normalizer(x), back = n.inverse();
            const auto cf = cf_expansion(apply_map(n, y));
            Int p = 1, q = 0, pp = 0, qq = 1;
            for (const auto& a : cf) {
                const Int np = a * p + pp, nq = a * q + qq;
                pp = p;
                qq = q;
                p = np;
                q = nq;
                cores.insert(apply_map(back, Slope(p, q)));
            }
        }

    std::optional<std::pair<AnnulusLabel, Int>> best;
    for (const auto& c : cores) consider(AnnulusLabel{c}, m1, m2, best);

    ProjectionMaximum out;
    out.candidates = cores.size();
    out.denominator_bound = denominator_bound;
    out.annulus = best->first;
    out.value = best->second;

    // certification sweep over small-denominator cores near the marking slopes
    std::vector<Int> floors;
    for (const auto* arr : {&s1, &s2})
        for (const auto& s : *arr)
            if (!s.is_infinite()) floors.push_back(floor_div(s.p(), s.q()));
    std::vector<std::pair<Int, Int>> windows;
    if (!floors.empty()) {
        std::sort(floors.begin(), floors.end());
        if (floors.back() - floors.front() <= 8) {
            windows.emplace_back(floors.front() - 2, floors.back() + 3);
        } else {
            for (const auto& f : floors) {
                if (!windows.empty() && f - 2 <= windows.back().second)
                    windows.back().second = f + 3;
                else
                    windows.emplace_back(f - 2, f + 3);
            }
        }
    } else {
        windows.emplace_back(-2, 3);
    }
    std::optional<std::pair<AnnulusLabel, Int>> sweep;
    consider(AnnulusLabel{Slope::infinity()}, m1, m2, sweep);
    std::size_t swept = 1;
    for (std::int64_t q = 1; q <= denominator_bound; ++q) {
        const Int qq(static_cast<long>(q));
        for (const auto& [lo, hi] : windows) {
            for (Int p = lo * qq; p <= hi * qq; ++p) {
                Int g;
                mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), qq.get_mpz_t());
                if (g != 1) continue;
                consider(AnnulusLabel{Slope(p, qq)}, m1, m2, sweep);
                ++swept;
            }
        }
    }
    out.swept = swept;
    out.sweep_value = sweep ? sweep->second : Int(0);
    if (sweep && sweep->second > out.value) {
        out.certified = false;
        out.annulus = sweep->first;
        out.value = sweep->second;
    }
    return out;
}

SurfaceMap marking_frame(const FareyMarking& m) {
    const Int& tp = m.transversal.p();
    const Int& tq = m.transversal.q();
    const Int& bp = m.base.p();
    const Int& bq = m.base.q();
    if (tp * bq - bp * tq == 1) return {tp, bp, tq, bq};
    return {tp, -bp, tq, -bq};
}

TeichPoint sigma_of_marking(const FareyMarking& m) {
    const Cx z = sigma_point(marking_frame(m));
    return TeichPoint(static_cast<double>(z.x), static_cast<double>(z.y));
}

bool same_sigma(const FareyMarking& m1, const FareyMarking& m2) {
    const SurfaceMap r = marking_frame(m1).inverse() * marking_frame(m2);
    const bool pm_identity = r.b == 0 && r.c == 0 && r.a == r.d;
    const bool pm_rotation = r.a == 0 && r.d == 0 && r.b == -r.c;
    return pm_identity || pm_rotation;
}

double curve_length(const TeichPoint& z, const Slope& a) {
    return static_cast<double>(length_at(to_cx(z), a.p(), a.q()));
}

double systole(const TeichPoint& z) {
    const auto r = reduce(to_cx(z));
    return static_cast<double>(1.0L / std::sqrt(r.z0.y));
}

FareyMarking shortest_marking(const TeichPoint& z) {
    const auto r = reduce(to_cx(z));
    return shortest_in_frame(r.frame, r.z0);
}

double teich_distance(const TeichPoint& z, const TeichPoint& w) {
    const real dx = static_cast<real>(z.x) - w.x, dy = static_cast<real>(z.y) - w.y;
    const real chord = std::hypot(dx, dy) / (2 * std::sqrt(static_cast<real>(z.y) * w.y));
    return static_cast<double>(std::asinh(chord));
}

TeichPoint teich_geodesic(const TeichPoint& z, const TeichPoint& w, double t) {
    if (t < 0 || t > 1) fail(ErrorKind::domain, "geodesic parameter must lie in [0, 1]");
    const Cx p = geodesic_point(to_cx(z), to_cx(w), t);
    return TeichPoint(static_cast<double>(p.x), static_cast<double>(p.y));
}

double frame_distance(const SurfaceMap& A, const SurfaceMap& B) {
    const SurfaceMap c = A.inverse() * B;
    if (!c.orientation_preserving()) fail(ErrorKind::domain, "frames must have the same orientation");
    const Int n = c.a * c.a + c.b * c.b + c.c * c.c + c.d * c.d;
    if (n == 2) return 0.0;
    return static_cast<double>(std::acosh(to_real(n) / 2) / 2);
}

FramedSample sample_between_frames(const SurfaceMap& A, const SurfaceMap& B, double t) {
    if (t < 0 || t > 1) fail(ErrorKind::domain, "geodesic parameter must lie in [0, 1]");
    // enough bits to resolve a point at the depth of the deeper endpoint
    std::size_t bits = 0;
    for (const SurfaceMap* m : {&A, &B})
        for (const Int* e : {&m->a, &m->b, &m->c, &m->d})
            bits = std::max(bits, mpz_sizeinbase(e->get_mpz_t(), 2));
    const detail::PrecisionScope scope(static_cast<mpfr_prec_t>(128 + 4 * bits));
    const auto w = geodesic_point(sigma_point_big(A), sigma_point_big(B), t);
    const auto r = reduce(w);
    FramedSample out;
    out.t = t;
    out.shortest = shortest_in_frame(r.frame, r.z0).base;
    out.systole = static_cast<double>(1.0L / std::sqrt(r.z0.y));
    out.point = TeichPoint(static_cast<double>(w.x.ld()), std::max(static_cast<double>(w.y.ld()), 1e-300));
    return out;
}

BrokenPathReport broken_path_report(const std::vector<SurfaceMap>& frames) {
    if (frames.empty()) fail(ErrorKind::domain, "broken path needs at least one frame");
    for (const auto& f : frames)
        if (!f.orientation_preserving()) fail(ErrorKind::domain, "frames must have the same orientation");
    BrokenPathReport out;
    const std::size_t n = frames.size();
    if (n == 1) return out;
    std::vector<SurfaceMap> rel;
    std::size_t bits = 0;
    const auto base = frames.front().inverse();
    for (const auto& f : frames) {
        rel.push_back(base * f);
        for (const Int* e : {&rel.back().a, &rel.back().b, &rel.back().c, &rel.back().d})
            bits = std::max(bits, mpz_sizeinbase(e->get_mpz_t(), 2));
    }
    for (std::size_t k = 0; k + 1 < n; ++k) out.concat_length += frame_distance(frames[k], frames[k + 1]);
    out.direct_length = frame_distance(frames.front(), frames.back());

    const detail::PrecisionScope scope(static_cast<mpfr_prec_t>(128 + 4 * bits));
    // in the first frame the path starts at i; send the geodesic to the imaginary axis
    const auto end = sigma_point_big(rel.back());
    const bool degenerate = rel.back().a * rel.back().c + rel.back().b * rel.back().d == 0 &&
                            rel.back().c * rel.back().c + rel.back().d * rel.back().d == 1;
    const bool vertical = rel.back().a * rel.back().c + rel.back().b * rel.back().d == 0;
    Big ea, eb;  // ideal endpoints, eb unused when vertical
    if (!vertical) {
        const Big c0 = (end.x * end.x + end.y * end.y - Big(1)) / (Big(2) * end.x);
        const Big r = sqrt(Big(1) + c0 * c0);
        if (!(c0 < Big(0))) {
            eb = c0 + r;
            ea = Big(-1) / eb;
        } else {
            ea = c0 - r;
            eb = Big(-1) / ea;
        }
    }
    std::vector<Big> pos;
    for (const auto& m : rel) {
        const auto z = sigma_point_big(m);
        Big wx, wy;
        if (degenerate) {
            wx = z.x;
            wy = z.y;
        } else if (vertical) {
            wx = z.x;
            wy = z.y;
        } else {
            // (z - a) / (z - b)
            const Big nx = z.x - ea, dx = z.x - eb;
            const Big den = dx * dx + z.y * z.y;
            wx = (nx * dx + z.y * z.y) / den;
            wy = (z.y * dx - nx * z.y) / den;
        }
        wy = fabs(wy);
        double dev;
        if (degenerate) {
            dev = frame_distance(SurfaceMap::identity(), m);
            pos.emplace_back(0);
        } else {
            dev = static_cast<double>(asinh(fabs(wx) / wy).ld() / 2);
            pos.push_back(log(wx * wx + wy * wy) / Big(4));
        }
        out.deviations.push_back(dev);
        out.deviation_sum += dev;
        out.max_deviation = std::max(out.max_deviation, dev);
    }
    Big travelled(0);
    for (std::size_t k = 0; k + 1 < n; ++k) travelled = travelled + fabs(pos[k + 1] - pos[k]);
    out.backtrack = std::max(0.0, static_cast<double>((travelled - fabs(pos.back() - pos.front())).ld()));
    out.bound = 2 * out.deviation_sum + out.backtrack;
    return out;
}

bool thick_check(const TeichPoint& z, double eps0) {
    if (!(eps0 > 0)) fail(ErrorKind::domain, "eps0 must be positive");
    return systole(z) >= eps0;
}

Int relative_cf_bound(const FareyMarking& m1, const FareyMarking& m2) {
    const SurfaceMap back = marking_frame(m1).inverse();
    Int best = 0;
    for (const Slope* s : {&m2.base, &m2.transversal}) {
        const Slope x = apply_map(back, *s);
        if (x.is_infinite()) continue;
        for (const auto& a : cf_expansion(x))
            if (abs(a) > best) best = abs(a);
    }
    return best;
}

SegmentThickness segment_thick_check(const TeichPoint& z, const TeichPoint& w, double eps0,
                                     int samples) {
    if (!(eps0 > 0)) fail(ErrorKind::domain, "eps0 must be positive");
    if (samples < 2) fail(ErrorKind::domain, "segment check needs at least two samples");
    SegmentThickness out;
    out.min_systole = std::numeric_limits<double>::infinity();
    for (int j = 0; j < samples; ++j) {
        const double t = static_cast<double>(j) / (samples - 1);
        const double s = systole(teich_geodesic(z, w, t));
        if (s < out.min_systole) {
            out.min_systole = s;
            out.argmin_t = t;
        }
    }
    out.thick = out.min_systole >= eps0;
    out.max_cf_coefficient = relative_cf_bound(shortest_marking(z), shortest_marking(w));
    return out;
}

}  // namespace glueforge::torus
