#pragma once

// Model-metric skeleton of a gluing: opaque piece blocks joined by tubes
// over Teichmuller geodesic segments, with sampled flat-torus fibers.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glueforge/gluing.hpp"

namespace glueforge::model {

using gluing::GluingGraph;
using gluing::json;
using gluing::Slot;
using torus::SurfaceMap;
using torus::TeichPoint;

inline constexpr double kSigmaTolerance = 1e-9;

struct TubeSample {
    double t = 0;
    TeichPoint point;
    double systole = 0;
    torus::Slope shortest;
};

enum class TubeKind { gluing, self_gluing, boundary };
std::string to_string(TubeKind k);

struct TubeBlock {
    TubeKind kind = TubeKind::gluing;
    Slot at;                        // coordinates of the tube
    std::optional<Slot> across;     // the other slot; empty for boundary tubes
    std::optional<std::size_t> identification;
    bool geometric = true;          // false: finite-graph slot, combinatorial only
    std::optional<torus::FareyMarking> mu, nu;  // mu at `at`, nu the far end in the same coordinates
    TeichPoint sigma_a, sigma_b;
    double length = 0;
    bool degenerate = false;
    std::optional<std::int64_t> farey_height;
    std::optional<SurfaceMap> involution;  // self-gluings
    bool involution_ok = true;
    std::vector<TubeSample> samples;
    std::string name() const;
};

struct Anchor {
    std::string boundary;
    std::optional<TeichPoint> sigma;  // torus boundaries only
};

struct PieceBlock {
    std::string piece, manifold;
    std::vector<Anchor> anchors;
    std::vector<std::size_t> tubes;  // incidence
};

struct ModelSkeleton {
    std::vector<PieceBlock> pieces;
    std::vector<TubeBlock> tubes;
    std::vector<std::string> warnings;
    int samples_per_tube = 0;
    double total_length = 0;
    std::optional<double> min_systole;

    json to_json() const;
};

ModelSkeleton build_skeleton(const GluingGraph& X, int samples = 9);
/// n equally spaced samples of the tube; a degenerate tube gives two identical samples.
std::vector<TubeSample> sample_tube(const TubeBlock& t, int n);

struct TubeThickness {
    std::string tube;
    std::optional<double> min_systole;
    double argmin_t = 0;
    bool thick = true;
    std::optional<std::string> max_cf_coefficient;
    std::optional<std::string> sup_projection;
};

struct ThicknessReport {
    double eps0 = 0;
    std::vector<TubeThickness> tubes;
    bool pass = true;
    // cross-check of thin fibers against annular coefficients
    std::optional<std::string> min_coefficient_thin, max_coefficient_thick;
    bool separated = true;
    json to_json() const;
};

ThicknessReport verify_thickness(const ModelSkeleton& s, double eps0);

/// `json` or `obj`; obj sweeps each tube as rings of `fiber_resolution` vertices.
std::string export_skeleton(const ModelSkeleton& s, const std::string& format, int fiber_resolution = 16);
ModelSkeleton skeleton_from_json(const json& j);

struct ChainCompatibility {
    double concat = 0;  // tube, bundle, tube
    double direct = 0;  // the collapsed tube
    double bound = 0;
    bool holds = true;
};

/// core - bundle - core: the collapsed tube against the three-segment path.
ChainCompatibility chain_compatibility(const GluingGraph& X, const std::string& bundle);

}  // namespace glueforge::model
