#pragma once

// Rewrites of gluing graphs: combining and collapsing I-bundle stacks,
// compressions, compression decompositions and transparency.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glueforge/certificate.hpp"
#include "glueforge/hypgraph.hpp"

namespace glueforge::transforms {

using gluing::AbstractMarking;
using gluing::GluingGraph;
using gluing::json;
using gluing::Slot;

struct StackCertificate {
    std::int64_t h = 0, R = 0;
    std::vector<AbstractMarking> nu;           // one frame: the entry coordinates
    std::vector<std::int64_t> heights;         // d(nu_i, nu_i+1)
    std::vector<std::int64_t> surface_heights; // heights in X of the surfaces crossed
    std::vector<surface::SupProjection> step_projections;
    std::vector<std::int64_t> middle_distances;  // d(nu_i, [nu_i-1, nu_i+1]), i = 1..n-1
    bool cond_i = true, cond_ii = true, cond_iii = true;
    std::optional<std::size_t> witness_i, witness_ii, witness_iii;

    std::vector<surface::Curve> path;  // concatenated geodesic
    hyp::QuasigeodesicReport quasi;    // K' = quasi.global_k
    std::int64_t combined = 0;         // d(nu_0, nu_n)
    std::int64_t sum_heights = 0;
    double lower_bound = 0;            // sum/K' - K'
    bool lower_bound_holds = true;     // exact rational comparison
    std::optional<surface::SupProjection> end_projection;
    std::int64_t farey_fellow = 0;     // Hausdorff distance, path vs direct geodesic
    std::optional<torus::BrokenPathReport> teich;

    hyp::Ratio k_prime() const { return quasi.global_k; }
    json to_json() const;
};

/// Certificate for a marking sequence already expressed in one frame.
StackCertificate certify_sequence(const std::vector<AbstractMarking>& nu, std::int64_t h, std::int64_t R,
                                  std::int64_t denominator_bound = torus::kDefaultDenominatorBound);

/// Pushes the neighbour markings across each surface of the stack into the
/// coordinates of its first piece's outer end and certifies them.
StackCertificate combine_stack(const GluingGraph& X, const gluing::Stack& stack, std::int64_t h, std::int64_t R,
                               std::int64_t denominator_bound = torus::kDefaultDenominatorBound);

struct Block {
    Slot from;
    std::optional<Slot> to;                 // empty: the walk left through an unburied end
    std::vector<std::string> bundles;       // I-bundle pieces collapsed, in walk order
    std::vector<std::size_t> identifications;  // indices into X.identifications
};

struct NewSlotReport {
    Slot slot;
    std::optional<std::int64_t> height;
    std::int64_t surface_sum = 0;  // H: heights in X mapping to this surface
    double lower_bound = 0;
    bool lower_bound_holds = true;
    std::optional<surface::SupProjection> sup;
    bool within_2R = true;
    bool meridian_applicable = false;
    std::int64_t disk_distance = 0, meridian_excess = 0;
};

struct CollapseResult {
    GluingGraph collapsed;
    bool fibered = false;
    std::vector<Block> correspondence;
    std::vector<StackCertificate> certificates;  // one per block through bundles
    std::vector<NewSlotReport> slots;
    std::int64_t R = 0, h = 0, R_prime = 0;
    json to_json(bool emit_correspondence) const;
};

CollapseResult collapse_ibundles(const GluingGraph& X, std::int64_t R, std::int64_t h,
                                 std::int64_t denominator_bound = torus::kDefaultDenominatorBound);

struct SingleCollapseCheck {
    std::int64_t new_height = 0;
    std::int64_t d_mu0_nu0 = 0, d_mu0_nu1 = 0, diam = 0, clause_c = 0;
    std::int64_t rhs = 0;  // d(mu0,nu0) + d(mu0,nu1) - 2R - diam
    bool holds = true;
};

/// Height identity for one trivial I-bundle between two non-bundle pieces.
SingleCollapseCheck single_collapse_check(const GluingGraph& X, const std::string& bundle, std::int64_t R);

struct CompressionStep {
    gluing::ManifoldSpec body;  // kind compression-body
    std::string piece;
    Slot target;                // an unburied slot of the gluing built so far
    surface::MapDescriptor map; // exterior coordinates to target coordinates
};

/// Attaches compression bodies by their exterior boundaries, starting from M alone.
/// The budget defaults to the total genus of M's non-toroidal boundaries.
GluingGraph build_compression(const gluing::ManifoldSpec& M, const std::vector<CompressionStep>& steps,
                              std::optional<std::int64_t> budget = std::nullopt,
                              const std::string& core_piece = "core");

struct Component {
    std::string kind;                    // compression-of-core, compression-body-chain, compression-body-tree
    std::vector<std::string> parts;      // piece/part
    std::vector<std::string> pieces;
    std::vector<std::size_t> identifications;
    std::vector<std::string> central;    // parts glued exterior to exterior
};

struct DecompositionResult {
    std::vector<Component> components;
    std::vector<std::size_t> cut;             // indices into X.identifications
    std::vector<std::string> internal_cuts;   // piece: partA.b ~ partB.b
    std::vector<std::string> dropped;         // I-bundle pieces passed through
    json to_json() const;
};

DecompositionResult full_and_maximal_decomposition(const GluingGraph& X);

/// Rebuilds the gluing from the decomposition: every identification of X
/// appears once across the components and the cut list.
GluingGraph reglue(const GluingGraph& X, const DecompositionResult& d);

struct TransparencyEntry {
    std::string id, type;
    std::vector<gluing::FootprintEntry> footprint, adjusted;
    bool transparent = false;
    std::string redundant_with;  // kept representative when removed as parallel
};

struct TransparencyReport {
    std::string piece;
    std::vector<TransparencyEntry> entries;
    json induced;  // induced characteristic submanifold metadata
    json to_json() const;
};

TransparencyReport transparency_and_induced_charsub(const GluingGraph& X, const std::string& piece);

}  // namespace glueforge::transforms
