#pragma once

// Decorated manifolds, gluing graphs and their JSON form.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "glueforge/surface.hpp"

namespace glueforge::gluing {

using surface::json;
using surface::AbstractMarking;
using surface::BackendHandle;
using surface::Curve;
using surface::DiskSet;
using surface::MapDescriptor;

enum class ManifoldKind { generic, trivial_ibundle, twisted_ibundle, compression_body };
std::string to_string(ManifoldKind k);

struct BoundarySpec {
    std::string id;
    BackendHandle backend;
    std::optional<AbstractMarking> decoration;  // absent only on toroidal boundaries
    bool compressible = false;
    bool toroidal = false;
    bool exterior = false;  // exterior boundary of a compression body
    DiskSet disks;
    int genus = 1;
    std::vector<Curve> window_frames;
};

struct EssentialRecord {
    std::string kind;  // "disk" or "annulus"
    std::vector<std::string> boundaries;
};

struct FootprintEntry {
    std::string boundary;
    std::string label;
};

struct CharPiece {
    std::string id;
    std::string type;  // "ibundle", "solidtorus", "acylindrical"
    std::vector<FootprintEntry> footprint;
    std::string parallel_class;  // empty: no declared parallels
};

struct SplitPart {
    std::string id;
    std::string kind;                     // "core" or "compression-body"
    std::vector<std::string> boundaries;  // boundaries of the manifold owned by this part
    std::string exterior;                 // compression bodies: the exterior boundary
    std::vector<std::string> interior;    // internal boundary names
};

struct InternalGluing {
    std::string part_a, boundary_a, part_b, boundary_b;
};

struct Splitting {
    bool declared = false;
    std::vector<SplitPart> parts;
    std::vector<InternalGluing> internal;
};

struct ManifoldSpec {
    std::string id;
    ManifoldKind kind = ManifoldKind::generic;
    std::vector<BoundarySpec> boundaries;
    std::vector<EssentialRecord> essential;
    std::vector<CharPiece> jsj;
    std::optional<MapDescriptor> exchange;  // trivial I-bundle: end 0 coordinates to end 1
    std::optional<MapDescriptor> deck;      // twisted I-bundle: deck involution of the cover
    Splitting splitting;

    const BoundarySpec* find(const std::string& boundary) const;
    const BoundarySpec& at(const std::string& boundary) const;
    std::vector<const BoundarySpec*> nontoroidal() const;
};

struct Slot {
    std::string piece, boundary;
    std::string to_string() const { return piece + ":" + boundary; }
    friend auto operator<=>(const Slot&, const Slot&) = default;
    friend bool operator==(const Slot&, const Slot&) = default;
};

struct Piece {
    std::string id, manifold;
};

struct Identification {
    Slot a, b;
    MapDescriptor map;  // coordinates of a to coordinates of b
};

struct Partner {
    Slot other;
    MapDescriptor to_other;  // this slot's coordinates to the partner's
    std::size_t identification = 0;
};

struct Stack {
    std::vector<std::string> pieces;  // end to end
    bool cyclic = false;              // closes up on itself
};

struct Params {
    std::optional<std::int64_t> R, D, h;
    std::optional<double> eps0;
    std::optional<std::int64_t> samples, denom_bound, seed, budget;
};

class GluingGraph {
public:
    std::vector<ManifoldSpec> manifolds;
    std::vector<Piece> pieces;
    std::vector<Identification> identifications;
    std::map<Slot, AbstractMarking> lambda;
    Params params;

    const ManifoldSpec& manifold(const std::string& id) const;
    const ManifoldSpec& manifold_of(const std::string& piece) const;
    const Piece& piece(const std::string& id) const;
    const BoundarySpec& boundary(const Slot& s) const;
    /// All non-toroidal slots, in piece order then boundary order.
    std::vector<Slot> slots() const;
    const std::map<Slot, Partner>& psi() const { return psi_; }
    bool buried(const Slot& s) const { return psi_.count(s) != 0; }
    /// Maximal chains of trivial I-bundle pieces.
    const std::vector<Stack>& stacks() const { return stacks_; }
    /// Every piece is an I-bundle.
    bool fibered() const;

    /// Checks every invariant and builds the involution; throws glueforge::Error.
    void finalize();

private:
    std::map<std::string, std::size_t> manifold_index_, piece_index_;
    std::map<Slot, Partner> psi_;
    std::vector<Stack> stacks_;
};

ManifoldSpec manifold_from_json(const json& j);
json manifold_to_json(const ManifoldSpec& m);
void validate_manifold(const ManifoldSpec& m);

GluingGraph validate_gluing(const json& spec);
GluingGraph load_gluing_file(const std::string& path);
json to_json(const GluingGraph& g);

/// A torus map is a free involution iff M^2 = I, det -1 and M = I mod 2; a graph
/// map iff it is an involution without fixed vertices.
bool free_involution(const MapDescriptor& m);

json params_to_json(const Params& p);

/// Trivial I-bundle end exchange (E0 to E1 coordinates): the declared map, else
/// the reflection on the torus and the identity table on a graph.
MapDescriptor end_exchange(const ManifoldSpec& m);

}  // namespace glueforge::gluing
