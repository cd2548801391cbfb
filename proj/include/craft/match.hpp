#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "craft/geom.hpp"

namespace craft::match {

using geom::PrimitivePart;

/// Characteristic dimensions, sorted descending. Cuboids contribute their
/// three extents, cylinders (length, diameter, diameter); sorting makes
/// dimension differences orientation-independent.
using DimVector = std::array<double, 3>;

DimVector dim_vector(const geom::Primitive& prim);

/// Entrywise division by the leading entry; result starts with 1.
DimVector ratios_of(const DimVector& dims);

/// One physical object available in the scene; dims in millimeters.
struct SceneObject {
    std::string id;
    geom::Primitive primitive;
};

/// A model part reduced to comparable dimensions. `dims` is the DimVector
/// divided by the reference dimension (the largest dimension of p_max);
/// `ratios` is the part's own proportion vector.
struct NormalizedPart {
    std::string id;
    geom::PartClass cls = geom::PartClass::Wheel;
    geom::Primitive::Shape shape = geom::Primitive::Shape::Cuboid;
    DimVector dims{};
    DimVector ratios{};
    geom::RigidTransform transform;  // carried through from the simplified part
};

/// Part with the single largest dimension; ties prefer larger volume, then
/// lower id. Throws on empty input.
const PrimitivePart& find_largest_part(std::span<const PrimitivePart> parts);

/// Every part's DimVector divided by max(p_max dims); p_max ends up with a
/// leading entry of exactly 1.
std::vector<NormalizedPart> normalize_parts(std::span<const PrimitivePart> parts,
                                            const PrimitivePart& p_max);

/// Dual-ranking anchor selection among scene objects of p_max's shape: rank A
/// ascends by mean absolute difference between the object's self-normalized
/// DimVector and p_max's, rank B descends by physical volume; the winner
/// minimizes the mean of its two 1-based rank positions. Ties prefer the
/// better rank-A position, then the lower id.
/// Throws std::runtime_error("anchor shape unavailable") when no same-shape
/// object exists.
const SceneObject& find_anchor(std::span<const SceneObject> scene,
                               const NormalizedPart& p_max_n);

struct CraftProposal {
    struct Assignment {
        std::string part_id;
        std::string object_id;
        geom::RigidTransform transform;
    };
    std::vector<Assignment> assignments;  // injective on object ids
};

/// Greedy completion: scene dims are normalized by the anchor's largest
/// physical dimension, parts are processed in descending max-dim order, and
/// each takes the unselected same-shape object minimizing
/// sqrt(eps_dim^2 + eps_ratio^2) where eps_dim is the mean absolute DimVector
/// difference and eps_ratio the mean absolute ratio difference. The anchor is
/// pre-assigned to p_max. Throws when a part finds no same-shape object left,
/// naming the part.
CraftProposal match_remaining(std::span<const NormalizedPart> parts,
                              std::span<const SceneObject> scene, const SceneObject& anchor,
                              const std::string& p_max_id);

/// The full three-step search: largest part, anchor, greedy completion.
CraftProposal build_proposal(std::span<const PrimitivePart> parts,
                             std::span<const SceneObject> scene);

}  // namespace craft::match
