#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "craft/geom.hpp"
#include "craft/raster.hpp"

namespace craft::structure {

using geom::MeshPart;
using geom::PartClass;
using geom::PrimitivePart;

enum class Provenance : std::uint8_t { Rendered, Mirrored, Generated };

const char* to_string(Provenance p);
Provenance provenance_from_string(std::string_view name);

/// One template part instance in the template canonical frame.
struct PartInstance {
    int id = 0;  // equals its render label for rendered instances
    PartClass part_class = PartClass::Wheel;
    MeshPart geometry;
    Provenance provenance = Provenance::Rendered;
    int source_id = -1;  // mirrored copies: id of their source instance
};

/// Template part instances in render-label order: instance k carries
/// id k + 1, matching the ByInstance legend of `render_labels`.
std::vector<PartInstance> extract_instances(const geom::LabeledMesh& mesh);

/// Greedy correspondence render label -> input label: among same-class
/// (rendered mask, input mask) pairs, assign in ascending centroid distance,
/// each input label used at most once. Pixel-less labels never match; ties
/// break on (render label, input label).
std::map<int, int> correspond_parts(const raster::LabelMap& render,
                                    const raster::LabelMap& input);

/// Keeps exactly the instances with a corresponding input mask.
/// Throws std::runtime_error("no parts retained") when nothing survives.
std::vector<PartInstance> filter_parts(std::span<const PartInstance> instances,
                                       const std::map<int, int>& correspondence);

/// Left-right completion: an instance lying entirely on one side of x = 0
/// (every vertex x < -1e-4 or every x > +1e-4) whose reflected bounding box
/// overlaps no same-class instance gets a mirrored copy appended. Input
/// instances are returned unchanged, copies carry fresh ids and provenance
/// Mirrored.
std::vector<PartInstance> mirror_completion(std::span<const PartInstance> instances);

struct AxleOutput {
    std::vector<PrimitivePart> axles;
    std::vector<std::string> unpaired;  // wheel ids left over; caller warns
};

/// Connects paired wheels with internal cylinders. Two wheels pair when their
/// cylinder axes are parallel within 5 degrees and the center-to-center
/// direction is parallel to both axes within 5 degrees; pairing is greedy
/// nearest-first. Each axle is a cylinder of length = center distance and
/// radius = 0.2 x the pair's wheel radius, class Axle. Only the truck and bus
/// pipelines call this; the operation itself does not inspect object class.
AxleOutput generate_axles(std::span<const geom::PrimitivePart> wheels);

}  // namespace craft::structure
