#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "craft/evalkit.hpp"
#include "craft/geom.hpp"
#include "craft/match.hpp"
#include "craft/poseopt.hpp"
#include "craft/raster.hpp"
#include "json.hpp"

namespace craft::cli {

using json = nlohmann::ordered_json;

/// Options shared by every subcommand: the parsed configuration document, the
/// output directory, and the run seed. Every output file embeds `config` and
/// `seed` so runs are reproducible from their artifacts alone.
struct RunContext {
    json config;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
};

// =============================================================================
// Serialization
// =============================================================================

json camera_to_json(const raster::Camera& cam);
raster::Camera camera_from_json(const json& j);

/// Rigid transforms travel as row-major 4x4 matrices.
json transform_to_json(const geom::RigidTransform& t);
geom::RigidTransform transform_from_json(const json& j);

/// Cuboids carry `dims: [dx, dy, dz]`; cylinders `dims: [radius, length]`
/// plus an `axis` field.
json primitive_to_json(const geom::Primitive& prim);
geom::Primitive primitive_from_json(const json& j);

json part_to_json(const geom::PrimitivePart& part);
geom::PrimitivePart part_from_json(const json& j);

/// Scene files are JSON arrays of `{id, shape, dims}` objects with dims in
/// millimeters.
std::vector<match::SceneObject> load_scene(const std::string& path);
json scene_to_json(const std::vector<match::SceneObject>& scene);

void write_json(const json& j, const std::string& path);
json read_json(const std::string& path);

// =============================================================================
// Legend interpretation
// =============================================================================

/// The object class implied by the part classes in a legend. Exactly one
/// class must be exclusive to a single object class; otherwise throws
/// std::runtime_error("object class undeterminable").
geom::ObjectClass object_class_from_legend(const std::map<int, geom::PartClass>& legend);

/// Per-class label multiplicities. Meaningful for ByInstance legends, where
/// each instance holds its own label.
evalkit::PartCounts counts_from_legend(const std::map<int, geom::PartClass>& legend);

// =============================================================================
// Commands
// =============================================================================

/// Pose search over the templates of the class implied by the input legend.
/// Writes pose.json and pose_render.pgm. Config: {"input": <label map path>,
/// "optim": {...overrides...}}.
void cmd_pose(const RunContext& ctx);

/// Structure completion and primitive simplification for a finished pose.
/// Writes model.json. Config: {"pose": <pose.json>, "input": <label map>,
/// "samples": <int>}.
void cmd_simplify(const RunContext& ctx);

/// Proportion-based scene matching. Writes proposal.json.
/// Config: {"model": <model.json>, "scene": <scene.json>}.
void cmd_match(const RunContext& ctx);

/// Evaluation report for a proposal against ground truth annotations. Writes
/// report.json, or report_<k>.json plus aggregate.csv when the config holds a
/// "cases" array. Config per case: {"proposal": <proposal.json>, "pose":
/// <pose.json>, "gt_mask": <label map>, "gt_camera": {...}}.
void cmd_evaluate(const RunContext& ctx);

/// Exhaustive baseline search. Writes baseline.json. Config: {"gt_mask":
/// <label map>, "gt_camera": {...}, "scene": <scene.json>, "metric":
/// "miou"|"me_max", optional "part_counts", optional "same_dims"}.
void cmd_baseline(const RunContext& ctx);

/// Full chain pose -> simplify -> match (-> evaluate when "gt_camera" is
/// present), emitting every stage artifact plus craft_render.pgm. Config:
/// {"input": <label map>, "scene": <scene.json>, "optim": {...}, "samples":
/// <int>, "gt_camera": {...}}.
void cmd_pipeline(const RunContext& ctx);

}  // namespace craft::cli
