#pragma once

#include <map>
#include <string>
#include <vector>

#include "craft/geom.hpp"
#include "craft/match.hpp"
#include "craft/raster.hpp"

namespace craft::evalkit {

using geom::kPartClassCount;
using geom::Mat3;
using geom::ObjectClass;
using geom::PartClass;
using geom::Primitive;
using geom::PrimitivePart;

/// Per-instance evaluation outcome. `success` is the conjunction of the three
/// boolean metrics.
struct EvalReport {
    bool vp_acc = false;
    bool part_acc = false;
    bool sil_acc = false;
    bool success = false;
    double part_iou = 0.0;
    double e_measure = 0.0;
};

/// Part-class instance counts; classes absent from the map count as zero.
using PartCounts = std::map<PartClass, int>;

/// True when the geodesic angle between the rotations is at most 30 degrees.
/// Bus and table are symmetric under a 180-degree yaw, so for those classes
/// the smaller of the direct and yaw-flipped angles decides.
bool vp_accuracy(const Mat3& pred_rot, const Mat3& gt_rot, ObjectClass object_class);

/// True when per-class counts match exactly. Axles are ignored on both sides;
/// ground truth never contains them.
bool part_count_accuracy(const PartCounts& pred, const PartCounts& gt);

/// True when silhouette IoU is strictly above the threshold.
bool silhouette_accuracy(const raster::Mask& pred, const raster::Mask& gt, double threshold = 0.5);

/// Mean per-class silhouette IoU over the classes present in the ground
/// truth. A class missing from the prediction scores zero. A ground truth
/// with no foreground yields 1 (nothing to miss).
double part_iou(const raster::LabelMap& pred, const raster::LabelMap& gt);

/// Enhanced-alignment measure between two binary masks of equal resolution.
/// Both maps are biased by their means, the pointwise alignment
/// xi = 2*phi_gt*phi_pred / (phi_gt^2 + phi_pred^2) is mapped through
/// (1+xi)^2/4 and averaged. A constant ground truth short-circuits: the score
/// is the mean agreement with that constant, so equal constant maps give 1
/// and opposite constant maps give 0.
double e_measure(const raster::Mask& pred, const raster::Mask& gt);

/// Builds a report from the individual metrics; `success` is their conjunction.
inline EvalReport make_report(bool vp, bool part, bool sil, double piou, double em) {
    return {vp, part, sil, vp && part && sil, piou, em};
}

// =============================================================================
// Exhaustive-search baseline
// =============================================================================

enum class BaselineMetric { MIoU, MEMax };

/// Inputs for the exhaustive baseline. The ground-truth label map supplies the
/// target silhouettes, the camera the viewpoint to render candidates from, and
/// the part counts the number of scene objects each combination must commit per
/// part class. Classes listed in `same_dims` must receive identically sized
/// objects across all their instances.
struct BaselineConfig {
    BaselineMetric metric = BaselineMetric::MIoU;
    raster::LabelMap gt_masks;
    raster::Camera gt_camera;
    PartCounts part_counts;
    std::vector<PartClass> same_dims = {PartClass::Wheel, PartClass::FurnitureLeg};
};

/// One slot of a combination: the object type (canonical dims) committed to the
/// `instance`-th part of class `cls`.
struct BaselineChoice {
    PartClass cls = PartClass::Wheel;
    int instance = 0;
    Primitive type;
};

struct BaselineResult {
    double score = 0.0;
    std::string template_id;
    std::vector<BaselineChoice> choices;
};

/// Returns the id of the first template (in class, variant order) whose
/// per-class part counts equal `counts` exactly. Throws std::invalid_argument
/// when no template matches.
std::string find_baseline_template(const PartCounts& counts);

/// Assembles a candidate model: each choice replaces the dims of the matching
/// template part (same class, same within-class index) while the template's
/// canonical translation is kept. Cuboid dims map largest-to-largest onto the
/// part's axes; cylinders keep the part's axis. All dims are divided by the
/// largest committed dimension so the model stays at template scale.
std::vector<PrimitivePart> place_combination(const std::vector<PrimitivePart>& template_parts,
                                             const std::vector<BaselineChoice>& choices);

/// Renders the parts with the ground-truth camera, crops render and ground
/// truth to the square hull of their combined foreground, rescales both crops
/// to 256x256, and averages the configured per-class metric over the classes
/// present in the ground truth.
double score_combination(const std::vector<PrimitivePart>& parts, const BaselineConfig& cfg);

/// Enumerates every assignment of scene object types to part instances,
/// skipping combinations that mismatch shapes, violate `same_dims`, or demand
/// more objects of a type than the scene holds. Returns the highest-scoring
/// combination; ties break on the lexicographically smallest sequence of type
/// dims. Throws std::runtime_error when no combination is feasible.
BaselineResult baseline_search(const std::vector<match::SceneObject>& scene,
                               const BaselineConfig& cfg);

}  // namespace craft::evalkit
