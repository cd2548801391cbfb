#pragma once

#include "craft/geom.hpp"
#include "craft/raster.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace craft::poseopt {

using geom::Vec3;

struct OptimConfig {
    int n_views = 40;
    int n_batches = 5;
    int steps = 100;
    double step_size = 0.1;
    double lambda_iou = 0.75;
    double lambda_miou = 0.15;
    double lambda_dist = 0.15;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One camera + per-axis mesh scale being optimized against the target
/// silhouette. Scale stays clamped to [0.5, 2.0].
struct PoseHypothesis {
    raster::Camera cam;
    Vec3 scale{1, 1, 1};
    std::vector<double> loss_history;  // L1 loss per optimizer step, nonincreasing
};

struct PoseResult {
    std::string template_id;
    int hypothesis_index = 0;
    PoseHypothesis hypothesis;
    raster::LabelMap render;  // label render at the final pose
    double l_iou = 0;
    double l_miou = 0;
    double l_dist = 0;
    double l_total = 0;
};

/// n_views x n_batches starting poses: azimuth stratified over [0, 2pi) within
/// each batch, elevation in [-10 deg, 60 deg], distance in [1.5, 4.0], unit
/// scale. Deterministic per cfg.seed.
std::vector<PoseHypothesis> init_hypotheses(const OptimConfig& cfg);

/// Mean absolute pixel difference of two binary masks, in [0, 1].
double l1_silhouette_loss(const raster::Mask& render, const raster::Mask& target);

/// Gradient-free coordinate descent over (azimuth, elevation, distance,
/// offset x/y, scale x/y/z): every step probes each parameter at +-step and
/// accepts the best strictly improving single move; all steps halve after 10
/// consecutive rejections. Runs cfg.steps iterations (early exit once the
/// loss hits 0 or steps shrink below 1e-12).
PoseHypothesis optimize_hypothesis(const geom::LabeledMesh& mesh, const raster::Mask& target,
                                   const PoseHypothesis& h, const OptimConfig& cfg);
PoseHypothesis optimize_hypothesis(const raster::LabeledSoup& soup, const raster::Mask& target,
                                   const PoseHypothesis& h, const OptimConfig& cfg);

/// 1 - IoU of the two silhouettes; two empty masks agree (loss 0).
double loss_iou(const raster::Mask& target_sil, const raster::Mask& render_sil);

/// Mean over part classes present in `target` of (1 - class IoU); a class
/// missing from `render` contributes 1.
double loss_miou(const raster::LabelMap& target, const raster::LabelMap& render);

/// Mean over part classes present in `target` of the centroid distance
/// between class masks, normalized by the largest possible centroid distance;
/// an empty mask on either side contributes 1.
double loss_dist(const raster::LabelMap& target, const raster::LabelMap& render);

/// True if `a` precedes `b` under the selection order: lower l_total, then
/// lower l_iou, then lower template_id, then lower hypothesis index.
bool result_precedes(const PoseResult& a, const PoseResult& b);

/// Argmin of l_total with the deterministic tie chain above. Throws on empty.
const PoseResult& select_best(std::span<const PoseResult> results);

/// Full search: optimizes every hypothesis against every template and returns
/// the selected PoseResult. Render resolution follows the input map.
PoseResult run_pose_search(std::span<const geom::LabeledMesh> templates,
                           const raster::LabelMap& input, const OptimConfig& cfg);

}  // namespace craft::poseopt
