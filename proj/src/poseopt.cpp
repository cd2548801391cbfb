#include "craft/poseopt.hpp"

#include "craft/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace craft::poseopt {

namespace {

constexpr int kParamCount = 8;
constexpr double kMinStep = 1e-12;
constexpr int kRejectionsBeforeHalving = 10;
// Keeps the look-at frame away from the up-vector singularity at +-90 deg.
constexpr double kElevationLimit = 1.459;  // ~83.6 deg
constexpr double kScaleMin = 0.5, kScaleMax = 2.0;
constexpr double kDistanceMin = 0.1, kDistanceMax = 50.0;

// Optimizer state without the loss history; cheap to copy per probe.
struct Params {
    raster::Camera cam;
    Vec3 scale{1, 1, 1};
};

double& param_ref(Params& h, int p) {
    switch (p) {
        case 0: return h.cam.azimuth;
        case 1: return h.cam.elevation;
        case 2: return h.cam.distance;
        case 3: return h.cam.offset.x();
        case 4: return h.cam.offset.y();
        case 5: return h.scale.x();
        case 6: return h.scale.y();
        default: return h.scale.z();
    }
}

void clamp_params(Params& h) {
    h.cam.elevation = std::clamp(h.cam.elevation, -kElevationLimit, kElevationLimit);
    h.cam.distance = std::clamp(h.cam.distance, kDistanceMin, kDistanceMax);
    for (int a = 0; a < 3; ++a) h.scale[a] = std::clamp(h.scale[a], kScaleMin, kScaleMax);
}

struct ClassMasks {
    std::vector<geom::PartClass> classes;  // classes with pixels in the target
    std::vector<raster::Mask> masks;
};

ClassMasks present_classes(const raster::LabelMap& map) {
    ClassMasks out;
    for (int i = 0; i <= geom::kPartClassCount; ++i) {  // includes Axle renders
        const auto cls = static_cast<geom::PartClass>(i);
        auto mask = raster::class_mask(map, cls);
        if (mask.count() > 0) {
            out.classes.push_back(cls);
            out.masks.push_back(std::move(mask));
        }
    }
    return out;
}

struct Overlap {
    int a_only = 0, b_only = 0, both = 0;
};

Overlap overlap_counts(const raster::Mask& a, const raster::Mask& b) {
    if (a.width != b.width || a.height != b.height) throw std::runtime_error("mask resolution mismatch");
    Overlap o;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const bool pa = a.data[i] != 0, pb = b.data[i] != 0;
        o.a_only += pa && !pb;
        o.b_only += pb && !pa;
        o.both += pa && pb;
    }
    return o;
}

bool mask_centroid(const raster::Mask& m, double& cx, double& cy) {
    long long sx = 0, sy = 0, n = 0;
    for (int y = 0; y < m.height; ++y) {
        const std::uint8_t* row = m.data.data() + static_cast<std::size_t>(y) * m.width;
        for (int x = 0; x < m.width; ++x) {
            if (row[x]) {
                sx += x;
                sy += y;
                ++n;
            }
        }
    }
    if (n == 0) return false;
    cx = static_cast<double>(sx) / static_cast<double>(n);
    cy = static_cast<double>(sy) / static_cast<double>(n);
    return true;
}

}  // namespace

void OptimConfig::validate() const {
    if (n_views < 1 || n_batches < 1 || steps < 1) throw std::runtime_error("optimizer counts must be >= 1");
    if (step_size < 0) throw std::runtime_error("step size must be nonnegative");
    if (lambda_iou < 0 || lambda_miou < 0 || lambda_dist < 0) {
        throw std::runtime_error("loss weights must be nonnegative");
    }
}

std::vector<PoseHypothesis> init_hypotheses(const OptimConfig& cfg) {
    cfg.validate();
    Rng rng(substream(cfg.seed, "hypotheses"));

    constexpr double kDeg = M_PI / 180.0;
    std::vector<PoseHypothesis> out;
    out.reserve(static_cast<std::size_t>(cfg.n_views) * cfg.n_batches);
    const double stratum = 2.0 * M_PI / cfg.n_views;
    for (int b = 0; b < cfg.n_batches; ++b) {
        for (int v = 0; v < cfg.n_views; ++v) {
            PoseHypothesis h;
            h.cam.azimuth = (v + rng.uniform(0.0, 1.0)) * stratum;
            h.cam.elevation = rng.uniform(-10.0 * kDeg, 60.0 * kDeg);
            h.cam.distance = rng.uniform(1.5, 4.0);
            out.push_back(std::move(h));
        }
    }
    return out;
}

double l1_silhouette_loss(const raster::Mask& render, const raster::Mask& target) {
    const auto o = overlap_counts(render, target);
    return static_cast<double>(o.a_only + o.b_only) /
           (static_cast<double>(render.width) * render.height);
}

PoseHypothesis optimize_hypothesis(const raster::LabeledSoup& soup, const raster::Mask& target,
                                   const PoseHypothesis& start, const OptimConfig& cfg) {
    cfg.validate();
    const double pixels = static_cast<double>(target.width) * target.height;
    const int target_count = target.count();

    raster::SilhouetteRenderer renderer(target.width, target.height);
    const auto loss_of = [&](const Params& h) {
        const auto counts = renderer.render(soup, h.scale, h.cam, &target);
        // |render| + |target| - 2 |intersection|, averaged over pixels.
        return static_cast<double>(counts.rendered + target_count - 2 * counts.overlap) / pixels;
    };

    Params current{start.cam, start.scale};
    current.cam.width = target.width;
    current.cam.height = target.height;
    clamp_params(current);

    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(cfg.steps) + 1);

    double steps[kParamCount];
    const double factors[kParamCount] = {1, 1, 1, 0.5, 0.5, 0.5, 0.5, 0.5};
    for (int p = 0; p < kParamCount; ++p) steps[p] = cfg.step_size * factors[p];

    double loss = loss_of(current);
    history.push_back(loss);
    int rejections = 0;

    for (int it = 0; it < cfg.steps; ++it) {
        if (loss == 0.0) break;
        if (*std::max_element(steps, steps + kParamCount) < kMinStep) break;

        int best_param = -1;
        double best_value = 0, best_loss = loss;
        for (int p = 0; p < kParamCount; ++p) {
            for (const double dir : {+1.0, -1.0}) {
                Params probe = current;
                param_ref(probe, p) += dir * steps[p];
                clamp_params(probe);
                const double probe_loss = loss_of(probe);
                if (probe_loss < best_loss) {
                    best_loss = probe_loss;
                    best_param = p;
                    best_value = param_ref(probe, p);
                }
            }
        }

        if (best_param >= 0) {
            param_ref(current, best_param) = best_value;
            loss = best_loss;
            rejections = 0;
        } else {
            if (++rejections >= kRejectionsBeforeHalving) {
                for (double& s : steps) s *= 0.5;
                rejections = 0;
            }
        }
        history.push_back(loss);
    }

    PoseHypothesis out;
    out.cam = current.cam;
    out.scale = current.scale;
    out.loss_history = std::move(history);
    return out;
}

PoseHypothesis optimize_hypothesis(const geom::LabeledMesh& mesh, const raster::Mask& target,
                                   const PoseHypothesis& h, const OptimConfig& cfg) {
    return optimize_hypothesis(raster::soup_from_mesh(mesh, raster::LabelMode::ByClass), target, h, cfg);
}

double loss_iou(const raster::Mask& target_sil, const raster::Mask& render_sil) {
    const auto o = overlap_counts(target_sil, render_sil);
    const int uni = o.a_only + o.b_only + o.both;
    if (uni == 0) return 0.0;  // two empty masks agree
    return 1.0 - static_cast<double>(o.both) / uni;
}

double loss_miou(const raster::LabelMap& target, const raster::LabelMap& render) {
    const auto present = present_classes(target);
    if (present.classes.empty()) return 0.0;
    double sum = 0;
    for (std::size_t i = 0; i < present.classes.size(); ++i) {
        const auto render_mask = raster::class_mask(render, present.classes[i]);
        sum += loss_iou(present.masks[i], render_mask);
    }
    return sum / static_cast<double>(present.classes.size());
}

double loss_dist(const raster::LabelMap& target, const raster::LabelMap& render) {
    const auto present = present_classes(target);
    if (present.classes.empty()) return 0.0;
    // Normalizer: the largest possible distance between two pixel centroids,
    // corner to opposite corner.
    const double norm = std::hypot(target.width - 1.0, target.height - 1.0);
    double sum = 0;
    for (std::size_t i = 0; i < present.classes.size(); ++i) {
        const auto render_mask = raster::class_mask(render, present.classes[i]);
        double tx, ty, rx, ry;
        if (!mask_centroid(present.masks[i], tx, ty) || !mask_centroid(render_mask, rx, ry)) {
            sum += 1.0;  // empty mask: maximum possible distance
        } else {
            sum += std::hypot(tx - rx, ty - ry) / norm;
        }
    }
    return sum / static_cast<double>(present.classes.size());
}

bool result_precedes(const PoseResult& a, const PoseResult& b) {
    if (a.l_total != b.l_total) return a.l_total < b.l_total;
    if (a.l_iou != b.l_iou) return a.l_iou < b.l_iou;
    if (a.template_id != b.template_id) return a.template_id < b.template_id;
    return a.hypothesis_index < b.hypothesis_index;
}

const PoseResult& select_best(std::span<const PoseResult> results) {
    if (results.empty()) throw std::runtime_error("no pose results to select from");
    const PoseResult* best = &results[0];
    for (const auto& r : results.subspan(1)) {
        if (result_precedes(r, *best)) best = &r;
    }
    return *best;
}

PoseResult run_pose_search(std::span<const geom::LabeledMesh> templates,
                           const raster::LabelMap& input, const OptimConfig& cfg) {
    cfg.validate();
    if (templates.empty()) throw std::runtime_error("no templates to search");
    input.validate();

    const auto target_sil = raster::silhouette(input);
    const auto hypotheses = init_hypotheses(cfg);

    PoseResult best;
    bool have_best = false;
    for (const auto& mesh : templates) {
        const auto soup = raster::soup_from_mesh(mesh, raster::LabelMode::ByClass);
        for (std::size_t i = 0; i < hypotheses.size(); ++i) {
            PoseResult r;
            r.template_id = mesh.template_id;
            r.hypothesis_index = static_cast<int>(i);
            r.hypothesis = optimize_hypothesis(soup, target_sil, hypotheses[i], cfg);
            r.render = raster::render_soup(soup, r.hypothesis.scale, r.hypothesis.cam);

            const auto render_sil = raster::silhouette(r.render);
            r.l_iou = loss_iou(target_sil, render_sil);
            r.l_miou = loss_miou(input, r.render);
            r.l_dist = loss_dist(input, r.render);
            r.l_total = cfg.lambda_iou * r.l_iou + cfg.lambda_miou * r.l_miou + cfg.lambda_dist * r.l_dist;

            if (!have_best || result_precedes(r, best)) {
                best = std::move(r);
                have_best = true;
            }
        }
    }
    return best;
}

}  // namespace craft::poseopt
