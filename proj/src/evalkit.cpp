#include "craft/evalkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "craft/primfit.hpp"

namespace craft::evalkit {

using geom::Axis;
using geom::LabeledMesh;
using geom::rotation_about_y;
using geom::rotation_angle;
using geom::Vec3;

namespace {

constexpr double kVpThresholdRad = 30.0 * M_PI / 180.0;

void require_same_resolution(int wa, int ha, int wb, int hb) {
    if (wa != wb || ha != hb) throw std::invalid_argument("mask resolution mismatch");
}

}  // namespace

bool vp_accuracy(const Mat3& pred_rot, const Mat3& gt_rot, ObjectClass object_class) {
    double angle = rotation_angle(pred_rot, gt_rot);
    if (object_class == ObjectClass::Bus || object_class == ObjectClass::Table) {
        const Mat3 flipped = gt_rot * rotation_about_y(M_PI);
        angle = std::min(angle, rotation_angle(pred_rot, flipped));
    }
    return angle <= kVpThresholdRad;
}

bool part_count_accuracy(const PartCounts& pred, const PartCounts& gt) {
    for (int i = 0; i < kPartClassCount; ++i) {
        const PartClass cls = static_cast<PartClass>(i);
        const auto count_of = [cls](const PartCounts& counts) {
            const auto it = counts.find(cls);
            return it == counts.end() ? 0 : it->second;
        };
        if (count_of(pred) != count_of(gt)) return false;
    }
    return true;
}

bool silhouette_accuracy(const raster::Mask& pred, const raster::Mask& gt, double threshold) {
    require_same_resolution(pred.width, pred.height, gt.width, gt.height);
    long long inter = 0, uni = 0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const bool a = pred.data[i] != 0;
        const bool b = gt.data[i] != 0;
        inter += a && b;
        uni += a || b;
    }
    const double iou = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    return iou > threshold;
}

double part_iou(const raster::LabelMap& pred, const raster::LabelMap& gt) {
    require_same_resolution(pred.width, pred.height, gt.width, gt.height);

    // Per part class: intersection and union of the class masks. Indexing is
    // by semantic class, not raw label value, so legends may differ.
    long long inter[kPartClassCount + 1] = {};
    long long uni[kPartClassCount + 1] = {};
    bool in_gt[kPartClassCount + 1] = {};
    const auto class_of = [](const raster::LabelMap& map, std::uint8_t label) -> int {
        if (label == 0) return -1;
        const auto it = map.legend.find(label);
        if (it == map.legend.end()) throw std::invalid_argument("label missing from legend");
        return static_cast<int>(it->second);
    };
    for (std::size_t i = 0; i < gt.data.size(); ++i) {
        const int cg = class_of(gt, gt.data[i]);
        const int cp = class_of(pred, pred.data[i]);
        if (cg >= 0) {
            in_gt[cg] = true;
            ++uni[cg];
            if (cp == cg) {
                ++inter[cg];
            } else if (cp >= 0) {
                ++uni[cp];
            }
        } else if (cp >= 0) {
            ++uni[cp];
        }
    }

    double sum = 0.0;
    int classes = 0;
    for (int c = 0; c <= kPartClassCount; ++c) {
        if (!in_gt[c]) continue;
        sum += static_cast<double>(inter[c]) / static_cast<double>(uni[c]);
        ++classes;
    }
    return classes == 0 ? 1.0 : sum / classes;
}

double e_measure(const raster::Mask& pred, const raster::Mask& gt) {
    require_same_resolution(pred.width, pred.height, gt.width, gt.height);
    const std::size_t n = gt.data.size();
    if (n == 0) throw std::invalid_argument("empty mask");

    long long gt_on = 0, pred_on = 0;
    for (std::size_t i = 0; i < n; ++i) {
        gt_on += gt.data[i] != 0;
        pred_on += pred.data[i] != 0;
    }

    // Constant ground truth: alignment degenerates, score agreement with the
    // constant directly. Equal constants give 1, opposite constants give 0.
    if (gt_on == 0 || gt_on == static_cast<long long>(n)) {
        const bool want = gt_on != 0;
        long long agree = 0;
        for (std::size_t i = 0; i < n; ++i) agree += (pred.data[i] != 0) == want;
        return static_cast<double>(agree) / static_cast<double>(n);
    }

    const double mean_gt = static_cast<double>(gt_on) / static_cast<double>(n);
    const double mean_pred = static_cast<double>(pred_on) / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double phi_gt = (gt.data[i] != 0 ? 1.0 : 0.0) - mean_gt;
        const double phi_pred = (pred.data[i] != 0 ? 1.0 : 0.0) - mean_pred;
        const double denom = phi_gt * phi_gt + phi_pred * phi_pred;
        const double xi = denom == 0.0 ? 0.0 : 2.0 * phi_gt * phi_pred / denom;
        const double f = 0.25 * (1.0 + xi) * (1.0 + xi);
        sum += f;
    }
    return sum / static_cast<double>(n);
}

// =============================================================================
// Exhaustive-search baseline
// =============================================================================

namespace {

constexpr int kCropSize = 256;

PartCounts count_classes(const std::vector<structure::PartInstance>& instances) {
    PartCounts counts;
    for (const auto& inst : instances) ++counts[inst.part_class];
    return counts;
}

int count_of(const PartCounts& counts, PartClass cls) {
    const auto it = counts.find(cls);
    return it == counts.end() ? 0 : it->second;
}

const LabeledMesh& baseline_template_mesh(const PartCounts& counts) {
    static const std::vector<LabeledMesh> meshes = geom::all_templates();
    for (const auto& mesh : meshes) {
        const PartCounts have = count_classes(structure::extract_instances(mesh));
        bool equal = true;
        for (int i = 0; equal && i <= kPartClassCount; ++i) {
            const PartClass cls = static_cast<PartClass>(i);
            equal = count_of(have, cls) == count_of(counts, cls);
        }
        if (equal) return mesh;
    }
    throw std::invalid_argument("part counts match no template");
}

/// Crops the square window (x0, y0, side) out of the map and rescales it to
/// kCropSize x kCropSize with nearest-neighbor sampling. Pixels outside the
/// source are background.
raster::LabelMap crop_resample(const raster::LabelMap& map, int x0, int y0, int side) {
    raster::LabelMap out;
    out.width = kCropSize;
    out.height = kCropSize;
    out.data.assign(static_cast<std::size_t>(kCropSize) * kCropSize, 0);
    out.legend = map.legend;
    for (int j = 0; j < kCropSize; ++j) {
        const int sy = y0 + (2 * j + 1) * side / (2 * kCropSize);
        if (sy < 0 || sy >= map.height) continue;
        for (int i = 0; i < kCropSize; ++i) {
            const int sx = x0 + (2 * i + 1) * side / (2 * kCropSize);
            if (sx < 0 || sx >= map.width) continue;
            out.data[static_cast<std::size_t>(j) * kCropSize + i] =
                map.data[static_cast<std::size_t>(sy) * map.width + sx];
        }
    }
    return out;
}

/// Flat comparison key for one object type: shape index then canonical dims.
std::array<double, 4> type_key(const Primitive& prim) {
    const auto d = match::dim_vector(prim);
    return {static_cast<double>(prim.shape), d[0], d[1], d[2]};
}

}  // namespace

std::string find_baseline_template(const PartCounts& counts) {
    return baseline_template_mesh(counts).template_id;
}

std::vector<PrimitivePart> place_combination(const std::vector<PrimitivePart>& template_parts,
                                             const std::vector<BaselineChoice>& choices) {
    // Index the template's non-axle parts by class, preserving order.
    std::array<std::vector<const PrimitivePart*>, kPartClassCount> by_class{};
    for (const auto& part : template_parts) {
        if (part.cls == PartClass::Axle) continue;
        by_class[static_cast<int>(part.cls)].push_back(&part);
    }

    std::vector<PrimitivePart> placed;
    double largest = 0.0;
    for (const auto& choice : choices) {
        const auto& slots = by_class[static_cast<int>(choice.cls)];
        if (choice.instance < 0 || choice.instance >= static_cast<int>(slots.size()))
            throw std::invalid_argument("combination does not fit template");
        PrimitivePart part = *slots[choice.instance];
        if (choice.type.shape != part.primitive.shape)
            throw std::invalid_argument("shape mismatch in combination");
        if (part.primitive.shape == Primitive::Shape::Cuboid) {
            // Largest committed dim lands on the part's largest axis.
            std::array<double, 3> sorted{choice.type.dims.x(), choice.type.dims.y(),
                                         choice.type.dims.z()};
            std::sort(sorted.begin(), sorted.end(), std::greater<>());
            std::array<int, 3> axes{0, 1, 2};
            const Vec3 extent = part.primitive.dims;
            std::sort(axes.begin(), axes.end(), [&extent](int a, int b) {
                if (extent[a] != extent[b]) return extent[a] > extent[b];
                return a < b;
            });
            for (int k = 0; k < 3; ++k) part.primitive.dims[axes[k]] = sorted[k];
        } else {
            part.primitive.radius = choice.type.radius;
            part.primitive.length = choice.type.length;
        }
        largest = std::max(largest, part.primitive.extent().maxCoeff());
        placed.push_back(std::move(part));
    }

    if (largest <= 0.0) throw std::invalid_argument("degenerate combination");
    for (auto& part : placed) {
        if (part.primitive.shape == Primitive::Shape::Cuboid) {
            part.primitive.dims /= largest;
        } else {
            part.primitive.radius /= largest;
            part.primitive.length /= largest;
        }
    }
    return placed;
}

double score_combination(const std::vector<PrimitivePart>& parts, const BaselineConfig& cfg) {
    const raster::LabelMap render =
        raster::render_parts(parts, cfg.gt_camera, raster::LabelMode::ByClass);
    require_same_resolution(render.width, render.height, cfg.gt_masks.width,
                            cfg.gt_masks.height);

    // Square hull of the combined foreground; the whole frame when both maps
    // are empty.
    int min_x = render.width, min_y = render.height, max_x = -1, max_y = -1;
    const auto grow = [&](const raster::LabelMap& map) {
        for (int y = 0; y < map.height; ++y) {
            for (int x = 0; x < map.width; ++x) {
                if (map.data[static_cast<std::size_t>(y) * map.width + x] == 0) continue;
                min_x = std::min(min_x, x);
                min_y = std::min(min_y, y);
                max_x = std::max(max_x, x);
                max_y = std::max(max_y, y);
            }
        }
    };
    grow(render);
    grow(cfg.gt_masks);
    if (max_x < 0) {
        min_x = min_y = 0;
        max_x = render.width - 1;
        max_y = render.height - 1;
    }
    const int side = std::max(max_x - min_x, max_y - min_y) + 1;
    const int x0 = min_x - (side - (max_x - min_x + 1)) / 2;
    const int y0 = min_y - (side - (max_y - min_y + 1)) / 2;

    const raster::LabelMap pred_crop = crop_resample(render, x0, y0, side);
    const raster::LabelMap gt_crop = crop_resample(cfg.gt_masks, x0, y0, side);

    if (cfg.metric == BaselineMetric::MIoU) return part_iou(pred_crop, gt_crop);

    bool in_gt[kPartClassCount + 1] = {};
    for (const std::uint8_t label : gt_crop.data) {
        if (label == 0) continue;
        in_gt[static_cast<int>(gt_crop.legend.at(label))] = true;
    }
    double sum = 0.0;
    int classes = 0;
    for (int c = 0; c <= kPartClassCount; ++c) {
        if (!in_gt[c]) continue;
        const PartClass cls = static_cast<PartClass>(c);
        sum += e_measure(raster::class_mask(pred_crop, cls), raster::class_mask(gt_crop, cls));
        ++classes;
    }
    return classes == 0 ? 1.0 : sum / classes;
}

BaselineResult baseline_search(const std::vector<match::SceneObject>& scene,
                               const BaselineConfig& cfg) {
    for (const auto& [cls, count] : cfg.part_counts) {
        (void)cls;
        if (count < 0) throw std::invalid_argument("negative part count");
    }

    const LabeledMesh& mesh = baseline_template_mesh(cfg.part_counts);
    const std::vector<PrimitivePart> template_parts =
        primfit::simplify_model(structure::extract_instances(mesh), mesh.object_class);

    // Shape each part class expects, from the template's simplified parts.
    std::array<Primitive::Shape, kPartClassCount> class_shape{};
    std::array<bool, kPartClassCount> class_seen{};
    for (const auto& part : template_parts) {
        if (part.cls == PartClass::Axle) continue;
        class_shape[static_cast<int>(part.cls)] = part.primitive.shape;
        class_seen[static_cast<int>(part.cls)] = true;
    }

    // Collapse the scene into object types: canonical dims plus multiplicity.
    struct Type {
        Primitive prim;
        int count = 0;
    };
    std::map<std::array<double, 4>, int> type_index;
    std::vector<Type> types;
    for (const auto& object : scene) {
        object.primitive.validate();
        const auto key = type_key(object.primitive);
        const auto it = type_index.find(key);
        if (it != type_index.end()) {
            ++types[it->second].count;
            continue;
        }
        const auto d = match::dim_vector(object.primitive);
        Type type;
        type.prim = object.primitive.shape == Primitive::Shape::Cuboid
                        ? Primitive::cuboid(Vec3(d[0], d[1], d[2]))
                        : Primitive::cylinder(object.primitive.radius, object.primitive.length,
                                              Axis::X);
        type.count = 1;
        type_index.emplace(key, static_cast<int>(types.size()));
        types.push_back(type);
    }
    // Reorder types by key so enumeration ignores scene order.
    std::vector<int> by_key;
    for (const auto& [key, idx] : type_index) {
        (void)key;
        by_key.push_back(idx);
    }
    std::vector<Type> sorted_types;
    for (const int idx : by_key) sorted_types.push_back(types[idx]);
    types = std::move(sorted_types);

    // One decision group per part instance, except that classes under a
    // same-dims rule decide once for all their instances.
    struct Group {
        PartClass cls = PartClass::Wheel;
        int first_instance = 0;
        int slots = 0;
        Primitive::Shape shape = Primitive::Shape::Cuboid;
    };
    std::vector<Group> groups;
    for (int c = 0; c < kPartClassCount; ++c) {
        const PartClass cls = static_cast<PartClass>(c);
        const int count = count_of(cfg.part_counts, cls);
        if (count == 0) continue;
        if (!class_seen[c]) throw std::invalid_argument("part counts match no template");
        const bool shared =
            std::find(cfg.same_dims.begin(), cfg.same_dims.end(), cls) != cfg.same_dims.end();
        if (shared) {
            groups.push_back({cls, 0, count, class_shape[c]});
        } else {
            for (int j = 0; j < count; ++j) groups.push_back({cls, j, 1, class_shape[c]});
        }
    }

    BaselineResult best;
    std::vector<double> best_key;
    bool found = false;

    std::vector<int> assigned(groups.size(), -1);
    std::vector<int> used(types.size(), 0);
    const auto evaluate_leaf = [&] {
        std::vector<BaselineChoice> choices;
        std::vector<double> key;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const Primitive& prim = types[static_cast<std::size_t>(assigned[g])].prim;
            for (int j = 0; j < groups[g].slots; ++j) {
                choices.push_back({groups[g].cls, groups[g].first_instance + j, prim});
                for (const double v : type_key(prim)) key.push_back(v);
            }
        }
        const double score =
            score_combination(place_combination(template_parts, choices), cfg);
        if (!found || score > best.score || (score == best.score && key < best_key)) {
            found = true;
            best.score = score;
            best.choices = std::move(choices);
            best_key = std::move(key);
        }
    };
    const std::function<void(std::size_t)> descend = [&](std::size_t g) {
        if (g == groups.size()) {
            evaluate_leaf();
            return;
        }
        for (std::size_t t = 0; t < types.size(); ++t) {
            if (types[t].prim.shape != groups[g].shape) continue;
            if (used[t] + groups[g].slots > types[t].count) continue;
            used[t] += groups[g].slots;
            assigned[g] = static_cast<int>(t);
            descend(g + 1);
            used[t] -= groups[g].slots;
        }
    };
    descend(0);

    if (!found) throw std::runtime_error("no feasible combination");
    best.template_id = mesh.template_id;
    return best;
}

}  // namespace craft::evalkit
