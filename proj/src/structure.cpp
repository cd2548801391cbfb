#include "craft/structure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "craft/geom.hpp"

namespace craft::structure {

using geom::Aabb;
using geom::aabb_of;
using geom::Vec3;

namespace {

constexpr double kSideEps = 1e-4;                        // one-sidedness margin
const double kParallelCos = std::cos(5.0 * M_PI / 180.0);  // axle pairing tolerance

}  // namespace

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::Rendered: return "rendered";
        case Provenance::Mirrored: return "mirrored";
        case Provenance::Generated: return "generated";
    }
    throw std::invalid_argument("unknown provenance");
}

Provenance provenance_from_string(std::string_view name) {
    if (name == "rendered") return Provenance::Rendered;
    if (name == "mirrored") return Provenance::Mirrored;
    if (name == "generated") return Provenance::Generated;
    throw std::invalid_argument("unknown provenance: " + std::string(name));
}

std::vector<PartInstance> extract_instances(const geom::LabeledMesh& mesh) {
    std::vector<PartInstance> out;
    const auto split = geom::split_instances(mesh);
    out.reserve(split.size());
    for (std::size_t i = 0; i < split.size(); ++i) {
        PartInstance inst;
        inst.id = static_cast<int>(i) + 1;
        inst.part_class = split[i].cls;
        inst.geometry = split[i].geometry;
        inst.provenance = Provenance::Rendered;
        out.push_back(std::move(inst));
    }
    return out;
}

namespace {

struct MaskStat {
    PartClass cls;
    double cx, cy;
};

/// Centroid and class per nonzero label with at least one pixel.
std::map<int, MaskStat> label_stats(const raster::LabelMap& map) {
    struct Acc {
        long long sx = 0, sy = 0, n = 0;
    };
    std::map<int, Acc> accs;
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            const std::uint8_t label = map.at(x, y);
            if (label == 0) continue;
            Acc& a = accs[label];
            a.sx += x;
            a.sy += y;
            ++a.n;
        }
    std::map<int, MaskStat> stats;
    for (const auto& [label, acc] : accs) {
        const auto it = map.legend.find(label);
        if (it == map.legend.end()) throw std::invalid_argument("label missing from legend");
        stats[label] = {it->second, static_cast<double>(acc.sx) / acc.n,
                        static_cast<double>(acc.sy) / acc.n};
    }
    return stats;
}

}  // namespace

std::map<int, int> correspond_parts(const raster::LabelMap& render,
                                    const raster::LabelMap& input) {
    const auto render_stats = label_stats(render);
    const auto input_stats = label_stats(input);

    struct Candidate {
        double dist;
        int render_label, input_label;
    };
    std::vector<Candidate> candidates;
    for (const auto& [rl, rs] : render_stats)
        for (const auto& [il, is] : input_stats) {
            if (rs.cls != is.cls) continue;
            candidates.push_back({std::hypot(rs.cx - is.cx, rs.cy - is.cy), rl, il});
        }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.render_label != b.render_label) return a.render_label < b.render_label;
        return a.input_label < b.input_label;
    });

    std::map<int, int> matches;
    std::map<int, bool> input_used;
    for (const auto& c : candidates) {
        if (matches.count(c.render_label) || input_used[c.input_label]) continue;
        matches[c.render_label] = c.input_label;
        input_used[c.input_label] = true;
    }
    return matches;
}

std::vector<PartInstance> filter_parts(std::span<const PartInstance> instances,
                                       const std::map<int, int>& correspondence) {
    std::vector<PartInstance> kept;
    for (const auto& inst : instances)
        if (correspondence.count(inst.id)) kept.push_back(inst);
    if (kept.empty()) throw std::runtime_error("no parts retained");
    return kept;
}

std::vector<PartInstance> mirror_completion(std::span<const PartInstance> instances) {
    std::vector<PartInstance> out(instances.begin(), instances.end());
    int next_id = 0;
    for (const auto& inst : instances) next_id = std::max(next_id, inst.id);

    for (const auto& inst : instances) {
        bool left = true, right = true;
        for (const auto& v : inst.geometry.vertices) {
            left = left && v.x() < -kSideEps;
            right = right && v.x() > kSideEps;
        }
        if (!left && !right) continue;  // straddles the symmetry plane

        const Aabb reflected = aabb_of(inst.geometry).reflected_x();
        bool has_counterpart = false;
        for (const auto& other : instances) {
            if (other.part_class != inst.part_class) continue;
            if (aabb_of(other.geometry).intersects(reflected)) {
                has_counterpart = true;
                break;
            }
        }
        if (has_counterpart) continue;

        PartInstance copy;
        copy.id = ++next_id;
        copy.part_class = inst.part_class;
        copy.geometry = inst.geometry.reflected_x();
        copy.provenance = Provenance::Mirrored;
        copy.source_id = inst.id;
        out.push_back(std::move(copy));
    }
    return out;
}

AxleOutput generate_axles(std::span<const geom::PrimitivePart> wheels) {
    const auto axis_dir = [](const geom::PrimitivePart& w) {
        return Vec3(w.transform.rotation * geom::axis_direction(w.primitive.axis));
    };
    const auto center = [](const geom::PrimitivePart& w) { return w.transform.translation; };

    struct Candidate {
        double dist;
        std::size_t i, j;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < wheels.size(); ++i) {
        if (wheels[i].primitive.shape != geom::Primitive::Shape::Cylinder) continue;
        for (std::size_t j = i + 1; j < wheels.size(); ++j) {
            if (wheels[j].primitive.shape != geom::Primitive::Shape::Cylinder) continue;
            const Vec3 ai = axis_dir(wheels[i]), aj = axis_dir(wheels[j]);
            if (std::abs(ai.dot(aj)) < kParallelCos) continue;
            const Vec3 d = center(wheels[j]) - center(wheels[i]);
            const double dist = d.norm();
            if (dist < 1e-12) continue;  // coincident centers: nothing to connect
            const Vec3 u = d / dist;
            if (std::abs(u.dot(ai)) < kParallelCos || std::abs(u.dot(aj)) < kParallelCos)
                continue;
            candidates.push_back({dist, i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    AxleOutput out;
    std::vector<bool> used(wheels.size(), false);
    for (const auto& c : candidates) {
        if (used[c.i] || used[c.j]) continue;
        used[c.i] = used[c.j] = true;
        const auto& lead = wheels[c.i];
        geom::PrimitivePart axle;
        axle.id = "axle__" + std::to_string(out.axles.size());
        axle.cls = PartClass::Axle;
        axle.primitive =
            geom::Primitive::cylinder(0.2 * lead.primitive.radius, c.dist, lead.primitive.axis);
        axle.transform.rotation = lead.transform.rotation;
        axle.transform.translation = 0.5 * (center(wheels[c.i]) + center(wheels[c.j]));
        out.axles.push_back(std::move(axle));
    }
    for (std::size_t i = 0; i < wheels.size(); ++i)
        if (!used[i]) out.unpaired.push_back(wheels[i].id);
    return out;
}

}  // namespace craft::structure
