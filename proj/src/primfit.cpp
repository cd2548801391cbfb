#include "craft/primfit.hpp"

#include <stdexcept>

#include "craft/rng.hpp"

namespace craft::primfit {

using geom::Axis;
using geom::PrimitivePart;
using geom::Vec3;

std::array<Primitive, 4> propose_candidates(const Aabb& box) {
    const Vec3 d = box.dims();
    if (d.minCoeff() <= 1e-9) throw std::invalid_argument("degenerate box");
    const auto cyl = [&d](Axis axis) {
        const int a = static_cast<int>(axis);
        const double length = d[a];
        const double radius = 0.5 * (0.5 * (d[(a + 1) % 3] + d[(a + 2) % 3]));
        return Primitive::cylinder(radius, length, axis);
    };
    return {Primitive::cuboid(d), cyl(Axis::X), cyl(Axis::Y), cyl(Axis::Z)};
}

Primitive select_primitive(const structure::PartInstance& part, int n, std::uint64_t seed) {
    const Aabb box = geom::aabb_of(part.geometry);
    const auto candidates = propose_candidates(box);
    const Vec3 center = box.center();

    const auto part_cloud = geom::sample_points(part.geometry, n, seed);
    double best = 0;
    int best_index = -1;
    for (int i = 0; i < 4; ++i) {
        auto cloud = geom::sample_points(candidates[i], n, seed);
        for (auto& p : cloud) p += center;
        const double d = geom::chamfer(part_cloud, cloud);
        if (best_index < 0 || d < best) {
            best = d;
            best_index = i;
        }
    }
    return candidates[best_index];
}

std::vector<PrimitivePart> simplify_model(std::span<const structure::PartInstance> instances,
                                          geom::ObjectClass object_class, int n,
                                          std::uint64_t seed,
                                          std::vector<std::string>* warnings) {
    std::vector<PrimitivePart> parts;
    parts.reserve(instances.size());
    for (const auto& inst : instances) {
        PrimitivePart part;
        part.id = std::string(geom::to_string(inst.part_class)) + "__" + std::to_string(inst.id);
        part.cls = inst.part_class;
        part.primitive = select_primitive(inst, n, seed);
        part.transform = geom::RigidTransform::translate(geom::aabb_of(inst.geometry).center());
        parts.push_back(std::move(part));
    }

    const bool has_axles =
        object_class == geom::ObjectClass::Truck || object_class == geom::ObjectClass::Bus;
    if (has_axles) {
        std::vector<PrimitivePart> wheels;
        for (const auto& part : parts)
            if (part.cls == geom::PartClass::Wheel) wheels.push_back(part);
        auto axle_out = structure::generate_axles(wheels);
        for (auto& axle : axle_out.axles) parts.push_back(std::move(axle));
        if (warnings != nullptr)
            for (const auto& id : axle_out.unpaired)
                warnings->push_back("wheel " + id + " has no axle partner");
    }
    return parts;
}

}  // namespace craft::primfit
