#include "craft/geom.hpp"

#include <stdexcept>

// Procedural template meshes. Canonical frame before normalization: x is the
// lateral axis (the object is symmetric about x=0), y is up with the ground at
// y=0, z runs along the object's length. Each part is one primitive with its
// own vertices, so part instances stay separable as connected components.
// Every design keeps the largest-dimension part the largest-volume part as
// well, which anchors the scene-matching dual ranking on it.

namespace craft::geom {

namespace {

constexpr int kWheelSegments = 12;

class TemplateBuilder {
public:
    TemplateBuilder(ObjectClass cls, std::string id) {
        mesh_.object_class = cls;
        mesh_.template_id = std::move(id);
        mesh_.closed = true;
    }

    void add(PartClass cls, const Primitive& prim, const Vec3& center) {
        const MeshPart part = make_primitive_mesh(prim, kWheelSegments).translated(center);
        const int base = static_cast<int>(mesh_.vertices.size());
        mesh_.vertices.insert(mesh_.vertices.end(), part.vertices.begin(), part.vertices.end());
        for (const auto& t : part.triangles) {
            mesh_.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
            mesh_.face_labels.push_back(cls);
        }
    }

    /// Left/right wheel pair at lateral offset +-x.
    void add_wheel_pair(double radius, double width, double x, double y, double z) {
        const auto wheel = Primitive::cylinder(radius, width, Axis::X);
        add(PartClass::Wheel, wheel, {x, y, z});
        add(PartClass::Wheel, wheel, {-x, y, z});
    }

    /// Uniformly scale so the longest extent is exactly 1, then center at the
    /// origin.
    LabeledMesh finish() {
        const Aabb box = aabb_of(std::span<const Vec3>(mesh_.vertices));
        const double scale = 1.0 / box.dims().maxCoeff();
        const Vec3 center = box.center();
        for (auto& v : mesh_.vertices) v = (v - center) * scale;
        mesh_.validate();
        return std::move(mesh_);
    }

private:
    LabeledMesh mesh_;
};

LabeledMesh make_truck(int variant) {
    TemplateBuilder b(ObjectClass::Truck, "truck_" + std::to_string(variant));
    switch (variant) {
        case 1:
            b.add(PartClass::TruckBody, Primitive::cuboid({2.0, 1.3, 4.2}), {0, 1.4, -1.0});
            b.add(PartClass::TruckCabin, Primitive::cuboid({1.9, 1.55, 1.5}), {0, 1.525, 1.95});
            b.add_wheel_pair(0.55, 0.45, 0.95, 0.55, 1.4);
            b.add_wheel_pair(0.55, 0.45, 0.95, 0.55, -2.2);
            break;
        case 2:
            b.add(PartClass::TruckBody, Primitive::cuboid({2.0, 1.4, 5.6}), {0, 1.45, -1.3});
            b.add(PartClass::TruckCabin, Primitive::cuboid({1.9, 1.6, 1.4}), {0, 1.55, 2.2});
            b.add_wheel_pair(0.55, 0.45, 0.95, 0.55, 1.9);
            b.add_wheel_pair(0.55, 0.45, 0.95, 0.55, -1.5);
            b.add_wheel_pair(0.55, 0.45, 0.95, 0.55, -3.3);
            break;
        case 3:
            b.add(PartClass::TruckBody, Primitive::cuboid({2.0, 0.9, 4.4}), {0, 1.05, -1.2});
            b.add(PartClass::TruckCabin, Primitive::cuboid({2.0, 2.0, 1.5}), {0, 1.6, 1.85});
            b.add_wheel_pair(0.5, 0.45, 0.95, 0.5, 1.5);
            b.add_wheel_pair(0.5, 0.45, 0.95, 0.5, -1.9);
            break;
        default:
            throw std::runtime_error("template variant out of range");
    }
    return b.finish();
}

LabeledMesh make_bus(int variant) {
    TemplateBuilder b(ObjectClass::Bus, "bus_" + std::to_string(variant));
    switch (variant) {
        case 1:
            b.add(PartClass::BusBody, Primitive::cuboid({2.2, 2.4, 7.0}), {0, 1.7, 0});
            b.add_wheel_pair(0.6, 0.5, 1.0, 0.6, 2.4);
            b.add_wheel_pair(0.6, 0.5, 1.0, 0.6, -2.4);
            break;
        case 2:
            b.add(PartClass::BusBody, Primitive::cuboid({2.2, 2.8, 5.2}), {0, 1.9, 0});
            b.add_wheel_pair(0.6, 0.5, 1.0, 0.6, 1.7);
            b.add_wheel_pair(0.6, 0.5, 1.0, 0.6, -1.7);
            break;
        case 3:
            b.add(PartClass::BusBody, Primitive::cuboid({2.3, 2.5, 8.0}), {0, 1.75, 0});
            b.add_wheel_pair(0.6, 0.5, 1.05, 0.6, 2.9);
            b.add_wheel_pair(0.6, 0.5, 1.05, 0.6, 0.0);
            b.add_wheel_pair(0.6, 0.5, 1.05, 0.6, -2.9);
            break;
        default:
            throw std::runtime_error("template variant out of range");
    }
    return b.finish();
}

LabeledMesh make_chair(int variant) {
    TemplateBuilder b(ObjectClass::Chair, "chair_" + std::to_string(variant));
    switch (variant) {
        case 1: {
            b.add(PartClass::ChairSeat, Primitive::cuboid({2.0, 0.25, 1.9}), {0, 1.85, 0});
            b.add(PartClass::ChairBack, Primitive::cuboid({2.0, 2.1, 0.25}), {0, 3.025, -0.825});
            const auto leg = Primitive::cuboid({0.22, 1.725, 0.22});
            for (const double sx : {1.0, -1.0}) {
                for (const double sz : {1.0, -1.0}) b.add(PartClass::FurnitureLeg, leg, {0.82 * sx, 0.8625, 0.78 * sz});
            }
            break;
        }
        case 2: {
            b.add(PartClass::ChairSeat, Primitive::cuboid({2.0, 0.3, 2.0}), {0, 1.75, 0});
            b.add(PartClass::ChairBack, Primitive::cuboid({2.0, 2.4, 0.3}), {0, 3.1, -0.85});
            const auto leg = Primitive::cylinder(0.13, 1.6, Axis::Y);
            for (const double sx : {1.0, -1.0}) {
                for (const double sz : {1.0, -1.0}) b.add(PartClass::FurnitureLeg, leg, {0.8 * sx, 0.8, 0.8 * sz});
            }
            break;
        }
        case 3: {
            b.add(PartClass::ChairSeat, Primitive::cuboid({2.0, 0.25, 1.9}), {0, 1.6, 0});
            b.add(PartClass::ChairBack, Primitive::cuboid({2.0, 2.3, 0.25}), {0, 2.875, -0.825});
            const auto arm = Primitive::cuboid({0.22, 0.5, 1.6});
            b.add(PartClass::ChairArm, arm, {0.89, 1.975, -0.1});
            b.add(PartClass::ChairArm, arm, {-0.89, 1.975, -0.1});
            const auto leg = Primitive::cuboid({0.22, 1.475, 0.22});
            for (const double sx : {1.0, -1.0}) {
                for (const double sz : {1.0, -1.0}) b.add(PartClass::FurnitureLeg, leg, {0.82 * sx, 0.7375, 0.75 * sz});
            }
            break;
        }
        default:
            throw std::runtime_error("template variant out of range");
    }
    return b.finish();
}

LabeledMesh make_table(int variant) {
    TemplateBuilder b(ObjectClass::Table, "table_" + std::to_string(variant));
    switch (variant) {
        case 1: {
            b.add(PartClass::TableSurface, Primitive::cuboid({3.4, 0.25, 2.0}), {0, 2.0, 0});
            const auto leg = Primitive::cuboid({0.25, 1.875, 0.25});
            for (const double sx : {1.0, -1.0}) {
                for (const double sz : {1.0, -1.0}) b.add(PartClass::FurnitureLeg, leg, {1.5 * sx, 0.9375, 0.82 * sz});
            }
            break;
        }
        case 2: {
            b.add(PartClass::TableSurface, Primitive::cuboid({3.0, 0.3, 1.8}), {0, 2.6, 0});
            const auto leg = Primitive::cylinder(0.12, 2.45, Axis::Y);
            for (const double sx : {1.0, -1.0}) {
                for (const double sz : {1.0, -1.0}) b.add(PartClass::FurnitureLeg, leg, {1.3 * sx, 1.225, 0.7 * sz});
            }
            break;
        }
        case 3: {
            // Pedestal table: disc surface on a single central column.
            b.add(PartClass::TableSurface, Primitive::cylinder(1.6, 0.25, Axis::Y), {0, 2.1, 0});
            b.add(PartClass::FurnitureLeg, Primitive::cylinder(0.22, 1.975, Axis::Y), {0, 0.9875, 0});
            break;
        }
        default:
            throw std::runtime_error("template variant out of range");
    }
    return b.finish();
}

}  // namespace

LabeledMesh generate_template(ObjectClass object_class, int variant) {
    if (variant < 1 || variant > 3) throw std::runtime_error("template variant out of range");
    switch (object_class) {
        case ObjectClass::Truck: return make_truck(variant);
        case ObjectClass::Bus: return make_bus(variant);
        case ObjectClass::Chair: return make_chair(variant);
        case ObjectClass::Table: return make_table(variant);
    }
    throw std::runtime_error("unknown object class");
}

std::vector<LabeledMesh> templates_of(ObjectClass object_class) {
    std::vector<LabeledMesh> out;
    for (int v = 1; v <= 3; ++v) out.push_back(generate_template(object_class, v));
    return out;
}

std::vector<LabeledMesh> all_templates() {
    std::vector<LabeledMesh> out;
    for (const auto cls : {ObjectClass::Truck, ObjectClass::Bus, ObjectClass::Chair, ObjectClass::Table}) {
        for (int v = 1; v <= 3; ++v) out.push_back(generate_template(cls, v));
    }
    return out;
}

}  // namespace craft::geom
