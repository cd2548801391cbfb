#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace craft::geom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Tri = std::array<int, 3>;

// =============================================================================
// Part / object taxonomy
// =============================================================================

/// The nine part classes, plus `Axle`, an internal pseudo-class for generated
/// connecting parts. Axle is outside the taxonomy: it never appears in label
/// maps or part-count comparisons.
enum class PartClass : std::uint8_t {
    TruckCabin,
    TruckBody,
    BusBody,
    Wheel,
    ChairBack,
    ChairSeat,
    ChairArm,
    TableSurface,
    FurnitureLeg,
    Axle,
};

inline constexpr int kPartClassCount = 9;  // excludes Axle

enum class ObjectClass : std::uint8_t { Truck, Bus, Chair, Table };

const char* to_string(PartClass cls);
const char* to_string(ObjectClass cls);
PartClass part_class_from_string(std::string_view name);
ObjectClass object_class_from_string(std::string_view name);

/// Part/object compatibility relation.
bool compatible(PartClass part, ObjectClass object);

/// All part classes compatible with `object`.
std::vector<PartClass> parts_of(ObjectClass object);

/// Part classes compatible with `object` and no other object class.
std::vector<PartClass> unique_parts(ObjectClass object);

/// The object class a part is exclusive to, if any (e.g. truck_cabin ->
/// truck); nullopt for shared classes like wheel or furniture_leg.
std::optional<ObjectClass> exclusive_object_class(PartClass part);

// =============================================================================
// Geometric types
// =============================================================================

struct Aabb {
    Vec3 min_corner{0, 0, 0};
    Vec3 max_corner{0, 0, 0};

    Vec3 dims() const { return max_corner - min_corner; }
    Vec3 center() const { return 0.5 * (min_corner + max_corner); }

    /// Positive-volume overlap test (touching boxes do not intersect).
    bool intersects(const Aabb& other) const;
    Aabb translated(const Vec3& t) const { return {min_corner + t, max_corner + t}; }
    Aabb reflected_x() const;
};

enum class Axis : std::uint8_t { X, Y, Z };

inline Vec3 axis_direction(Axis a) {
    Vec3 d = Vec3::Zero();
    d[static_cast<int>(a)] = 1.0;
    return d;
}

/// A cuboid or cylinder with explicit dimensions in its local axis-aligned
/// frame. Cylinders store their symmetry axis as one of the canonical axes.
struct Primitive {
    enum class Shape : std::uint8_t { Cuboid, Cylinder };

    Shape shape = Shape::Cuboid;
    Vec3 dims{1, 1, 1};    // cuboid extents (dx, dy, dz); unused for cylinders
    double radius = 0;     // cylinder only
    double length = 0;     // cylinder only
    Axis axis = Axis::Z;   // cylinder only

    static Primitive cuboid(const Vec3& dims);
    static Primitive cylinder(double radius, double length, Axis axis);

    /// Axis-aligned extent of the shape in its local frame.
    Vec3 extent() const;
    double volume() const;
    void validate() const;
};

const char* to_string(Primitive::Shape s);
const char* to_string(Axis a);
Primitive::Shape shape_from_string(std::string_view name);
Axis axis_from_string(std::string_view name);

struct RigidTransform {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    bool is_valid(double eps = 1e-6) const;
    static RigidTransform translate(const Vec3& t);
};

/// Geodesic angle between two rotations, radians in [0, pi].
double rotation_angle(const Mat3& a, const Mat3& b);
Mat3 rotation_about_y(double angle);

/// Plain triangle geometry (a part subset or a meshed primitive).
struct MeshPart {
    std::vector<Vec3> vertices;
    std::vector<Tri> triangles;

    bool empty() const { return vertices.empty(); }
    double surface_area() const;
    MeshPart translated(const Vec3& t) const;
    /// Mirror about the x=0 plane; triangle winding flipped to stay outward.
    MeshPart reflected_x() const;
};

/// A triangle mesh whose faces carry part-class labels; the template unit.
/// Canonical frame: fits in the unit cube centered at the origin, x is the
/// lateral (left-right symmetry) axis, y is up.
struct LabeledMesh {
    std::vector<Vec3> vertices;
    std::vector<Tri> triangles;
    std::vector<PartClass> face_labels;  // one per triangle
    ObjectClass object_class = ObjectClass::Truck;
    std::string template_id;
    bool closed = false;  // consistently wound, watertight (true for generated templates)

    /// Throws std::runtime_error on any violated invariant.
    void validate() const;
};

/// Connected component of same-labeled faces, geometry re-indexed.
struct MeshInstance {
    PartClass cls = PartClass::Wheel;
    MeshPart geometry;
};

// =============================================================================
// Operations
// =============================================================================

/// Componentwise min/max box over a point set. Throws on empty input.
Aabb aabb_of(std::span<const Vec3> points);
Aabb aabb_of(const MeshPart& part);

/// Area-weighted uniform surface samples; deterministic for a fixed seed.
std::vector<Vec3> sample_points(const MeshPart& shape, int n, std::uint64_t seed);
std::vector<Vec3> sample_points(const Primitive& shape, int n, std::uint64_t seed);

/// Symmetric chamfer distance: mean squared nearest-neighbor distance from a
/// to b plus the same with roles swapped. Throws on empty sets.
double chamfer(std::span<const Vec3> a, std::span<const Vec3> b);

/// Tessellate a primitive into a closed, outward-wound triangle mesh centered
/// at the origin. `segments` must be a positive multiple of 4 so cylinder
/// bounding boxes stay exact.
MeshPart make_primitive_mesh(const Primitive& prim, int segments = 24);

/// Procedural part-labeled template. variant in 1..3.
LabeledMesh generate_template(ObjectClass object_class, int variant);
std::vector<LabeledMesh> templates_of(ObjectClass object_class);
std::vector<LabeledMesh> all_templates();

/// Split a mesh into part instances: connected components of same-labeled
/// faces (faces connect through shared vertices). Order is deterministic
/// (by first face index).
std::vector<MeshInstance> split_instances(const LabeledMesh& mesh);

// OBJ interchange: one `g <part_class>__<index>` group per part instance.
void save_obj(const LabeledMesh& mesh, const std::string& path);
/// Loads and normalizes into the canonical frame; the object class is
/// inferred from the unique part classes present.
LabeledMesh load_obj(const std::string& path);

// =============================================================================
// Primitive-shaped part (shared by structure / primfit / match / evalkit)
// =============================================================================

struct PrimitivePart {
    std::string id;
    PartClass cls = PartClass::Wheel;
    Primitive primitive;
    RigidTransform transform;  // places the primitive in the model frame

    double max_dim() const { return primitive.extent().maxCoeff(); }
};

}  // namespace craft::geom
