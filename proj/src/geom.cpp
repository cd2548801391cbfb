#include "craft/geom.hpp"

#include "craft/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace craft::geom {

// =============================================================================
// Taxonomy
// =============================================================================

namespace {

struct PartClassInfo {
    PartClass cls;
    const char* name;
    std::uint8_t object_mask;  // bit i set <=> compatible with ObjectClass(i)
};

constexpr std::uint8_t bit(ObjectClass o) { return static_cast<std::uint8_t>(1u << static_cast<int>(o)); }

const PartClassInfo kPartTable[] = {
    {PartClass::TruckCabin, "truck_cabin", bit(ObjectClass::Truck)},
    {PartClass::TruckBody, "truck_body", bit(ObjectClass::Truck)},
    {PartClass::BusBody, "bus_body", bit(ObjectClass::Bus)},
    {PartClass::Wheel, "wheel", static_cast<std::uint8_t>(bit(ObjectClass::Truck) | bit(ObjectClass::Bus))},
    {PartClass::ChairBack, "chair_back", bit(ObjectClass::Chair)},
    {PartClass::ChairSeat, "chair_seat", bit(ObjectClass::Chair)},
    {PartClass::ChairArm, "chair_arm", bit(ObjectClass::Chair)},
    {PartClass::TableSurface, "table_surface", bit(ObjectClass::Table)},
    {PartClass::FurnitureLeg, "furniture_leg",
     static_cast<std::uint8_t>(bit(ObjectClass::Chair) | bit(ObjectClass::Table))},
    {PartClass::Axle, "axle", 0},
};

const PartClassInfo& info(PartClass cls) { return kPartTable[static_cast<int>(cls)]; }

const char* kObjectNames[] = {"truck", "bus", "chair", "table"};

}  // namespace

const char* to_string(PartClass cls) { return info(cls).name; }
const char* to_string(ObjectClass cls) { return kObjectNames[static_cast<int>(cls)]; }

PartClass part_class_from_string(std::string_view name) {
    for (const auto& e : kPartTable) {
        if (name == e.name) return e.cls;
    }
    throw std::runtime_error("unknown part class: " + std::string(name));
}

ObjectClass object_class_from_string(std::string_view name) {
    for (int i = 0; i < 4; ++i) {
        if (name == kObjectNames[i]) return static_cast<ObjectClass>(i);
    }
    throw std::runtime_error("unknown object class: " + std::string(name));
}

bool compatible(PartClass part, ObjectClass object) {
    return (info(part).object_mask & bit(object)) != 0;
}

std::vector<PartClass> parts_of(ObjectClass object) {
    std::vector<PartClass> out;
    for (int i = 0; i < kPartClassCount; ++i) {
        const auto cls = static_cast<PartClass>(i);
        if (compatible(cls, object)) out.push_back(cls);
    }
    return out;
}

std::vector<PartClass> unique_parts(ObjectClass object) {
    std::vector<PartClass> out;
    for (int i = 0; i < kPartClassCount; ++i) {
        const auto cls = static_cast<PartClass>(i);
        if (info(cls).object_mask == bit(object)) out.push_back(cls);
    }
    return out;
}

std::optional<ObjectClass> exclusive_object_class(PartClass part) {
    const auto mask = info(part).object_mask;
    for (int i = 0; i < 4; ++i) {
        if (mask == bit(static_cast<ObjectClass>(i))) return static_cast<ObjectClass>(i);
    }
    return std::nullopt;
}

// =============================================================================
// Aabb / Primitive / RigidTransform
// =============================================================================

bool Aabb::intersects(const Aabb& other) const {
    for (int k = 0; k < 3; ++k) {
        if (max_corner[k] <= other.min_corner[k] || other.max_corner[k] <= min_corner[k]) return false;
    }
    return true;
}

Aabb Aabb::reflected_x() const {
    Aabb out = *this;
    out.min_corner.x() = -max_corner.x();
    out.max_corner.x() = -min_corner.x();
    return out;
}

Primitive Primitive::cuboid(const Vec3& dims) {
    Primitive p;
    p.shape = Shape::Cuboid;
    p.dims = dims;
    p.validate();
    return p;
}

Primitive Primitive::cylinder(double radius, double length, Axis axis) {
    Primitive p;
    p.shape = Shape::Cylinder;
    p.radius = radius;
    p.length = length;
    p.axis = axis;
    p.validate();
    return p;
}

Vec3 Primitive::extent() const {
    if (shape == Shape::Cuboid) return dims;
    Vec3 e{2 * radius, 2 * radius, 2 * radius};
    e[static_cast<int>(axis)] = length;
    return e;
}

double Primitive::volume() const {
    if (shape == Shape::Cuboid) return dims.x() * dims.y() * dims.z();
    return M_PI * radius * radius * length;
}

void Primitive::validate() const {
    if (shape == Shape::Cuboid) {
        if (!(dims.minCoeff() > 0)) throw std::runtime_error("cuboid dims must be positive");
    } else {
        if (!(radius > 0) || !(length > 0)) throw std::runtime_error("cylinder dims must be positive");
    }
}

const char* to_string(Primitive::Shape s) { return s == Primitive::Shape::Cuboid ? "cuboid" : "cylinder"; }

const char* to_string(Axis a) {
    switch (a) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        default: return "z";
    }
}

Primitive::Shape shape_from_string(std::string_view name) {
    if (name == "cuboid") return Primitive::Shape::Cuboid;
    if (name == "cylinder") return Primitive::Shape::Cylinder;
    throw std::runtime_error("unknown shape: " + std::string(name));
}

Axis axis_from_string(std::string_view name) {
    if (name == "x") return Axis::X;
    if (name == "y") return Axis::Y;
    if (name == "z") return Axis::Z;
    throw std::runtime_error("unknown axis: " + std::string(name));
}

bool RigidTransform::is_valid(double eps) const {
    if (std::abs(rotation.determinant() - 1.0) > eps) return false;
    return (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() <= eps;
}

RigidTransform RigidTransform::translate(const Vec3& t) {
    RigidTransform out;
    out.translation = t;
    return out;
}

double rotation_angle(const Mat3& a, const Mat3& b) {
    const double tr = (a * b.transpose()).trace();
    return std::acos(std::clamp((tr - 1.0) / 2.0, -1.0, 1.0));
}

Mat3 rotation_about_y(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 r;
    r << c, 0, s, 0, 1, 0, -s, 0, c;
    return r;
}

// =============================================================================
// MeshPart
// =============================================================================

namespace {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace

double MeshPart::surface_area() const {
    double area = 0;
    for (const auto& t : triangles) area += triangle_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    return area;
}

MeshPart MeshPart::translated(const Vec3& t) const {
    MeshPart out = *this;
    for (auto& v : out.vertices) v += t;
    return out;
}

MeshPart MeshPart::reflected_x() const {
    MeshPart out = *this;
    for (auto& v : out.vertices) v.x() = -v.x();
    for (auto& t : out.triangles) std::swap(t[1], t[2]);
    return out;
}

// =============================================================================
// Aabb of a point set
// =============================================================================

Aabb aabb_of(std::span<const Vec3> points) {
    if (points.empty()) throw std::runtime_error("empty part geometry");
    Aabb box{points[0], points[0]};
    for (const auto& p : points) {
        box.min_corner = box.min_corner.cwiseMin(p);
        box.max_corner = box.max_corner.cwiseMax(p);
    }
    return box;
}

Aabb aabb_of(const MeshPart& part) { return aabb_of(std::span<const Vec3>(part.vertices)); }

// =============================================================================
// Surface sampling
// =============================================================================

std::vector<Vec3> sample_points(const MeshPart& shape, int n, std::uint64_t seed) {
    if (n < 1) throw std::runtime_error("sample count must be >= 1");
    if (shape.triangles.empty()) throw std::runtime_error("zero-area geometry");

    std::vector<double> cumulative(shape.triangles.size());
    double total = 0;
    for (std::size_t i = 0; i < shape.triangles.size(); ++i) {
        const auto& t = shape.triangles[i];
        total += triangle_area(shape.vertices[t[0]], shape.vertices[t[1]], shape.vertices[t[2]]);
        cumulative[i] = total;
    }
    if (!(total > 0)) throw std::runtime_error("zero-area geometry");

    Rng rng(seed);
    std::vector<Vec3> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double pick = rng.uniform(0.0, total);
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), pick);
        const std::size_t idx = std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1);
        const auto& t = shape.triangles[idx];

        double u = rng.uniform(0.0, 1.0);
        double v = rng.uniform(0.0, 1.0);
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        out.push_back(shape.vertices[t[0]] + u * (shape.vertices[t[1]] - shape.vertices[t[0]]) +
                      v * (shape.vertices[t[2]] - shape.vertices[t[0]]));
    }
    return out;
}

std::vector<Vec3> sample_points(const Primitive& shape, int n, std::uint64_t seed) {
    return sample_points(make_primitive_mesh(shape, 32), n, seed);
}

// =============================================================================
// Chamfer distance (kd-tree nearest neighbor)
// =============================================================================

namespace {

/// Minimal 3D kd-tree over an external point array; exact nearest neighbor.
class KdTree {
public:
    explicit KdTree(std::span<const Vec3> points) : points_(points) {
        index_.resize(points.size());
        std::iota(index_.begin(), index_.end(), 0);
        nodes_.reserve(points.size());
        root_ = build(0, static_cast<int>(points.size()));
    }

    double nearest_squared(const Vec3& q) const {
        double best = std::numeric_limits<double>::infinity();
        search(root_, q, best);
        return best;
    }

private:
    struct Node {
        int point = -1;
        int axis = 0;
        int left = -1;
        int right = -1;
    };

    int build(int lo, int hi) {
        if (lo >= hi) return -1;
        // Split along the widest extent of this subset.
        Vec3 mn = points_[index_[lo]], mx = mn;
        for (int i = lo; i < hi; ++i) {
            mn = mn.cwiseMin(points_[index_[i]]);
            mx = mx.cwiseMax(points_[index_[i]]);
        }
        int axis = 0;
        (mx - mn).maxCoeff(&axis);

        const int mid = (lo + hi) / 2;
        std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                         [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });

        Node node;
        node.point = index_[mid];
        node.axis = axis;
        const int self = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        nodes_[self].left = build(lo, mid);
        nodes_[self].right = build(mid + 1, hi);
        return self;
    }

    void search(int id, const Vec3& q, double& best) const {
        if (id < 0) return;
        const Node& node = nodes_[id];
        const Vec3& p = points_[node.point];
        const double d2 = (p - q).squaredNorm();
        if (d2 < best) best = d2;

        const double delta = q[node.axis] - p[node.axis];
        const int first = delta < 0 ? node.left : node.right;
        const int second = delta < 0 ? node.right : node.left;
        search(first, q, best);
        if (delta * delta < best) search(second, q, best);
    }

    std::span<const Vec3> points_;
    std::vector<int> index_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

double mean_squared_nn(std::span<const Vec3> from, const KdTree& tree) {
    double sum = 0;
    for (const auto& p : from) sum += tree.nearest_squared(p);
    return sum / static_cast<double>(from.size());
}

}  // namespace

double chamfer(std::span<const Vec3> a, std::span<const Vec3> b) {
    if (a.empty() || b.empty()) throw std::runtime_error("chamfer of empty point set");
    const KdTree tree_a(a);
    const KdTree tree_b(b);
    return mean_squared_nn(a, tree_b) + mean_squared_nn(b, tree_a);
}

// =============================================================================
// Primitive tessellation
// =============================================================================

MeshPart make_primitive_mesh(const Primitive& prim, int segments) {
    prim.validate();
    MeshPart mesh;

    if (prim.shape == Primitive::Shape::Cuboid) {
        const Vec3 h = 0.5 * prim.dims;
        // 8 corners, bit k of the index selects the sign of coordinate k.
        for (int i = 0; i < 8; ++i) {
            mesh.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                                       (i & 4) ? h.z() : -h.z());
        }
        const int quads[6][4] = {
            {1, 3, 7, 5},  // +x
            {0, 4, 6, 2},  // -x
            {2, 6, 7, 3},  // +y
            {0, 1, 5, 4},  // -y
            {4, 5, 7, 6},  // +z
            {0, 2, 3, 1},  // -z
        };
        for (const auto& q : quads) {
            mesh.triangles.push_back({q[0], q[1], q[2]});
            mesh.triangles.push_back({q[0], q[2], q[3]});
        }
        return mesh;
    }

    if (segments < 4 || segments % 4 != 0) throw std::runtime_error("cylinder segments must be a positive multiple of 4");

    // Build along z, then permute coordinates into the requested axis.
    const double hz = 0.5 * prim.length;
    const double r = prim.radius;
    std::vector<Vec3> verts;
    for (int ring = 0; ring < 2; ++ring) {
        const double z = ring == 0 ? -hz : hz;
        for (int s = 0; s < segments; ++s) {
            const double t = 2.0 * M_PI * s / segments;
            verts.emplace_back(r * std::cos(t), r * std::sin(t), z);
        }
    }
    verts.emplace_back(0, 0, -hz);  // bottom cap center
    verts.emplace_back(0, 0, hz);   // top cap center

    const int bottom_center = 2 * segments;
    const int top_center = 2 * segments + 1;
    for (int s = 0; s < segments; ++s) {
        const int s1 = (s + 1) % segments;
        // side (outward)
        mesh.triangles.push_back({s, s1, segments + s});
        mesh.triangles.push_back({s1, segments + s1, segments + s});
        // caps (bottom faces -z, top faces +z)
        mesh.triangles.push_back({bottom_center, s1, s});
        mesh.triangles.push_back({top_center, segments + s, segments + s1});
    }

    // Permute local z into the cylinder axis.
    const int a = static_cast<int>(prim.axis);
    for (auto& v : verts) {
        Vec3 p = v;
        if (a == 0) p = Vec3(v.z(), v.x(), v.y());
        else if (a == 1) p = Vec3(v.y(), v.z(), v.x());
        mesh.vertices.push_back(p);
    }
    return mesh;
}

// =============================================================================
// LabeledMesh validation and instance splitting
// =============================================================================

void LabeledMesh::validate() const {
    if (triangles.size() != face_labels.size()) throw std::runtime_error("face label count mismatch");
    const int n = static_cast<int>(vertices.size());
    for (const auto& t : triangles) {
        for (const int idx : t) {
            if (idx < 0 || idx >= n) throw std::runtime_error("triangle index out of range");
        }
    }
    for (const auto cls : face_labels) {
        if (cls == PartClass::Axle || !compatible(cls, object_class)) {
            throw std::runtime_error(std::string("face label incompatible with object class: ") + to_string(cls));
        }
    }
    constexpr double kTol = 1e-9;
    for (const auto& v : vertices) {
        if (v.cwiseAbs().maxCoeff() > 0.5 + kTol) throw std::runtime_error("vertex outside unit cube");
    }
}

namespace {

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<MeshInstance> split_instances(const LabeledMesh& mesh) {
    const int nf = static_cast<int>(mesh.triangles.size());
    DisjointSet ds(nf);

    // Faces sharing a vertex and a label belong to the same instance.
    std::vector<std::vector<int>> incident(mesh.vertices.size());
    for (int f = 0; f < nf; ++f) {
        for (const int v : mesh.triangles[f]) incident[v].push_back(f);
    }
    for (auto& faces : incident) {
        std::sort(faces.begin(), faces.end(), [&](int a, int b) {
            return std::make_pair(mesh.face_labels[a], a) < std::make_pair(mesh.face_labels[b], b);
        });
        for (std::size_t i = 1; i < faces.size(); ++i) {
            if (mesh.face_labels[faces[i - 1]] == mesh.face_labels[faces[i]]) ds.unite(faces[i - 1], faces[i]);
        }
    }

    // Group faces by root, ordered by first face occurrence.
    std::vector<int> root_order;
    std::vector<std::vector<int>> groups;
    std::vector<int> root_slot(nf, -1);
    for (int f = 0; f < nf; ++f) {
        const int r = ds.find(f);
        if (root_slot[r] < 0) {
            root_slot[r] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[root_slot[r]].push_back(f);
    }

    std::vector<MeshInstance> out;
    std::vector<int> vmap(mesh.vertices.size());
    for (const auto& faces : groups) {
        MeshInstance inst;
        inst.cls = mesh.face_labels[faces[0]];
        std::fill(vmap.begin(), vmap.end(), -1);
        for (const int f : faces) {
            Tri t;
            for (int k = 0; k < 3; ++k) {
                const int v = mesh.triangles[f][k];
                if (vmap[v] < 0) {
                    vmap[v] = static_cast<int>(inst.geometry.vertices.size());
                    inst.geometry.vertices.push_back(mesh.vertices[v]);
                }
                t[k] = vmap[v];
            }
            inst.geometry.triangles.push_back(t);
        }
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace craft::geom
