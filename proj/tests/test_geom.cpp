#include <doctest.h>

#include "craft/geom.hpp"
#include "craft/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

using namespace craft;
using geom::Aabb;
using geom::Axis;
using geom::LabeledMesh;
using geom::MeshPart;
using geom::ObjectClass;
using geom::PartClass;
using geom::Primitive;
using geom::Vec3;

namespace {

MeshPart unit_cube_part() { return geom::make_primitive_mesh(Primitive::cuboid({1, 1, 1})); }

std::vector<Vec3> random_cloud(int n, std::uint64_t seed, double lo = -1, double hi = 1) {
    Rng rng(seed);
    std::vector<Vec3> pts(n);
    for (auto& p : pts) p = {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
    return pts;
}

// Test-side oracle: O(n^2) nearest-neighbor chamfer.
double brute_chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    auto one_way = [](const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
        double sum = 0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::max();
            for (const auto& q : to) best = std::min(best, (p - q).squaredNorm());
            sum += best;
        }
        return sum / static_cast<double>(from.size());
    };
    return one_way(a, b) + one_way(b, a);
}

MeshPart lat_long_sphere(int stacks, int slices) {
    MeshPart m;
    m.vertices.push_back({0, 1, 0});
    for (int i = 1; i < stacks; ++i) {
        const double phi = M_PI * i / stacks;
        for (int j = 0; j < slices; ++j) {
            const double theta = 2 * M_PI * j / slices;
            m.vertices.push_back({std::sin(phi) * std::cos(theta), std::cos(phi), std::sin(phi) * std::sin(theta)});
        }
    }
    m.vertices.push_back({0, -1, 0});
    const int bottom = static_cast<int>(m.vertices.size()) - 1;
    auto ring = [&](int i, int j) { return 1 + (i - 1) * slices + (j % slices); };
    for (int j = 0; j < slices; ++j) m.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
    for (int i = 1; i + 1 < stacks; ++i) {
        for (int j = 0; j < slices; ++j) {
            m.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
            m.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
        }
    }
    for (int j = 0; j < slices; ++j) m.triangles.push_back({bottom, ring(stacks - 1, j + 1), ring(stacks - 1, j)});
    return m;
}

// Signed volume via the divergence theorem; equals the enclosed volume for a
// watertight outward-wound mesh.
double signed_volume(const MeshPart& m) {
    double v = 0;
    for (const auto& t : m.triangles) {
        v += m.vertices[t[0]].dot(m.vertices[t[1]].cross(m.vertices[t[2]])) / 6.0;
    }
    return v;
}

// Closed + consistently wound: every directed edge appears exactly once and
// its reverse appears exactly once.
bool watertight(const MeshPart& m) {
    std::map<std::pair<int, int>, int> edges;
    for (const auto& t : m.triangles) {
        for (int k = 0; k < 3; ++k) edges[{t[k], t[(k + 1) % 3]}]++;
    }
    for (const auto& [e, n] : edges) {
        if (n != 1) return false;
        auto rev = edges.find({e.second, e.first});
        if (rev == edges.end() || rev->second != 1) return false;
    }
    return true;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

// =============================================================================
// Taxonomy
// =============================================================================

TEST_CASE("part class taxonomy matches the compatibility table") {
    const std::map<PartClass, std::set<ObjectClass>> expected = {
        {PartClass::TruckCabin, {ObjectClass::Truck}},
        {PartClass::TruckBody, {ObjectClass::Truck}},
        {PartClass::BusBody, {ObjectClass::Bus}},
        {PartClass::Wheel, {ObjectClass::Truck, ObjectClass::Bus}},
        {PartClass::ChairBack, {ObjectClass::Chair}},
        {PartClass::ChairSeat, {ObjectClass::Chair}},
        {PartClass::ChairArm, {ObjectClass::Chair}},
        {PartClass::TableSurface, {ObjectClass::Table}},
        {PartClass::FurnitureLeg, {ObjectClass::Chair, ObjectClass::Table}},
    };
    CHECK(expected.size() == geom::kPartClassCount);

    const ObjectClass objects[] = {ObjectClass::Truck, ObjectClass::Bus, ObjectClass::Chair, ObjectClass::Table};
    for (const auto& [part, objs] : expected) {
        for (const auto obj : objects) {
            CHECK(geom::compatible(part, obj) == (objs.count(obj) > 0));
        }
    }
    // Axle is internal: compatible with nothing.
    for (const auto obj : objects) CHECK_FALSE(geom::compatible(PartClass::Axle, obj));
}

TEST_CASE("unique parts are the classes exclusive to one object") {
    auto u = geom::unique_parts(ObjectClass::Truck);
    CHECK(std::set<PartClass>(u.begin(), u.end()) ==
          std::set<PartClass>{PartClass::TruckCabin, PartClass::TruckBody});
    u = geom::unique_parts(ObjectClass::Bus);
    CHECK(std::set<PartClass>(u.begin(), u.end()) == std::set<PartClass>{PartClass::BusBody});
    u = geom::unique_parts(ObjectClass::Chair);
    CHECK(std::set<PartClass>(u.begin(), u.end()) ==
          std::set<PartClass>{PartClass::ChairBack, PartClass::ChairSeat, PartClass::ChairArm});
    u = geom::unique_parts(ObjectClass::Table);
    CHECK(std::set<PartClass>(u.begin(), u.end()) == std::set<PartClass>{PartClass::TableSurface});

    CHECK(geom::exclusive_object_class(PartClass::Wheel) == std::nullopt);
    CHECK(geom::exclusive_object_class(PartClass::FurnitureLeg) == std::nullopt);
    CHECK(geom::exclusive_object_class(PartClass::TruckCabin) == ObjectClass::Truck);
    CHECK(geom::exclusive_object_class(PartClass::TableSurface) == ObjectClass::Table);
}

TEST_CASE("class name round trips") {
    for (int i = 0; i < geom::kPartClassCount; ++i) {
        const auto cls = static_cast<PartClass>(i);
        CHECK(geom::part_class_from_string(geom::to_string(cls)) == cls);
    }
    CHECK(geom::part_class_from_string("axle") == PartClass::Axle);
    CHECK(geom::object_class_from_string("truck") == ObjectClass::Truck);
    CHECK_THROWS_AS(geom::part_class_from_string("sofa"), std::runtime_error);
}

// =============================================================================
// Aabb
// =============================================================================

TEST_CASE("aabb of a unit cube part") {
    const auto box = geom::aabb_of(unit_cube_part());
    CHECK(box.min_corner.isApprox(Vec3(-0.5, -0.5, -0.5)));
    CHECK(box.max_corner.isApprox(Vec3(0.5, 0.5, 0.5)));
}

TEST_CASE("aabb of a single vertex is degenerate") {
    const Vec3 p(1, 2, 3);
    const auto box = geom::aabb_of(std::span<const Vec3>(&p, 1));
    CHECK(box.min_corner == p);
    CHECK(box.max_corner == p);
    CHECK(box.dims() == Vec3(0, 0, 0));
}

TEST_CASE("aabb of a random cloud equals a direct scan") {
    const auto pts = random_cloud(100, 7);
    Vec3 lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const auto box = geom::aabb_of(pts);
    CHECK(box.min_corner == lo);
    CHECK(box.max_corner == hi);
}

TEST_CASE("aabb of empty geometry throws") {
    CHECK_THROWS_WITH_AS(geom::aabb_of(std::span<const Vec3>{}), "empty part geometry", std::runtime_error);
}

TEST_CASE("aabb commutes with translation") {
    const auto pts = random_cloud(50, 13);
    const Vec3 t(0.3, -1.7, 2.2);
    std::vector<Vec3> moved;
    for (const auto& p : pts) moved.push_back(p + t);
    const auto a = geom::aabb_of(pts).translated(t);
    const auto b = geom::aabb_of(moved);
    CHECK(a.min_corner.isApprox(b.min_corner, 1e-12));
    CHECK(a.max_corner.isApprox(b.max_corner, 1e-12));
}

TEST_CASE("aabb intersection requires positive overlap") {
    const Aabb a{{0, 0, 0}, {1, 1, 1}};
    CHECK(a.intersects({{0.5, 0.5, 0.5}, {2, 2, 2}}));
    CHECK_FALSE(a.intersects({{1, 0, 0}, {2, 1, 1}}));  // touching face
    CHECK_FALSE(a.intersects({{2, 2, 2}, {3, 3, 3}}));
    CHECK(a.reflected_x().min_corner == Vec3(-1, 0, 0));
    CHECK(a.reflected_x().max_corner == Vec3(0, 1, 1));
}

// =============================================================================
// Sampling
// =============================================================================

TEST_CASE("sampling is deterministic per seed") {
    const auto cube = unit_cube_part();
    const auto a = geom::sample_points(cube, 500, 42);
    const auto b = geom::sample_points(cube, 500, 42);
    REQUIRE(a.size() == 500);
    CHECK(a == b);
    const auto c = geom::sample_points(cube, 500, 43);
    CHECK(a != c);
}

TEST_CASE("sphere samples have mean norm near 1") {
    const auto sphere = lat_long_sphere(24, 48);
    const auto pts = geom::sample_points(sphere, 10000, 3);
    double mean = 0;
    for (const auto& p : pts) mean += p.norm();
    mean /= static_cast<double>(pts.size());
    CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("cuboid samples are area weighted per face") {
    const auto cube = geom::make_primitive_mesh(Primitive::cuboid({2, 2, 2}));
    const auto pts = geom::sample_points(cube, 6000, 11);
    int counts[6] = {};
    for (const auto& p : pts) {
        int face = -1;
        for (int a = 0; a < 3 && face < 0; ++a) {
            if (std::abs(p[a] - 1) < 1e-9) face = 2 * a;
            else if (std::abs(p[a] + 1) < 1e-9) face = 2 * a + 1;
        }
        REQUIRE(face >= 0);
        counts[face]++;
    }
    for (const auto n : counts) {
        CHECK(n >= 900);
        CHECK(n <= 1100);
    }
}

TEST_CASE("sampling a primitive stays within its extent") {
    const auto cyl = Primitive::cylinder(0.5, 2.0, Axis::X);
    const auto pts = geom::sample_points(cyl, 2048, 9);
    REQUIRE(pts.size() == 2048);
    for (const auto& p : pts) {
        CHECK(std::abs(p.x()) <= 1.0 + 1e-9);
        CHECK(Eigen::Vector2d(p.y(), p.z()).norm() <= 0.5 + 1e-9);
    }
    CHECK(pts == geom::sample_points(cyl, 2048, 9));
}

TEST_CASE("sampling errors") {
    CHECK_THROWS_AS(geom::sample_points(MeshPart{}, 10, 0), std::runtime_error);
    MeshPart degenerate;
    degenerate.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};  // collinear
    degenerate.triangles = {{0, 1, 2}};
    CHECK_THROWS_WITH_AS(geom::sample_points(degenerate, 10, 0), "zero-area geometry", std::runtime_error);
}

// =============================================================================
// Chamfer
// =============================================================================

TEST_CASE("chamfer identity and two-point case") {
    const auto pts = random_cloud(30, 5);
    CHECK(geom::chamfer(pts, pts) == 0.0);

    const std::vector<Vec3> a = {{0, 0, 0}};
    const std::vector<Vec3> b = {{1, 0, 0}};
    CHECK(geom::chamfer(a, b) == doctest::Approx(2.0));
}

TEST_CASE("chamfer matches the brute-force oracle") {
    for (std::uint64_t seed : {1, 2, 3, 4}) {
        const auto a = random_cloud(50, seed, -2, 2);
        const auto b = random_cloud(50, seed + 100, -2, 2);
        CHECK(geom::chamfer(a, b) == brute_chamfer(a, b));
    }
}

TEST_CASE("chamfer is symmetric and rigid invariant") {
    const auto a = random_cloud(64, 21);
    const auto b = random_cloud(80, 22);
    CHECK(geom::chamfer(a, b) == geom::chamfer(b, a));

    const auto rot = geom::rotation_about_y(0.7);
    const Vec3 t(0.4, -0.2, 1.1);
    std::vector<Vec3> ar, br;
    for (const auto& p : a) ar.push_back(rot * p + t);
    for (const auto& p : b) br.push_back(rot * p + t);
    CHECK(geom::chamfer(ar, br) == doctest::Approx(geom::chamfer(a, b)).epsilon(1e-9));
}

TEST_CASE("chamfer of an empty set throws") {
    const auto a = random_cloud(4, 1);
    CHECK_THROWS_WITH_AS(geom::chamfer(a, {}), "chamfer of empty point set", std::runtime_error);
    CHECK_THROWS_AS(geom::chamfer({}, a), std::runtime_error);
}

// =============================================================================
// Primitives and meshing
// =============================================================================

TEST_CASE("primitive extent and volume") {
    const auto box = Primitive::cuboid({2, 3, 4});
    CHECK(box.extent() == Vec3(2, 3, 4));
    CHECK(box.volume() == doctest::Approx(24.0));

    const auto cyl = Primitive::cylinder(0.5, 2.0, Axis::X);
    CHECK(cyl.extent() == Vec3(2.0, 1.0, 1.0));
    CHECK(cyl.volume() == doctest::Approx(M_PI * 0.25 * 2.0));

    CHECK_THROWS_AS(Primitive::cuboid({1, 0, 1}), std::runtime_error);
    CHECK_THROWS_AS(Primitive::cylinder(0, 1, Axis::Z), std::runtime_error);
}

TEST_CASE("primitive meshes are watertight and outward wound") {
    const auto box = geom::make_primitive_mesh(Primitive::cuboid({2, 3, 4}));
    CHECK(watertight(box));
    CHECK(signed_volume(box) == doctest::Approx(24.0));
    CHECK(box.surface_area() == doctest::Approx(2 * (2 * 3 + 3 * 4 + 2 * 4)));

    const int n = 24;
    const auto cyl = geom::make_primitive_mesh(Primitive::cylinder(1.0, 2.0, Axis::Y), n);
    CHECK(watertight(cyl));
    // Prism volume: polygon base area x length.
    const double base = 0.5 * n * std::sin(2 * M_PI / n);
    CHECK(signed_volume(cyl) == doctest::Approx(base * 2.0));
    // Multiple-of-4 segment counts put vertices on all four axis extremes.
    const auto bb = geom::aabb_of(cyl);
    CHECK(bb.min_corner.isApprox(Vec3(-1, -1, -1), 1e-12));
    CHECK(bb.max_corner.isApprox(Vec3(1, 1, 1), 1e-12));

    CHECK_THROWS_AS(geom::make_primitive_mesh(Primitive::cylinder(1, 1, Axis::Z), 10), std::runtime_error);
}

TEST_CASE("cylinder axis permutation maps the extent") {
    for (const auto axis : {Axis::X, Axis::Y, Axis::Z}) {
        const auto prim = Primitive::cylinder(0.25, 1.5, axis);
        const auto bb = geom::aabb_of(geom::make_primitive_mesh(prim));
        CHECK(bb.dims().isApprox(prim.extent(), 1e-12));
    }
}

TEST_CASE("rigid transform and rotation angle") {
    CHECK(geom::RigidTransform{}.is_valid());
    geom::RigidTransform flip;
    flip.rotation(0, 0) = -1;  // determinant -1
    CHECK_FALSE(flip.is_valid());

    const auto r = geom::rotation_about_y(0.3);
    CHECK(geom::rotation_angle(geom::Mat3::Identity(), r) == doctest::Approx(0.3));
    CHECK(geom::rotation_angle(r, r) == doctest::Approx(0.0));
    CHECK(geom::rotation_angle(geom::Mat3::Identity(), geom::rotation_about_y(M_PI)) ==
          doctest::Approx(M_PI));
}

// =============================================================================
// Templates
// =============================================================================

TEST_CASE("truck template exposes the expected label set") {
    const auto mesh = geom::generate_template(ObjectClass::Truck, 1);
    std::set<PartClass> labels(mesh.face_labels.begin(), mesh.face_labels.end());
    CHECK(labels == std::set<PartClass>{PartClass::TruckCabin, PartClass::TruckBody, PartClass::Wheel});
}

TEST_CASE("all templates satisfy mesh invariants and symmetry") {
    const auto templates = geom::all_templates();
    REQUIRE(templates.size() == 12);
    std::set<std::string> ids;
    for (const auto& mesh : templates) {
        CAPTURE(mesh.template_id);
        CHECK_NOTHROW(mesh.validate());
        CHECK(mesh.closed);
        ids.insert(mesh.template_id);
        for (const auto& v : mesh.vertices) CHECK(v.cwiseAbs().maxCoeff() <= 0.5 + 1e-9);

        // Left-right symmetry: the reflected vertex set maps onto itself.
        for (const auto& v : mesh.vertices) {
            const Vec3 mirrored(-v.x(), v.y(), v.z());
            bool found = false;
            for (const auto& w : mesh.vertices) {
                if ((w - mirrored).norm() < 1e-6) {
                    found = true;
                    break;
                }
            }
            CHECK(found);
        }
    }
    CHECK(ids.size() == 12);
}

TEST_CASE("chair variant 2 has four identical legs") {
    const auto mesh = geom::generate_template(ObjectClass::Chair, 2);
    const auto instances = geom::split_instances(mesh);
    std::vector<Vec3> leg_dims;
    for (const auto& inst : instances) {
        if (inst.cls == PartClass::FurnitureLeg) leg_dims.push_back(geom::aabb_of(inst.geometry).dims());
    }
    REQUIRE(leg_dims.size() == 4);
    for (const auto& d : leg_dims) CHECK(d.isApprox(leg_dims[0], 1e-9));
}

TEST_CASE("templates_of yields three variants per class") {
    for (const auto obj : {ObjectClass::Truck, ObjectClass::Bus, ObjectClass::Chair, ObjectClass::Table}) {
        const auto list = geom::templates_of(obj);
        REQUIRE(list.size() == 3);
        for (const auto& mesh : list) CHECK(mesh.object_class == obj);
    }
    CHECK_THROWS_AS(geom::generate_template(ObjectClass::Truck, 4), std::runtime_error);
    CHECK_THROWS_AS(geom::generate_template(ObjectClass::Truck, 0), std::runtime_error);
}

TEST_CASE("largest-dim part of each template also has the largest volume") {
    // Scene matching anchors on the part with the largest single dimension,
    // then searches by volume rank; templates are designed so both agree.
    for (const auto& mesh : geom::all_templates()) {
        CAPTURE(mesh.template_id);
        const auto instances = geom::split_instances(mesh);
        double best_dim = -1, best_dim_volume = 0, best_volume = -1;
        for (const auto& inst : instances) {
            const auto d = geom::aabb_of(inst.geometry).dims();
            const double vol = d.x() * d.y() * d.z();
            if (d.maxCoeff() > best_dim) {
                best_dim = d.maxCoeff();
                best_dim_volume = vol;
            }
            best_volume = std::max(best_volume, vol);
        }
        CHECK(best_dim_volume == doctest::Approx(best_volume));
    }
}

// =============================================================================
// Instance splitting
// =============================================================================

TEST_CASE("split instances counts wheels separately") {
    const auto mesh = geom::generate_template(ObjectClass::Truck, 1);
    const auto instances = geom::split_instances(mesh);
    std::map<PartClass, int> counts;
    for (const auto& inst : instances) counts[inst.cls]++;
    CHECK(counts[PartClass::TruckCabin] == 1);
    CHECK(counts[PartClass::TruckBody] == 1);
    CHECK(counts[PartClass::Wheel] == 4);
}

TEST_CASE("split instances connects same-label faces through shared vertices") {
    // Faces 0 and 2 share vertex 0 and a label; face 1 (other label) sits
    // between them in index order and also uses vertex 0.
    LabeledMesh mesh;
    mesh.vertices = {{0, 0, 0}, {0.2, 0, 0}, {0, 0.2, 0}, {-0.2, 0, 0}, {0, -0.2, 0}, {0.2, 0.2, 0}};
    mesh.triangles = {{0, 1, 2}, {0, 2, 3}, {0, 4, 1}};
    mesh.face_labels = {PartClass::Wheel, PartClass::TruckBody, PartClass::Wheel};
    mesh.object_class = ObjectClass::Truck;
    mesh.template_id = "probe";
    const auto instances = geom::split_instances(mesh);
    REQUIRE(instances.size() == 2);
    CHECK(instances[0].cls == PartClass::Wheel);
    CHECK(instances[0].geometry.triangles.size() == 2);
    CHECK(instances[1].cls == PartClass::TruckBody);
    CHECK(instances[1].geometry.triangles.size() == 1);
}

// =============================================================================
// OBJ round trip
// =============================================================================

TEST_CASE("obj save/load round trips a template") {
    const auto mesh = geom::generate_template(ObjectClass::Truck, 2);
    const auto path = temp_file("craft_truck2.obj");
    geom::save_obj(mesh, path.string());
    const auto loaded = geom::load_obj(path.string());

    CHECK(loaded.object_class == ObjectClass::Truck);
    CHECK(loaded.template_id == "craft_truck2");
    CHECK(loaded.vertices.size() == mesh.vertices.size());
    CHECK(loaded.triangles.size() == mesh.triangles.size());

    auto orig = geom::split_instances(mesh);
    auto back = geom::split_instances(loaded);
    REQUIRE(orig.size() == back.size());
    for (std::size_t i = 0; i < orig.size(); ++i) {
        CHECK(orig[i].cls == back[i].cls);
        const auto a = geom::aabb_of(orig[i].geometry);
        const auto b = geom::aabb_of(back[i].geometry);
        CHECK(a.min_corner.isApprox(b.min_corner, 1e-9));
        CHECK(a.max_corner.isApprox(b.max_corner, 1e-9));
    }
    std::filesystem::remove(path);
}

TEST_CASE("obj load normalizes into the unit cube") {
    const auto path = temp_file("craft_bigchair.obj");
    {
        // A chair-ish mesh 10x too large, off center.
        auto mesh = geom::generate_template(ObjectClass::Chair, 1);
        std::FILE* f = std::fopen(path.string().c_str(), "w");
        REQUIRE(f);
        const auto instances = geom::split_instances(mesh);
        int offset = 1;
        std::map<PartClass, int> counters;
        for (const auto& inst : instances) {
            std::fprintf(f, "g %s__%d\n", geom::to_string(inst.cls), counters[inst.cls]++);
            for (const auto& v : inst.geometry.vertices) {
                std::fprintf(f, "v %.17g %.17g %.17g\n", 10 * v.x() + 3, 10 * v.y() - 7, 10 * v.z());
            }
            for (const auto& t : inst.geometry.triangles) {
                std::fprintf(f, "f %d %d %d\n", t[0] + offset, t[1] + offset, t[2] + offset);
            }
            offset += static_cast<int>(inst.geometry.vertices.size());
        }
        std::fclose(f);
    }
    const auto loaded = geom::load_obj(path.string());
    CHECK_NOTHROW(loaded.validate());
    const auto bb = geom::aabb_of(MeshPart{loaded.vertices, loaded.triangles});
    CHECK(bb.dims().maxCoeff() == doctest::Approx(1.0));
    CHECK(bb.center().norm() == doctest::Approx(0.0).epsilon(1e-9));
    std::filesystem::remove(path);
}

TEST_CASE("obj load rejects ambiguous object classes") {
    const auto write = [](const std::filesystem::path& p, const char* body) {
        std::FILE* f = std::fopen(p.string().c_str(), "w");
        REQUIRE(f);
        std::fputs(body, f);
        std::fclose(f);
    };

    const auto wheels_only = temp_file("craft_wheels.obj");
    write(wheels_only,
          "g wheel__0\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    CHECK_THROWS_AS(geom::load_obj(wheels_only.string()), std::runtime_error);

    const auto conflict = temp_file("craft_conflict.obj");
    write(conflict,
          "g truck_cabin__0\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n"
          "g chair_back__0\nv 0 0 1\nv 1 0 1\nv 0 1 1\nf 4 5 6\n");
    CHECK_THROWS_AS(geom::load_obj(conflict.string()), std::runtime_error);

    std::filesystem::remove(wheels_only);
    std::filesystem::remove(conflict);
}

// =============================================================================
// Validation
// =============================================================================

TEST_CASE("labeled mesh validation rejects bad input") {
    auto mesh = geom::generate_template(ObjectClass::Table, 1);
    CHECK_NOTHROW(mesh.validate());

    auto bad_label = mesh;
    bad_label.face_labels[0] = PartClass::TruckCabin;  // incompatible with table
    CHECK_THROWS_AS(bad_label.validate(), std::runtime_error);

    auto bad_index = mesh;
    bad_index.triangles[0][0] = static_cast<int>(mesh.vertices.size());
    CHECK_THROWS_AS(bad_index.validate(), std::runtime_error);

    auto oversize = mesh;
    for (auto& v : oversize.vertices) v *= 3.0;
    CHECK_THROWS_AS(oversize.validate(), std::runtime_error);
}
