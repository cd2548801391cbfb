#include "craft/geom.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace craft::geom {

void save_obj(const LabeledMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);

    out << "# part-labeled mesh, one group per part instance\n";
    out << "o " << mesh.template_id << "\n";

    std::map<PartClass, int> counters;
    const auto instances = split_instances(mesh);
    int base = 1;  // OBJ indices are 1-based
    for (const auto& inst : instances) {
        const int idx = ++counters[inst.cls];
        out << "g " << to_string(inst.cls) << "__" << idx << "\n";
        for (const auto& v : inst.geometry.vertices) out << "v " << v.x() << " " << v.y() << " " << v.z() << "\n";
        for (const auto& t : inst.geometry.triangles) {
            out << "f " << base + t[0] << " " << base + t[1] << " " << base + t[2] << "\n";
        }
        base += static_cast<int>(inst.geometry.vertices.size());
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

PartClass label_from_group(const std::string& group) {
    const auto sep = group.find("__");
    return part_class_from_string(sep == std::string::npos ? group : group.substr(0, sep));
}

int parse_obj_index(const std::string& token, int vertex_count) {
    // "v", "v/vt", "v//vn", "v/vt/vn" all start with the vertex index.
    const auto slash = token.find('/');
    int idx = std::stoi(slash == std::string::npos ? token : token.substr(0, slash));
    if (idx < 0) idx = vertex_count + idx + 1;  // negative indices count from the end
    if (idx < 1 || idx > vertex_count) throw std::runtime_error("OBJ face index out of range");
    return idx - 1;
}

}  // namespace

LabeledMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);

    LabeledMesh mesh;
    mesh.closed = false;  // unknown for external meshes
    std::optional<PartClass> current_label;

    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;

        if (tag == "v") {
            Vec3 v;
            ss >> v.x() >> v.y() >> v.z();
            mesh.vertices.push_back(v);
        } else if (tag == "g" || tag == "o") {
            std::string name;
            ss >> name;
            if (tag == "g") current_label = label_from_group(name);
        } else if (tag == "f") {
            if (!current_label) throw std::runtime_error("OBJ face before any part group: " + path);
            std::vector<int> poly;
            std::string token;
            while (ss >> token) poly.push_back(parse_obj_index(token, static_cast<int>(mesh.vertices.size())));
            if (poly.size() < 3) throw std::runtime_error("OBJ face with fewer than 3 vertices");
            for (std::size_t k = 2; k < poly.size(); ++k) {
                mesh.triangles.push_back({poly[0], poly[static_cast<int>(k) - 1], poly[static_cast<int>(k)]});
                mesh.face_labels.push_back(*current_label);
            }
        }
    }
    if (mesh.triangles.empty()) throw std::runtime_error("OBJ contains no labeled faces: " + path);

    // Infer the object class from the unique part classes present.
    std::set<ObjectClass> inferred;
    std::set<PartClass> present(mesh.face_labels.begin(), mesh.face_labels.end());
    for (const auto cls : present) {
        if (const auto obj = exclusive_object_class(cls)) inferred.insert(*obj);
    }
    if (inferred.empty()) throw std::runtime_error("object class undeterminable: no unique part class in " + path);
    if (inferred.size() > 1) throw std::runtime_error("object class undeterminable: conflicting unique parts in " + path);
    mesh.object_class = *inferred.begin();

    // Normalize into the canonical frame.
    const Aabb box = aabb_of(std::span<const Vec3>(mesh.vertices));
    const double scale = 1.0 / box.dims().maxCoeff();
    const Vec3 center = box.center();
    for (auto& v : mesh.vertices) v = (v - center) * scale;

    const auto slash = path.find_last_of("/\\");
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    const auto dot = stem.find_last_of('.');
    mesh.template_id = dot == std::string::npos ? stem : stem.substr(0, dot);

    mesh.validate();
    return mesh;
}

}  // namespace craft::geom
