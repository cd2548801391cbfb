#include "craft/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "craft/primfit.hpp"
#include "craft/rng.hpp"
#include "craft/structure.hpp"

namespace craft::cli {

using evalkit::PartCounts;
using geom::LabeledMesh;
using geom::ObjectClass;
using geom::PartClass;
using geom::Primitive;
using geom::PrimitivePart;
using geom::RigidTransform;
using geom::Vec3;
using raster::Camera;
using raster::LabelMap;

namespace {

std::string out_path(const RunContext& ctx, const std::string& name) {
    std::filesystem::create_directories(ctx.out_dir);
    return (std::filesystem::path(ctx.out_dir) / name).string();
}

const LabeledMesh& template_by_id(const std::string& id) {
    static const std::vector<LabeledMesh> meshes = geom::all_templates();
    for (const auto& mesh : meshes) {
        if (mesh.template_id == id) return mesh;
    }
    throw std::runtime_error("unknown template id: " + id);
}

poseopt::OptimConfig optim_from_json(const json& j) {
    poseopt::OptimConfig cfg;
    cfg.n_views = j.value("n_views", cfg.n_views);
    cfg.n_batches = j.value("n_batches", cfg.n_batches);
    cfg.steps = j.value("steps", cfg.steps);
    cfg.step_size = j.value("step_size", cfg.step_size);
    cfg.lambda_iou = j.value("lambda_iou", cfg.lambda_iou);
    cfg.lambda_miou = j.value("lambda_miou", cfg.lambda_miou);
    cfg.lambda_dist = j.value("lambda_dist", cfg.lambda_dist);
    return cfg;
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json counts_to_json(const PartCounts& counts) {
    json j = json::object();
    for (const auto& [cls, count] : counts) j[geom::to_string(cls)] = count;
    return j;
}

PartCounts counts_from_json(const json& j) {
    PartCounts counts;
    for (const auto& [name, count] : j.items())
        counts[geom::part_class_from_string(name)] = count.get<int>();
    return counts;
}

PartCounts model_part_counts(const std::vector<PrimitivePart>& parts) {
    PartCounts counts;
    for (const auto& part : parts) {
        if (part.cls == PartClass::Axle) continue;
        ++counts[part.cls];
    }
    return counts;
}

}  // namespace

// =============================================================================
// Serialization
// =============================================================================

json camera_to_json(const Camera& cam) {
    return {{"azimuth", cam.azimuth},
            {"elevation", cam.elevation},
            {"distance", cam.distance},
            {"offset", {cam.offset.x(), cam.offset.y()}},
            {"fov_y", cam.fov_y},
            {"width", cam.width},
            {"height", cam.height}};
}

Camera camera_from_json(const json& j) {
    Camera cam;
    cam.azimuth = j.value("azimuth", cam.azimuth);
    cam.elevation = j.value("elevation", cam.elevation);
    cam.distance = j.value("distance", cam.distance);
    if (j.contains("offset")) {
        const auto& o = j.at("offset");
        if (!o.is_array() || o.size() != 2) throw std::invalid_argument("camera offset must hold 2 values");
        cam.offset = {o[0].get<double>(), o[1].get<double>()};
    }
    cam.fov_y = j.value("fov_y", cam.fov_y);
    cam.width = j.value("width", cam.width);
    cam.height = j.value("height", cam.height);
    cam.validate();
    return cam;
}

json transform_to_json(const RigidTransform& t) {
    json rows = json::array();
    for (int r = 0; r < 3; ++r) {
        rows.push_back(json::array(
            {t.rotation(r, 0), t.rotation(r, 1), t.rotation(r, 2), t.translation[r]}));
    }
    rows.push_back(json::array({0.0, 0.0, 0.0, 1.0}));
    return rows;
}

RigidTransform transform_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw std::invalid_argument("transform must be a 4x4 matrix");
    RigidTransform t;
    for (int r = 0; r < 3; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || row.size() != 4)
            throw std::invalid_argument("transform must be a 4x4 matrix");
        for (int c = 0; c < 3; ++c) t.rotation(r, c) = row[c].get<double>();
        t.translation[r] = row[3].get<double>();
    }
    if (!t.is_valid()) throw std::invalid_argument("transform rotation is not orthonormal");
    return t;
}

json primitive_to_json(const Primitive& prim) {
    json j;
    j["shape"] = geom::to_string(prim.shape);
    if (prim.shape == Primitive::Shape::Cuboid) {
        j["dims"] = vec3_to_json(prim.dims);
    } else {
        j["dims"] = json::array({prim.radius, prim.length});
        j["axis"] = geom::to_string(prim.axis);
    }
    return j;
}

Primitive primitive_from_json(const json& j) {
    const auto shape = geom::shape_from_string(j.at("shape").get<std::string>());
    const auto& dims = j.at("dims");
    Primitive prim;
    if (shape == Primitive::Shape::Cuboid) {
        prim = Primitive::cuboid(vec3_from_json(dims));
    } else {
        if (!dims.is_array() || dims.size() != 2)
            throw std::invalid_argument("cylinder dims must hold [radius, length]");
        const auto axis = j.contains("axis")
                              ? geom::axis_from_string(j.at("axis").get<std::string>())
                              : geom::Axis::X;
        prim = Primitive::cylinder(dims[0].get<double>(), dims[1].get<double>(), axis);
    }
    prim.validate();
    return prim;
}

json part_to_json(const PrimitivePart& part) {
    return {{"id", part.id},
            {"class", geom::to_string(part.cls)},
            {"primitive", primitive_to_json(part.primitive)},
            {"transform", transform_to_json(part.transform)}};
}

PrimitivePart part_from_json(const json& j) {
    PrimitivePart part;
    part.id = j.at("id").get<std::string>();
    part.cls = geom::part_class_from_string(j.at("class").get<std::string>());
    part.primitive = primitive_from_json(j.at("primitive"));
    part.transform = transform_from_json(j.at("transform"));
    return part;
}

std::vector<match::SceneObject> load_scene(const std::string& path) {
    const json doc = read_json(path);
    if (!doc.is_array()) throw std::runtime_error("scene file must hold a JSON array: " + path);
    std::vector<match::SceneObject> scene;
    std::set<std::string> ids;
    for (const auto& entry : doc) {
        match::SceneObject object;
        object.id = entry.at("id").get<std::string>();
        object.primitive = primitive_from_json(entry);
        if (!ids.insert(object.id).second)
            throw std::runtime_error("duplicate scene object id: " + object.id);
        scene.push_back(std::move(object));
    }
    return scene;
}

json scene_to_json(const std::vector<match::SceneObject>& scene) {
    json doc = json::array();
    for (const auto& object : scene) {
        json entry = primitive_to_json(object.primitive);
        entry.erase("axis");  // scene objects are free to reorient
        json row = {{"id", object.id}};
        row.update(entry);
        doc.push_back(row);
    }
    return doc;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return json::parse(in);
}

// =============================================================================
// Legend interpretation
// =============================================================================

ObjectClass object_class_from_legend(const std::map<int, PartClass>& legend) {
    std::optional<ObjectClass> found;
    for (const auto& [label, cls] : legend) {
        (void)label;
        const auto exclusive = geom::exclusive_object_class(cls);
        if (!exclusive) continue;
        if (found && *found != *exclusive) throw std::runtime_error("object class undeterminable");
        found = exclusive;
    }
    if (!found) throw std::runtime_error("object class undeterminable");
    return *found;
}

PartCounts counts_from_legend(const std::map<int, PartClass>& legend) {
    PartCounts counts;
    for (const auto& [label, cls] : legend) {
        (void)label;
        ++counts[cls];
    }
    return counts;
}

// =============================================================================
// Stage runners shared by the single commands and the pipeline
// =============================================================================

namespace {

struct PoseStage {
    ObjectClass object_class = ObjectClass::Truck;
    poseopt::PoseResult result;
};

PoseStage run_pose_stage(const RunContext& ctx, const LabelMap& input) {
    PoseStage stage;
    stage.object_class = object_class_from_legend(input.legend);
    poseopt::OptimConfig optim = optim_from_json(ctx.config.value("optim", json::object()));
    optim.seed = craft::substream(ctx.seed, "pose");
    optim.validate();
    const auto templates = geom::templates_of(stage.object_class);
    stage.result = poseopt::run_pose_search(templates, input, optim);
    return stage;
}

json pose_stage_json(const RunContext& ctx, const PoseStage& stage) {
    const auto& r = stage.result;
    return {{"command", "pose"},
            {"seed", ctx.seed},
            {"config", ctx.config},
            {"object_class", geom::to_string(stage.object_class)},
            {"result",
             {{"template_id", r.template_id},
              {"hypothesis_index", r.hypothesis_index},
              {"camera", camera_to_json(r.hypothesis.cam)},
              {"scale", vec3_to_json(r.hypothesis.scale)},
              {"losses",
               {{"iou", r.l_iou}, {"miou", r.l_miou}, {"dist", r.l_dist}, {"total", r.l_total}}},
              {"steps", r.hypothesis.loss_history.size()}}}};
}

struct SimplifyStage {
    std::vector<structure::PartInstance> completed;
    std::vector<PrimitivePart> parts;
    std::vector<std::string> warnings;
};

SimplifyStage run_simplify_stage(const RunContext& ctx, const LabeledMesh& mesh,
                                 const LabelMap& input, const Camera& cam, const Vec3& scale,
                                 int samples) {
    SimplifyStage stage;
    const auto instances = structure::extract_instances(mesh);
    const LabelMap rendered =
        raster::render_labels(mesh, scale, cam, raster::LabelMode::ByInstance);
    const auto correspondence = structure::correspond_parts(rendered, input);
    const auto kept = structure::filter_parts(instances, correspondence);
    stage.completed = structure::mirror_completion(kept);
    stage.parts =
        primfit::simplify_model(stage.completed, mesh.object_class, samples,
                                craft::substream(ctx.seed, "simplify"), &stage.warnings);
    return stage;
}

json simplify_stage_json(const RunContext& ctx, const LabeledMesh& mesh, const Camera& cam,
                         const Vec3& scale, const SimplifyStage& stage) {
    // Provenance of each simplified part, keyed by the ids primfit assigns.
    std::map<std::string, const structure::PartInstance*> origins;
    for (const auto& inst : stage.completed) {
        origins.emplace(std::string(geom::to_string(inst.part_class)) + "__" +
                            std::to_string(inst.id),
                        &inst);
    }
    json parts = json::array();
    for (const auto& part : stage.parts) {
        json entry = part_to_json(part);
        const auto it = origins.find(part.id);
        entry["provenance"] = it == origins.end()
                                  ? structure::to_string(structure::Provenance::Generated)
                                  : structure::to_string(it->second->provenance);
        parts.push_back(std::move(entry));
    }

    json instances = json::array();
    for (const auto& inst : stage.completed) {
        const auto box = geom::aabb_of(inst.geometry);
        instances.push_back({{"id", inst.id},
                             {"class", geom::to_string(inst.part_class)},
                             {"provenance", structure::to_string(inst.provenance)},
                             {"source_id", inst.source_id},
                             {"aabb",
                              {{"min", vec3_to_json(box.min_corner)},
                               {"max", vec3_to_json(box.max_corner)}}}});
    }

    return {{"command", "simplify"},
            {"seed", ctx.seed},
            {"config", ctx.config},
            {"object_class", geom::to_string(mesh.object_class)},
            {"template_id", mesh.template_id},
            {"camera", camera_to_json(cam)},
            {"scale", vec3_to_json(scale)},
            {"parts", std::move(parts)},
            {"instances", std::move(instances)},
            {"warnings", stage.warnings}};
}

json proposal_json(const RunContext& ctx, const std::string& object_class,
                   const std::vector<PrimitivePart>& parts,
                   const match::CraftProposal& proposal) {
    std::map<std::string, const PrimitivePart*> by_id;
    for (const auto& part : parts) by_id.emplace(part.id, &part);
    json assignments = json::array();
    for (const auto& a : proposal.assignments) {
        assignments.push_back({{"part_id", a.part_id},
                               {"object_id", a.object_id},
                               {"part", part_to_json(*by_id.at(a.part_id))},
                               {"transform", transform_to_json(a.transform)}});
    }
    return {{"command", "match"},
            {"seed", ctx.seed},
            {"config", ctx.config},
            {"object_class", object_class},
            {"assignments", std::move(assignments)}};
}

struct EvaluateInputs {
    std::vector<PrimitivePart> parts;
    Camera pred_cam;
    Vec3 scale{1, 1, 1};
    LabelMap gt;
    Camera gt_cam;
};

json evaluate_case_json(const RunContext& ctx, const EvaluateInputs& in) {
    const ObjectClass cls = object_class_from_legend(in.gt.legend);

    Camera pred_cam = in.pred_cam;
    Camera gt_cam = in.gt_cam;
    pred_cam.width = gt_cam.width = in.gt.width;
    pred_cam.height = gt_cam.height = in.gt.height;

    const bool vp = evalkit::vp_accuracy(pred_cam.rotation(), gt_cam.rotation(), cls);
    const bool part_acc = evalkit::part_count_accuracy(model_part_counts(in.parts),
                                                       counts_from_legend(in.gt.legend));

    const auto soup = raster::soup_from_parts(in.parts, raster::LabelMode::ByClass);
    const LabelMap pred_view = raster::render_soup(soup, in.scale, pred_cam);
    const bool sil = evalkit::silhouette_accuracy(raster::silhouette(pred_view),
                                                  raster::silhouette(in.gt));

    // Shape-only metrics compare renders taken from the ground truth pose.
    const LabelMap gt_view = raster::render_soup(soup, in.scale, gt_cam);
    const double piou = evalkit::part_iou(gt_view, in.gt);
    const double em = evalkit::e_measure(raster::silhouette(gt_view), raster::silhouette(in.gt));

    const evalkit::EvalReport report = evalkit::make_report(vp, part_acc, sil, piou, em);
    return {{"command", "evaluate"},
            {"seed", ctx.seed},
            {"config", ctx.config},
            {"object_class", geom::to_string(cls)},
            {"vp_acc", report.vp_acc},
            {"part_acc", report.part_acc},
            {"sil_acc", report.sil_acc},
            {"success", report.success},
            {"part_iou", report.part_iou},
            {"e_measure", report.e_measure}};
}

EvaluateInputs evaluate_inputs_from_files(const json& case_doc) {
    EvaluateInputs in;
    const json proposal = read_json(case_doc.at("proposal").get<std::string>());
    for (const auto& a : proposal.at("assignments")) in.parts.push_back(part_from_json(a.at("part")));
    const json pose = read_json(case_doc.at("pose").get<std::string>());
    in.pred_cam = camera_from_json(pose.at("result").at("camera"));
    in.scale = vec3_from_json(pose.at("result").at("scale"));
    in.gt = raster::load_label_map(case_doc.at("gt_mask").get<std::string>());
    in.gt_cam = camera_from_json(case_doc.at("gt_camera"));
    return in;
}

}  // namespace

// =============================================================================
// Commands
// =============================================================================

void cmd_pose(const RunContext& ctx) {
    const LabelMap input = raster::load_label_map(ctx.config.at("input").get<std::string>());
    const PoseStage stage = run_pose_stage(ctx, input);
    write_json(pose_stage_json(ctx, stage), out_path(ctx, "pose.json"));
    raster::save_label_map(stage.result.render, out_path(ctx, "pose_render.pgm"), ctx.seed);
}

void cmd_simplify(const RunContext& ctx) {
    const json pose = read_json(ctx.config.at("pose").get<std::string>());
    const LabelMap input = raster::load_label_map(ctx.config.at("input").get<std::string>());
    const LabeledMesh& mesh = template_by_id(pose.at("result").at("template_id").get<std::string>());
    const Camera cam = camera_from_json(pose.at("result").at("camera"));
    const Vec3 scale = vec3_from_json(pose.at("result").at("scale"));
    const int samples = ctx.config.value("samples", 2048);
    const SimplifyStage stage = run_simplify_stage(ctx, mesh, input, cam, scale, samples);
    write_json(simplify_stage_json(ctx, mesh, cam, scale, stage), out_path(ctx, "model.json"));
}

void cmd_match(const RunContext& ctx) {
    const json model = read_json(ctx.config.at("model").get<std::string>());
    std::vector<PrimitivePart> parts;
    for (const auto& p : model.at("parts")) parts.push_back(part_from_json(p));
    const auto scene = load_scene(ctx.config.at("scene").get<std::string>());
    const auto proposal = match::build_proposal(parts, scene);
    write_json(proposal_json(ctx, model.at("object_class").get<std::string>(), parts, proposal),
               out_path(ctx, "proposal.json"));
}

void cmd_evaluate(const RunContext& ctx) {
    if (!ctx.config.contains("cases")) {
        const json report = evaluate_case_json(ctx, evaluate_inputs_from_files(ctx.config));
        write_json(report, out_path(ctx, "report.json"));
        return;
    }

    // A corpus of cases: one report each plus an aggregate CSV over classes.
    struct Tally {
        int n = 0, vp = 0, part = 0, sil = 0, success = 0;
        double piou = 0, em = 0;
    };
    std::map<std::string, Tally> tallies;
    const auto& cases = ctx.config.at("cases");
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const json report = evaluate_case_json(ctx, evaluate_inputs_from_files(cases[k]));
        write_json(report, out_path(ctx, "report_" + std::to_string(k) + ".json"));
        for (const std::string& key : {report.at("object_class").get<std::string>(),
                                       std::string("all")}) {
            Tally& t = tallies[key];
            ++t.n;
            t.vp += report.at("vp_acc").get<bool>();
            t.part += report.at("part_acc").get<bool>();
            t.sil += report.at("sil_acc").get<bool>();
            t.success += report.at("success").get<bool>();
            t.piou += report.at("part_iou").get<double>();
            t.em += report.at("e_measure").get<double>();
        }
    }

    std::ostringstream csv;
    csv << "object_class,cases,vp_acc,part_acc,sil_acc,success,part_iou,e_measure\n";
    for (const auto& [key, t] : tallies) {
        csv << key << "," << t.n;
        for (const int count : {t.vp, t.part, t.sil, t.success})
            csv << "," << static_cast<double>(count) / t.n;
        csv << "," << t.piou / t.n << "," << t.em / t.n << "\n";
    }
    std::ofstream out(out_path(ctx, "aggregate.csv"), std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: aggregate.csv");
    out << csv.str();
}

void cmd_baseline(const RunContext& ctx) {
    evalkit::BaselineConfig cfg;
    cfg.gt_masks = raster::load_label_map(ctx.config.at("gt_mask").get<std::string>());
    cfg.gt_camera = camera_from_json(ctx.config.at("gt_camera"));
    cfg.gt_camera.width = cfg.gt_masks.width;
    cfg.gt_camera.height = cfg.gt_masks.height;

    const std::string metric = ctx.config.value("metric", "miou");
    if (metric == "miou") {
        cfg.metric = evalkit::BaselineMetric::MIoU;
    } else if (metric == "me_max") {
        cfg.metric = evalkit::BaselineMetric::MEMax;
    } else {
        throw std::runtime_error("unknown baseline metric: " + metric);
    }

    cfg.part_counts = ctx.config.contains("part_counts")
                          ? counts_from_json(ctx.config.at("part_counts"))
                          : counts_from_legend(cfg.gt_masks.legend);
    if (ctx.config.contains("same_dims")) {
        cfg.same_dims.clear();
        for (const auto& name : ctx.config.at("same_dims"))
            cfg.same_dims.push_back(geom::part_class_from_string(name.get<std::string>()));
    }

    const auto scene = load_scene(ctx.config.at("scene").get<std::string>());
    const auto result = evalkit::baseline_search(scene, cfg);

    json choices = json::array();
    for (const auto& c : result.choices) {
        json entry = {{"class", geom::to_string(c.cls)}, {"instance", c.instance}};
        entry.update(primitive_to_json(c.type));
        choices.push_back(std::move(entry));
    }
    write_json({{"command", "baseline"},
                {"seed", ctx.seed},
                {"config", ctx.config},
                {"metric", metric},
                {"part_counts", counts_to_json(cfg.part_counts)},
                {"template_id", result.template_id},
                {"score", result.score},
                {"choices", std::move(choices)}},
               out_path(ctx, "baseline.json"));
}

void cmd_pipeline(const RunContext& ctx) {
    const LabelMap input = raster::load_label_map(ctx.config.at("input").get<std::string>());

    const PoseStage pose = run_pose_stage(ctx, input);
    write_json(pose_stage_json(ctx, pose), out_path(ctx, "pose.json"));
    raster::save_label_map(pose.result.render, out_path(ctx, "pose_render.pgm"), ctx.seed);

    const LabeledMesh& mesh = template_by_id(pose.result.template_id);
    const Camera& cam = pose.result.hypothesis.cam;
    const Vec3& scale = pose.result.hypothesis.scale;
    const int samples = ctx.config.value("samples", 2048);
    const SimplifyStage simplified = run_simplify_stage(ctx, mesh, input, cam, scale, samples);
    write_json(simplify_stage_json(ctx, mesh, cam, scale, simplified),
               out_path(ctx, "model.json"));

    const auto scene = load_scene(ctx.config.at("scene").get<std::string>());
    const auto proposal = match::build_proposal(simplified.parts, scene);
    write_json(
        proposal_json(ctx, geom::to_string(mesh.object_class), simplified.parts, proposal),
        out_path(ctx, "proposal.json"));

    const auto soup = raster::soup_from_parts(simplified.parts, raster::LabelMode::ByClass);
    raster::save_label_map(raster::render_soup(soup, scale, cam),
                           out_path(ctx, "craft_render.pgm"), ctx.seed);

    if (ctx.config.contains("gt_camera")) {
        EvaluateInputs in;
        in.parts = simplified.parts;
        in.pred_cam = cam;
        in.scale = scale;
        in.gt = input;
        in.gt_cam = camera_from_json(ctx.config.at("gt_camera"));
        write_json(evaluate_case_json(ctx, in), out_path(ctx, "report.json"));
    }
}

}  // namespace craft::cli
