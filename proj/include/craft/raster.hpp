#pragma once

#include "craft/geom.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace craft::raster {

using geom::LabeledMesh;
using geom::Mat3;
using geom::PartClass;
using geom::Tri;
using geom::Vec3;

/// Look-at-the-origin camera on a spherical orbit, plus a screen-space offset.
struct Camera {
    double azimuth = 0;         // radians around the y (up) axis
    double elevation = 0;       // radians above the horizon
    double distance = 2.5;      // model units from the origin
    Eigen::Vector2d offset{0, 0};  // normalized-device translation
    double fov_y = 30.0 * M_PI / 180.0;
    int width = 256;
    int height = 256;

    Vec3 eye() const;
    /// World-to-camera rotation, vision convention: x right, y down,
    /// z forward (into the screen).
    Mat3 rotation() const;
    void validate() const;
};

/// W x H raster of label indices; 0 is background. The legend maps nonzero
/// indices to part classes; several indices may share a class (one per part
/// instance).
struct LabelMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;           // row-major, width*height
    std::map<int, PartClass> legend;

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    void validate() const;
};

struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // 0/1

    bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    int count() const;
};

enum class LabelMode : std::uint8_t {
    ByClass,     // one label index per part class
    ByInstance,  // one label index per part instance
};

/// Triangle soup with per-face label indices; the rasterizer input. Built from
/// labeled meshes or from placed primitive parts.
struct LabeledSoup {
    std::vector<Vec3> vertices;
    std::vector<Tri> triangles;
    std::vector<std::uint8_t> face_labels;  // label index per triangle (>= 1)
    std::map<int, PartClass> legend;
    bool closed = true;  // enables back-face culling
};

LabeledSoup soup_from_mesh(const LabeledMesh& mesh, LabelMode mode);
LabeledSoup soup_from_parts(std::span<const geom::PrimitivePart> parts, LabelMode mode,
                            int segments = 24);

/// Perspective render with z-buffering; each covered pixel carries the label
/// of the nearest face. Deterministic for identical inputs.
LabelMap render_soup(const LabeledSoup& soup, const Vec3& scale, const Camera& cam);
LabelMap render_labels(const LabeledMesh& mesh, const Vec3& scale, const Camera& cam,
                       LabelMode mode = LabelMode::ByClass);
LabelMap render_parts(std::span<const geom::PrimitivePart> parts, const Camera& cam,
                      LabelMode mode = LabelMode::ByClass);

Mask silhouette(const LabelMap& map);
Mask class_mask(const LabelMap& map, PartClass part);

/// Coverage-only renderer with reusable buffers for optimizer inner loops.
/// Counts rendered pixels and overlap with a target mask in the same pass.
class SilhouetteRenderer {
public:
    SilhouetteRenderer(int width, int height);

    struct Counts {
        int rendered = 0;  // silhouette pixel count
        int overlap = 0;   // pixels set in both render and target
    };

    /// Renders mesh scaled per-axis under `cam`. `target` may be null.
    Counts render(const LabeledSoup& soup, const Vec3& scale, const Camera& cam, const Mask* target);

    /// Materializes the most recent render as a 0/1 mask.
    const Mask& mask() const;

private:
    int width_, height_;
    // Coverage is tracked with per-pixel generation stamps so a new render
    // needs no buffer clear.
    std::vector<std::uint32_t> stamps_;
    std::uint32_t generation_ = 0;
    std::vector<Vec3> view_space_;
    mutable Mask mask_;
    mutable std::uint32_t mask_generation_ = 0;
};

// Label map files: binary PGM (P5) whose bytes are label indices, with a
// sidecar `<path>.legend` text file of `index part_class_name` lines.
void save_label_map(const LabelMap& map, const std::string& path, std::uint64_t seed = 0);
LabelMap load_label_map(const std::string& path);

}  // namespace craft::raster
