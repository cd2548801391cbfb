#include "craft/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace craft::raster {

namespace {

constexpr double kNearPlane = 0.05;
// Slivers below this screen area (px^2) are dropped: they cannot cover a
// pixel center in practice and their 1/z extrapolation is unstable.
constexpr double kMinScreenArea = 1e-8;

}  // namespace

// =============================================================================
// Camera
// =============================================================================

Vec3 Camera::eye() const {
    // Wrapping first keeps full-turn azimuth shifts bit-identical.
    const double az = std::remainder(azimuth, 2.0 * M_PI);
    return distance * Vec3(std::cos(elevation) * std::sin(az), std::sin(elevation),
                           std::cos(elevation) * std::cos(az));
}

Mat3 Camera::rotation() const {
    const Vec3 e = eye();
    const Vec3 forward = (-e).normalized();
    const Vec3 right = forward.cross(Vec3::UnitY()).normalized();
    const Vec3 down = forward.cross(right);
    Mat3 r;
    r.row(0) = right;
    r.row(1) = down;
    r.row(2) = forward;
    return r;
}

void Camera::validate() const {
    if (!(distance > 0)) throw std::runtime_error("camera distance must be positive");
    if (width < 32 || height < 32) throw std::runtime_error("camera resolution below 32x32");
    if (!(fov_y > 0) || !(fov_y < M_PI)) throw std::runtime_error("camera fov_y out of range");
}

// =============================================================================
// LabelMap / Mask
// =============================================================================

void LabelMap::validate() const {
    if (static_cast<std::size_t>(width) * height != data.size()) throw std::runtime_error("label map size mismatch");
    for (const auto px : data) {
        if (px != 0 && legend.find(px) == legend.end()) throw std::runtime_error("pixel label missing from legend");
    }
}

int Mask::count() const {
    int n = 0;
    for (const auto b : data) n += b != 0;
    return n;
}

Mask silhouette(const LabelMap& map) {
    Mask out{map.width, map.height, std::vector<std::uint8_t>(map.data.size())};
    for (std::size_t i = 0; i < map.data.size(); ++i) out.data[i] = map.data[i] != 0;
    return out;
}

Mask class_mask(const LabelMap& map, PartClass part) {
    bool wanted[256] = {};
    for (const auto& [idx, cls] : map.legend) {
        if (cls == part && idx > 0 && idx < 256) wanted[idx] = true;
    }
    Mask out{map.width, map.height, std::vector<std::uint8_t>(map.data.size())};
    for (std::size_t i = 0; i < map.data.size(); ++i) out.data[i] = wanted[map.data[i]];
    return out;
}

// =============================================================================
// Soup construction
// =============================================================================

LabeledSoup soup_from_mesh(const LabeledMesh& mesh, LabelMode mode) {
    LabeledSoup soup;
    soup.closed = mesh.closed;
    if (mode == LabelMode::ByClass) {
        soup.vertices = mesh.vertices;
        soup.triangles = mesh.triangles;
        soup.face_labels.reserve(mesh.face_labels.size());
        for (const auto cls : mesh.face_labels) {
            const int idx = static_cast<int>(cls) + 1;
            soup.face_labels.push_back(static_cast<std::uint8_t>(idx));
            soup.legend.emplace(idx, cls);
        }
        return soup;
    }

    const auto instances = geom::split_instances(mesh);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        const int idx = static_cast<int>(i) + 1;
        soup.legend.emplace(idx, inst.cls);
        const int base = static_cast<int>(soup.vertices.size());
        soup.vertices.insert(soup.vertices.end(), inst.geometry.vertices.begin(), inst.geometry.vertices.end());
        for (const auto& t : inst.geometry.triangles) {
            soup.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
            soup.face_labels.push_back(static_cast<std::uint8_t>(idx));
        }
    }
    return soup;
}

LabeledSoup soup_from_parts(std::span<const geom::PrimitivePart> parts, LabelMode mode, int segments) {
    LabeledSoup soup;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto& part = parts[i];
        const int idx = mode == LabelMode::ByClass ? static_cast<int>(part.cls) + 1 : static_cast<int>(i) + 1;
        soup.legend.emplace(idx, part.cls);
        const auto mesh = geom::make_primitive_mesh(part.primitive, segments);
        const int base = static_cast<int>(soup.vertices.size());
        for (const auto& v : mesh.vertices) soup.vertices.push_back(part.transform.apply(v));
        for (const auto& t : mesh.triangles) {
            soup.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
            soup.face_labels.push_back(static_cast<std::uint8_t>(idx));
        }
    }
    return soup;
}

// =============================================================================
// Rasterizer core
// =============================================================================

namespace {

struct ScreenVertex {
    double x, y, iz;  // pixel coordinates and 1/z_view
};

struct Viewport {
    int width, height;
    double tan_half_fov, aspect;
    double offset_x, offset_y;
};

ScreenVertex project(const Vec3& view, const Viewport& vp) {
    // View frame: x right, y down, z forward. Positive offset moves the
    // render right / up on screen.
    const double iz = 1.0 / view.z();
    const double x_ndc = view.x() * iz / (vp.tan_half_fov * vp.aspect) + vp.offset_x;
    const double y_ndc = view.y() * iz / vp.tan_half_fov - vp.offset_y;
    return {(x_ndc * 0.5 + 0.5) * vp.width, (y_ndc * 0.5 + 0.5) * vp.height, iz};
}

/// Clip a view-space triangle against z >= near. Returns 0, 3 or 4 vertices.
int clip_near(const Vec3& a, const Vec3& b, const Vec3& c, Vec3 out[4]) {
    const Vec3 in[3] = {a, b, c};
    int n = 0;
    for (int i = 0; i < 3; ++i) {
        const Vec3& cur = in[i];
        const Vec3& nxt = in[(i + 1) % 3];
        const bool cur_in = cur.z() >= kNearPlane;
        const bool nxt_in = nxt.z() >= kNearPlane;
        if (cur_in) out[n++] = cur;
        if (cur_in != nxt_in) {
            const double t = (kNearPlane - cur.z()) / (nxt.z() - cur.z());
            out[n++] = cur + t * (nxt - cur);
        }
    }
    return n;
}

/// Rasterize one screen triangle with pixel-center coverage. Each row's
/// covered x-interval is derived from the three edge lines, so only covered
/// pixels are visited. The pixel functor receives (buffer index, interpolated
/// 1/z). Both the label and the silhouette paths run through here so their
/// coverage is identical.
template <typename PixelFn>
void raster_triangle(const ScreenVertex& v0, const ScreenVertex& v1, const ScreenVertex& v2,
                     int width, int height, PixelFn&& pixel) {
    double area2 = (v1.x - v0.x) * (v2.y - v0.y) - (v2.x - v0.x) * (v1.y - v0.y);
    if (std::abs(area2) < kMinScreenArea) return;
    const double sign = area2 < 0 ? -1.0 : 1.0;

    const int x_min = std::max(0, static_cast<int>(std::ceil(std::min({v0.x, v1.x, v2.x}) - 0.5)));
    const int x_max = std::min(width - 1, static_cast<int>(std::floor(std::max({v0.x, v1.x, v2.x}) - 0.5)));
    const int y_min = std::max(0, static_cast<int>(std::ceil(std::min({v0.y, v1.y, v2.y}) - 0.5)));
    const int y_max = std::min(height - 1, static_cast<int>(std::floor(std::max({v0.y, v1.y, v2.y}) - 0.5)));
    if (x_min > x_max || y_min > y_max) return;

    // Edge functions e(x,y) = a*x + b*y + c, nonnegative inside.
    double ea[3], eb[3], ec[3], inv_a[3];
    const ScreenVertex* verts[3] = {&v0, &v1, &v2};
    for (int k = 0; k < 3; ++k) {
        const ScreenVertex& p = *verts[k];
        const ScreenVertex& q = *verts[(k + 1) % 3];
        ea[k] = sign * -(q.y - p.y);
        eb[k] = sign * (q.x - p.x);
        ec[k] = sign * ((q.y - p.y) * p.x - (q.x - p.x) * p.y);
        inv_a[k] = ea[k] != 0 ? 1.0 / ea[k] : 0.0;
    }

    // 1/z is affine in screen space for a planar triangle.
    const double dz1 = v1.iz - v0.iz, dz2 = v2.iz - v0.iz;
    const double gx = (dz1 * (v2.y - v0.y) - dz2 * (v1.y - v0.y)) / area2;
    const double gy = (dz2 * (v1.x - v0.x) - dz1 * (v2.x - v0.x)) / area2;
    const double g0 = v0.iz - gx * v0.x - gy * v0.y;

    for (int y = y_min; y <= y_max; ++y) {
        const double yc = y + 0.5;
        // Intersect the three half-planes with the row of pixel centers.
        double lo = x_min + 0.5, hi = x_max + 0.5;
        for (int k = 0; k < 3; ++k) {
            const double e0 = eb[k] * yc + ec[k];  // edge value at x = 0
            if (ea[k] > 0) {
                lo = std::max(lo, -e0 * inv_a[k]);
            } else if (ea[k] < 0) {
                hi = std::min(hi, -e0 * inv_a[k]);
            } else if (e0 < 0) {
                hi = lo - 1;  // row entirely outside
                break;
            }
        }
        const int x_start = static_cast<int>(std::ceil(lo - 0.5));
        const int x_end = static_cast<int>(std::floor(hi - 0.5));
        if (x_start > x_end) continue;

        double iz = g0 + gx * (x_start + 0.5) + gy * yc;
        std::size_t idx = static_cast<std::size_t>(y) * width + x_start;
        for (int x = x_start; x <= x_end; ++x, ++idx) {
            pixel(idx, iz);
            iz += gx;
        }
    }
}

template <typename PixelFn>
void raster_soup(const LabeledSoup& soup, const Vec3& scale, const Camera& cam,
                 std::vector<Vec3>& view_scratch, PixelFn&& pixel) {
    cam.validate();
    if (!(scale.minCoeff() > 0)) throw std::runtime_error("render scale must be positive");

    const Mat3 rot = cam.rotation();
    const Vec3 eye = cam.eye();
    const Viewport vp{cam.width, cam.height, std::tan(cam.fov_y / 2.0),
                      static_cast<double>(cam.width) / cam.height, cam.offset.x(), cam.offset.y()};

    view_scratch.resize(soup.vertices.size());
    for (std::size_t i = 0; i < soup.vertices.size(); ++i) {
        view_scratch[i] = rot * (soup.vertices[i].cwiseProduct(scale) - eye);
    }

    Vec3 clipped[4];
    for (std::size_t f = 0; f < soup.triangles.size(); ++f) {
        const auto& t = soup.triangles[f];
        const Vec3& a = view_scratch[t[0]];
        const Vec3& b = view_scratch[t[1]];
        const Vec3& c = view_scratch[t[2]];
        if (soup.closed) {
            // Back-face cull in view space: the face normal points away from
            // the camera (at the view-space origin).
            if ((b - a).cross(c - a).dot(a) >= 0) continue;
        }
        const std::uint8_t label = soup.face_labels[f];
        const int n = clip_near(a, b, c, clipped);
        if (n < 3) continue;
        const ScreenVertex s0 = project(clipped[0], vp);
        ScreenVertex prev = project(clipped[1], vp);
        for (int k = 2; k < n; ++k) {
            const ScreenVertex cur = project(clipped[k], vp);
            raster_triangle(s0, prev, cur, cam.width, cam.height,
                            [&](std::size_t idx, double iz) { pixel(idx, iz, label); });
            prev = cur;
        }
    }
}

}  // namespace

LabelMap render_soup(const LabeledSoup& soup, const Vec3& scale, const Camera& cam) {
    LabelMap map;
    map.width = cam.width;
    map.height = cam.height;
    map.data.assign(static_cast<std::size_t>(cam.width) * cam.height, 0);
    map.legend = soup.legend;

    std::vector<float> depth(map.data.size(), 0.0f);  // stores 1/z; 0 = far
    std::vector<Vec3> scratch;
    raster_soup(soup, scale, cam, scratch, [&](std::size_t idx, double iz, std::uint8_t label) {
        const float fiz = static_cast<float>(iz);
        if (fiz > depth[idx]) {
            depth[idx] = fiz;
            map.data[idx] = label;
        }
    });
    return map;
}

LabelMap render_labels(const LabeledMesh& mesh, const Vec3& scale, const Camera& cam, LabelMode mode) {
    return render_soup(soup_from_mesh(mesh, mode), scale, cam);
}

LabelMap render_parts(std::span<const geom::PrimitivePart> parts, const Camera& cam, LabelMode mode) {
    return render_soup(soup_from_parts(parts, mode), Vec3(1, 1, 1), cam);
}

// =============================================================================
// SilhouetteRenderer
// =============================================================================

SilhouetteRenderer::SilhouetteRenderer(int width, int height) : width_(width), height_(height) {
    stamps_.assign(static_cast<std::size_t>(width) * height, 0);
}

SilhouetteRenderer::Counts SilhouetteRenderer::render(const LabeledSoup& soup, const Vec3& scale,
                                                      const Camera& cam, const Mask* target) {
    if (cam.width != width_ || cam.height != height_) {
        throw std::runtime_error("silhouette renderer resolution mismatch");
    }
    if (target && (target->width != width_ || target->height != height_)) {
        throw std::runtime_error("target resolution mismatch");
    }
    if (++generation_ == 0) {  // stamp wraparound
        std::fill(stamps_.begin(), stamps_.end(), 0);
        generation_ = 1;
    }

    Counts counts;
    std::uint32_t* stamps = stamps_.data();
    const std::uint32_t gen = generation_;
    const std::uint8_t* tgt = target ? target->data.data() : nullptr;
    raster_soup(soup, scale, cam, view_space_, [&](std::size_t idx, double, std::uint8_t) {
        if (stamps[idx] != gen) {
            stamps[idx] = gen;
            ++counts.rendered;
            if (tgt) counts.overlap += tgt[idx] != 0;
        }
    });
    return counts;
}

const Mask& SilhouetteRenderer::mask() const {
    if (mask_.data.empty() || mask_generation_ != generation_) {
        mask_.width = width_;
        mask_.height = height_;
        mask_.data.resize(stamps_.size());
        // generation_ == 0 means nothing was rendered yet.
        for (std::size_t i = 0; i < stamps_.size(); ++i) {
            mask_.data[i] = generation_ != 0 && stamps_[i] == generation_;
        }
        mask_generation_ = generation_;
    }
    return mask_;
}

// =============================================================================
// PGM + legend I/O
// =============================================================================

void save_label_map(const LabelMap& map, const std::string& path, std::uint64_t seed) {
    map.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "P5\n# seed=" << seed << "\n" << map.width << " " << map.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(map.data.data()), static_cast<std::streamsize>(map.data.size()));
    if (!out) throw std::runtime_error("write failed: " + path);

    std::ofstream legend(path + ".legend");
    if (!legend) throw std::runtime_error("cannot open for writing: " + path + ".legend");
    for (const auto& [idx, cls] : map.legend) legend << idx << " " << to_string(cls) << "\n";
}

namespace {

int next_pgm_int(std::istream& in) {
    // Skips whitespace and '#' comments between header fields.
    int c = in.get();
    while (c == '#' || std::isspace(c)) {
        if (c == '#') {
            while (c != '\n' && c != EOF) c = in.get();
        }
        c = in.get();
    }
    int value = 0;
    bool any = false;
    while (std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = in.get();
    }
    if (!any) throw std::runtime_error("malformed PGM header");
    return value;
}

}  // namespace

LabelMap load_label_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[2] = {};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5') throw std::runtime_error("not a binary PGM: " + path);

    LabelMap map;
    map.width = next_pgm_int(in);
    map.height = next_pgm_int(in);
    const int maxval = next_pgm_int(in);
    if (maxval != 255) throw std::runtime_error("unsupported PGM maxval");
    // The single whitespace after maxval was already consumed by the digit scan.
    map.data.resize(static_cast<std::size_t>(map.width) * map.height);
    in.read(reinterpret_cast<char*>(map.data.data()), static_cast<std::streamsize>(map.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(map.data.size())) {
        throw std::runtime_error("truncated PGM data: " + path);
    }

    std::ifstream legend(path + ".legend");
    if (!legend) throw std::runtime_error("missing legend sidecar: " + path + ".legend");
    std::string line;
    while (std::getline(legend, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        int idx;
        std::string name;
        if (ss >> idx >> name) map.legend.emplace(idx, geom::part_class_from_string(name));
    }
    map.validate();
    return map;
}

}  // namespace craft::raster
