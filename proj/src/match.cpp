#include "craft/match.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace craft::match {

using geom::Primitive;

DimVector dim_vector(const Primitive& prim) {
    DimVector d;
    if (prim.shape == Primitive::Shape::Cuboid) {
        d = {prim.dims.x(), prim.dims.y(), prim.dims.z()};
    } else {
        d = {prim.length, 2.0 * prim.radius, 2.0 * prim.radius};
    }
    std::sort(d.begin(), d.end(), std::greater<>());
    return d;
}

DimVector ratios_of(const DimVector& dims) {
    return {dims[0] / dims[0], dims[1] / dims[0], dims[2] / dims[0]};
}

namespace {

double mean_abs_diff(const DimVector& a, const DimVector& b) {
    return (std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2])) / 3.0;
}

}  // namespace

const PrimitivePart& find_largest_part(std::span<const PrimitivePart> parts) {
    if (parts.empty()) throw std::invalid_argument("no parts");
    const PrimitivePart* best = nullptr;
    double best_dim = 0, best_vol = 0;
    for (const auto& part : parts) {
        const double dim = dim_vector(part.primitive)[0];
        const double vol = part.primitive.volume();
        const bool wins = best == nullptr || dim > best_dim ||
                          (dim == best_dim && vol > best_vol) ||
                          (dim == best_dim && vol == best_vol && part.id < best->id);
        if (wins) {
            best = &part;
            best_dim = dim;
            best_vol = vol;
        }
    }
    return *best;
}

std::vector<NormalizedPart> normalize_parts(std::span<const PrimitivePart> parts,
                                            const PrimitivePart& p_max) {
    const double ref = dim_vector(p_max.primitive)[0];
    std::vector<NormalizedPart> out;
    out.reserve(parts.size());
    for (const auto& part : parts) {
        const DimVector d = dim_vector(part.primitive);
        NormalizedPart n;
        n.id = part.id;
        n.cls = part.cls;
        n.shape = part.primitive.shape;
        n.dims = {d[0] / ref, d[1] / ref, d[2] / ref};
        n.ratios = ratios_of(d);
        n.transform = part.transform;
        out.push_back(std::move(n));
    }
    return out;
}

const SceneObject& find_anchor(std::span<const SceneObject> scene,
                               const NormalizedPart& p_max_n) {
    struct Entry {
        const SceneObject* obj;
        double dim_error;  // ranking A score
        double volume;     // ranking B score
        int rank_a = 0, rank_b = 0;
    };
    std::vector<Entry> entries;
    for (const auto& obj : scene) {
        if (obj.primitive.shape != p_max_n.shape) continue;
        const DimVector self = ratios_of(dim_vector(obj.primitive));
        entries.push_back({&obj, mean_abs_diff(self, p_max_n.dims), obj.primitive.volume()});
    }
    if (entries.empty()) throw std::runtime_error("anchor shape unavailable");

    const auto assign_ranks = [&entries](auto key, auto better, int Entry::*slot) {
        std::vector<Entry*> order;
        for (auto& e : entries) order.push_back(&e);
        std::sort(order.begin(), order.end(), [&](const Entry* a, const Entry* b) {
            if (key(*a) != key(*b)) return better(key(*a), key(*b));
            return a->obj->id < b->obj->id;
        });
        for (std::size_t i = 0; i < order.size(); ++i) (*order[i]).*slot = static_cast<int>(i) + 1;
    };
    assign_ranks([](const Entry& e) { return e.dim_error; }, std::less<>(), &Entry::rank_a);
    assign_ranks([](const Entry& e) { return e.volume; }, std::greater<>(), &Entry::rank_b);

    const Entry* best = nullptr;
    for (const auto& e : entries) {
        if (best == nullptr) {
            best = &e;
            continue;
        }
        const double mean_e = 0.5 * (e.rank_a + e.rank_b);
        const double mean_b = 0.5 * (best->rank_a + best->rank_b);
        if (mean_e != mean_b ? mean_e < mean_b
            : e.rank_a != best->rank_a ? e.rank_a < best->rank_a
                                       : e.obj->id < best->obj->id)
            best = &e;
    }
    return *best->obj;
}

CraftProposal match_remaining(std::span<const NormalizedPart> parts,
                              std::span<const SceneObject> scene, const SceneObject& anchor,
                              const std::string& p_max_id) {
    const NormalizedPart* p_max = nullptr;
    for (const auto& part : parts)
        if (part.id == p_max_id) p_max = &part;
    if (p_max == nullptr) throw std::invalid_argument("p_max not among parts");
    if (anchor.primitive.shape != p_max->shape)
        throw std::invalid_argument("anchor shape differs from p_max");

    // Scene in anchor units: divide every DimVector by the anchor's largest
    // physical dimension.
    const double ref = dim_vector(anchor.primitive)[0];
    struct Candidate {
        const SceneObject* obj;
        DimVector dims, ratios;
    };
    std::vector<Candidate> candidates;
    for (const auto& obj : scene) {
        const DimVector d = dim_vector(obj.primitive);
        candidates.push_back({&obj, {d[0] / ref, d[1] / ref, d[2] / ref}, ratios_of(d)});
    }

    // Parts choose in descending max-dim order; p_max is pre-assigned.
    std::vector<const NormalizedPart*> order;
    for (const auto& part : parts)
        if (&part != p_max) order.push_back(&part);
    std::sort(order.begin(), order.end(), [](const NormalizedPart* a, const NormalizedPart* b) {
        if (a->dims[0] != b->dims[0]) return a->dims[0] > b->dims[0];
        return a->id < b->id;
    });

    CraftProposal proposal;
    std::set<std::string> used{anchor.id};
    proposal.assignments.push_back({p_max->id, anchor.id, p_max->transform});

    for (const NormalizedPart* part : order) {
        const Candidate* best = nullptr;
        double best_total = 0;
        for (const auto& cand : candidates) {
            if (cand.obj->primitive.shape != part->shape) continue;
            if (used.count(cand.obj->id)) continue;
            const double eps_dim = mean_abs_diff(part->dims, cand.dims);
            const double eps_ratio = mean_abs_diff(part->ratios, cand.ratios);
            const double total = std::sqrt(eps_dim * eps_dim + eps_ratio * eps_ratio);
            if (best == nullptr || total < best_total ||
                (total == best_total && cand.obj->id < best->obj->id)) {
                best = &cand;
                best_total = total;
            }
        }
        if (best == nullptr)
            throw std::runtime_error("no unassigned " +
                                     std::string(geom::to_string(part->shape)) +
                                     " object for part " + part->id);
        used.insert(best->obj->id);
        proposal.assignments.push_back({part->id, best->obj->id, part->transform});
    }
    return proposal;
}

CraftProposal build_proposal(std::span<const PrimitivePart> parts,
                             std::span<const SceneObject> scene) {
    const PrimitivePart& p_max = find_largest_part(parts);
    const auto normalized = normalize_parts(parts, p_max);
    const NormalizedPart* p_max_n = nullptr;
    for (const auto& n : normalized)
        if (n.id == p_max.id) p_max_n = &n;
    const SceneObject& anchor = find_anchor(scene, *p_max_n);
    return match_remaining(normalized, scene, anchor, p_max.id);
}

}  // namespace craft::match
