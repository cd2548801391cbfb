#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "craft/geom.hpp"
#include "craft/structure.hpp"

namespace craft::primfit {

using geom::Aabb;
using geom::Primitive;

/// Exactly four AABB-derived candidates: the box as a cuboid, then one
/// cylinder per axis with length = the box dim along that axis and
/// radius = mean of the two cross dims / 2. Throws std::invalid_argument on a
/// degenerate box (any dim <= 1e-9).
std::array<Primitive, 4> propose_candidates(const Aabb& box);

/// Chamfer argmin over the four candidates, comparing `n` surface samples of
/// the part against `n` of each candidate placed at the part's AABB center.
/// Exact ties prefer the cuboid, then cylinder axes in x, y, z order.
Primitive select_primitive(const structure::PartInstance& part, int n = 2048,
                           std::uint64_t seed = 0);

/// One primitive part per instance, placed by pure translation to the
/// instance's AABB center. Truck and bus models get wheel axles appended;
/// unpaired-wheel warnings are collected into `warnings` when given.
std::vector<geom::PrimitivePart> simplify_model(std::span<const structure::PartInstance> instances,
                                                geom::ObjectClass object_class, int n = 2048,
                                                std::uint64_t seed = 0,
                                                std::vector<std::string>* warnings = nullptr);

}  // namespace craft::primfit
