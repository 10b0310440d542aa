#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fpfilter/predicates.hpp"
#include "samplers.hpp"

namespace fpfilter::harness {

struct triangulation
{
    /// Input points after duplicate removal, in insertion order.
    std::vector<point2> points;
    /// Finite triangles, counterclockwise vertex indices into `points`.
    std::vector<std::array<int, 3>> triangles;
    std::size_t duplicates_removed = 0;
    /// True when every point is collinear; `triangles` is then empty.
    bool collinear = false;
    stage_stats orient_stats;
    stage_stats incircle_stats;
    double seconds = 0.0;
};

/// Bowyer-Watson insertion with ghost triangles. Every orientation and
/// incircle decision goes through the staged predicates of `prof`. Points
/// are inserted in an order shuffled by `seed`.
triangulation delaunay(std::vector<point2> points, profile prof, std::uint64_t seed);

/// Number of input points on the convex hull boundary, collinear boundary
/// points included. Uses the exact orientation oracle.
std::size_t hull_size(const std::vector<point2>& points);

/// Number of (triangle, vertex) pairs with the vertex strictly inside the
/// triangle's circumcircle, decided by the exact incircle oracle.
std::size_t empty_circle_violations(const triangulation& t);

} // namespace fpfilter::harness
