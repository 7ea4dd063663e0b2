#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "sgb/types.hpp"

namespace sgb {

/// Closed axis-aligned box; lo[i] <= hi[i] on every axis. An empty
/// intersection is signalled by std::nullopt from rect_intersect, never by
/// inverted bounds.
struct EpsRectangle {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dimension() const { return lo.size(); }

    friend bool operator==(const EpsRectangle&, const EpsRectangle&) = default;
};

/// The eps-region of a point: [p - eps, p + eps] on every axis. A point q is
/// within LInf distance eps of p iff q lies inside this box.
EpsRectangle eps_region(std::span<const double> point, double eps);

/// Per-axis [max(lo), min(hi)]; nullopt when any axis inverts. Closed
/// semantics: boxes that merely touch do intersect.
std::optional<EpsRectangle> rect_intersect(const EpsRectangle& a,
                                           const EpsRectangle& b);

/// Boundary-inclusive containment test.
bool rect_contains(const EpsRectangle& r, std::span<const double> p);

/// Boundary-inclusive box overlap test.
bool rects_intersect(const EpsRectangle& a, const EpsRectangle& b);

using Point2 = std::array<double, 2>;

/// 2D convex polygon in counter-clockwise order. Collinear interior points
/// are elided, so stored vertices are exactly the extreme points of the
/// member set the hull was built from. Degenerate forms: one vertex (point)
/// and two vertices (segment).
struct EpsHull {
    std::vector<Point2> vertices;

    bool empty() const { return vertices.empty(); }

    friend bool operator==(const EpsHull&, const EpsHull&) = default;
};

/// Convex hull of vertices(h) plus p. Interior and boundary points leave the
/// hull unchanged.
EpsHull hull_insert(const EpsHull& h, Point2 p);

/// True iff p lies inside or on the boundary of the polygon. Degenerate
/// hulls fall back to point equality / segment containment.
bool point_in_hull(const EpsHull& h, Point2 p);

/// Max Euclidean distance from p to a hull vertex. Because Euclidean
/// distance is convex, this equals the max distance from p to any point of
/// the group the hull encloses. Throws InvalidInput on an empty hull.
double farthest_vertex_distance(const EpsHull& h, Point2 p);

/// Exact L2 membership filter for a 2D group: true iff p is within eps of
/// every group member. Decision procedure: reject when p is outside the
/// group's eps-rectangle; accept when p is inside the hull; otherwise decide
/// by the farthest-vertex distance.
bool group_admits_l2(const EpsRectangle& rect, const EpsHull& hull, Point2 p,
                     double eps);

}  // namespace sgb
