#include "sgb/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "sgb/distance.hpp"

namespace sgb {

namespace {

void require_same_dimension(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw InvalidInput(std::string(what) + ": dimension mismatch");
}

double cross(Point2 o, Point2 a, Point2 b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double dist_sq(Point2 a, Point2 b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

// Andrew's monotone chain with strict turns, so collinear points are elided.
// Returns vertices in counter-clockwise order; collinear input degenerates
// to its two extreme endpoints, coincident input to a single point.
std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;

    std::vector<Point2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower chain
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {  // upper chain
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);  // last point repeats the first
    return hull;
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
    if (cross(a, b, p) != 0.0) return false;
    return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) &&
           std::min(a[1], b[1]) <= p[1] && p[1] <= std::max(a[1], b[1]);
}

}  // namespace

EpsRectangle eps_region(std::span<const double> point, double eps) {
    if (!(eps > 0.0)) throw InvalidInput("eps_region: eps must be > 0");
    EpsRectangle r;
    r.lo.reserve(point.size());
    r.hi.reserve(point.size());
    for (double v : point) {
        r.lo.push_back(v - eps);
        r.hi.push_back(v + eps);
    }
    return r;
}

std::optional<EpsRectangle> rect_intersect(const EpsRectangle& a,
                                           const EpsRectangle& b) {
    require_same_dimension(a.dimension(), b.dimension(), "rect_intersect");
    EpsRectangle out;
    out.lo.resize(a.dimension());
    out.hi.resize(a.dimension());
    for (std::size_t i = 0; i < a.dimension(); ++i) {
        out.lo[i] = std::max(a.lo[i], b.lo[i]);
        out.hi[i] = std::min(a.hi[i], b.hi[i]);
        if (out.lo[i] > out.hi[i]) return std::nullopt;
    }
    return out;
}

bool rect_contains(const EpsRectangle& r, std::span<const double> p) {
    require_same_dimension(r.dimension(), p.size(), "rect_contains");
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] < r.lo[i] || p[i] > r.hi[i]) return false;
    return true;
}

bool rects_intersect(const EpsRectangle& a, const EpsRectangle& b) {
    require_same_dimension(a.dimension(), b.dimension(), "rects_intersect");
    for (std::size_t i = 0; i < a.dimension(); ++i)
        if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return false;
    return true;
}

EpsHull hull_insert(const EpsHull& h, Point2 p) {
    std::vector<Point2> pts = h.vertices;
    pts.push_back(p);
    return EpsHull{convex_hull(std::move(pts))};
}

bool point_in_hull(const EpsHull& h, Point2 p) {
    const auto& v = h.vertices;
    if (v.empty()) return false;
    if (v.size() == 1) return v[0] == p;
    if (v.size() == 2) return on_segment(v[0], v[1], p);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2 a = v[i];
        const Point2 b = v[(i + 1) % v.size()];
        if (cross(a, b, p) < 0.0) return false;  // right of a CCW edge
    }
    return true;
}

double farthest_vertex_distance(const EpsHull& h, Point2 p) {
    if (h.empty()) throw InvalidInput("farthest_vertex_distance: empty hull");
    double best = 0.0;
    for (const Point2& v : h.vertices) best = std::max(best, dist_sq(v, p));
    return std::sqrt(best);
}

bool group_admits_l2(const EpsRectangle& rect, const EpsHull& hull, Point2 p,
                     double eps) {
    if (rect.dimension() != 2)
        throw InvalidInput("group_admits_l2: supported for dimension 2 only");
    if (hull.empty()) throw InvalidInput("group_admits_l2: empty hull");
    if (!rect_contains(rect, p)) return false;
    if (point_in_hull(hull, p)) return true;
    // Same squared-distance pipeline as is_similar, so the decision is
    // bit-identical to the all-pairs check.
    double worst = 0.0;
    for (const Point2& v : hull.vertices) worst = std::max(worst, dist_sq(v, p));
    return worst <= eps * eps;
}

}  // namespace sgb
