#include <doctest.h>

#include <random>

#include "sgb/bounds.hpp"
#include "sgb/distance.hpp"
#include "test_support.hpp"

using namespace sgb;
namespace ts = sgb::testsupport;

namespace {

EpsRectangle box(std::vector<double> lo, std::vector<double> hi) {
    return EpsRectangle{std::move(lo), std::move(hi)};
}

EpsHull hull_of(const std::vector<Point2>& pts) {
    EpsHull h;
    for (const Point2& p : pts) h = hull_insert(h, p);
    return h;
}

}  // namespace

TEST_CASE("eps_region") {
    CHECK(eps_region(std::vector<double>{5, 5}, 2.0) == box({3, 3}, {7, 7}));
    CHECK(eps_region(std::vector<double>{0}, 6.0) == box({-6}, {6}));
    CHECK(eps_region(std::vector<double>{1, 2, 3}, 1.0) ==
          box({0, 1, 2}, {2, 3, 4}));
    CHECK_THROWS_AS(eps_region(std::vector<double>{0}, 0.0), InvalidInput);
}

TEST_CASE("rect_intersect") {
    CHECK(rect_intersect(box({3, 3}, {7, 7}), box({4, 3}, {8, 7})) ==
          box({4, 3}, {7, 7}));
    CHECK_FALSE(rect_intersect(box({0, 0}, {1, 1}), box({2, 0}, {3, 1})));
    // touching boxes intersect under closed semantics
    CHECK(rect_intersect(box({0, 0}, {1, 1}), box({1, 0}, {2, 1})) ==
          box({1, 0}, {1, 1}));
    CHECK_THROWS_AS(rect_intersect(box({0}, {1}), box({0, 0}, {1, 1})),
                    InvalidInput);
}

TEST_CASE("rect_contains") {
    const EpsRectangle r = box({3, 3}, {7, 7});
    CHECK(rect_contains(r, std::vector<double>{5, 5}));
    CHECK(rect_contains(r, std::vector<double>{7, 3}));
    CHECK_FALSE(rect_contains(r, std::vector<double>{8, 5}));
    CHECK_THROWS_AS(rect_contains(r, std::vector<double>{1}), InvalidInput);
}

TEST_CASE("hull_insert") {
    const EpsHull seg = hull_of({{0, 0}, {4, 0}});
    REQUIRE(seg.vertices.size() == 2);

    const EpsHull tri = hull_of({{0, 0}, {4, 0}, {0, 4}});
    REQUIRE(tri.vertices.size() == 3);
    CHECK(hull_insert(tri, {1, 1}) == tri);  // interior point: unchanged

    const EpsHull quad = hull_insert(tri, {4, 4});
    CHECK(quad.vertices.size() == 4);
    for (const Point2 p : {Point2{0, 0}, {4, 0}, {4, 4}, {0, 4}})
        CHECK(point_in_hull(quad, p));

    // collinear points collapse to segment endpoints
    const EpsHull line = hull_of({{0, 0}, {2, 0}, {4, 0}, {1, 0}});
    CHECK(line.vertices.size() == 2);
}

TEST_CASE("point_in_hull") {
    const EpsHull tri = hull_of({{0, 0}, {4, 0}, {0, 4}});
    CHECK(point_in_hull(tri, {1, 1}));
    CHECK(point_in_hull(tri, {2, 2}));  // on the hypotenuse
    CHECK_FALSE(point_in_hull(tri, {5, 5}));

    const EpsHull pt = hull_of({{1, 1}});
    CHECK(point_in_hull(pt, {1, 1}));
    CHECK_FALSE(point_in_hull(pt, {1, 2}));

    const EpsHull seg = hull_of({{0, 0}, {4, 0}});
    CHECK(point_in_hull(seg, {2, 0}));
    CHECK_FALSE(point_in_hull(seg, {5, 0}));
    CHECK_FALSE(point_in_hull(seg, {2, 1}));
}

TEST_CASE("farthest_vertex_distance") {
    CHECK(farthest_vertex_distance(hull_of({{0, 0}}), {3, 4}) ==
          doctest::Approx(5.0));
    const EpsHull tri = hull_of({{0, 0}, {4, 0}, {0, 4}});
    CHECK(farthest_vertex_distance(tri, {-1, 0}) == doctest::Approx(5.0));
    CHECK(farthest_vertex_distance(tri, {0, 0}) == doctest::Approx(4.0));
    CHECK_THROWS_AS(farthest_vertex_distance(EpsHull{}, {0, 0}), InvalidInput);
}

TEST_CASE("hull monotonicity: inserts never evict covered points") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 200; ++trial) {
        EpsHull h = hull_of({{ts::dyadic(gen, -4, 4), ts::dyadic(gen, -4, 4)},
                             {ts::dyadic(gen, -4, 4), ts::dyadic(gen, -4, 4)},
                             {ts::dyadic(gen, -4, 4), ts::dyadic(gen, -4, 4)}});
        const Point2 p{ts::dyadic(gen, -4, 4), ts::dyadic(gen, -4, 4)};
        if (!point_in_hull(h, p)) continue;
        const Point2 q{ts::dyadic(gen, -6, 6), ts::dyadic(gen, -6, 6)};
        CHECK(point_in_hull(hull_insert(h, q), p));
    }
}

namespace {

struct GroupFixture {
    std::vector<std::vector<double>> members;
    EpsRectangle rect;
    EpsHull hull;
};

GroupFixture build_group(const std::vector<std::vector<double>>& pts,
                         double eps) {
    GroupFixture g;
    g.members = pts;
    bool first = true;
    for (const auto& p : pts) {
        const EpsRectangle region = eps_region(p, eps);
        if (first) {
            g.rect = region;
            first = false;
        } else {
            auto r = rect_intersect(g.rect, region);
            REQUIRE(r.has_value());
            g.rect = *r;
        }
        g.hull = hull_insert(g.hull, Point2{p[0], p[1]});
    }
    return g;
}

bool all_pairs_within(const std::vector<std::vector<double>>& members,
                      const std::vector<double>& p,
                      const SimilaritySpec& spec) {
    for (const auto& m : members)
        if (!is_similar(spec, m, p)) return false;
    return true;
}

}  // namespace

TEST_CASE("group_admits_l2 membership fixtures") {
    const auto g = build_group({{0, 0}, {3, 0}, {5, 0}}, 6.0);
    CHECK(group_admits_l2(g.rect, g.hull, {5.5, 0}, 6.0));
    CHECK_FALSE(group_admits_l2(g.rect, g.hull, {7, 0}, 6.0));

    const auto single = build_group({{0, 0}}, 6.0);
    CHECK(group_admits_l2(single.rect, single.hull, {0, 0}, 6.0));

    CHECK_THROWS_AS(
        group_admits_l2(EpsRectangle{{0}, {1}}, g.hull, {0, 0}, 1.0),
        InvalidInput);
}

TEST_CASE("LInf rectangle bound is an exact membership filter") {
    std::mt19937_64 gen(19);
    for (int trial = 0; trial < 2000; ++trial) {
        const double eps = rng::uniform(gen, 0.5, 3.0);
        const std::size_t k = 1 + rng::uniform_index(gen, 8);
        const auto pts = ts::connected_cloud(gen, k, 2, eps);
        const auto g = build_group(pts, eps);
        std::vector<double> probe{pts[0][0] + rng::uniform(gen, -2 * eps, 2 * eps),
                                  pts[0][1] + rng::uniform(gen, -2 * eps, 2 * eps)};
        CHECK(rect_contains(g.rect, probe) ==
              all_pairs_within(pts, probe, {Metric::LInf, eps}));
    }
}

TEST_CASE("L2 hull decision matches the all-pairs check") {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 2000; ++trial) {
        const double eps = rng::uniform(gen, 0.5, 3.0);
        const std::size_t k = 1 + rng::uniform_index(gen, 8);
        const auto pts = ts::connected_cloud(gen, k, 2, eps);
        const auto g = build_group(pts, eps);
        std::vector<double> probe{pts[0][0] + rng::uniform(gen, -2 * eps, 2 * eps),
                                  pts[0][1] + rng::uniform(gen, -2 * eps, 2 * eps)};
        CHECK(group_admits_l2(g.rect, g.hull, {probe[0], probe[1]}, eps) ==
              all_pairs_within(pts, probe, {Metric::L2, eps}));
    }
}

TEST_CASE("rectangle is necessary but not sufficient for L2") {
    // witness: in the rectangle, outside the L2 ball of a member
    const auto g = build_group({{0, 0}, {6, 0}}, 6.0);
    const std::vector<double> witness{3, 5.5};
    CHECK(rect_contains(g.rect, witness));
    CHECK_FALSE(all_pairs_within(g.members, witness, {Metric::L2, 6.0}));

    // necessity: every L2-accepted probe sits inside the rectangle
    std::mt19937_64 gen(29);
    for (int trial = 0; trial < 1000; ++trial) {
        const double eps = rng::uniform(gen, 0.5, 3.0);
        const auto pts = ts::connected_cloud(gen, 1 + rng::uniform_index(gen, 6),
                                             2, eps);
        const auto gg = build_group(pts, eps);
        std::vector<double> probe{
            pts[0][0] + rng::uniform(gen, -2 * eps, 2 * eps),
            pts[0][1] + rng::uniform(gen, -2 * eps, 2 * eps)};
        if (all_pairs_within(pts, probe, {Metric::L2, eps}))
            CHECK(rect_contains(gg.rect, probe));
    }
}

TEST_CASE("rect fold over member regions is order-insensitive") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 200; ++trial) {
        const double eps = ts::dyadic(gen, 0.5, 3.0);
        const auto pts = ts::connected_cloud(gen, 5, 2, eps);
        auto fold = [&](const std::vector<std::size_t>& order) {
            EpsRectangle acc = eps_region(pts[order[0]], eps);
            for (std::size_t i = 1; i < order.size(); ++i) {
                auto r = rect_intersect(acc, eps_region(pts[order[i]], eps));
                REQUIRE(r.has_value());
                acc = *r;
            }
            return acc;
        };
        const EpsRectangle a = fold({0, 1, 2, 3, 4});
        const EpsRectangle b = fold({4, 2, 0, 3, 1});
        const EpsRectangle c = fold({2, 3, 4, 0, 1});
        CHECK(a == b);
        CHECK(a == c);
    }
}
