#include <doctest.h>

#include <random>

#include "lamgen/geometry.hpp"
#include "oracles.hpp"

using namespace lamgen;

namespace {

ConvexPolygon random_convex(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(0.0, 2.0 * oracle::kPi), rad(0.5, 3.0), c(-2.0, 2.0);
    const Vec2 center{c(rng), c(rng)};
    std::vector<double> a(7);
    for (auto& x : a) x = ang(rng);
    std::sort(a.begin(), a.end());
    // Points on an ellipse are in convex position.
    const double rx = rad(rng), ry = rad(rng);
    std::vector<Vec2> pts;
    for (double t : a) pts.push_back({center.x + rx * std::cos(t), center.y + ry * std::sin(t)});
    return ConvexPolygon::from_points(pts);
}

DirectedLine random_line(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-3.0, 3.0), ang(-180.0, 180.0);
    return DirectedLine::from_angle({c(rng), c(rng)}, ang(rng));
}

}  // namespace

TEST_CASE("split: unit square bisected at x = 0.5") {
    const auto sq = ConvexPolygon::rectangle(0, 0, 1, 1);
    const auto r = split_convex(sq, DirectedLine({0.5, 0.0}, {0.0, 1.0}), {});
    REQUIRE(r.left);
    REQUIRE(r.right);
    CHECK(r.left->area() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.right->area() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.left->bounds()[2] == 0.5);
    CHECK(r.right->bounds()[0] == 0.5);
}

TEST_CASE("split: line missing the polygon leaves one side absent") {
    const auto sq = ConvexPolygon::rectangle(0, 0, 1, 1);
    const auto r = split_convex(sq, DirectedLine({2.0, 0.0}, {0.0, 1.0}), {});
    // Direction +y: the square lies on the left of x = 2.
    REQUIRE(r.left);
    CHECK_FALSE(r.right);
    CHECK(r.left->area() == 1.0);
}

TEST_CASE("split: area conservation on random polygons and lines") {
    std::mt19937_64 rng(2024);
    const Tolerances tol;
    for (int trial = 0; trial < 500; ++trial) {
        const auto poly = random_convex(rng);
        const auto line = random_line(rng);
        const auto r = split_convex(poly, line, tol);
        const double parent = oracle::polygon_area(oracle::points(poly));
        double kids = 0.0;
        if (r.left) kids += oracle::polygon_area(oracle::points(*r.left));
        if (r.right) kids += oracle::polygon_area(oracle::points(*r.right));
        CHECK(std::abs(kids - parent) <= 1e-12 * parent);
        for (const auto* k : {&r.left, &r.right})
            if (*k) CHECK((*k)->invariant_violation(tol).empty());
    }
}

TEST_CASE("split: re-splitting a child by the same line is a no-op") {
    std::mt19937_64 rng(99);
    const Tolerances tol;
    for (int trial = 0; trial < 200; ++trial) {
        const auto poly = random_convex(rng);
        const auto line = random_line(rng);
        const auto r = split_convex(poly, line, tol);
        if (r.left) {
            const auto again = split_convex(*r.left, line, tol);
            REQUIRE(again.left);
            CHECK_FALSE(again.right);
            CHECK(oracle::points(*again.left) == oracle::points(*r.left));
        }
        if (r.right) {
            const auto again = split_convex(*r.right, line, tol);
            REQUIRE(again.right);
            CHECK_FALSE(again.left);
            CHECK(oracle::points(*again.right) == oracle::points(*r.right));
        }
    }
}

TEST_CASE("split: cut vertices lie on the line") {
    const Tolerances tol;
    const auto sq = ConvexPolygon::rectangle(0, 0, 3, 2);
    const auto line = DirectedLine::from_angle({1.3, 0.7}, 37.0);
    const auto r = split_convex(sq, line, tol);
    REQUIRE(r.left);
    int on = 0;
    for (const auto& v : r.left->vertices())
        if (std::abs(line.signed_distance(v)) <= tol.coincidence_eps) ++on;
    CHECK(on == 2);
}

TEST_CASE("split: a sliver below the area threshold is returned and flagged") {
    const Tolerances tol;
    // 5e-9 wide (above coincidence_eps, so not snapped) by 0.1 tall.
    const auto r = split_convex(ConvexPolygon::rectangle(0, 0, 1, 0.1), DirectedLine({1.0 - 5e-9, 0.0}, {0.0, 1.0}), tol);
    REQUIRE(r.left);
    REQUIRE(r.right);
    CHECK(r.right_sliver);
    CHECK_FALSE(r.left_sliver);
    CHECK(r.right->area() == doctest::Approx(5e-10).epsilon(1e-3));
}

TEST_CASE("split: vertices within coincidence_eps snap onto the cut") {
    const Tolerances tol;
    const auto r = split_convex(ConvexPolygon::rectangle(0, 0, 1, 1), DirectedLine({1.0 - 5e-10, 0.0}, {0.0, 1.0}), tol);
    REQUIRE(r.left);
    CHECK_FALSE(r.right);
    CHECK(r.left->area() == 1.0);
}

TEST_CASE("classify_side") {
    const Tolerances tol;
    const DirectedLine xaxis({0, 0}, {1, 0});
    CHECK(classify_side({0, 0}, xaxis, tol) == Side::On);
    CHECK(classify_side({0, 1}, xaxis, tol) == Side::Left);
    CHECK(classify_side({0, -1}, xaxis, tol) == Side::Right);
    CHECK(classify_side({0, 0.5 * tol.coincidence_eps}, xaxis, tol) == Side::On);
    CHECK(classify_side({0, 2.0 * tol.coincidence_eps}, xaxis, tol) == Side::Left);
}

TEST_CASE("clip_strip: horizontal strip of a square") {
    const auto rect = ConvexPolygon::rectangle(0, 0, 10, 10);
    const auto axis = DirectedLine::from_angle({5, 5}, 0.0);
    const auto s = clip_strip(rect, axis, -0.5, 0.5);
    REQUIRE(s);
    CHECK(s->area() == doctest::Approx(10.0).epsilon(1e-14));
    const auto b = s->bounds();
    CHECK(b[0] == 0.0);
    CHECK(b[2] == 10.0);
    CHECK(b[1] == doctest::Approx(4.5));
    CHECK(b[3] == doctest::Approx(5.5));
}

TEST_CASE("clip_strip: strip outside the rectangle is empty") {
    const auto rect = ConvexPolygon::rectangle(0, 0, 10, 10);
    const auto axis = DirectedLine::from_angle({5, 5}, 90.0);
    CHECK_FALSE(clip_strip(rect, axis, 6.0, 7.0));
    CHECK_FALSE(clip_strip(rect, axis, -9.0, -5.5));
}

TEST_CASE("clip_strip: oblique strip against Monte-Carlo area") {
    const auto rect = ConvexPolygon::rectangle(0, 0, 20, 10);
    const auto axis = DirectedLine::from_angle({10, 5}, 30.0);
    const auto s = clip_strip(rect, axis, 2.0, 3.0);
    REQUIRE(s);
    const double mc = oracle::mc_strip_area(20, 10, 30.0, 2.0, 3.0, 4'000'000);
    CHECK(std::abs(s->area() - mc) / mc < 1e-2);
    CHECK(s->invariant_violation({}).empty());
}

TEST_CASE("ConvexPolygon rejects non-convex input") {
    CHECK_THROWS_AS(ConvexPolygon::from_points({{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}}), GeometryError);
    CHECK_FALSE(ConvexPolygon::try_from_points({{0, 0}, {1, 0}, {2, 0}}));
}

TEST_CASE("ConvexPolygon normalizes orientation and collinear vertices") {
    const auto p = ConvexPolygon::from_points({{0, 0}, {0, 1}, {1, 1}, {1, 0.5}, {1, 0}});
    CHECK(p.size() == 4);
    CHECK(shoelace_area(p.vertices()) > 0.0);
}

TEST_CASE("Tolerances must be positive") {
    CHECK_NOTHROW(Tolerances{}.validate());
    CHECK_THROWS_AS((Tolerances{0.0, 1e-9, 1e-7}.validate()), GeometryError);
    CHECK_THROWS_AS((Tolerances{1e-9, -1.0, 1e-7}.validate()), GeometryError);
}

TEST_CASE("intersect_convex and collinear_overlap") {
    const Tolerances tol;
    const auto a = ConvexPolygon::rectangle(0, 0, 2, 2);
    const auto b = ConvexPolygon::rectangle(1, 1, 3, 3);
    const auto i = intersect_convex(a, b, tol);
    REQUIRE(i);
    CHECK(i->area() == doctest::Approx(1.0));
    CHECK_FALSE(intersect_convex(a, ConvexPolygon::rectangle(2, 0, 3, 1), tol));
    CHECK(collinear_overlap({0, 0}, {2, 0}, {3, 0}, {1, 0}, 1e-9) == doctest::Approx(1.0));
    CHECK(collinear_overlap({0, 0}, {2, 0}, {0, 1e-3}, {2, 1e-3}, 1e-9) == 0.0);
}
