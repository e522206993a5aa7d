#include <doctest.h>

#include <random>

#include "lamgen/yarn_segmenter.hpp"
#include "oracles.hpp"

using namespace lamgen;

namespace {

LaminateSpec single_ply(double L, double W, double theta, double d, double l, bool cuts = true) {
    LaminateSpec s;
    s.L = L;
    s.W = W;
    s.t_f = 0.01;
    s.t_m = 0.01;
    s.t_d = 0.005;
    s.plies = {{theta, 0.2, d, l, cuts}};
    return s;
}

// Shape from first principles: which edges are parallel to the axis, and
// whether the two non-axial edges of a quadrilateral are parallel.
YarnShapeKind expected_kind(const ConvexPolygon& p, const DirectedLine& axis) {
    auto par = [](Vec2 a, Vec2 b) { return std::abs(cross(a, b)) <= 1e-7 * norm(a) * norm(b); };
    std::vector<std::size_t> ax;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (par(p.vertex(k + 1) - p.vertex(k), axis.direction())) ax.push_back(k);
    if (p.size() == 3 || ax.size() < 2) return YarnShapeKind::Triangle;
    if (p.size() > 4) return YarnShapeKind::SnippedParallelogram;
    const std::size_t a = ax[0];
    return par(p.vertex(a + 2) - p.vertex(a + 1), p.vertex(a + 4) - p.vertex(a + 3)) ? YarnShapeKind::Parallelogram
                                                                                      : YarnShapeKind::Trapezoid;
}

}  // namespace

TEST_CASE("theta 0 interior strip is a parallelogram with full-length safe zone") {
    const auto spec = single_ply(20, 10, 0.0, 1.0, 5.0);
    const auto lay = discretize_ply(spec, 0);
    const Strip* y = lay.find(0);
    REQUIRE(y);
    const auto shape = classify_shape(y->poly, lay.axis, spec.tol);
    CHECK(shape.kind == YarnShapeKind::Parallelogram);
    CHECK(shape.axial_edges.size() == 2);
    const auto z = safe_zone(y->poly, shape, lay.axis, spec.tol);
    REQUIRE(z);
    // Axis origin is the laminate center: stations run -10 .. 10.
    CHECK(z->s_lo == doctest::Approx(-10.0));
    CHECK(z->s_hi == doctest::Approx(10.0));
}

TEST_CASE("a corner triangle has no safe zone") {
    const Tolerances tol;
    const auto axis = DirectedLine::from_angle({0, 0}, 45.0);
    const auto tri = ConvexPolygon::from_points({{0, 0}, {1, 0}, {0, 1}});
    const auto shape = classify_shape(tri, axis, tol);
    CHECK(shape.kind == YarnShapeKind::Triangle);
    CHECK_FALSE(safe_zone(tri, shape, axis, tol));
    CHECK(plan_cuts(std::nullopt, 0.1, 0.01, true).stations.empty());
}

TEST_CASE("45 degree parallelogram: safe zone is the overlap of the axial edge projections") {
    const Tolerances tol;
    const double d = 1.0;
    const auto axis = DirectedLine::from_angle({0, 0}, 45.0);
    // Strip |offset| <= d/2 about the 45 degree line through the origin, cut
    // by x = 0 and x = 10.
    const double h = 0.5 * d * std::sqrt(2.0);  // vertical half-height of the strip
    const auto poly = ConvexPolygon::from_points({{0, -h}, {10, 10 - h}, {10, 10 + h}, {0, h}});
    const auto shape = classify_shape(poly, axis, tol);
    REQUIRE(shape.kind == YarnShapeKind::Parallelogram);
    const auto z = safe_zone(poly, shape, axis, tol);
    REQUIRE(z);
    // Oracle: project each axial edge and intersect.
    auto proj = [&](Vec2 a, Vec2 b) {
        const double sa = axis.station(a), sb = axis.station(b);
        return std::pair{std::min(sa, sb), std::max(sa, sb)};
    };
    const auto lo = proj({0, -h}, {10, 10 - h});
    const auto hi = proj({10, 10 + h}, {0, h});
    CHECK(z->s_lo == doctest::Approx(std::max(lo.first, hi.first)).epsilon(1e-12));
    CHECK(z->s_hi == doctest::Approx(std::min(lo.second, hi.second)).epsilon(1e-12));
    const auto [full_lo, full_hi] = poly.station_range(axis);
    // The slanted ends overhang by d tan(45) = d at each end.
    CHECK((full_hi - full_lo) - z->length() == doctest::Approx(2.0 * d).epsilon(1e-12));
}

TEST_CASE("30 degree ply: every yarn's shape matches the edge-count oracle") {
    const auto spec = single_ply(20, 10, 30.0, 1.0, 2.0);
    const auto lay = discretize_ply(spec, 0);
    int triangles = 0, trapezoids = 0;
    for (const Strip* y : lay.yarns()) {
        const auto shape = classify_shape(y->poly, lay.axis, spec.tol);
        CHECK(shape.kind == expected_kind(y->poly, lay.axis));
        if (shape.kind == YarnShapeKind::Triangle && y->poly.size() == 3) ++triangles;
        if (shape.kind == YarnShapeKind::Trapezoid) ++trapezoids;
    }
    CHECK(triangles <= 2);
    CHECK(trapezoids > 0);
}

TEST_CASE("comb: zone [0, 20], l = 5 gives cuts at 5, 10, 15") {
    const auto plan = plan_cuts(SafeZone{0.0, 20.0}, 5.0, 1e-6, true);
    REQUIRE(plan.stations.size() == 3);
    CHECK(plan.stations[0] == doctest::Approx(5.0));
    CHECK(plan.stations[1] == doctest::Approx(10.0));
    CHECK(plan.stations[2] == doctest::Approx(15.0));
    // Oracle: largest k with (k + 1) l <= zone.
    for (double l : {0.7, 1.0, 3.3, 6.0, 9.99, 10.0, 19.0, 25.0}) {
        int k = 0;
        while ((k + 2) * l <= 20.0 + 1e-12) ++k;
        CHECK(static_cast<int>(plan_cuts(SafeZone{0.0, 20.0}, l, 1e-3, true).stations.size()) == k);
    }
}

TEST_CASE("comb: l longer than the zone gives no cut") {
    CHECK(plan_cuts(SafeZone{0.0, 20.0}, 25.0, 0.01, true).stations.empty());
    CHECK(plan_cuts(SafeZone{0.0, 20.0}, 5.0, 0.01, false).stations.empty());
}

TEST_CASE("segment_yarn: 20 x 1 strip cut three times") {
    const Tolerances tol;
    Strip s;
    s.poly = ConvexPolygon::rectangle(0, 0, 20, 1);
    const DirectedLine axis({0, 0.5}, {1, 0});
    const auto plan = plan_cuts(SafeZone{0.0, 20.0}, 5.0, 1e-6, true);
    const auto sy = segment_yarn(s, axis, plan, tol);
    CHECK(sy.segments.size() == 4);
    CHECK(sy.cracklets.size() == 3);
    double area = 0.0;
    for (const auto& p : sy.segments) area += p.area();
    for (const auto& p : sy.cracklets) area += p.area();
    CHECK(area == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(sy.cracklets[1].bounds()[0] == doctest::Approx(10.0 - 5e-7));
}

TEST_CASE("unbreakable yarn warning") {
    std::vector<std::string> warnings;
    const auto spec = single_ply(20, 3, 0.0, 1.0, 25.0);
    const auto yarns = segment_ply(spec, discretize_ply(spec, 0), &warnings);
    for (const auto& y : yarns) CHECK(y.plan.stations.empty());
    CHECK(warnings.size() == yarns.size());
    CHECK(warnings.front().find("no fracture cut") != std::string::npos);

    warnings.clear();
    const auto off = single_ply(20, 3, 0.0, 1.0, 2.0, false);
    for (const auto& y : segment_ply(off, discretize_ply(off, 0), &warnings)) CHECK(y.plan.stations.empty());
    CHECK(warnings.empty());
}

TEST_CASE("properties: tiling, perpendicular cuts, containment, monotone count") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> th(-90.0, 90.0), dd(0.3, 3.0), ll(0.3, 8.0), side(2.0, 10.0);
    for (int trial = 0; trial < 80; ++trial) {
        CAPTURE(trial);
        auto spec = single_ply(side(rng), side(rng), th(rng), dd(rng), ll(rng));
        spec.t_f = 0.005;
        const auto lay = discretize_ply(spec, 0);
        const auto yarns = segment_ply(spec, lay);
        const auto ys = lay.yarns();
        REQUIRE(yarns.size() == ys.size());
        for (std::size_t i = 0; i < yarns.size(); ++i) {
            const auto& sy = yarns[i];
            double a = 0.0;
            for (const auto& p : sy.segments) a += p.area();
            for (const auto& p : sy.cracklets) a += p.area();
            CHECK(std::abs(a - ys[i]->poly.area()) <= 1e-9 * ys[i]->poly.area());

            for (double s : sy.plan.stations) {
                REQUIRE(sy.zone);
                CHECK(s - 0.5 * spec.t_f >= sy.zone->s_lo - 1e-12);
                CHECK(s + 0.5 * spec.t_f <= sy.zone->s_hi + 1e-12);
            }
            for (std::size_t k = 1; k < sy.plan.stations.size(); ++k)
                CHECK(sy.plan.stations[k] - sy.plan.stations[k - 1] >= spec.plies[0].l - 1e-9);

            // Cut edges are the cracklet edges that are not axial; each must
            // be perpendicular to the axis.
            for (const auto& c : sy.cracklets)
                for (std::size_t k = 0; k < c.size(); ++k) {
                    const Vec2 e = c.vertex(k + 1) - c.vertex(k);
                    const double along = std::abs(dot(e, lay.axis.direction())) / norm(e);
                    const double across = std::abs(cross(e, lay.axis.direction())) / norm(e);
                    CHECK((along < 1e-7 || across < 1e-7));
                }

            if (sy.zone) {
                std::size_t prev = 1000000;
                for (double l = 0.2; l < 12.0; l *= 1.3) {
                    const auto n = plan_cuts(sy.zone, l, spec.t_f, true).stations.size();
                    CHECK(n <= prev);
                    prev = n;
                }
            }
        }
    }
}
