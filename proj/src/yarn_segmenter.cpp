#include "lamgen/yarn_segmenter.hpp"

#include <algorithm>
#include <cmath>

namespace lamgen {

const char* to_string(YarnShapeKind k) noexcept {
    switch (k) {
        case YarnShapeKind::Parallelogram: return "parallelogram";
        case YarnShapeKind::SnippedParallelogram: return "snipped-parallelogram";
        case YarnShapeKind::Trapezoid: return "trapezoid";
        case YarnShapeKind::Triangle: return "triangle";
    }
    return "?";
}

namespace {

bool parallel(const Vec2& a, const Vec2& b, double angle_eps) {
    const double na = norm(a), nb = norm(b);
    if (na == 0.0 || nb == 0.0) return false;
    return std::abs(cross(a, b)) <= std::sin(angle_eps) * na * nb;
}

Vec2 edge_vec(const ConvexPolygon& p, std::size_t k) { return p.vertex(k + 1) - p.vertex(k); }

}  // namespace

YarnShape classify_shape(const ConvexPolygon& yarn, const DirectedLine& axis, const Tolerances& tol) {
    YarnShape s;
    for (std::size_t k = 0; k < yarn.size(); ++k)
        if (parallel(edge_vec(yarn, k), axis.direction(), tol.angle_eps)) s.axial_edges.push_back(k);

    if (yarn.size() == 3 || s.axial_edges.size() < 2) {
        s.kind = YarnShapeKind::Triangle;
        return s;
    }
    if (yarn.size() == 4) {
        // The two non-axial edges decide between parallelogram and trapezoid.
        const std::size_t a = s.axial_edges[0];
        const Vec2 e1 = edge_vec(yarn, a + 1), e3 = edge_vec(yarn, a + 3);
        s.kind = parallel(e1, e3, tol.angle_eps) ? YarnShapeKind::Parallelogram : YarnShapeKind::Trapezoid;
        return s;
    }
    s.kind = YarnShapeKind::SnippedParallelogram;
    return s;
}

std::optional<SafeZone> safe_zone(const ConvexPolygon& yarn, const YarnShape& shape, const DirectedLine& axis,
                                  const Tolerances& tol) {
    if (shape.axial_edges.size() < 2) return std::nullopt;
    auto range = [&](std::size_t k) {
        const double a = axis.station(yarn.vertex(k)), b = axis.station(yarn.vertex(k + 1));
        return std::pair{std::min(a, b), std::max(a, b)};
    };
    const auto r0 = range(shape.axial_edges[0]);
    const auto r1 = range(shape.axial_edges[1]);
    SafeZone z{std::max(r0.first, r1.first), std::min(r0.second, r1.second)};
    if (z.length() <= tol.coincidence_eps) return std::nullopt;
    return z;
}

std::vector<double> CutPlan::band_edges() const {
    std::vector<double> e;
    e.reserve(2 * stations.size());
    for (double s : stations) {
        e.push_back(s - 0.5 * t_f);
        e.push_back(s + 0.5 * t_f);
    }
    return e;
}

CutPlan plan_cuts(const std::optional<SafeZone>& zone, double l, double t_f, bool enabled) {
    CutPlan plan;
    plan.t_f = t_f;
    if (!enabled || !zone || l <= 0.0) return plan;
    // The relative nudge keeps exact multiples (20 / 5) from flooring to 3.
    const double ratio = zone->length() / l;
    const int k = std::max(0, static_cast<int>(std::floor(ratio * (1.0 + 1e-12))) - 1);
    const double mid = 0.5 * (zone->s_lo + zone->s_hi);
    for (int i = 0; i < k; ++i) plan.stations.push_back(mid + (i - 0.5 * (k - 1)) * l);
    return plan;
}

SegmentedYarn segment_yarn(const Strip& yarn, const DirectedLine& axis, const CutPlan& plan,
                           const Tolerances& tol) {
    SegmentedYarn out;
    out.strip_index = yarn.strip_index;
    out.plan = plan;
    ConvexPolygon rest = yarn.poly;
    // perpendicular_at() points along +normal, so its left side is the
    // lower-station side.
    for (double s : plan.stations) {
        auto lo = split_convex(rest, axis.perpendicular_at(s - 0.5 * plan.t_f), tol);
        if (!lo.left || !lo.right) throw GeometryError("yarn cut band leaves the yarn");
        out.segments.push_back(std::move(*lo.left));
        auto hi = split_convex(*lo.right, axis.perpendicular_at(s + 0.5 * plan.t_f), tol);
        if (!hi.left || !hi.right) throw GeometryError("yarn cut band leaves the yarn");
        out.cracklets.push_back(std::move(*hi.left));
        rest = std::move(*hi.right);
    }
    out.segments.push_back(std::move(rest));
    return out;
}

namespace {

bool spans(const ConvexPolygon& p, const LaminateSpec& spec) {
    const auto b = p.bounds();
    const double e = spec.tol.coincidence_eps;
    const bool x = b[0] <= e && b[2] >= spec.L - e;
    const bool y = b[1] <= e && b[3] >= spec.W - e;
    return x || y;
}

}  // namespace

std::vector<SegmentedYarn> segment_ply(const LaminateSpec& spec, const PlyLayout& layout,
                                       std::vector<std::string>* warnings) {
    const auto& ply = spec.plies.at(static_cast<std::size_t>(layout.ply_index));
    std::vector<SegmentedYarn> out;
    for (const Strip* y : layout.yarns()) {
        const YarnShape shape = classify_shape(y->poly, layout.axis, spec.tol);
        const auto zone = safe_zone(y->poly, shape, layout.axis, spec.tol);
        const CutPlan plan = plan_cuts(zone, ply.l, spec.t_f, ply.yarn_cracklets);
        SegmentedYarn sy = segment_yarn(*y, layout.axis, plan, spec.tol);
        sy.shape = shape;
        sy.zone = zone;
        sy.spans_laminate = spans(y->poly, spec);
        if (warnings && ply.yarn_cracklets && sy.spans_laminate && plan.stations.empty()) {
            warnings->push_back("ply " + std::to_string(layout.ply_index + 1) + " yarn " +
                                std::to_string(y->strip_index / 2) +
                                " spans the laminate but receives no fracture cut (safe zone " +
                                std::to_string(zone ? zone->length() : 0.0) + " mm, l = " +
                                std::to_string(ply.l) + " mm)");
        }
        out.push_back(std::move(sy));
    }
    return out;
}

}  // namespace lamgen
