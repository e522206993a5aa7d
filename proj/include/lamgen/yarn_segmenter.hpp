#ifndef LAMGEN_YARN_SEGMENTER_HPP
#define LAMGEN_YARN_SEGMENTER_HPP

#include <optional>
#include <string>
#include <vector>

#include "lamgen/geometry.hpp"
#include "lamgen/layup_config.hpp"
#include "lamgen/ply_discretizer.hpp"

namespace lamgen {

enum class YarnShapeKind { Parallelogram, SnippedParallelogram, Trapezoid, Triangle };

const char* to_string(YarnShapeKind k) noexcept;

/// Shape of a clipped yarn. Axial edges are the (at most two) edges parallel
/// to the ply axis within angle_eps.
struct YarnShape {
    YarnShapeKind kind = YarnShapeKind::Triangle;
    std::vector<std::size_t> axial_edges;  // edge k runs from vertex k to k+1
};

YarnShape classify_shape(const ConvexPolygon& yarn, const DirectedLine& axis, const Tolerances& tol);

/// Station interval along the ply axis where a perpendicular cut crosses the
/// yarn between its two axial edges.
struct SafeZone {
    double s_lo = 0.0;
    double s_hi = 0.0;
    [[nodiscard]] double length() const noexcept { return s_hi - s_lo; }
};

/// Absent when the yarn has fewer than two axial edges or their station
/// ranges do not overlap.
std::optional<SafeZone> safe_zone(const ConvexPolygon& yarn, const YarnShape& shape, const DirectedLine& axis,
                                  const Tolerances& tol);

/// Cut stations (band centers) of a yarn; each band is [s - t_f/2, s + t_f/2].
struct CutPlan {
    std::vector<double> stations;
    double t_f = 0.0;

    /// Band edges in increasing station order: s0-, s0+, s1-, s1+, ...
    [[nodiscard]] std::vector<double> band_edges() const;
};

/// Centered comb of k = max(0, floor(zone/l) - 1) cuts spaced l apart.
CutPlan plan_cuts(const std::optional<SafeZone>& zone, double l, double t_f, bool enabled);

struct SegmentedYarn {
    int strip_index = 0;
    YarnShape shape;
    std::optional<SafeZone> zone;
    CutPlan plan;
    std::vector<ConvexPolygon> segments;   // ordered along the axis
    std::vector<ConvexPolygon> cracklets;  // ordered along the axis
    bool spans_laminate = false;           // touches two opposite laminate edges
};

/// Cuts a yarn into segments and yarn cracklets along its plan.
SegmentedYarn segment_yarn(const Strip& yarn, const DirectedLine& axis, const CutPlan& plan,
                           const Tolerances& tol);

/// Classifies, plans and cuts every yarn of a ply. Emits a warning for each
/// yarn that spans the laminate yet receives no cut.
std::vector<SegmentedYarn> segment_ply(const LaminateSpec& spec, const PlyLayout& layout,
                                       std::vector<std::string>* warnings = nullptr);

}  // namespace lamgen

#endif
