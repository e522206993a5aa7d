#ifndef LAMGEN_GEOMETRY_HPP
#define LAMGEN_GEOMETRY_HPP

/// @file geometry.hpp
/// @brief Tolerance-aware 2D kernel: points, directed lines, convex polygons.
///
/// Every partitioning stage of the generator reduces to splitting convex
/// cells by straight lines, so this is the only polygon machinery needed.
/// All predicates are evaluated in double precision against explicit
/// tolerances; there is no exact arithmetic.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lamgen {

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr bool operator==(const Vec2&) const = default;

    constexpr Vec2 operator+(const Vec2& o) const noexcept { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const noexcept { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const noexcept { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const noexcept { return {x / s, y / s}; }
    constexpr Vec2 operator-() const noexcept { return {-x, -y}; }
};

constexpr double dot(const Vec2& a, const Vec2& b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) noexcept { return std::hypot(a.x, a.y); }
inline double distance(const Vec2& a, const Vec2& b) noexcept { return norm(a - b); }
/// Left-hand perpendicular (rotate +90 degrees).
constexpr Vec2 perp(const Vec2& a) noexcept { return {-a.y, a.x}; }
/// Lexicographic order on (x, y); used for canonical edge orientation.
constexpr bool lex_less(const Vec2& a, const Vec2& b) noexcept {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

struct Tolerances {
    double coincidence_eps = 1e-9;  // mm
    double area_threshold = 1e-9;   // mm^2
    double angle_eps = 1e-7;        // rad

    /// Throws GeometryError unless every field is strictly positive.
    void validate() const;
};

enum class Side { Left, Right, On };

/// Infinite line through `origin` with unit `direction`. Signed distances are
/// positive on the left of the direction of travel.
class DirectedLine {
public:
    DirectedLine() = default;
    DirectedLine(Vec2 origin, Vec2 direction);

    /// Line through `origin` at `angle_deg` measured counter-clockwise from +x.
    static DirectedLine from_angle(Vec2 origin, double angle_deg);
    static DirectedLine through(Vec2 a, Vec2 b);

    [[nodiscard]] const Vec2& origin() const noexcept { return origin_; }
    [[nodiscard]] const Vec2& direction() const noexcept { return direction_; }
    [[nodiscard]] Vec2 normal() const noexcept { return perp(direction_); }

    [[nodiscard]] double signed_distance(const Vec2& p) const noexcept {
        return cross(direction_, p - origin_);
    }
    /// Coordinate of the foot of `p` along the direction.
    [[nodiscard]] double station(const Vec2& p) const noexcept { return dot(direction_, p - origin_); }
    [[nodiscard]] Vec2 project(const Vec2& p) const noexcept {
        return origin_ + direction_ * station(p);
    }
    [[nodiscard]] Vec2 point_at(double station, double offset = 0.0) const noexcept {
        return origin_ + direction_ * station + normal() * offset;
    }
    /// Parallel line shifted by `offset` along the left normal.
    [[nodiscard]] DirectedLine offset(double offset) const noexcept;
    /// Line through the point at `station`, perpendicular to this one, directed along +normal.
    [[nodiscard]] DirectedLine perpendicular_at(double station) const noexcept;

private:
    Vec2 origin_{};
    Vec2 direction_{1.0, 0.0};
};

Side classify_side(const Vec2& point, const DirectedLine& line, const Tolerances& tol);

/// Counter-clockwise, strictly convex polygon with no repeated or collinear
/// vertices (up to coincidence_eps).
class ConvexPolygon {
public:
    ConvexPolygon() = default;

    /// Normalizes orientation, drops duplicate and collinear vertices, then
    /// validates convexity. Throws GeometryError on failure.
    static ConvexPolygon from_points(std::vector<Vec2> pts, const Tolerances& tol = {});
    /// Like from_points but returns nullopt instead of throwing for inputs that
    /// collapse below three vertices.
    static std::optional<ConvexPolygon> try_from_points(std::vector<Vec2> pts, const Tolerances& tol = {});
    static ConvexPolygon rectangle(double x0, double y0, double x1, double y1);

    [[nodiscard]] std::span<const Vec2> vertices() const noexcept { return verts_; }
    [[nodiscard]] std::size_t size() const noexcept { return verts_.size(); }
    [[nodiscard]] const Vec2& operator[](std::size_t i) const noexcept { return verts_[i]; }
    [[nodiscard]] const Vec2& vertex(std::size_t i) const noexcept { return verts_[i % verts_.size()]; }

    [[nodiscard]] double area() const noexcept;
    [[nodiscard]] Vec2 centroid() const noexcept;
    [[nodiscard]] double perimeter() const noexcept;
    /// Inside or on the boundary within eps.
    [[nodiscard]] bool contains(const Vec2& p, double eps) const noexcept;
    /// Distance from p to the polygon boundary.
    [[nodiscard]] double boundary_distance(const Vec2& p) const noexcept;
    [[nodiscard]] std::array<double, 4> bounds() const noexcept;  // xmin, ymin, xmax, ymax
    /// Projection interval of the vertices onto a line's direction.
    [[nodiscard]] std::pair<double, double> station_range(const DirectedLine& line) const noexcept;
    [[nodiscard]] std::pair<double, double> offset_range(const DirectedLine& line) const noexcept;

    /// Checks the class invariants; returns an empty string when valid.
    [[nodiscard]] std::string invariant_violation(const Tolerances& tol) const;

private:
    explicit ConvexPolygon(std::vector<Vec2> v) : verts_(std::move(v)) {}
    std::vector<Vec2> verts_;
};

double shoelace_area(std::span<const Vec2> pts) noexcept;

struct SplitResult {
    std::optional<ConvexPolygon> left;
    std::optional<ConvexPolygon> right;
    bool left_sliver = false;   // left present but below area_threshold
    bool right_sliver = false;
};

/// Splits `poly` by `line`. Vertices within coincidence_eps of the line are
/// snapped onto it; new vertices lie exactly on the line. A side is absent
/// when the polygon has no interior on that side. Sub-threshold pieces are
/// returned and flagged, never dropped.
SplitResult split_convex(const ConvexPolygon& poly, const DirectedLine& line, const Tolerances& tol);

/// Intersection of `rect` with the strip offset_lo <= signed_distance <= offset_hi.
std::optional<ConvexPolygon> clip_strip(const ConvexPolygon& rect, const DirectedLine& axis,
                                        double offset_lo, double offset_hi,
                                        const Tolerances& tol = {});

/// Convex-convex intersection (Sutherland-Hodgman against b's edges).
std::optional<ConvexPolygon> intersect_convex(const ConvexPolygon& a, const ConvexPolygon& b,
                                              const Tolerances& tol);

/// Length of the common part of segments [a0,a1] and [b0,b1] when they are
/// collinear within eps; zero otherwise.
double collinear_overlap(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1, double eps);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) noexcept;

}  // namespace lamgen

#endif
