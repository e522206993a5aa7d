#include "lamgen/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace lamgen {

void Tolerances::validate() const {
    if (!(coincidence_eps > 0.0)) throw GeometryError("coincidence_eps must be > 0");
    if (!(area_threshold > 0.0)) throw GeometryError("area_threshold must be > 0");
    if (!(angle_eps > 0.0)) throw GeometryError("angle_eps must be > 0");
}

DirectedLine::DirectedLine(Vec2 origin, Vec2 direction) : origin_(origin) {
    const double n = norm(direction);
    if (!(n > 0.0) || !std::isfinite(n)) throw GeometryError("DirectedLine: zero direction");
    direction_ = direction / n;
}

DirectedLine DirectedLine::from_angle(Vec2 origin, double angle_deg) {
    // Exact values at the axis angles keep 0/90 plies free of round-off.
    const double a = std::fmod(angle_deg, 360.0);
    Vec2 d;
    if (a == 0.0) d = {1.0, 0.0};
    else if (a == 90.0 || a == -270.0) d = {0.0, 1.0};
    else if (a == -90.0 || a == 270.0) d = {0.0, -1.0};
    else if (a == 180.0 || a == -180.0) d = {-1.0, 0.0};
    else {
        const double r = a * std::numbers::pi / 180.0;
        d = {std::cos(r), std::sin(r)};
    }
    return {origin, d};
}

DirectedLine DirectedLine::through(Vec2 a, Vec2 b) { return {a, b - a}; }

DirectedLine DirectedLine::offset(double off) const noexcept {
    DirectedLine l = *this;
    l.origin_ = origin_ + normal() * off;
    return l;
}

DirectedLine DirectedLine::perpendicular_at(double s) const noexcept {
    DirectedLine l;
    l.origin_ = point_at(s);
    l.direction_ = normal();
    return l;
}

Side classify_side(const Vec2& point, const DirectedLine& line, const Tolerances& tol) {
    const double d = line.signed_distance(point);
    if (std::abs(d) <= tol.coincidence_eps) return Side::On;
    return d > 0.0 ? Side::Left : Side::Right;
}

double shoelace_area(std::span<const Vec2> pts) noexcept {
    const std::size_t n = pts.size();
    if (n < 3) return 0.0;
    // Shifted to the first vertex to limit cancellation.
    const Vec2 o = pts[0];
    double a = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) a += cross(pts[i] - o, pts[i + 1] - o);
    return 0.5 * a;
}

namespace {

// Removes consecutive duplicates and vertices collinear with their
// neighbours. Repeats until stable since one removal can expose another.
std::vector<Vec2> clean_ring(std::vector<Vec2> v, double eps) {
    bool changed = true;
    while (changed && v.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
            const std::size_t n = v.size();
            const Vec2& a = v[(i + n - 1) % n];
            const Vec2& b = v[i];
            const Vec2& c = v[(i + 1) % n];
            bool drop = distance(a, b) <= eps;
            if (!drop) {
                const double lac = distance(a, c);
                if (lac <= eps) drop = true;
                else drop = std::abs(cross(c - a, b - a)) / lac <= eps && dot(b - a, c - a) >= 0.0 &&
                            dot(b - c, a - c) >= 0.0;
            }
            if (drop) {
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                --i;
            }
        }
    }
    if (v.size() < 3) v.clear();
    return v;
}

}  // namespace

std::optional<ConvexPolygon> ConvexPolygon::try_from_points(std::vector<Vec2> pts, const Tolerances& tol) {
    for (const auto& p : pts)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("ConvexPolygon: non-finite vertex");
    if (shoelace_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());
    pts = clean_ring(std::move(pts), tol.coincidence_eps);
    if (pts.size() < 3) return std::nullopt;
    if (!(shoelace_area(pts) > 0.0)) return std::nullopt;
    ConvexPolygon poly(std::move(pts));
    if (auto why = poly.invariant_violation(tol); !why.empty()) throw GeometryError("ConvexPolygon: " + why);
    return poly;
}

ConvexPolygon ConvexPolygon::from_points(std::vector<Vec2> pts, const Tolerances& tol) {
    auto p = try_from_points(std::move(pts), tol);
    if (!p) throw GeometryError("ConvexPolygon: fewer than three distinct vertices");
    return *p;
}

ConvexPolygon ConvexPolygon::rectangle(double x0, double y0, double x1, double y1) {
    if (!(x1 > x0) || !(y1 > y0)) throw GeometryError("rectangle: empty extent");
    return ConvexPolygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

double ConvexPolygon::area() const noexcept { return shoelace_area(verts_); }

Vec2 ConvexPolygon::centroid() const noexcept {
    const Vec2 o = verts_[0];
    double a = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t i = 1; i + 1 < verts_.size(); ++i) {
        const Vec2 p = verts_[i] - o, q = verts_[i + 1] - o;
        const double w = cross(p, q);
        a += w;
        cx += w * (p.x + q.x);
        cy += w * (p.y + q.y);
    }
    if (a == 0.0) {
        Vec2 s{};
        for (const auto& v : verts_) s = s + v;
        return s / static_cast<double>(verts_.size());
    }
    return o + Vec2{cx / (3.0 * a), cy / (3.0 * a)};
}

double ConvexPolygon::perimeter() const noexcept {
    double p = 0.0;
    for (std::size_t i = 0; i < verts_.size(); ++i) p += distance(verts_[i], vertex(i + 1));
    return p;
}

bool ConvexPolygon::contains(const Vec2& p, double eps) const noexcept {
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        const Vec2 a = verts_[i], b = vertex(i + 1);
        const double len = distance(a, b);
        if (cross(b - a, p - a) / len < -eps) return false;
    }
    return true;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) noexcept {
    const Vec2 ab = b - a;
    const double l2 = dot(ab, ab);
    double t = l2 > 0.0 ? dot(p - a, ab) / l2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + ab * t);
}

double ConvexPolygon::boundary_distance(const Vec2& p) const noexcept {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < verts_.size(); ++i) d = std::min(d, point_segment_distance(p, verts_[i], vertex(i + 1)));
    return d;
}

std::array<double, 4> ConvexPolygon::bounds() const noexcept {
    std::array<double, 4> b{verts_[0].x, verts_[0].y, verts_[0].x, verts_[0].y};
    for (const auto& v : verts_) {
        b[0] = std::min(b[0], v.x);
        b[1] = std::min(b[1], v.y);
        b[2] = std::max(b[2], v.x);
        b[3] = std::max(b[3], v.y);
    }
    return b;
}

std::pair<double, double> ConvexPolygon::station_range(const DirectedLine& line) const noexcept {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& v : verts_) {
        const double s = line.station(v);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return {lo, hi};
}

std::pair<double, double> ConvexPolygon::offset_range(const DirectedLine& line) const noexcept {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& v : verts_) {
        const double s = line.signed_distance(v);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return {lo, hi};
}

std::string ConvexPolygon::invariant_violation(const Tolerances& tol) const {
    const std::size_t n = verts_.size();
    if (n < 3) return "fewer than 3 vertices";
    if (!(area() > 0.0)) return "non-positive signed area";
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = verts_[i], b = vertex(i + 1), c = vertex(i + 2);
        if (distance(a, b) <= tol.coincidence_eps) return "duplicate consecutive vertices";
        // Every vertex must lie on the left of (or on) every edge.
        const double len = distance(a, b);
        for (std::size_t k = 0; k < n; ++k) {
            if (cross(b - a, verts_[k] - a) / len < -tol.coincidence_eps) return "not convex";
        }
        (void)c;
    }
    return {};
}

SplitResult split_convex(const ConvexPolygon& poly, const DirectedLine& line, const Tolerances& tol) {
    const std::size_t n = poly.size();
    std::vector<Vec2> pts(poly.vertices().begin(), poly.vertices().end());
    std::vector<double> d(n);
    bool any_left = false, any_right = false;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = line.signed_distance(pts[i]);
        if (std::abs(d[i]) <= tol.coincidence_eps) {
            d[i] = 0.0;
            pts[i] = line.project(pts[i]);
        } else if (d[i] > 0.0) {
            any_left = true;
        } else {
            any_right = true;
        }
    }

    SplitResult out;
    if (!any_right || !any_left) {
        // No interior on one side; the input is returned unchanged.
        auto& side = any_right ? out.right : out.left;
        side = poly;
        (any_right ? out.right_sliver : out.left_sliver) = poly.area() < tol.area_threshold;
        if (!any_left && !any_right) {
            // Polygon entirely within eps of the line: degenerate, report as left sliver.
            out.left_sliver = true;
        }
        return out;
    }

    std::vector<Vec2> left, right;
    left.reserve(n + 2);
    right.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        if (d[i] >= 0.0) left.push_back(pts[i]);
        if (d[i] <= 0.0) right.push_back(pts[i]);
        if ((d[i] > 0.0 && d[j] < 0.0) || (d[i] < 0.0 && d[j] > 0.0)) {
            const double t = d[i] / (d[i] - d[j]);
            const Vec2 x = line.project(pts[i] + (pts[j] - pts[i]) * t);
            left.push_back(x);
            right.push_back(x);
        }
    }
    auto make = [&](std::vector<Vec2>& ring, std::optional<ConvexPolygon>& dst, bool& sliver) {
        auto p = ConvexPolygon::try_from_points(std::move(ring), tol);
        if (p) {
            sliver = p->area() < tol.area_threshold;
            dst = std::move(p);
        }
    };
    make(left, out.left, out.left_sliver);
    make(right, out.right, out.right_sliver);
    return out;
}

std::optional<ConvexPolygon> clip_strip(const ConvexPolygon& rect, const DirectedLine& axis, double offset_lo,
                                        double offset_hi, const Tolerances& tol) {
    if (!(offset_lo < offset_hi)) throw GeometryError("clip_strip: offset_lo must be < offset_hi");
    auto lo = split_convex(rect, axis.offset(offset_lo), tol);
    if (!lo.left) return std::nullopt;
    auto hi = split_convex(*lo.left, axis.offset(offset_hi), tol);
    if (!hi.right) return std::nullopt;
    return hi.right;
}

std::optional<ConvexPolygon> intersect_convex(const ConvexPolygon& a, const ConvexPolygon& b,
                                              const Tolerances& tol) {
    std::optional<ConvexPolygon> cur = a;
    for (std::size_t i = 0; i < b.size() && cur; ++i) {
        auto r = split_convex(*cur, DirectedLine::through(b[i], b.vertex(i + 1)), tol);
        cur = std::move(r.left);
    }
    return cur;
}

double collinear_overlap(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1, double eps) {
    const double la = distance(a0, a1);
    if (la <= eps) return 0.0;
    const Vec2 u = (a1 - a0) / la;
    if (std::abs(cross(u, b0 - a0)) > eps || std::abs(cross(u, b1 - a0)) > eps) return 0.0;
    double s0 = dot(u, b0 - a0), s1 = dot(u, b1 - a0);
    if (s0 > s1) std::swap(s0, s1);
    const double lo = std::max(0.0, s0), hi = std::min(la, s1);
    return hi - lo > eps ? hi - lo : 0.0;
}

}  // namespace lamgen
