#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "lamgen/mesher.hpp"

namespace lamgen {

namespace {

double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

// > 0 when d lies inside the circumcircle of the counter-clockwise (a, b, c).
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const Vec2 ad = a - d, bd = b - d, cd = c - d;
    const double a2 = dot(ad, ad), b2 = dot(bd, bd), c2 = dot(cd, cd);
    return ad.x * (bd.y * c2 - b2 * cd.y) - ad.y * (bd.x * c2 - b2 * cd.x) + a2 * (bd.x * cd.y - bd.y * cd.x);
}

double min_angle_cos(const Vec2& a, const Vec2& b, const Vec2& c) {
    // Largest cosine among the three angles = smallest angle.
    auto cosang = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        const Vec2 u = q - p, v = r - p;
        return dot(u, v) / (norm(u) * norm(v));
    };
    return std::max({cosang(a, b, c), cosang(b, c, a), cosang(c, a, b)});
}

using Tri = std::array<int, 3>;

long long edge_key(int a, int b, long long n) { return static_cast<long long>(a) * n + b; }

class Triangulation {
public:
    Triangulation(std::vector<Vec2> pts, double scale) : p_(std::move(pts)), scale_(scale) {}

    // Only ears at strict corners are cut, and only when the remainder keeps
    // at least three strict corners; otherwise a chain of collinear boundary
    // points can be left behind as a zero-area ring.
    void ear_clip(std::vector<int> ring) {
        auto corner = [&](int a, int b, int c) {
            const Vec2 u = p_[b] - p_[a], v = p_[c] - p_[b];
            return cross(u, v) > 1e-10 * norm(u) * norm(v);
        };
        while (ring.size() > 3) {
            const std::size_t n = ring.size();
            std::vector<char> is_corner(n);
            int corners = 0;
            for (std::size_t i = 0; i < n; ++i) {
                is_corner[i] = corner(ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
                corners += is_corner[i];
            }
            std::size_t best = n;
            double best_cos = 2.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!is_corner[i]) continue;
                const std::size_t ia = (i + n - 1) % n, ic = (i + 1) % n;
                const std::size_t iaa = (ia + n - 1) % n, icc = (ic + 1) % n;
                int left = corners - 1 - is_corner[ia] - is_corner[ic];
                left += corner(ring[iaa], ring[ia], ring[ic]);
                left += corner(ring[ia], ring[ic], ring[icc]);
                if (left < 3) continue;
                const double q = min_angle_cos(p_[ring[ia]], p_[ring[i]], p_[ring[ic]]);
                if (q < best_cos) {
                    best_cos = q;
                    best = i;
                }
            }
            if (best == n) throw GeometryError("triangulate: no valid ear in convex ring");
            const int a = ring[(best + n - 1) % n], b = ring[best], c = ring[(best + 1) % n];
            tris_.push_back({a, b, c});
            ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(best));
        }
        tris_.push_back({ring[0], ring[1], ring[2]});
    }

    void insert(int v) {
        const Vec2& q = p_[v];
        const double tiny = 1e-12 * scale_ * scale_;
        int best = -1;
        double best_min = -1e300;
        for (std::size_t t = 0; t < tris_.size(); ++t) {
            const auto& T = tris_[t];
            const double m = std::min({orient(p_[T[0]], p_[T[1]], q), orient(p_[T[1]], p_[T[2]], q),
                                       orient(p_[T[2]], p_[T[0]], q)});
            if (m > best_min) {
                best_min = m;
                best = static_cast<int>(t);
            }
        }
        const Tri T = tris_[static_cast<std::size_t>(best)];
        for (int k = 0; k < 3; ++k) {
            const int a = T[k], b = T[(k + 1) % 3], c = T[(k + 2) % 3];
            if (std::abs(orient(p_[a], p_[b], q)) > tiny) continue;
            // On edge (a, b): split this triangle and its neighbour in two each.
            for (std::size_t u = 0; u < tris_.size(); ++u) {
                const auto& U = tris_[u];
                for (int j = 0; j < 3; ++j) {
                    if (U[j] == b && U[(j + 1) % 3] == a) {
                        const int d = U[(j + 2) % 3];
                        tris_[static_cast<std::size_t>(best)] = {a, v, c};
                        tris_.push_back({v, b, c});
                        tris_[u] = {b, v, d};
                        tris_.push_back({v, a, d});
                        return;
                    }
                }
            }
            throw GeometryError("triangulate: interior point on the boundary");
        }
        tris_[static_cast<std::size_t>(best)] = {T[0], T[1], v};
        tris_.push_back({T[1], T[2], v});
        tris_.push_back({T[2], T[0], v});
    }

    // Lawson flips until every interior edge is locally Delaunay. Boundary
    // edges have no neighbour and are never touched.
    void make_delaunay() {
        const auto n = static_cast<long long>(p_.size());
        const double tiny = 1e-12 * std::pow(scale_, 4);
        const double tiny_area = 1e-14 * scale_ * scale_;
        for (int pass = 0; pass < 1000; ++pass) {
            std::unordered_map<long long, std::pair<int, int>> edges;
            for (std::size_t t = 0; t < tris_.size(); ++t)
                for (int k = 0; k < 3; ++k)
                    edges[edge_key(tris_[t][k], tris_[t][(k + 1) % 3], n)] = {static_cast<int>(t), k};
            std::vector<char> touched(tris_.size(), 0);
            bool flipped = false;
            for (std::size_t t = 0; t < tris_.size(); ++t) {
                if (touched[t]) continue;
                for (int k = 0; k < 3 && !touched[t]; ++k) {
                    const int a = tris_[t][k], b = tris_[t][(k + 1) % 3], c = tris_[t][(k + 2) % 3];
                    auto it = edges.find(edge_key(b, a, n));
                    if (it == edges.end()) continue;
                    const auto [u, j] = it->second;
                    if (touched[static_cast<std::size_t>(u)]) continue;
                    const auto& U = tris_[static_cast<std::size_t>(u)];
                    if (U[j] != b || U[(j + 1) % 3] != a) continue;
                    const int d = U[(j + 2) % 3];
                    if (incircle(p_[a], p_[b], p_[c], p_[d]) <= tiny) continue;
                    if (orient(p_[c], p_[a], p_[d]) <= tiny_area || orient(p_[d], p_[b], p_[c]) <= tiny_area) continue;
                    tris_[t] = {c, a, d};
                    tris_[static_cast<std::size_t>(u)] = {d, b, c};
                    touched[t] = touched[static_cast<std::size_t>(u)] = 1;
                    flipped = true;
                }
            }
            if (!flipped) return;
        }
    }

    std::vector<Tri> take() { return std::move(tris_); }

private:
    std::vector<Vec2> p_;
    double scale_;
    std::vector<Tri> tris_;
};

}  // namespace

std::vector<std::array<int, 3>> triangulate_convex(const std::vector<Vec2>& ring, const std::vector<Vec2>& interior) {
    if (ring.size() < 3) throw GeometryError("triangulate: ring needs three points");
    std::vector<Vec2> pts = ring;
    pts.insert(pts.end(), interior.begin(), interior.end());
    double scale = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) scale = std::max(scale, distance(ring[i], ring[(i + 1) % ring.size()]));

    Triangulation tr(pts, scale);
    std::vector<int> ids(ring.size());
    for (std::size_t i = 0; i < ring.size(); ++i) ids[i] = static_cast<int>(i);
    tr.ear_clip(ids);
    for (std::size_t i = 0; i < interior.size(); ++i) tr.insert(static_cast<int>(ring.size() + i));
    tr.make_delaunay();
    return tr.take();
}

}  // namespace lamgen
