#ifndef LAMGEN_SHAPE_HPP
#define LAMGEN_SHAPE_HPP

/// @file shape.hpp
/// @brief Trilinear hexahedron and linear wedge shape functions.

#include <array>
#include <cmath>
#include <vector>

namespace lamgen::shape {

struct Point3 {
    double r, s, t;
};

inline constexpr std::array<Point3, 8> kHexNodes{{{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                                   {-1, -1, 1}, {1, -1, 1}, {1, 1, 1}, {-1, 1, 1}}};
inline constexpr std::array<Point3, 6> kWedgeNodes{{{0, 0, -1}, {1, 0, -1}, {0, 1, -1},
                                                     {0, 0, 1}, {1, 0, 1}, {0, 1, 1}}};

/// Values and natural derivatives (dN/dr, dN/ds, dN/dt) at p.
inline void hex8(const Point3& p, double N[8], double dN[8][3]) {
    for (int a = 0; a < 8; ++a) {
        const auto& n = kHexNodes[static_cast<std::size_t>(a)];
        const double fr = 1 + n.r * p.r, fs = 1 + n.s * p.s, ft = 1 + n.t * p.t;
        N[a] = 0.125 * fr * fs * ft;
        dN[a][0] = 0.125 * n.r * fs * ft;
        dN[a][1] = 0.125 * fr * n.s * ft;
        dN[a][2] = 0.125 * fr * fs * n.t;
    }
}

inline void wedge6(const Point3& p, double N[6], double dN[6][3]) {
    const double L[3] = {1 - p.r - p.s, p.r, p.s};
    const double dL[3][2] = {{-1, -1}, {1, 0}, {0, 1}};
    for (int a = 0; a < 6; ++a) {
        const int k = a % 3;
        const double sgn = a < 3 ? -1.0 : 1.0;
        const double h = 0.5 * (1 + sgn * p.t);
        N[a] = L[k] * h;
        dN[a][0] = dL[k][0] * h;
        dN[a][1] = dL[k][1] * h;
        dN[a][2] = L[k] * 0.5 * sgn;
    }
}

struct Gauss {
    Point3 p;
    double w;
};

inline const std::vector<Gauss>& hex_rule() {
    static const std::vector<Gauss> rule = [] {
        std::vector<Gauss> g;
        const double x = 1.0 / std::sqrt(3.0);
        for (double t : {-x, x})
            for (double s : {-x, x})
                for (double r : {-x, x}) g.push_back({{r, s, t}, 1.0});
        return g;
    }();
    return rule;
}

inline const std::vector<Gauss>& wedge_rule() {
    static const std::vector<Gauss> rule = [] {
        std::vector<Gauss> g;
        const double x = 1.0 / std::sqrt(3.0);
        const Point3 tri[3] = {{1.0 / 6, 1.0 / 6, 0}, {2.0 / 3, 1.0 / 6, 0}, {1.0 / 6, 2.0 / 3, 0}};
        for (double t : {-x, x})
            for (const auto& q : tri) g.push_back({{q.r, q.s, t}, 1.0 / 6.0});
        return g;
    }();
    return rule;
}

}  // namespace lamgen::shape

#endif
