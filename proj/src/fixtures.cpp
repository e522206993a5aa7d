#include "lamgen/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "lamgen/shape.hpp"

namespace lamgen {

namespace {

bool near(double a, double b, double eps) { return std::abs(a - b) <= eps; }

bool edge_on(const Vec2& a, const Vec2& b, int axis, double value, double eps) {
    return axis == 0 ? near(a.x, value, eps) && near(b.x, value, eps) : near(a.y, value, eps) && near(b.y, value, eps);
}

Part make_part(PartLabel label, double x0, double x1, double y0, double y1, double z0, double z1, double theta,
               int slab) {
    return Part{label, ConvexPolygon::rectangle(x0, y0, x1, y1), z0, z1, theta, slab};
}

}  // namespace

Model assemble_parts(const Config& cfg, std::vector<Part> parts) {
    Model m;
    m.config = cfg;
    m.parts = std::move(parts);
    const auto& tol = cfg.laminate.tol;
    const double eps = tol.coincidence_eps;
    for (const auto& adj : find_adjacencies(m.parts, tol)) m.ties.push_back(orient(m.parts, adj, tol));

    double zmin = 1e300, zmax = -1e300;
    for (const auto& p : m.parts) {
        zmin = std::min(zmin, p.z_lo);
        zmax = std::max(zmax, p.z_hi);
    }
    for (auto& name : {"x-min", "x-max", "y-min", "y-max", "z-min", "z-max"}) m.face_sets[name];
    for (std::size_t p = 0; p < m.parts.size(); ++p) {
        const Part& P = m.parts[p];
        const int id = static_cast<int>(p);
        m.part_sets[P.slab % 2 == 0 ? "ply-" + std::to_string(P.slab / 2 + 1) : "interface-" + std::to_string(P.slab / 2 + 1)]
            .push_back(id);
        if (P.label.role != PartRole::YarnSegment) continue;
        for (std::size_t e = 0; e < P.footprint.size(); ++e) {
            const Vec2 a = P.footprint.vertex(e), b = P.footprint.vertex(e + 1);
            const int f = static_cast<int>(e);
            if (edge_on(a, b, 0, 0.0, eps)) m.face_sets["x-min"].push_back({id, f});
            if (edge_on(a, b, 0, cfg.laminate.L, eps)) m.face_sets["x-max"].push_back({id, f});
            if (edge_on(a, b, 1, 0.0, eps)) m.face_sets["y-min"].push_back({id, f});
            if (edge_on(a, b, 1, cfg.laminate.W, eps)) m.face_sets["y-max"].push_back({id, f});
        }
        if (near(P.z_lo, zmin, eps)) m.face_sets["z-min"].push_back({id, kFaceBottom});
        if (near(P.z_hi, zmax, eps)) m.face_sets["z-max"].push_back({id, kFaceTop});
    }
    return m;
}

Model cracklet_pull_model(const Config& base, PartRole role, double length, double width, double thickness,
                          double gap) {
    if (role != PartRole::MatrixCracklet && role != PartRole::YarnCracklet)
        throw std::invalid_argument("cracklet pull: role must be a matrix or yarn cracklet");
    Config cfg = base;
    cfg.laminate.L = length;
    cfg.laminate.W = width;
    const double a = 0.5 * (length - gap);
    const bool matrix = role == PartRole::MatrixCracklet;
    const double theta = matrix ? 90.0 : 0.0;
    std::vector<Part> parts;
    parts.push_back(make_part({PartRole::YarnSegment, 1, 1, 1}, 0, a, 0, width, 0, thickness, theta, 0));
    parts.push_back(make_part({PartRole::YarnSegment, 1, matrix ? 2 : 1, matrix ? 1 : 2}, a + gap, length, 0, width, 0,
                              thickness, theta, 0));
    parts.push_back(make_part({role, 1, 1, 1}, a, a + gap, 0, width, 0, thickness, theta, 0));
    return assemble_parts(cfg, std::move(parts));
}

Model tcrack_model(const Config& base, const TCrackGeometry& g, bool matched) {
    Config cfg = base;
    cfg.laminate.L = g.length;
    cfg.laminate.W = g.width;
    const double xl = g.crack_x - 0.5 * g.gap, xr = g.crack_x + 0.5 * g.gap;
    const double z1 = g.ply, z2 = g.ply + g.interface, z3 = 2 * g.ply + g.interface;
    std::vector<Part> parts;
    parts.push_back(make_part({PartRole::YarnSegment, 1, 1, 1}, 0, xl, 0, g.width, 0, z1, g.theta_cracked, 0));
    parts.push_back(make_part({PartRole::YarnSegment, 1, 2, 1}, xr, g.length, 0, g.width, 0, z1, g.theta_cracked, 0));
    if (matched) {
        parts.push_back(make_part({PartRole::DelaminationCracklet, 1, 0, 1}, 0, xl, 0, g.width, z1, z2, 0, 1));
        parts.push_back(make_part({PartRole::DelaminationCracklet, 1, 0, 2}, xl, xr, 0, g.width, z1, z2, 0, 1));
        parts.push_back(make_part({PartRole::DelaminationCracklet, 1, 0, 3}, xr, g.length, 0, g.width, z1, z2, 0, 1));
    } else {
        parts.push_back(make_part({PartRole::DelaminationCracklet, 1, 0, 1}, 0, g.length, 0, g.width, z1, z2, 0, 1));
    }
    parts.push_back(make_part({PartRole::YarnSegment, 2, 1, 1}, 0, g.length, 0, g.width, z2, z3, g.theta_intact, 2));
    return assemble_parts(cfg, std::move(parts));
}

namespace {

// Graded coordinates from `from` (spacing fine) to `to` (growing to coarse).
std::vector<double> graded(double from, double to, double fine, double coarse) {
    std::vector<double> steps;
    const double span = std::abs(to - from);
    double h = fine, acc = 0.0;
    while (acc + h < span * (1 - 1e-12)) {
        steps.push_back(h);
        acc += h;
        h = std::min(coarse, h * 1.15);
    }
    // Spread the remainder over the last few steps instead of a sliver.
    const double rem = span - acc;
    if (rem > 0.5 * (steps.empty() ? span : steps.back()) || steps.empty())
        steps.push_back(rem);
    else
        steps.back() += rem;
    std::vector<double> out{from};
    const double sgn = to >= from ? 1.0 : -1.0;
    double x = from;
    for (double s : steps) {
        x += sgn * s;
        out.push_back(x);
    }
    out.back() = to;
    return out;
}

std::vector<double> uniform(double a, double b, int n) {
    std::vector<double> out;
    for (int i = 0; i <= n; ++i) out.push_back(i == n ? b : a + (b - a) * i / n);
    return out;
}

// Structured hex grid with per-cell part ids (-1 = empty) and shared nodes.
MeshedModel grid_mesh(const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<double>& zs,
                      const std::function<int(int, int, int)>& cell_part, double eps) {
    MeshedModel mesh;
    const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size()), nz = static_cast<int>(zs.size());
    std::vector<int> id(static_cast<std::size_t>(nx * ny * nz), -1);
    auto gid = [&](int i, int j, int k) -> int& { return id[static_cast<std::size_t>((k * ny + j) * nx + i)]; };
    for (int k = 0; k + 1 < nz; ++k)
        for (int j = 0; j + 1 < ny; ++j)
            for (int i = 0; i + 1 < nx; ++i) {
                const int part = cell_part(i, j, k);
                if (part < 0) continue;
                Element e;
                e.type = ElementType::Hex8;
                e.part = part;
                const int corner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                          {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
                for (int c = 0; c < 8; ++c) {
                    int& n = gid(i + corner[c][0], j + corner[c][1], k + corner[c][2]);
                    if (n < 0) {
                        n = static_cast<int>(mesh.nodes.size());
                        mesh.nodes.push_back({xs[static_cast<std::size_t>(i + corner[c][0])],
                                              ys[static_cast<std::size_t>(j + corner[c][1])],
                                              zs[static_cast<std::size_t>(k + corner[c][2])]});
                        mesh.node_part.push_back(part);
                    }
                    e.nodes[static_cast<std::size_t>(c)] = n;
                }
                mesh.elements.push_back(e);
            }
    const double x0 = xs.front(), x1 = xs.back(), y0 = ys.front(), y1 = ys.back(), z0 = zs.front(), z1 = zs.back();
    for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
        const Vec3& p = mesh.nodes[n];
        const int v = static_cast<int>(n);
        if (near(p.x, x0, eps)) mesh.node_sets["x-min"].push_back(v);
        if (near(p.x, x1, eps)) mesh.node_sets["x-max"].push_back(v);
        if (near(p.y, y0, eps)) mesh.node_sets["y-min"].push_back(v);
        if (near(p.y, y1, eps)) mesh.node_sets["y-max"].push_back(v);
        if (near(p.z, z0, eps)) mesh.node_sets["z-min"].push_back(v);
        if (near(p.z, z1, eps)) mesh.node_sets["z-max"].push_back(v);
    }
    return mesh;
}

}  // namespace

Monolith tcrack_monolith(const TCrackGeometry& g, double fine, double coarse, int layers_per_ply) {
    const double xl = g.crack_x - 0.5 * g.gap, xr = g.crack_x + 0.5 * g.gap;
    auto left = graded(xl, 0.0, fine, coarse);
    std::reverse(left.begin(), left.end());
    const auto gap = uniform(xl, xr, std::max(1, static_cast<int>(std::ceil(g.gap / fine - 1e-9))));
    const auto right = graded(xr, g.length, fine, coarse);
    std::vector<double> xs = left;
    xs.insert(xs.end(), gap.begin() + 1, gap.end());
    xs.insert(xs.end(), right.begin() + 1, right.end());
    const std::vector<double> ys{0.0, g.width};
    std::vector<double> zs = uniform(0.0, g.ply, layers_per_ply);
    const double z2 = g.ply + g.interface;
    zs.push_back(z2);
    const auto top = uniform(z2, z2 + g.ply, layers_per_ply);
    zs.insert(zs.end(), top.begin() + 1, top.end());

    const int gap_lo = static_cast<int>(left.size()) - 1;
    const int gap_hi = gap_lo + static_cast<int>(gap.size()) - 1;
    Monolith out;
    out.mesh = grid_mesh(
        xs, ys, zs,
        [&](int i, int, int k) {
            if (k < layers_per_ply) return (i >= gap_lo && i < gap_hi) ? -1 : 0;
            if (k == layers_per_ply) return 1;
            return 2;
        },
        1e-12);
    out.parts = {{PartRole::YarnSegment, g.theta_cracked, "cracked"},
                 {PartRole::DelaminationCracklet, 0.0, "interface"},
                 {PartRole::YarnSegment, g.theta_intact, "intact"}};
    return out;
}

Monolith ply_stack_monolith(const LaminateSpec& lam, double size, int layers_per_ply) {
    const auto xs = uniform(0.0, lam.L, std::max(1, static_cast<int>(std::ceil(lam.L / size - 1e-9))));
    const auto ys = uniform(0.0, lam.W, std::max(1, static_cast<int>(std::ceil(lam.W / size - 1e-9))));
    std::vector<double> zs{0.0};
    std::vector<int> layer_ply;
    for (int i = 0; i < lam.ply_count(); ++i) {
        const double top = i + 1 < lam.ply_count() ? lam.ply_z_lo(i + 1) : lam.ply_z_hi(i);
        const auto zz = uniform(lam.ply_z_lo(i), top, layers_per_ply);
        zs.insert(zs.end(), zz.begin() + 1, zz.end());
        for (int k = 0; k < layers_per_ply; ++k) layer_ply.push_back(i);
    }
    Monolith out;
    out.mesh = grid_mesh(xs, ys, zs, [&](int, int, int k) { return layer_ply[static_cast<std::size_t>(k)]; }, 1e-12);
    for (int i = 0; i < lam.ply_count(); ++i)
        out.parts.push_back({PartRole::YarnSegment, lam.plies[static_cast<std::size_t>(i)].theta_deg,
                             "ply-" + std::to_string(i + 1)});
    return out;
}

std::optional<std::array<double, 3>> sample_displacement(const MeshedModel& mesh, const std::vector<double>& u,
                                                         const std::vector<int>& elements, const Vec3& p) {
    const double tol = 1e-7;
    for (int ei : elements) {
        const Element& e = mesh.elements[static_cast<std::size_t>(ei)];
        const bool hex = e.type == ElementType::Hex8;
        const int n = e.node_count();
        shape::Point3 xi = hex ? shape::Point3{0, 0, 0} : shape::Point3{1.0 / 3, 1.0 / 3, 0};
        double N[8], dN[8][3];
        bool converged = false;
        for (int it = 0; it < 30; ++it) {
            if (hex)
                shape::hex8(xi, N, dN);
            else
                shape::wedge6(xi, N, dN);
            Eigen::Vector3d x = Eigen::Vector3d::Zero();
            Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
            for (int a = 0; a < n; ++a) {
                const Vec3& X = mesh.nodes[static_cast<std::size_t>(e.nodes[static_cast<std::size_t>(a)])];
                const Eigen::Vector3d xa(X.x, X.y, X.z);
                x += N[a] * xa;
                for (int j = 0; j < 3; ++j) J.col(j) += dN[a][j] * xa;
            }
            const Eigen::Vector3d r = Eigen::Vector3d(p.x, p.y, p.z) - x;
            const Eigen::Vector3d d = J.fullPivLu().solve(r);
            xi.r += d(0);
            xi.s += d(1);
            xi.t += d(2);
            if (d.norm() < 1e-10) {
                converged = true;
                break;
            }
        }
        if (!converged) continue;
        const bool inside = hex ? std::abs(xi.r) <= 1 + tol && std::abs(xi.s) <= 1 + tol && std::abs(xi.t) <= 1 + tol
                                : xi.r >= -tol && xi.s >= -tol && xi.r + xi.s <= 1 + tol && std::abs(xi.t) <= 1 + tol;
        if (!inside) continue;
        if (hex)
            shape::hex8(xi, N, dN);
        else
            shape::wedge6(xi, N, dN);
        std::array<double, 3> out{};
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < 3; ++c)
                out[static_cast<std::size_t>(c)] +=
                    N[a] * u[3 * static_cast<std::size_t>(e.nodes[static_cast<std::size_t>(a)]) + static_cast<std::size_t>(c)];
        return out;
    }
    return std::nullopt;
}

std::vector<int> elements_with_role(const MeshedModel& mesh, const std::vector<PartMaterial>& parts, PartRole role) {
    std::vector<int> out;
    for (std::size_t k = 0; k < mesh.elements.size(); ++k)
        if (parts[static_cast<std::size_t>(mesh.elements[k].part)].role == role) out.push_back(static_cast<int>(k));
    return out;
}

Config random_config(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    Config cfg;
    auto& lam = cfg.laminate;
    lam.L = U(2.0, 10.0);
    lam.W = U(2.0, 10.0);
    const int n = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int i = 0; i < n; ++i) {
        PlySpec p;
        p.theta_deg = U(-90.0, 90.0);
        p.h = U(0.1, 0.3);
        p.d = U(0.3, 3.0);
        p.l = U(0.5, 12.0);
        p.yarn_cracklets = U(0.0, 1.0) < 0.8;
        lam.plies.push_back(p);
    }
    lam.t_f = U(0.001, 0.03);
    lam.t_m = U(0.001, 0.03);
    lam.t_d = U(0.001, 0.01);
    validate(cfg);
    return cfg;
}

}  // namespace lamgen
