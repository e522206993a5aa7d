#include "lamgen/mesher.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>

#include "lamgen/parallel.hpp"
#include "lamgen/shape.hpp"
#include "lamgen/spatial_index.hpp"

namespace lamgen {

int edge_divisions(const Vec2& a, const Vec2& b, double size) {
    const double len = lex_less(a, b) ? distance(a, b) : distance(b, a);
    // The relative slack keeps 7.0 / 1.0 from rounding up to 8.
    return std::max(1, static_cast<int>(std::ceil(len / size * (1.0 - 1e-12))));
}

std::vector<Vec2> edge_nodes(const Vec2& a, const Vec2& b, double size) {
    const bool fwd = lex_less(a, b);
    const Vec2 p = fwd ? a : b, q = fwd ? b : a;
    const int n = edge_divisions(a, b, size);
    std::vector<Vec2> out(static_cast<std::size_t>(n) + 1);
    out.front() = p;
    out.back() = q;
    for (int i = 1; i < n; ++i) {
        const double t = static_cast<double>(i) / n;
        out[static_cast<std::size_t>(i)] = {p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t};
    }
    if (!fwd) std::reverse(out.begin(), out.end());
    return out;
}

namespace {

Mesh2D structured_quad(const ConvexPolygon& poly, double size) {
    std::array<std::vector<Vec2>, 4> e;
    for (std::size_t k = 0; k < 4; ++k) e[k] = edge_nodes(poly.vertex(k), poly.vertex(k + 1), size);
    const int n0 = static_cast<int>(e[0].size()) - 1, n1 = static_cast<int>(e[1].size()) - 1;
    const Vec2 v0 = poly[0], v1 = poly[1], v2 = poly[2], v3 = poly[3];

    Mesh2D m;
    auto id = [&](int i, int j) { return j * (n0 + 1) + i; };
    m.points.resize(static_cast<std::size_t>((n0 + 1) * (n1 + 1)));
    for (int j = 0; j <= n1; ++j) {
        for (int i = 0; i <= n0; ++i) {
            Vec2 p;
            if (j == 0) p = e[0][static_cast<std::size_t>(i)];
            else if (j == n1) p = e[2][static_cast<std::size_t>(n0 - i)];
            else if (i == 0) p = e[3][static_cast<std::size_t>(n1 - j)];
            else if (i == n0) p = e[1][static_cast<std::size_t>(j)];
            else {
                // Transfinite interpolation from the four boundary chains.
                const double xi = static_cast<double>(i) / n0, eta = static_cast<double>(j) / n1;
                const Vec2 B = e[0][static_cast<std::size_t>(i)], T = e[2][static_cast<std::size_t>(n0 - i)];
                const Vec2 L = e[3][static_cast<std::size_t>(n1 - j)], R = e[1][static_cast<std::size_t>(j)];
                p = B * (1 - eta) + T * eta + L * (1 - xi) + R * xi -
                    (v0 * ((1 - xi) * (1 - eta)) + v1 * (xi * (1 - eta)) + v2 * (xi * eta) + v3 * ((1 - xi) * eta));
            }
            m.points[static_cast<std::size_t>(id(i, j))] = p;
        }
    }
    for (int j = 0; j < n1; ++j)
        for (int i = 0; i < n0; ++i) m.quads.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});

    m.edge_points.resize(4);
    for (int i = 0; i <= n0; ++i) m.edge_points[0].push_back(id(i, 0));
    for (int j = 0; j <= n1; ++j) m.edge_points[1].push_back(id(n0, j));
    for (int i = n0; i >= 0; --i) m.edge_points[2].push_back(id(i, n1));
    for (int j = n1; j >= 0; --j) m.edge_points[3].push_back(id(0, j));
    return m;
}

std::vector<Vec2> interior_lattice(const ConvexPolygon& poly, double size) {
    std::size_t longest = 0;
    for (std::size_t k = 1; k < poly.size(); ++k)
        if (distance(poly.vertex(k), poly.vertex(k + 1)) > distance(poly.vertex(longest), poly.vertex(longest + 1)))
            longest = k;
    const DirectedLine frame = DirectedLine::through(poly.vertex(longest), poly.vertex(longest + 1));
    const auto [s0, s1] = poly.station_range(frame);
    const auto [o0, o1] = poly.offset_range(frame);
    const double row = size * std::sqrt(3.0) / 2.0;
    std::vector<Vec2> out;
    const int nrows = static_cast<int>(std::floor((o1 - o0) / row));
    for (int r = 1; r <= nrows; ++r) {
        const double o = o0 + r * row;
        const double shift = (r % 2) ? 0.0 : 0.5 * size;
        for (double s = s0 + shift + size; s < s1; s += size) {
            const Vec2 p = frame.point_at(s, o);
            if (poly.contains(p, 0.0) && poly.boundary_distance(p) >= 0.55 * size) out.push_back(p);
        }
    }
    return out;
}

}  // namespace

Mesh2D mesh_footprint(const ConvexPolygon& poly, double size, const Tolerances& tol) {
    if (poly.area() < tol.area_threshold) throw GeometryError("mesh: degenerate footprint");
    if (poly.size() == 4 &&
        edge_divisions(poly[0], poly[1], size) == edge_divisions(poly[2], poly[3], size) &&
        edge_divisions(poly[1], poly[2], size) == edge_divisions(poly[3], poly[0], size))
        return structured_quad(poly, size);

    Mesh2D m;
    m.edge_points.resize(poly.size());
    for (std::size_t k = 0; k < poly.size(); ++k) {
        auto pts = edge_nodes(poly.vertex(k), poly.vertex(k + 1), size);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            m.edge_points[k].push_back(static_cast<int>(m.points.size()));
            m.points.push_back(pts[i]);
        }
    }
    const auto nring = static_cast<int>(m.points.size());
    for (std::size_t k = 0; k < poly.size(); ++k) m.edge_points[k].push_back(m.edge_points[(k + 1) % poly.size()][0]);

    const auto inner = interior_lattice(poly, size);
    m.tris = triangulate_convex(m.points, inner);
    m.points.insert(m.points.end(), inner.begin(), inner.end());
    (void)nring;
    return m;
}

// ---------------------------------------------------------------------------
// element geometry

namespace {

Eigen::Matrix3d jacobian(const MeshedModel& mesh, const Element& e, const shape::Point3& p) {
    double N[8], dN[8][3];
    if (e.type == ElementType::Hex8) shape::hex8(p, N, dN);
    else shape::wedge6(p, N, dN);
    Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
    for (int a = 0; a < e.node_count(); ++a) {
        const Vec3& x = mesh.nodes[static_cast<std::size_t>(e.nodes[static_cast<std::size_t>(a)])];
        for (int d = 0; d < 3; ++d) {
            J(0, d) += x.x * dN[a][d];
            J(1, d) += x.y * dN[a][d];
            J(2, d) += x.z * dN[a][d];
        }
    }
    return J;
}

}  // namespace

std::vector<double> corner_jacobians(const MeshedModel& mesh, const Element& e) {
    std::vector<double> out;
    if (e.type == ElementType::Hex8)
        for (const auto& p : shape::kHexNodes) out.push_back(jacobian(mesh, e, p).determinant());
    else
        for (const auto& p : shape::kWedgeNodes) out.push_back(jacobian(mesh, e, p).determinant());
    return out;
}

double element_volume(const MeshedModel& mesh, const Element& e) {
    const auto& rule = e.type == ElementType::Hex8 ? shape::hex_rule() : shape::wedge_rule();
    double v = 0.0;
    for (const auto& g : rule) v += g.w * jacobian(mesh, e, g.p).determinant();
    return v;
}

// ---------------------------------------------------------------------------
// model meshing

namespace {

std::vector<int> face_node_ids(const MeshedModel& mesh, int part, int face) {
    const auto& pm = mesh.parts[static_cast<std::size_t>(part)];
    std::vector<int> out;
    if (face >= 0) {
        for (int l = 0; l <= pm.layers; ++l)
            for (int pt : pm.plan.edge_points[static_cast<std::size_t>(face)]) out.push_back(mesh.node_id(part, l, pt));
    } else {
        const int l = face == kFaceBottom ? 0 : pm.layers;
        for (int pt = 0; pt < static_cast<int>(pm.plan.points.size()); ++pt) out.push_back(mesh.node_id(part, l, pt));
    }
    return out;
}

// Locates slave positions on one master face.
class MasterFace {
public:
    MasterFace(const MeshedModel& mesh, const Part& part, int part_id, int face)
        : mesh_(mesh), part_id_(part_id), face_(face) {
        const auto& pm = mesh.parts[static_cast<std::size_t>(part_id)];
        for (int l = 0; l <= pm.layers; ++l) z_.push_back(mesh.nodes[static_cast<std::size_t>(mesh.node_id(part_id, l, 0))].z);
        if (face >= 0) {
            const auto& ids = pm.plan.edge_points[static_cast<std::size_t>(face)];
            a_ = pm.plan.points[static_cast<std::size_t>(ids.front())];
            const Vec2 b = pm.plan.points[static_cast<std::size_t>(ids.back())];
            u_ = (b - a_) / distance(a_, b);
            for (int id : ids) t_.push_back(dot(u_, pm.plan.points[static_cast<std::size_t>(id)] - a_));
        } else {
            const auto b = part.footprint.bounds();
            const std::size_t ne = pm.plan.quads.size() + pm.plan.tris.size();
            index_ = std::make_unique<GridIndex>(GridIndex::for_items(b, ne));
            for (std::size_t q = 0; q < pm.plan.quads.size(); ++q) index_->insert(static_cast<int>(q), box(pm.plan.quads[q]));
            for (std::size_t t = 0; t < pm.plan.tris.size(); ++t)
                index_->insert(static_cast<int>(pm.plan.quads.size() + t), box(pm.plan.tris[t]));
        }
    }

    TieLink locate(int slave) const {
        const Vec3& p = mesh_.nodes[static_cast<std::size_t>(slave)];
        std::vector<std::pair<int, double>> terms;
        if (face_ >= 0) lateral(p, terms);
        else horizontal(p, terms);
        TieLink link;
        link.slave = slave;
        double sum = 0.0;
        for (const auto& [n, w] : terms)
            if (std::abs(w) > 1e-12 && link.count < 4) {
                link.master[static_cast<std::size_t>(link.count)] = n;
                link.weight[static_cast<std::size_t>(link.count)] = w;
                ++link.count;
                sum += w;
            }
        for (int k = 0; k < link.count; ++k) link.weight[static_cast<std::size_t>(k)] /= sum;
        return link;
    }

private:
    template <std::size_t N>
    Box box(const std::array<int, N>& el) const {
        const auto& pts = mesh_.parts[static_cast<std::size_t>(part_id_)].plan.points;
        Box b{1e300, 1e300, -1e300, -1e300};
        for (int i : el) {
            const Vec2& q = pts[static_cast<std::size_t>(i)];
            b = {std::min(b[0], q.x), std::min(b[1], q.y), std::max(b[2], q.x), std::max(b[3], q.y)};
        }
        return b;
    }

    static std::pair<std::size_t, double> bracket(const std::vector<double>& v, double x) {
        auto it = std::upper_bound(v.begin(), v.end(), x);
        std::size_t i = it == v.begin() ? 0 : static_cast<std::size_t>(it - v.begin()) - 1;
        i = std::min(i, v.size() - 2);
        const double f = std::clamp((x - v[i]) / (v[i + 1] - v[i]), 0.0, 1.0);
        return {i, f};
    }

    void lateral(const Vec3& p, std::vector<std::pair<int, double>>& terms) const {
        const auto& pm = mesh_.parts[static_cast<std::size_t>(part_id_)];
        const auto& ids = pm.plan.edge_points[static_cast<std::size_t>(face_)];
        const auto [i, xi] = bracket(t_, dot(u_, Vec2{p.x, p.y} - a_));
        const auto [l, eta] = bracket(z_, p.z);
        const int li = static_cast<int>(l);
        terms = {{mesh_.node_id(part_id_, li, ids[i]), (1 - xi) * (1 - eta)},
                 {mesh_.node_id(part_id_, li, ids[i + 1]), xi * (1 - eta)},
                 {mesh_.node_id(part_id_, li + 1, ids[i + 1]), xi * eta},
                 {mesh_.node_id(part_id_, li + 1, ids[i]), (1 - xi) * eta}};
    }

    void horizontal(const Vec3& p, std::vector<std::pair<int, double>>& terms) const {
        const auto& pm = mesh_.parts[static_cast<std::size_t>(part_id_)];
        const auto& pts = pm.plan.points;
        const int layer = face_ == kFaceBottom ? 0 : pm.layers;
        const Vec2 q{p.x, p.y};
        double best = 1e300;
        const double pad = 1e-6;
        auto cand = index_->query({q.x, q.y, q.x, q.y}, pad);
        if (cand.empty())
            for (std::size_t e = 0; e < pm.plan.quads.size() + pm.plan.tris.size(); ++e) cand.push_back(static_cast<int>(e));
        for (int e : cand) {
            if (e < static_cast<int>(pm.plan.quads.size())) {
                const auto& Q = pm.plan.quads[static_cast<std::size_t>(e)];
                const auto [r, s] = inverse_bilinear(Q, q);
                const double out = std::max(std::abs(r), std::abs(s)) - 1.0;
                if (out < best) {
                    best = out;
                    const double rc = std::clamp(r, -1.0, 1.0), sc = std::clamp(s, -1.0, 1.0);
                    const double w[4] = {0.25 * (1 - rc) * (1 - sc), 0.25 * (1 + rc) * (1 - sc),
                                         0.25 * (1 + rc) * (1 + sc), 0.25 * (1 - rc) * (1 + sc)};
                    terms.clear();
                    for (int k = 0; k < 4; ++k) terms.emplace_back(mesh_.node_id(part_id_, layer, Q[static_cast<std::size_t>(k)]), w[k]);
                }
            } else {
                const auto& T = pm.plan.tris[static_cast<std::size_t>(e) - pm.plan.quads.size()];
                const Vec2 a = pts[static_cast<std::size_t>(T[0])], b = pts[static_cast<std::size_t>(T[1])],
                           c = pts[static_cast<std::size_t>(T[2])];
                const double area = cross(b - a, c - a);
                double l[3] = {cross(b - q, c - q) / area, cross(c - q, a - q) / area, cross(a - q, b - q) / area};
                const double out = -std::min({l[0], l[1], l[2]});
                if (out < best) {
                    best = out;
                    for (double& x : l) x = std::max(x, 0.0);
                    const double sum = l[0] + l[1] + l[2];
                    terms.clear();
                    for (int k = 0; k < 3; ++k)
                        terms.emplace_back(mesh_.node_id(part_id_, layer, T[static_cast<std::size_t>(k)]), l[k] / sum);
                }
            }
        }
    }

    std::pair<double, double> inverse_bilinear(const std::array<int, 4>& Q, const Vec2& q) const {
        const auto& pts = mesh_.parts[static_cast<std::size_t>(part_id_)].plan.points;
        const Vec2 x[4] = {pts[static_cast<std::size_t>(Q[0])], pts[static_cast<std::size_t>(Q[1])],
                           pts[static_cast<std::size_t>(Q[2])], pts[static_cast<std::size_t>(Q[3])]};
        double r = 0.0, s = 0.0;
        for (int it = 0; it < 30; ++it) {
            const double N[4] = {0.25 * (1 - r) * (1 - s), 0.25 * (1 + r) * (1 - s), 0.25 * (1 + r) * (1 + s),
                                 0.25 * (1 - r) * (1 + s)};
            const double dr[4] = {-0.25 * (1 - s), 0.25 * (1 - s), 0.25 * (1 + s), -0.25 * (1 + s)};
            const double ds[4] = {-0.25 * (1 - r), -0.25 * (1 + r), 0.25 * (1 + r), 0.25 * (1 - r)};
            Vec2 f{-q.x, -q.y}, jr, js;
            for (int k = 0; k < 4; ++k) {
                f = f + x[k] * N[k];
                jr = jr + x[k] * dr[k];
                js = js + x[k] * ds[k];
            }
            const double det = cross(jr, js);
            if (std::abs(det) < 1e-300) break;
            const double dr_ = (f.x * js.y - f.y * js.x) / det;
            const double ds_ = (jr.x * f.y - jr.y * f.x) / det;
            r -= dr_;
            s -= ds_;
            if (std::abs(dr_) + std::abs(ds_) < 1e-14) break;
        }
        return {r, s};
    }

    const MeshedModel& mesh_;
    int part_id_;
    int face_;
    std::vector<double> z_;
    Vec2 a_{}, u_{};
    std::vector<double> t_;
    std::unique_ptr<GridIndex> index_;
};

}  // namespace

MeshedModel mesh_model(const Model& model, const MeshSpec& sizes, int threads) {
    if (!(sizes.yarn_size > 0.0) || !(sizes.interface_size > 0.0) || sizes.ply_layers < 1)
        throw GeometryError("mesh: sizes must be positive");
    const auto& tol = model.config.laminate.tol;
    const int np = static_cast<int>(model.parts.size());
    MeshedModel mesh;
    mesh.sizes = sizes;
    mesh.parts.resize(static_cast<std::size_t>(np));

    parallel_for(np, threads, [&](int p) {
        const Part& P = model.parts[static_cast<std::size_t>(p)];
        const bool ply = P.slab % 2 == 0;
        auto& pm = mesh.parts[static_cast<std::size_t>(p)];
        try {
            pm.plan = mesh_footprint(P.footprint, ply ? sizes.yarn_size : sizes.interface_size, tol);
        } catch (const GeometryError& e) {
            throw GeometryError("mesh: part " + P.label.str() + ": " + e.what());
        }
        pm.layers = ply ? sizes.ply_layers : 1;
    });

    // Sequential numbering keeps node and element ids independent of threads.
    for (int p = 0; p < np; ++p) {
        const Part& P = model.parts[static_cast<std::size_t>(p)];
        auto& pm = mesh.parts[static_cast<std::size_t>(p)];
        const int npts = static_cast<int>(pm.plan.points.size());
        pm.node_begin = static_cast<int>(mesh.nodes.size());
        for (int l = 0; l <= pm.layers; ++l) {
            const double z = l == pm.layers ? P.z_hi : P.z_lo + (P.z_hi - P.z_lo) * l / pm.layers;
            for (const auto& q : pm.plan.points) {
                mesh.nodes.push_back({q.x, q.y, z});
                mesh.node_part.push_back(p);
            }
        }
        pm.node_end = static_cast<int>(mesh.nodes.size());
        pm.elem_begin = static_cast<int>(mesh.elements.size());
        for (int l = 0; l < pm.layers; ++l) {
            const int b = pm.node_begin + l * npts, t = b + npts;
            for (const auto& q : pm.plan.quads)
                mesh.elements.push_back({ElementType::Hex8,
                                         {b + q[0], b + q[1], b + q[2], b + q[3], t + q[0], t + q[1], t + q[2], t + q[3]},
                                         p});
            for (const auto& tr : pm.plan.tris)
                mesh.elements.push_back(
                    {ElementType::Wedge6, {b + tr[0], b + tr[1], b + tr[2], t + tr[0], t + tr[1], t + tr[2], 0, 0}, p});
        }
        pm.elem_end = static_cast<int>(mesh.elements.size());
    }

    // Tie links, one master-face locator per tie.
    mesh.ties.resize(model.ties.size());
    parallel_for(static_cast<int>(model.ties.size()), threads, [&](int t) {
        const auto& tie = model.ties[static_cast<std::size_t>(t)];
        MasterFace master(mesh, model.parts[static_cast<std::size_t>(tie.master.part)], tie.master.part, tie.master.face);
        auto& rt = mesh.ties[static_cast<std::size_t>(t)];
        rt.tie = t;
        const Part& S = model.parts[static_cast<std::size_t>(tie.slave.part)];
        const Part& M = model.parts[static_cast<std::size_t>(tie.master.part)];
        for (int n : face_node_ids(mesh, tie.slave.part, tie.slave.face)) {
            // Only slave nodes that actually lie on the master face are tied.
            const Vec3& x = mesh.nodes[static_cast<std::size_t>(n)];
            const Vec2 q{x.x, x.y};
            bool on = false;
            if (tie.master.face >= 0) {
                const Vec2 a = M.footprint.vertex(static_cast<std::size_t>(tie.master.face));
                const Vec2 b = M.footprint.vertex(static_cast<std::size_t>(tie.master.face) + 1);
                on = point_segment_distance(q, a, b) <= tol.coincidence_eps;
            } else {
                on = M.footprint.contains(q, tol.coincidence_eps);
            }
            (void)S;
            if (on) rt.links.push_back(master.locate(n));
        }
    });

    for (const auto& [name, faces] : model.face_sets) {
        auto& ids = mesh.node_sets[name];
        for (const auto& f : faces) {
            auto v = face_node_ids(mesh, f.part, f.face);
            ids.insert(ids.end(), v.begin(), v.end());
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
    return mesh;
}

// ---------------------------------------------------------------------------
// conformity

std::vector<ConformityViolation> check_conformity(const Model& model, const MeshedModel& mesh) {
    const double eps = model.config.laminate.tol.coincidence_eps;
    std::vector<ConformityViolation> out;
    for (std::size_t t = 0; t < model.ties.size(); ++t) {
        const auto& tie = model.ties[t];
        const Part& M = model.parts[static_cast<std::size_t>(tie.master.part)];
        const Part& S = model.parts[static_cast<std::size_t>(tie.slave.part)];

        std::vector<Vec3> corners;
        if (tie.master.face >= 0) {
            const auto k = static_cast<std::size_t>(tie.master.face);
            for (const Vec2& v : {M.footprint.vertex(k), M.footprint.vertex(k + 1)})
                for (double z : {M.z_lo, M.z_hi}) corners.push_back({v.x, v.y, z});
        } else {
            const double z = tie.master.face == kFaceBottom ? M.z_lo : M.z_hi;
            for (const Vec2& v : M.footprint.vertices()) corners.push_back({v.x, v.y, z});
        }

        auto on_slave_face = [&](const Vec3& c) {
            const Vec2 q{c.x, c.y};
            if (tie.slave.face >= 0) {
                const auto k = static_cast<std::size_t>(tie.slave.face);
                return point_segment_distance(q, S.footprint.vertex(k), S.footprint.vertex(k + 1)) <= eps &&
                       c.z >= S.z_lo - eps && c.z <= S.z_hi + eps;
            }
            const double z = tie.slave.face == kFaceBottom ? S.z_lo : S.z_hi;
            return std::abs(c.z - z) <= eps && S.footprint.contains(q, eps);
        };

        // Any slave-part node at a corner on the slave face is a face node;
        // scanning the part's node range also works for meshes read back
        // from file, which carry no planar meshes.
        const auto& spm = mesh.parts[static_cast<std::size_t>(tie.slave.part)];
        for (const auto& c : corners) {
            if (!on_slave_face(c)) continue;
            bool found = false;
            for (int n = spm.node_begin; n < spm.node_end; ++n) {
                const Vec3& x = mesh.nodes[static_cast<std::size_t>(n)];
                if (std::abs(x.x - c.x) <= eps && std::abs(x.y - c.y) <= eps && std::abs(x.z - c.z) <= eps) {
                    found = true;
                    break;
                }
            }
            if (!found)
                out.push_back({static_cast<int>(t), c,
                               "no node of " + model.face_label(tie.slave) + " at master corner of " +
                                   model.face_label(tie.master)});
        }
    }
    return out;
}

}  // namespace lamgen
