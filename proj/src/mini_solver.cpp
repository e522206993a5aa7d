#include "lamgen/mini_solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "lamgen/format.hpp"
#include "lamgen/parallel.hpp"
#include "lamgen/shape.hpp"

namespace lamgen {

std::vector<PartMaterial> part_materials(const Model& model) {
    std::vector<PartMaterial> out;
    out.reserve(model.parts.size());
    for (const auto& p : model.parts) out.push_back({p.label.role, p.theta_deg, p.label.str()});
    return out;
}

std::vector<PartMaterial> part_materials(const MeshFile& file) {
    std::vector<PartMaterial> out;
    out.reserve(file.labels.size());
    for (std::size_t i = 0; i < file.labels.size(); ++i)
        out.push_back({file.labels[i].role, file.theta[i], file.labels[i].str()});
    return out;
}

BoundaryConditions default_bcs(const Config& cfg) {
    BoundaryConditions bc;
    if (cfg.symmetry) bc.symmetry_set = "z-max";
    return bc;
}

double EnergyLedger::balance_error() const {
    const double stored = strain + kinetic + cohesive_dissipation + fiber_dissipation + damping_loss;
    if (external_work == 0.0) return stored == 0.0 ? 0.0 : 1.0;
    return (external_work - stored) / std::abs(external_work);
}

std::vector<int> RunResult::ke_breaches() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < frames.size(); ++i)
        if (frames[i].ke_breach) out.push_back(static_cast<int>(i));
    return out;
}

double load_amplitude(const std::vector<LoadPoint>& curve, double f) {
    if (curve.empty()) return f;
    if (f <= curve.front().time_fraction) return curve.front().amplitude;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const auto& a = curve[i];
        const auto& b = curve[i + 1];
        if (f <= b.time_fraction) {
            const double span = b.time_fraction - a.time_fraction;
            if (span <= 0.0) return b.amplitude;
            const double x = (f - a.time_fraction) / span;
            return a.amplitude + (b.amplitude - a.amplitude) * x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
        }
    }
    return curve.back().amplitude;
}

// ---------------------------------------------------------------------------
// tie resolution

ConstraintMap resolve_ties(const MeshedModel& mesh, const std::vector<PartMaterial>& parts) {
    const int nn = static_cast<int>(mesh.nodes.size());
    struct Candidate {
        int rank;
        int tie;
        const TieLink* link;
    };
    std::vector<std::vector<Candidate>> cand(static_cast<std::size_t>(nn));
    auto rank_of = [&](int node) {
        return static_cast<int>(parts[static_cast<std::size_t>(mesh.node_part[static_cast<std::size_t>(node)])].role);
    };
    // A master node coincident with a slave of the same rank may follow that
    // slave instead: otherwise a node on the edge of a master face (e.g. a
    // cell corner over an open crack) can be left hanging while its twin is
    // held by a lower-ranked part. Tried after the node's own links.
    std::deque<TieLink> reverse;
    const int nt = static_cast<int>(mesh.ties.size());
    for (std::size_t t = 0; t < mesh.ties.size(); ++t) {
        for (const auto& link : mesh.ties[t].links) {
            if (link.count == 0) continue;
            const int rank = rank_of(link.master[0]);
            cand[static_cast<std::size_t>(link.slave)].push_back({rank, static_cast<int>(t), &link});
            for (int k = 0; k < link.count; ++k) {
                const int m = link.master[static_cast<std::size_t>(k)];
                if (std::abs(link.weight[static_cast<std::size_t>(k)] - 1.0) > 1e-12 || rank_of(m) != rank_of(link.slave))
                    continue;
                TieLink& r = reverse.emplace_back();
                r.slave = m;
                r.master[0] = link.slave;
                r.weight[0] = 1.0;
                r.count = 1;
                cand[static_cast<std::size_t>(m)].push_back({rank, nt + static_cast<int>(t), &r});
            }
        }
    }
    for (auto& c : cand)
        std::stable_sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) {
            return a.rank != b.rank ? a.rank < b.rank : a.tie < b.tie;
        });

    ConstraintMap map;
    std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(nn));
    std::vector<char> state(static_cast<std::size_t>(nn), 0);
    std::vector<std::size_t> pick(static_cast<std::size_t>(nn), 0);

    std::function<bool(int)> resolve = [&](int v) -> bool {
        const auto vi = static_cast<std::size_t>(v);
        if (state[vi] == 2) return true;
        if (state[vi] == 1) return false;
        state[vi] = 1;
        for (;;) {
            if (pick[vi] >= cand[vi].size()) {
                if (!cand[vi].empty())
                    map.warnings.push_back("node " + std::to_string(v) + ": every tie link forms a cycle; left free");
                rows[vi] = {{v, 1.0}};
                state[vi] = 2;
                return true;
            }
            const TieLink& link = *cand[vi][pick[vi]].link;
            bool ok = true;
            for (int k = 0; k < link.count && ok; ++k) ok = resolve(link.master[static_cast<std::size_t>(k)]);
            if (ok) {
                std::vector<std::pair<int, double>> acc;
                for (int k = 0; k < link.count; ++k) {
                    const double w = link.weight[static_cast<std::size_t>(k)];
                    for (const auto& [j, wj] : rows[static_cast<std::size_t>(link.master[static_cast<std::size_t>(k)])])
                        acc.emplace_back(j, w * wj);
                }
                std::sort(acc.begin(), acc.end());
                std::vector<std::pair<int, double>> merged;
                for (const auto& e : acc) {
                    if (!merged.empty() && merged.back().first == e.first)
                        merged.back().second += e.second;
                    else
                        merged.push_back(e);
                }
                std::erase_if(merged, [](const auto& e) { return std::abs(e.second) < 1e-14; });
                rows[vi] = std::move(merged);
                state[vi] = 2;
                return true;
            }
            ++pick[vi];
        }
    };
    for (int v = 0; v < nn; ++v) resolve(v);

    map.dof_of.assign(static_cast<std::size_t>(nn), -1);
    for (int v = 0; v < nn; ++v) {
        const auto& r = rows[static_cast<std::size_t>(v)];
        if (r.size() == 1 && r[0].first == v) {
            map.dof_of[static_cast<std::size_t>(v)] = static_cast<int>(map.independent.size());
            map.independent.push_back(v);
        }
    }
    map.row_begin.reserve(static_cast<std::size_t>(nn) + 1);
    for (int v = 0; v < nn; ++v) {
        map.row_begin.push_back(static_cast<int>(map.entries.size()));
        for (const auto& [j, w] : rows[static_cast<std::size_t>(v)]) {
            const int d = map.dof_of[static_cast<std::size_t>(j)];
            if (d < 0) throw SolverError("tie resolution: node " + std::to_string(v) + " depends on a slave node");
            map.entries.emplace_back(d, w);
        }
    }
    map.row_begin.push_back(static_cast<int>(map.entries.size()));
    return map;
}

// ---------------------------------------------------------------------------
// elements

namespace {

enum class Law { Solid, Fiber, Cohesive };

struct GaussPoint {
    std::array<std::array<double, 3>, 8> dN{};  // spatial derivatives
    double w = 0.0;                             // weight * det J
};

struct ElementData {
    Law law = Law::Solid;
    int part = 0;
    int n = 8;
    std::array<int, 8> nodes{};
    int gp_begin = 0, gp_count = 0;
    Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();  // rows: n, s, t
    double h = 1.0;                                       // thickness along n
    double volume = 0.0;
};

struct PartLaw {
    Law law = Law::Solid;
    Matrix6 C = Matrix6::Zero();
    Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
    double fiber_shear_s = 0.0, fiber_shear_t = 0.0;
};

Eigen::Matrix3d interface_frame(const PartMaterial& pm) {
    const double th = pm.theta_deg * std::numbers::pi / 180.0;
    const Eigen::Vector3d a(std::cos(th), std::sin(th), 0.0), p(-std::sin(th), std::cos(th), 0.0), z(0, 0, 1);
    Eigen::Matrix3d F;
    switch (pm.role) {
    case PartRole::YarnCracklet: F.row(0) = a; F.row(1) = p; F.row(2) = z; break;
    case PartRole::MatrixCracklet: F.row(0) = p; F.row(1) = a; F.row(2) = z; break;
    case PartRole::DelaminationCracklet: F << 0, 0, 1, 1, 0, 0, 0, 1, 0; break;
    case PartRole::YarnSegment: F.setIdentity(); break;
    }
    return F;
}

void natural_derivatives(const Element& e, const shape::Point3& p, double N[8], double dN[8][3]) {
    if (e.type == ElementType::Hex8)
        shape::hex8(p, N, dN);
    else
        shape::wedge6(p, N, dN);
}

class Kernel {
public:
    Kernel(const MeshedModel& mesh, const std::vector<PartMaterial>& parts, const MaterialSpec& mat)
        : mesh_(mesh), fiber_(FiberParams::from(mat)), coh_(CohesiveParams::from(mat)) {
        const auto ortho = OrthotropicElasticity::from(mat);
        const Matrix6 C_local = ortho.stiffness();
        laws_.resize(parts.size());
        for (std::size_t p = 0; p < parts.size(); ++p) {
            auto& L = laws_[p];
            switch (parts[p].role) {
            case PartRole::YarnSegment: L.law = Law::Solid; L.C = rotate_about_z(C_local, parts[p].theta_deg); break;
            case PartRole::YarnCracklet: L.law = Law::Fiber; break;
            case PartRole::MatrixCracklet:
            case PartRole::DelaminationCracklet: L.law = Law::Cohesive; break;
            }
            L.frame = interface_frame(parts[p]);
            L.fiber_shear_s = mat.G12;
            L.fiber_shear_t = mat.G13;
        }
        build();
    }

    [[nodiscard]] std::size_t element_count() const { return elems_.size(); }
    [[nodiscard]] const ElementData& element(std::size_t i) const { return elems_[i]; }
    [[nodiscard]] std::size_t gp_count() const { return gps_.size(); }

    struct Sums {
        double strain = 0.0;
        double coh_diss = 0.0;
        double fib_diss = 0.0;
    };

    /// Internal nodal forces for displacement u (3 per node) over elements
    /// [b, e). With update the damage states advance; otherwise the current
    /// (secant) stiffness is used.
    void forces(std::size_t b, std::size_t e, const std::vector<double>& u, std::vector<double>& f, bool update,
                Sums& sums) {
        for (std::size_t k = b; k < e; ++k) {
            const auto& E = elems_[k];
            double ue[8][3];
            for (int a = 0; a < E.n; ++a)
                for (int i = 0; i < 3; ++i) ue[a][i] = u[3 * static_cast<std::size_t>(E.nodes[static_cast<std::size_t>(a)]) + static_cast<std::size_t>(i)];
            double fe[8][3] = {};
            element_forces(k, ue, fe, update, sums);
            for (int a = 0; a < E.n; ++a)
                for (int i = 0; i < 3; ++i) f[3 * static_cast<std::size_t>(E.nodes[static_cast<std::size_t>(a)]) + static_cast<std::size_t>(i)] += fe[a][i];
        }
    }

    /// Secant element stiffness (3n x 3n, node-major), probed column by
    /// column; exact while the element is linear in its current state.
    [[nodiscard]] Eigen::MatrixXd element_stiffness(std::size_t k) {
        const auto& E = elems_[k];
        const int m = 3 * E.n;
        Eigen::MatrixXd Ke(m, m);
        Sums dummy;
        for (int c = 0; c < m; ++c) {
            double ue[8][3] = {}, fe[8][3] = {};
            ue[c / 3][c % 3] = 1.0;
            element_forces(k, ue, fe, false, dummy);
            for (int a = 0; a < E.n; ++a)
                for (int i = 0; i < 3; ++i) Ke(3 * a + i, c) = fe[a][i];
        }
        return 0.5 * (Ke + Ke.transpose());
    }

    void element_forces(std::size_t k, const double ue[8][3], double fe[8][3], bool update, Sums& sums) {
        {
            const auto& E = elems_[k];
            const auto& L = laws_[static_cast<std::size_t>(E.part)];
            for (int g = 0; g < E.gp_count; ++g) {
                const std::size_t gi = static_cast<std::size_t>(E.gp_begin + g);
                const auto& G = gps_[gi];
                Eigen::Matrix3d grad = Eigen::Matrix3d::Zero();
                for (int a = 0; a < E.n; ++a)
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j) grad(i, j) += ue[a][i] * G.dN[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)];
                Eigen::Matrix3d sig;
                if (L.law == Law::Solid) {
                    Vector6 eps;
                    eps << grad(0, 0), grad(1, 1), grad(2, 2), grad(1, 2) + grad(2, 1), grad(0, 2) + grad(2, 0),
                        grad(0, 1) + grad(1, 0);
                    const Vector6 s = L.C * eps;
                    sums.strain += 0.5 * s.dot(eps) * G.w;
                    sig << s(0), s(5), s(4), s(5), s(1), s(3), s(4), s(3), s(2);
                } else {
                    const Eigen::Vector3d n = E.frame.row(0).transpose(), sv = E.frame.row(1).transpose(),
                                          tv = E.frame.row(2).transpose();
                    const Eigen::Vector3d Gn = grad * n, GTn = grad.transpose() * n;
                    const std::array<double, 3> delta{E.h * n.dot(Gn), E.h * (sv.dot(Gn) + sv.dot(GTn)),
                                                      E.h * (tv.dot(Gn) + tv.dot(GTn))};
                    const double area = G.w / E.h;
                    std::array<double, 3> t{};
                    if (L.law == Law::Cohesive) {
                        auto& st = coh_state_[gi];
                        if (update) {
                            const auto r = cohesive_response(st, delta, coh_);
                            st = r.state;
                            t = r.traction;
                            sums.strain += r.elastic_energy * area;
                        } else {
                            const double s = 1.0 - st.D;
                            t = {delta[0] >= 0 ? s * coh_.Kn * delta[0] : coh_.Kn * delta[0], s * coh_.Ks * delta[1],
                                 s * coh_.Kt * delta[2]};
                        }
                        sums.coh_diss += st.dissipated * area;
                    } else {
                        auto& st = fib_state_[gi];
                        const double Ef = fiber_.modulus();
                        const double two_w = Ef * std::pow(std::max(delta[0], 0.0), 2) +
                                             L.fiber_shear_s * delta[1] * delta[1] +
                                             L.fiber_shear_t * delta[2] * delta[2];
                        if (update) {
                            const auto r = fiber_damage_update(st, delta[0], fiber_);
                            fib_diss_[gi] += fiber_dissipation(st.D, r.state.D, fiber_);
                            st = r.state;
                        }
                        const double s = 1.0 - st.D;
                        t = {delta[0] >= 0 ? s * Ef * delta[0] : Ef * delta[0], s * L.fiber_shear_s * delta[1],
                             s * L.fiber_shear_t * delta[2]};
                        if (update) {
                            const double dneg = std::min(delta[0], 0.0);
                            sums.strain += (0.5 * s * two_w + 0.5 * Ef * dneg * dneg) * area;
                        }
                        sums.fib_diss += fib_diss_[gi] * area;
                    }
                    sig = t[0] * n * n.transpose() + t[1] * (sv * n.transpose() + n * sv.transpose()) +
                          t[2] * (tv * n.transpose() + n * tv.transpose());
                }
                for (int a = 0; a < E.n; ++a)
                    for (int i = 0; i < 3; ++i) {
                        double acc = 0.0;
                        for (int j = 0; j < 3; ++j) acc += sig(i, j) * G.dN[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)];
                        fe[a][i] += acc * G.w;
                    }
            }
        }
    }

    [[nodiscard]] double element_damage(std::size_t k) const {
        const auto& E = elems_[k];
        double d = 0.0;
        for (int g = 0; g < E.gp_count; ++g) {
            const auto gi = static_cast<std::size_t>(E.gp_begin + g);
            if (E.law == Law::Cohesive) d = std::max(d, coh_state_[gi].D);
            if (E.law == Law::Fiber) d = std::max(d, fib_state_[gi].D);
        }
        return d;
    }

private:
    void build() {
        elems_.resize(mesh_.elements.size());
        for (std::size_t k = 0; k < mesh_.elements.size(); ++k) {
            const Element& el = mesh_.elements[k];
            ElementData& E = elems_[k];
            E.part = el.part;
            E.n = el.node_count();
            E.nodes = el.nodes;
            const auto& L = laws_[static_cast<std::size_t>(el.part)];
            E.law = L.law;
            E.frame = L.frame;
            if (E.law != Law::Solid) {
                const Eigen::Vector3d n = E.frame.row(0).transpose();
                double lo = 1e300, hi = -1e300;
                for (int a = 0; a < E.n; ++a) {
                    const Vec3& X = mesh_.nodes[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(a)])];
                    const double s = n.dot(Eigen::Vector3d(X.x, X.y, X.z));
                    lo = std::min(lo, s);
                    hi = std::max(hi, s);
                }
                E.h = hi - lo;
                if (!(E.h > 0.0)) throw SolverError("interface element with zero thickness in part " + std::to_string(el.part));
            }
            const auto& rule = el.type == ElementType::Hex8 ? shape::hex_rule() : shape::wedge_rule();
            E.gp_begin = static_cast<int>(gps_.size());
            E.gp_count = static_cast<int>(rule.size());
            for (const auto& q : rule) {
                double N[8], dN[8][3];
                natural_derivatives(el, q.p, N, dN);
                Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
                for (int a = 0; a < E.n; ++a) {
                    const Vec3& X = mesh_.nodes[static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(a)])];
                    const double x[3] = {X.x, X.y, X.z};
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j) J(i, j) += x[i] * dN[a][j];
                }
                const double det = J.determinant();
                if (!(det > 0.0)) throw SolverError("element " + std::to_string(k) + " has a non-positive Jacobian");
                const Eigen::Matrix3d Jinv = J.inverse();
                GaussPoint G;
                for (int a = 0; a < E.n; ++a) {
                    const Eigen::Vector3d d = Jinv.transpose() * Eigen::Vector3d(dN[a][0], dN[a][1], dN[a][2]);
                    G.dN[static_cast<std::size_t>(a)] = {d(0), d(1), d(2)};
                }
                G.w = q.w * det;
                E.volume += G.w;
                gps_.push_back(G);
            }
        }
        coh_state_.assign(gps_.size(), {});
        fib_state_.assign(gps_.size(), {});
        fib_diss_.assign(gps_.size(), 0.0);
    }

    const MeshedModel& mesh_;
    FiberParams fiber_;
    CohesiveParams coh_;
    std::vector<PartLaw> laws_;
    std::vector<ElementData> elems_;
    std::vector<GaussPoint> gps_;
    std::vector<CohesiveState> coh_state_;
    std::vector<FiberDamageState> fib_state_;
    std::vector<double> fib_diss_;
};

// Corner Jacobians of a deformed solid element.
bool inverted(const MeshedModel& mesh, const Element& el, const std::vector<double>& u) {
    double N[8], dN[8][3];
    const int n = el.node_count();
    for (int c = 0; c < n; ++c) {
        const shape::Point3 p = el.type == ElementType::Hex8
                                    ? shape::kHexNodes[static_cast<std::size_t>(c)]
                                    : shape::kWedgeNodes[static_cast<std::size_t>(c)];
        natural_derivatives(el, p, N, dN);
        Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
        for (int a = 0; a < n; ++a) {
            const auto id = static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(a)]);
            const double x[3] = {mesh.nodes[id].x + u[3 * id], mesh.nodes[id].y + u[3 * id + 1],
                                 mesh.nodes[id].z + u[3 * id + 2]};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) J(i, j) += x[i] * dN[a][j];
        }
        if (!(J.determinant() > 0.0)) return true;
    }
    return false;
}

class Integrator {
public:
    Integrator(const MeshedModel& mesh, const std::vector<PartMaterial>& parts, const MaterialSpec& mat,
               const BoundaryConditions& bcs, const SolverSpec& spec)
        : mesh_(mesh), parts_(parts), mat_(mat), spec_(spec), kernel_(mesh, parts, mat),
          map_(resolve_ties(mesh, parts)) {
        threads_ = std::max(1, spec.threads);
        const std::size_t nn = mesh.nodes.size(), nd = map_.independent.size();
        node_mass_base_.assign(nn, 0.0);
        for (std::size_t k = 0; k < kernel_.element_count(); ++k) {
            const auto& E = kernel_.element(k);
            const double m = mat.rho * E.volume / E.n;
            for (int a = 0; a < E.n; ++a) node_mass_base_[static_cast<std::size_t>(E.nodes[static_cast<std::size_t>(a)])] += m;
        }
        mass_base_.assign(nd, 0.0);
        for (std::size_t v = 0; v < nn; ++v)
            for (int q = map_.row_begin[v]; q < map_.row_begin[v + 1]; ++q)
                mass_base_[static_cast<std::size_t>(map_.entries[static_cast<std::size_t>(q)].first)] +=
                    map_.entries[static_cast<std::size_t>(q)].second * node_mass_base_[v];

        constrained_.assign(3 * nd, 0);
        auto dofs_of_set = [&](const std::string& name) {
            auto it = mesh.node_sets.find(name);
            if (it == mesh.node_sets.end()) throw SolverError("unknown node set '" + name + "'");
            std::vector<int> out;
            for (int v : it->second) {
                const int d = map_.dof_of[static_cast<std::size_t>(v)];
                if (d >= 0) out.push_back(d);
            }
            // A slave node on the set's boundary is fine as long as it
            // follows nodes that are themselves in the set.
            std::vector<int> sorted = out;
            std::sort(sorted.begin(), sorted.end());
            for (int v : it->second) {
                if (map_.dof_of[static_cast<std::size_t>(v)] >= 0) continue;
                for (int q = map_.row_begin[static_cast<std::size_t>(v)]; q < map_.row_begin[static_cast<std::size_t>(v) + 1]; ++q) {
                    const auto [j, w] = map_.entries[static_cast<std::size_t>(q)];
                    if (std::abs(w) > 1e-12 && !std::binary_search(sorted.begin(), sorted.end(), j))
                        throw SolverError("node set '" + name + "' contains slave node " + std::to_string(v) +
                                          " that follows nodes outside the set");
                }
            }
            return out;
        };
        for (int d : dofs_of_set(bcs.fixed_set))
            for (int c = 0; c < 3; ++c) constrained_[3 * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] = 1;
        loaded_ = dofs_of_set(bcs.loaded_set);
        axis_ = bcs.load_axis;
        for (int d : loaded_) {
            for (int c = 0; c < 3; ++c) {
                if (c == axis_) constrained_[3 * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] = 2;
                else if (bcs.clamp_loaded_transverse) constrained_[3 * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] = 1;
            }
        }
        if (bcs.symmetry_set)
            for (int d : dofs_of_set(*bcs.symmetry_set))
                if (!constrained_[3 * static_cast<std::size_t>(d) + 2]) constrained_[3 * static_cast<std::size_t>(d) + 2] = 1;
        for (std::size_t i = 0; i < 3 * nd; ++i)
            if (constrained_[i] == 0 && mass_base_[i / 3] <= 0.0)
                throw SolverError("free node without mass (independent node " + std::to_string(map_.independent[i / 3]) + ")");
    }

    RunResult run(const RunOptions& opt);
    ElasticResult solve_elastic(double displacement);

private:
    void expand(const std::vector<double>& q, std::vector<double>& u) const {
        const std::size_t nn = mesh_.nodes.size();
        u.assign(3 * nn, 0.0);
        for (std::size_t v = 0; v < nn; ++v)
            for (int k = map_.row_begin[v]; k < map_.row_begin[v + 1]; ++k) {
                const auto [d, w] = map_.entries[static_cast<std::size_t>(k)];
                for (int c = 0; c < 3; ++c) u[3 * v + static_cast<std::size_t>(c)] += w * q[3 * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)];
            }
    }

    void reduce(const std::vector<double>& f, std::vector<double>& g) const {
        g.assign(3 * map_.independent.size(), 0.0);
        const std::size_t nn = mesh_.nodes.size();
        for (std::size_t v = 0; v < nn; ++v)
            for (int k = map_.row_begin[v]; k < map_.row_begin[v + 1]; ++k) {
                const auto [d, w] = map_.entries[static_cast<std::size_t>(k)];
                for (int c = 0; c < 3; ++c) g[3 * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] += w * f[3 * v + static_cast<std::size_t>(c)];
            }
    }

    // Internal forces on independent dofs; deterministic chunked reduction.
    Kernel::Sums internal(const std::vector<double>& q, std::vector<double>& g, bool update) {
        expand(q, u_);
        const std::size_t ne = kernel_.element_count();
        const int chunks = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads_), std::max<std::size_t>(ne, 1)));
        buffers_.resize(static_cast<std::size_t>(chunks));
        std::vector<Kernel::Sums> sums(static_cast<std::size_t>(chunks));
        parallel_for(chunks, threads_, [&](int c) {
            auto& buf = buffers_[static_cast<std::size_t>(c)];
            buf.assign(u_.size(), 0.0);
            const std::size_t b = ne * static_cast<std::size_t>(c) / static_cast<std::size_t>(chunks);
            const std::size_t e = ne * static_cast<std::size_t>(c + 1) / static_cast<std::size_t>(chunks);
            kernel_.forces(b, e, u_, buf, update, sums[static_cast<std::size_t>(c)]);
        });
        f_.assign(u_.size(), 0.0);
        Kernel::Sums total;
        for (int c = 0; c < chunks; ++c) {
            const auto& buf = buffers_[static_cast<std::size_t>(c)];
            for (std::size_t i = 0; i < f_.size(); ++i) f_[i] += buf[i];
            total.strain += sums[static_cast<std::size_t>(c)].strain;
            total.coh_diss += sums[static_cast<std::size_t>(c)].coh_diss;
            total.fib_diss += sums[static_cast<std::size_t>(c)].fib_diss;
        }
        reduce(f_, g);
        return total;
    }

    // Largest eigenvalue of M^-1 K over free dofs, with the current secant
    // stiffness, by power iteration.
    double max_eigenvalue() {
        const std::size_t n = 3 * map_.independent.size();
        std::mt19937_64 rng(12345);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::vector<double> x(n, 0.0), g;
        for (std::size_t i = 0; i < n; ++i)
            if (constrained_[i] == 0) x[i] = U(rng);
        double lambda = 0.0;
        for (int it = 0; it < 80; ++it) {
            double nx = 0.0;
            for (std::size_t i = 0; i < n; ++i) nx += mass_base_[i / 3] * x[i] * x[i];
            nx = std::sqrt(nx);
            if (nx == 0.0) return 0.0;
            for (auto& v : x) v /= nx;
            internal(x, g, false);
            double num = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (constrained_[i] != 0) {
                    x[i] = 0.0;
                    continue;
                }
                num += x[i] * g[i];
                x[i] = g[i] / mass_base_[i / 3];
            }
            lambda = std::max(lambda, num);
        }
        return lambda * 1.02;
    }

    const MeshedModel& mesh_;
    const std::vector<PartMaterial>& parts_;
    const MaterialSpec& mat_;
    const SolverSpec& spec_;
    Kernel kernel_;
    ConstraintMap map_;
    int threads_ = 1;
    std::vector<double> node_mass_base_, mass_base_;
    std::vector<char> constrained_;  // 0 free, 1 held at zero, 2 prescribed
    std::vector<int> loaded_;
    int axis_ = 0;
    std::vector<double> u_, f_;
    std::vector<std::vector<double>> buffers_;
};

RunResult Integrator::run(const RunOptions& opt) {
    RunResult res;
    res.independent_nodes = static_cast<int>(map_.independent.size());
    res.warnings = map_.warnings;
    const std::size_t n = 3 * map_.independent.size();

    auto stable_dt = [&]() {
        const double lam = max_eigenvalue();
        return lam > 0.0 ? 0.9 * 2.0 / std::sqrt(lam) : spec_.target_dt;
    };
    double scale = 1.0, dt = spec_.target_dt;
    auto rescale = [&]() {
        const double base = stable_dt();
        if (res.stable_dt == 0.0) res.stable_dt = base;
        if (spec_.mass_scaling) {
            scale = std::max(1.0, std::pow(spec_.target_dt / base, 2));
            dt = spec_.target_dt;
        } else {
            scale = 1.0;
            dt = std::min(spec_.target_dt, base);
        }
    };
    rescale();
    res.mass_scale = scale;

    const long long nsteps = std::max<long long>(1, static_cast<long long>(std::ceil(spec_.duration / dt - 1e-9)));
    dt = spec_.duration / static_cast<double>(nsteps);
    const int nframes = std::max(1, spec_.output_frames);

    std::vector<double> q(n, 0.0), v(n, 0.0), g(n, 0.0);
    EnergyLedger led;
    double applied = 0.0;
    Kernel::Sums sums = internal(q, g, true);
    double reaction = 0.0;

    auto emit = [&](double t) {
        Frame fr;
        fr.time = t;
        fr.applied = applied;
        fr.reaction = reaction;
        fr.energy = led;
        fr.energy.strain = sums.strain;
        fr.energy.cohesive_dissipation = sums.coh_diss;
        fr.energy.fiber_dissipation = sums.fib_diss;
        // v holds the half-step velocity; advance it by half a step with the
        // forces just computed so that KE and SE refer to the same instant.
        double ke = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (constrained_[i] != 0) continue;
            const double m = scale * mass_base_[i / 3];
            const double vi = v[i] + 0.5 * dt * (-g[i] - spec_.damping * m * v[i]) / m;
            ke += 0.5 * m * vi * vi;
        }
        fr.energy.kinetic = ke;
        expand(q, u_);
        for (std::size_t k = 0; k < kernel_.element_count(); ++k)
            if (parts_[static_cast<std::size_t>(mesh_.elements[k].part)].role == PartRole::YarnSegment &&
                inverted(mesh_, mesh_.elements[k], u_))
                throw SolverError("element inversion: " + parts_[static_cast<std::size_t>(mesh_.elements[k].part)].label +
                                  " element " + std::to_string(k) + " at frame " + std::to_string(res.frames.size()));
        fr.damage.resize(kernel_.element_count());
        for (std::size_t k = 0; k < kernel_.element_count(); ++k) fr.damage[k] = kernel_.element_damage(k);
        if (opt.keep_fields) fr.displacement = u_;
        res.frames.push_back(std::move(fr));
    };
    emit(0.0);

    int next_frame = 1;
    for (long long step = 1; step <= nsteps; ++step) {
        if (spec_.mass_scaling && spec_.rescale_interval > 0 && step % spec_.rescale_interval == 0) {
            rescale();
            res.mass_scale = scale;
        }
        const double t = static_cast<double>(step) * dt;
        const double target = spec_.total_displacement * load_amplitude(spec_.load_curve, t / spec_.duration);
        // v(n-1/2) -> v(n+1/2) with the forces at u(n), then u(n+1).
        double damp = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (constrained_[i] != 0) continue;
            const double m = scale * mass_base_[i / 3];
            const double a = (-g[i] - spec_.damping * m * v[i]) / m;
            const double vnew = v[i] + dt * a;
            const double vmid = 0.5 * (v[i] + vnew);
            damp += spec_.damping * m * vmid * vmid * dt;
            v[i] = vnew;
            q[i] += dt * v[i];
        }
        for (int d : loaded_) {
            const std::size_t i = 3 * static_cast<std::size_t>(d) + static_cast<std::size_t>(axis_);
            v[i] = (target - q[i]) / dt;
            q[i] = target;
        }
        led.damping_loss += damp;
        sums = internal(q, g, true);
        double r = 0.0;
        for (int d : loaded_) r += g[3 * static_cast<std::size_t>(d) + static_cast<std::size_t>(axis_)];
        led.external_work += 0.5 * (reaction + r) * (target - applied);
        reaction = r;
        applied = target;
        res.steps = step;
        const long long frame_step = (static_cast<long long>(next_frame) * nsteps) / nframes;
        if (step == frame_step) {
            emit(t);
            ++next_frame;
        }
    }
    res.dt = dt;

    for (std::size_t i = 0; i < res.frames.size(); ++i)
        if (res.frames[i].reaction > res.peak_reaction) {
            res.peak_reaction = res.frames[i].reaction;
            res.peak_frame = static_cast<int>(i);
        }
    const double se_peak = res.frames[static_cast<std::size_t>(res.peak_frame)].energy.strain;
    for (int i = 0; i <= res.peak_frame; ++i) {
        auto& fr = res.frames[static_cast<std::size_t>(i)];
        if (fr.energy.strain <= 0.0 || fr.energy.strain < opt.ke_audit_floor * se_peak) continue;
        if (fr.energy.kinetic > spec_.ke_se_limit * fr.energy.strain) {
            fr.ke_breach = true;
            res.warnings.push_back("kinetic energy above " + format_double(spec_.ke_se_limit) +
                                   " of strain energy at frame " + std::to_string(i));
        }
    }
    return res;
}

ElasticResult Integrator::solve_elastic(double displacement) {
    const std::size_t n = 3 * map_.independent.size();
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t k = 0; k < kernel_.element_count(); ++k) {
        const auto& E = kernel_.element(k);
        const Eigen::MatrixXd Ke = kernel_.element_stiffness(k);
        for (int a = 0; a < E.n; ++a) {
            const auto va = static_cast<std::size_t>(E.nodes[static_cast<std::size_t>(a)]);
            for (int b = 0; b < E.n; ++b) {
                const auto vb = static_cast<std::size_t>(E.nodes[static_cast<std::size_t>(b)]);
                for (int p = map_.row_begin[va]; p < map_.row_begin[va + 1]; ++p)
                    for (int q = map_.row_begin[vb]; q < map_.row_begin[vb + 1]; ++q) {
                        const auto [da, wa] = map_.entries[static_cast<std::size_t>(p)];
                        const auto [db, wb] = map_.entries[static_cast<std::size_t>(q)];
                        for (int i = 0; i < 3; ++i)
                            for (int j = 0; j < 3; ++j) {
                                const double v = wa * wb * Ke(3 * a + i, 3 * b + j);
                                if (v != 0.0) trip.emplace_back(3 * da + i, 3 * db + j, v);
                            }
                    }
            }
        }
    }
    Eigen::SparseMatrix<double> K(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    K.setFromTriplets(trip.begin(), trip.end());

    Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    std::vector<int> free_of(n, -1);
    int nf = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (constrained_[i] == 0) free_of[i] = nf++;
        if (constrained_[i] == 2) q(static_cast<Eigen::Index>(i)) = displacement;
    }
    std::vector<Eigen::Triplet<double>> tf;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    for (int c = 0; c < K.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, c); it; ++it) {
            const int r = free_of[static_cast<std::size_t>(it.row())];
            if (r < 0) continue;
            const int cf = free_of[static_cast<std::size_t>(it.col())];
            if (cf >= 0)
                tf.emplace_back(r, cf, it.value());
            else
                rhs(r) -= it.value() * q(it.col());
        }
    Eigen::SparseMatrix<double> Kff(nf, nf);
    Kff.setFromTriplets(tf.begin(), tf.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Kff);
    if (ldlt.info() != Eigen::Success) throw SolverError("static solve: stiffness factorization failed");
    const Eigen::VectorXd qf = ldlt.solve(rhs);
    for (std::size_t i = 0; i < n; ++i)
        if (free_of[i] >= 0) q(static_cast<Eigen::Index>(i)) = qf(free_of[i]);

    const Eigen::VectorXd g = K * q;
    ElasticResult out;
    for (int d : loaded_) out.reaction += g(3 * d + axis_);
    out.strain_energy = 0.5 * q.dot(g);
    expand(std::vector<double>(q.data(), q.data() + q.size()), out.displacement);
    return out;
}

}  // namespace

ElasticResult solve_elastic(const MeshedModel& mesh, const std::vector<PartMaterial>& parts,
                            const MaterialSpec& material, const BoundaryConditions& bcs, double displacement) {
    if (parts.empty()) throw SolverError("no parts");
    SolverSpec spec;
    Integrator integ(mesh, parts, material, bcs, spec);
    return integ.solve_elastic(displacement);
}

RunResult run(const MeshedModel& mesh, const std::vector<PartMaterial>& parts, const MaterialSpec& material,
              const BoundaryConditions& bcs, const SolverSpec& solver, const RunOptions& options) {
    if (parts.empty()) throw SolverError("no parts");
    if (!(solver.duration > 0.0) || !(solver.target_dt > 0.0)) throw SolverError("duration and target_dt must be positive");
    Integrator integ(mesh, parts, material, bcs, solver);
    return integ.run(options);
}

std::vector<std::pair<double, double>> reaction_curve(const RunResult& result) {
    std::vector<std::pair<double, double>> out;
    out.reserve(result.frames.size());
    for (const auto& f : result.frames) out.emplace_back(f.applied, f.reaction);
    return out;
}

std::string reaction_csv(const RunResult& result) {
    std::ostringstream os;
    os << "displacement_mm,reaction_N\n";
    for (const auto& [d, r] : reaction_curve(result)) os << format_double(d) << ',' << format_double(r) << '\n';
    return os.str();
}

std::string energy_csv(const RunResult& result) {
    std::ostringstream os;
    os << "frame,time,strain,kinetic,cohesive_dissipation,fiber_dissipation,external_work,damping_loss,ke_breach\n";
    for (std::size_t i = 0; i < result.frames.size(); ++i) {
        const auto& f = result.frames[i];
        const auto& e = f.energy;
        os << i << ',' << format_double(f.time) << ',' << format_double(e.strain) << ',' << format_double(e.kinetic)
           << ',' << format_double(e.cohesive_dissipation) << ',' << format_double(e.fiber_dissipation) << ','
           << format_double(e.external_work) << ',' << format_double(e.damping_loss) << ',' << (f.ke_breach ? 1 : 0)
           << '\n';
    }
    return os.str();
}

}  // namespace lamgen
