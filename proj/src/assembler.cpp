#include "lamgen/assembler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "lamgen/format.hpp"
#include "lamgen/parallel.hpp"
#include "lamgen/spatial_index.hpp"

namespace lamgen {

// ---------------------------------------------------------------------------
// partition

Partition partition_laminate(const LaminateSpec& spec, int threads) {
    const int n = spec.ply_count();
    Partition p;
    p.layouts.resize(static_cast<std::size_t>(n));
    p.yarns.resize(static_cast<std::size_t>(n));
    p.interfaces.resize(static_cast<std::size_t>(n));
    std::vector<std::vector<std::string>> warn(static_cast<std::size_t>(n));

    parallel_for(n, threads, [&](int i) {
        const auto k = static_cast<std::size_t>(i);
        p.layouts[k] = discretize_ply(spec, i);
        p.yarns[k] = segment_ply(spec, p.layouts[k], &warn[k]);
        p.interfaces[k] = partition_ply_interfaces(p.layouts[k], p.yarns[k], spec.tol);
    });
    for (auto& w : warn) p.warnings.insert(p.warnings.end(), w.begin(), w.end());

    p.delaminations.resize(static_cast<std::size_t>(std::max(0, n - 1)));
    parallel_for(n - 1, threads, [&](int i) {
        const auto k = static_cast<std::size_t>(i);
        p.delaminations[k] = partition_ply_interface(spec, i, {&p.layouts[k], &p.yarns[k]},
                                                     {&p.layouts[k + 1], &p.yarns[k + 1]});
    });
    return p;
}

// ---------------------------------------------------------------------------
// labels

const char* to_string(PartRole r) noexcept {
    switch (r) {
        case PartRole::YarnSegment: return "yarn-segment";
        case PartRole::YarnCracklet: return "yarn-cracklet";
        case PartRole::MatrixCracklet: return "matrix-cracklet";
        case PartRole::DelaminationCracklet: return "delamination-cracklet";
    }
    return "?";
}

bool is_cracklet(PartRole r) noexcept { return r != PartRole::YarnSegment; }

std::string PartLabel::str() const {
    const std::string L = std::to_string(layer), J = std::to_string(strip), K = std::to_string(index);
    switch (role) {
        case PartRole::YarnSegment: return "layer-" + L + "-yarn-" + J + "-segment-" + K;
        case PartRole::YarnCracklet: return "layer-" + L + "-yarn-" + J + "-cracklet-" + K;
        case PartRole::MatrixCracklet: return "layer-" + L + "-yarn-interface-" + J + "-segment-" + K;
        case PartRole::DelaminationCracklet: return "interface-" + L + "-delamination-" + K;
    }
    return {};
}

std::optional<PartLabel> PartLabel::parse(const std::string& s) {
    int a = 0, b = 0, c = 0, used = 0;
    const auto n = static_cast<int>(s.size());
    if (std::sscanf(s.c_str(), "layer-%d-yarn-interface-%d-segment-%d%n", &a, &b, &c, &used) == 3 && used == n)
        return PartLabel{PartRole::MatrixCracklet, a, b, c};
    if (std::sscanf(s.c_str(), "layer-%d-yarn-%d-segment-%d%n", &a, &b, &c, &used) == 3 && used == n)
        return PartLabel{PartRole::YarnSegment, a, b, c};
    if (std::sscanf(s.c_str(), "layer-%d-yarn-%d-cracklet-%d%n", &a, &b, &c, &used) == 3 && used == n)
        return PartLabel{PartRole::YarnCracklet, a, b, c};
    if (std::sscanf(s.c_str(), "interface-%d-delamination-%d%n", &a, &c, &used) == 2 && used == n)
        return PartLabel{PartRole::DelaminationCracklet, a, 0, c};
    return std::nullopt;
}

std::string face_name(int face) {
    if (face == kFaceBottom) return "face-bottom";
    if (face == kFaceTop) return "face-top";
    return "face-side-" + std::to_string(face);
}

std::optional<int> parse_face(const std::string& s) {
    if (s == "face-bottom") return kFaceBottom;
    if (s == "face-top") return kFaceTop;
    int k = 0, used = 0;
    if (std::sscanf(s.c_str(), "face-side-%d%n", &k, &used) == 1 && used == static_cast<int>(s.size()) && k >= 0)
        return k;
    return std::nullopt;
}

std::optional<int> Model::find(const std::string& label) const {
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (parts[i].label.str() == label) return static_cast<int>(i);
    return std::nullopt;
}

std::string Model::face_label(const FaceRef& f) const {
    return parts.at(static_cast<std::size_t>(f.part)).label.str() + "-" + face_name(f.face);
}

double Model::slab_z_lo(int slab) const {
    const auto& lam = config.laminate;
    return slab % 2 == 0 ? lam.ply_z_lo(slab / 2) : lam.ply_z_hi(slab / 2);
}

double Model::slab_z_hi(int slab) const {
    const auto& lam = config.laminate;
    return slab % 2 == 0 ? lam.ply_z_hi(slab / 2) : lam.ply_z_lo(slab / 2 + 1);
}

// ---------------------------------------------------------------------------
// adjacency and constraint orientation

namespace {

int rank(PartRole r) {
    switch (r) {
        case PartRole::YarnSegment: return 0;
        case PartRole::YarnCracklet: return 1;
        case PartRole::MatrixCracklet: return 2;
        case PartRole::DelaminationCracklet: return 3;
    }
    return 4;
}

Box domain_of(const std::vector<Part>& parts) {
    Box d{1e300, 1e300, -1e300, -1e300};
    for (const auto& p : parts) {
        const auto b = p.footprint.bounds();
        d = {std::min(d[0], b[0]), std::min(d[1], b[1]), std::max(d[2], b[2]), std::max(d[3], b[3])};
    }
    return d;
}

}  // namespace

std::vector<Adjacency> find_adjacencies(const std::vector<Part>& parts, const Tolerances& tol) {
    std::vector<Adjacency> out;
    if (parts.empty()) return out;
    const double eps = tol.coincidence_eps;
    const Box domain = domain_of(parts);

    std::map<int, std::vector<int>> by_slab;
    for (std::size_t i = 0; i < parts.size(); ++i) by_slab[parts[i].slab].push_back(static_cast<int>(i));

    // Lateral contact inside a slab: collinear, oppositely oriented edges.
    for (const auto& [slab, ids] : by_slab) {
        std::vector<std::pair<int, int>> edges;
        for (int p : ids)
            for (std::size_t k = 0; k < parts[static_cast<std::size_t>(p)].footprint.size(); ++k)
                edges.emplace_back(p, static_cast<int>(k));
        GridIndex index = GridIndex::for_items(domain, edges.size());
        auto seg = [&](int e) {
            const auto& [p, k] = edges[static_cast<std::size_t>(e)];
            const auto& fp = parts[static_cast<std::size_t>(p)].footprint;
            return std::pair{fp.vertex(static_cast<std::size_t>(k)), fp.vertex(static_cast<std::size_t>(k) + 1)};
        };
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto [a, b] = seg(static_cast<int>(e));
            index.insert(static_cast<int>(e), segment_box(a.x, a.y, b.x, b.y));
        }
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto [a0, a1] = seg(static_cast<int>(e));
            for (int f : index.query(segment_box(a0.x, a0.y, a1.x, a1.y), eps)) {
                const auto& [q, kq] = edges[static_cast<std::size_t>(f)];
                if (q <= edges[e].first) continue;
                const auto [b0, b1] = seg(f);
                if (dot(a1 - a0, b1 - b0) >= 0.0) continue;
                const double len = collinear_overlap(a0, a1, b0, b1, eps);
                const auto& P = parts[static_cast<std::size_t>(edges[e].first)];
                const double area = len * (P.z_hi - P.z_lo);
                if (area >= tol.area_threshold) out.push_back({{edges[e].first, edges[e].second}, {q, kq}, area});
            }
        }
    }

    // Vertical contact between a delamination slab and the plies around it.
    for (const auto& [slab, ids] : by_slab) {
        if (slab % 2 == 0) continue;
        for (int adj_slab : {slab - 1, slab + 1}) {
            auto it = by_slab.find(adj_slab);
            if (it == by_slab.end()) continue;
            GridIndex index = GridIndex::for_items(domain, it->second.size());
            for (int q : it->second) index.insert(q, parts[static_cast<std::size_t>(q)].footprint.bounds());
            const int face_cell = adj_slab < slab ? kFaceBottom : kFaceTop;
            const int face_ply = adj_slab < slab ? kFaceTop : kFaceBottom;
            for (int p : ids) {
                const auto& fp = parts[static_cast<std::size_t>(p)].footprint;
                for (int q : index.query(fp.bounds(), eps)) {
                    auto x = intersect_convex(fp, parts[static_cast<std::size_t>(q)].footprint, tol);
                    if (!x || x->area() < tol.area_threshold) continue;
                    FaceRef a{p, face_cell}, b{q, face_ply};
                    if (b.part < a.part) std::swap(a, b);
                    out.push_back({a, b, x->area()});
                }
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const Adjacency& x, const Adjacency& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return out;
}

TieConstraint orient(const std::vector<Part>& parts, const Adjacency& adj, const Tolerances& tol) {
    const Part& A = parts.at(static_cast<std::size_t>(adj.a.part));
    const Part& B = parts.at(static_cast<std::size_t>(adj.b.part));
    const int ra = rank(A.label.role), rb = rank(B.label.role);
    if (ra != rb) return ra < rb ? TieConstraint{adj.a, adj.b, adj.area} : TieConstraint{adj.b, adj.a, adj.area};
    if (adj.a.face >= 0 && adj.b.face >= 0) {
        auto face_len = [](const Part& P, int k) {
            return distance(P.footprint.vertex(static_cast<std::size_t>(k)),
                            P.footprint.vertex(static_cast<std::size_t>(k) + 1));
        };
        const double overlap = adj.area / (A.z_hi - A.z_lo);
        const bool a_inside = overlap >= face_len(A, adj.a.face) - tol.coincidence_eps;
        const bool b_inside = overlap >= face_len(B, adj.b.face) - tol.coincidence_eps;
        if (a_inside && !b_inside) return {adj.b, adj.a, adj.area};
    }
    return {adj.a, adj.b, adj.area};
}

// ---------------------------------------------------------------------------
// assembly

namespace {

// Collapses vertices closer than eps onto the first one seen, so that parts
// produced by different splitting paths share bit-identical corners.
class Welder {
public:
    explicit Welder(double eps) : eps_(eps), cell_(4.0 * eps) {}

    Vec2 weld(const Vec2& p) {
        const auto kx = static_cast<long long>(std::floor(p.x / cell_));
        const auto ky = static_cast<long long>(std::floor(p.y / cell_));
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = grid_.find(key(kx + dx, ky + dy));
                if (it == grid_.end()) continue;
                for (const Vec2& r : it->second)
                    if (distance(r, p) <= eps_) return r;
            }
        grid_[key(kx, ky)].push_back(p);
        return p;
    }

private:
    static std::pair<long long, long long> key(long long x, long long y) { return {x, y}; }
    double eps_, cell_;
    std::map<std::pair<long long, long long>, std::vector<Vec2>> grid_;
};

bool on_line(const Vec2& a, const Vec2& b, int axis, double value, double eps) {
    const double va = axis == 0 ? a.x : a.y, vb = axis == 0 ? b.x : b.y;
    return std::abs(va - value) <= eps && std::abs(vb - value) <= eps;
}

}  // namespace

Model assemble(const Config& cfg, const Partition& partition) {
    const auto& lam = cfg.laminate;
    const auto& tol = lam.tol;
    Model m;
    m.config = cfg;
    m.warnings = cfg.warnings;
    m.warnings.insert(m.warnings.end(), partition.warnings.begin(), partition.warnings.end());

    Welder welder(tol.coincidence_eps);
    auto add = [&](PartLabel label, const ConvexPolygon& poly, int slab, double theta) {
        std::vector<Vec2> pts;
        for (const auto& v : poly.vertices()) pts.push_back(welder.weld(v));
        auto fp = ConvexPolygon::try_from_points(std::move(pts), tol);
        if (!fp) throw GeometryError("part " + label.str() + " collapsed while welding vertices");
        Part part{label, std::move(*fp), m.slab_z_lo(slab), m.slab_z_hi(slab), theta, slab};
        m.part_sets[slab % 2 == 0 ? "ply-" + std::to_string(slab / 2 + 1) : "interface-" + std::to_string(slab / 2 + 1)]
            .push_back(static_cast<int>(m.parts.size()));
        m.parts.push_back(std::move(part));
    };

    for (int i = 0; i < lam.ply_count(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double theta = lam.plies[k].theta_deg;
        const auto& layout = partition.layouts[k];
        for (const auto& note : layout.notes) m.notes.push_back(note);

        std::map<int, int> yarn_ordinal, iface_ordinal;
        for (const auto& s : layout.strips) {
            auto& ord = s.role == StripRole::Yarn ? yarn_ordinal : iface_ordinal;
            const int next = static_cast<int>(ord.size()) + 1;
            ord[s.strip_index] = next;
        }
        for (const auto& y : partition.yarns[k]) {
            const int j = yarn_ordinal.at(y.strip_index);
            for (std::size_t s = 0; s < y.segments.size(); ++s)
                add({PartRole::YarnSegment, i + 1, j, static_cast<int>(s) + 1}, y.segments[s], 2 * i, theta);
            for (std::size_t c = 0; c < y.cracklets.size(); ++c)
                add({PartRole::YarnCracklet, i + 1, j, static_cast<int>(c) + 1}, y.cracklets[c], 2 * i, theta);
        }
        for (const auto& set : partition.interfaces[k]) {
            const int j = iface_ordinal.at(set.strip_index);
            for (std::size_t c = 0; c < set.cells.size(); ++c)
                add({PartRole::MatrixCracklet, i + 1, j, static_cast<int>(c) + 1}, set.cells[c], 2 * i, theta);
        }
        if (i + 1 < lam.ply_count()) {
            const auto& d = partition.delaminations[k];
            for (std::size_t c = 0; c < d.cells.size(); ++c)
                add({PartRole::DelaminationCracklet, i + 1, 0, static_cast<int>(c) + 1}, d.cells[c], 2 * i + 1, 0.0);
            for (const auto& s : d.suppressed) {
                m.suppressed.push_back({i, s.poly, s.area});
                m.notes.push_back("interface " + std::to_string(i + 1) + ": suppressed cell of area " +
                                  format_double(s.area) + " mm^2");
            }
        }
    }

    for (const auto& adj : find_adjacencies(m.parts, tol)) m.ties.push_back(orient(m.parts, adj, tol));

    // Boundary-condition faces come from yarn segments only.
    const double eps = tol.coincidence_eps;
    for (auto& name : {"x-min", "x-max", "y-min", "y-max", "z-min", "z-max"}) m.face_sets[name];
    const int top_slab = 2 * (lam.ply_count() - 1);
    for (std::size_t p = 0; p < m.parts.size(); ++p) {
        const Part& P = m.parts[p];
        if (P.label.role != PartRole::YarnSegment) continue;
        const int id = static_cast<int>(p);
        for (std::size_t e = 0; e < P.footprint.size(); ++e) {
            const Vec2 a = P.footprint.vertex(e), b = P.footprint.vertex(e + 1);
            const int f = static_cast<int>(e);
            if (on_line(a, b, 0, 0.0, eps)) m.face_sets["x-min"].push_back({id, f});
            if (on_line(a, b, 0, lam.L, eps)) m.face_sets["x-max"].push_back({id, f});
            if (on_line(a, b, 1, 0.0, eps)) m.face_sets["y-min"].push_back({id, f});
            if (on_line(a, b, 1, lam.W, eps)) m.face_sets["y-max"].push_back({id, f});
        }
        if (P.slab == 0) m.face_sets["z-min"].push_back({id, kFaceBottom});
        if (P.slab == top_slab) m.face_sets["z-max"].push_back({id, kFaceTop});
    }

    const auto audit = audit_constraints(m);
    if (!audit.missing.empty()) {
        const auto& a = audit.missing.front();
        throw GeometryError("orphan face: " + m.face_label(a.a) + " abuts " + m.face_label(a.b) +
                            " without a constraint");
    }
    return m;
}

Model generate_model(const Config& cfg, int threads) {
    return assemble(cfg, partition_laminate(cfg.laminate, threads));
}

ConstraintAudit audit_constraints(const Model& model) {
    const auto& tol = model.config.laminate.tol;
    ConstraintAudit audit;

    using Key = std::pair<FaceRef, FaceRef>;
    auto key = [](FaceRef a, FaceRef b) { return a < b ? Key{a, b} : Key{b, a}; };
    std::map<Key, double> contact;
    const auto adjs = find_adjacencies(model.parts, tol);
    for (const auto& a : adjs) contact[key(a.a, a.b)] = a.area;

    std::set<Key> tied;
    std::map<FaceRef, int> slave_count;
    const auto n = static_cast<int>(model.parts.size());
    for (const auto& t : model.ties) {
        if (t.master.part < 0 || t.master.part >= n || t.slave.part < 0 || t.slave.part >= n) {
            audit.spurious.push_back(t);
            continue;
        }
        const Key k = key(t.master, t.slave);
        if (!contact.count(k)) audit.spurious.push_back(t);
        tied.insert(k);
        if (++slave_count[t.slave] == 2) audit.repeated_slaves.push_back(t.slave);
        const auto mr = model.parts[static_cast<std::size_t>(t.master.part)].label.role;
        const auto sr = model.parts[static_cast<std::size_t>(t.slave.part)].label.role;
        const bool yarn_rule = sr == PartRole::YarnSegment && mr != PartRole::YarnSegment;
        const bool delam_rule = mr == PartRole::DelaminationCracklet && sr != PartRole::DelaminationCracklet;
        if (yarn_rule || delam_rule || t.master == t.slave) audit.role_violations.push_back(t);
    }
    for (const auto& a : adjs)
        if (!tied.count(key(a.a, a.b))) audit.missing.push_back(a);

    const auto& lam = model.config.laminate;
    double total = 0.0, suppressed = 0.0;
    for (const auto& p : model.parts) total += p.volume();
    for (const auto& s : model.suppressed) suppressed += s.area * lam.t_d;
    double h = 0.0;
    for (const auto& p : lam.plies) h += p.h;
    const double expected = lam.W * lam.L * (h + (lam.ply_count() - 1) * lam.t_d) - suppressed;
    audit.volume_residual = std::abs(total - expected) / expected;
    return audit;
}

// ---------------------------------------------------------------------------
// model file

namespace {

constexpr const char* kMagic = "lamgen-model 1";

void write_poly(std::ostringstream& o, const ConvexPolygon& p) {
    o << p.size();
    for (const auto& v : p.vertices()) o << ' ' << format_double(v.x) << ' ' << format_double(v.y);
}

[[noreturn]] void bad(int line, const std::string& what) {
    throw std::runtime_error("model file line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string write_model(const Model& m) {
    std::ostringstream o;
    o << kMagic << '\n';
    const std::string cfg = serialize_spec(m.config);
    o << "config " << std::count(cfg.begin(), cfg.end(), '\n') << '\n' << cfg;
    o << "parts " << m.parts.size() << '\n';
    for (const auto& p : m.parts) {
        o << "part " << p.label.str() << ' ' << p.slab << ' ' << format_double(p.z_lo) << ' '
          << format_double(p.z_hi) << ' ' << format_double(p.theta_deg) << ' ';
        write_poly(o, p.footprint);
        o << '\n';
    }
    o << "ties " << m.ties.size() << '\n';
    for (const auto& t : m.ties)
        o << "tie " << m.parts[static_cast<std::size_t>(t.master.part)].label.str() << ' ' << face_name(t.master.face)
          << ' ' << m.parts[static_cast<std::size_t>(t.slave.part)].label.str() << ' ' << face_name(t.slave.face) << ' '
          << format_double(t.overlap_area) << '\n';
    o << "suppressed " << m.suppressed.size() << '\n';
    for (const auto& s : m.suppressed) {
        o << "cell " << s.lower_ply << ' ' << format_double(s.area) << ' ';
        write_poly(o, s.poly);
        o << '\n';
    }
    o << "facesets " << m.face_sets.size() << '\n';
    for (const auto& [name, faces] : m.face_sets) {
        o << "faceset " << name << ' ' << faces.size();
        for (const auto& f : faces)
            o << ' ' << m.parts[static_cast<std::size_t>(f.part)].label.str() << ' ' << face_name(f.face);
        o << '\n';
    }
    o << "partsets " << m.part_sets.size() << '\n';
    for (const auto& [name, ids] : m.part_sets) {
        o << "partset " << name << ' ' << ids.size();
        for (int id : ids) o << ' ' << m.parts[static_cast<std::size_t>(id)].label.str();
        o << '\n';
    }
    o << "warnings " << m.warnings.size() << '\n';
    for (const auto& w : m.warnings) o << "warning " << w << '\n';
    o << "notes " << m.notes.size() << '\n';
    for (const auto& n : m.notes) o << "note " << n << '\n';
    o << "end\n";
    return o.str();
}

Model read_model(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool held = false;  // `line` was peeked and not consumed
    auto next = [&]() -> std::string {
        if (held) {
            held = false;
            return line;
        }
        if (!std::getline(in, line)) bad(lineno + 1, "unexpected end of file");
        ++lineno;
        return line;
    };
    auto header = [&](const std::string& word) {
        std::istringstream ls(next());
        std::string w;
        long long n = -1;
        ls >> w >> n;
        if (w != word || n < 0) bad(lineno, "expected '" + word + " <count>'");
        return static_cast<std::size_t>(n);
    };

    if (next() != kMagic) bad(1, "not a lamgen model file (expected '" + std::string(kMagic) + "')");
    Model m;
    {
        const std::size_t n = header("config");
        std::string cfg;
        for (std::size_t i = 0; i < n; ++i) cfg += next() + '\n';
        m.config = load_spec(cfg);
    }
    const auto& tol = m.config.laminate.tol;
    std::unordered_map<std::string, int> by_label;
    auto read_poly = [&](std::istringstream& ls) {
        std::size_t nv = 0;
        ls >> nv;
        std::vector<Vec2> pts(nv);
        for (auto& p : pts) ls >> p.x >> p.y;
        if (!ls) bad(lineno, "malformed vertex list");
        return ConvexPolygon::from_points(std::move(pts), tol);
    };
    auto part_of = [&](const std::string& label) {
        auto it = by_label.find(label);
        if (it == by_label.end()) bad(lineno, "unknown part '" + label + "'");
        return it->second;
    };
    auto face_of = [&](const std::string& s) {
        auto f = parse_face(s);
        if (!f) bad(lineno, "bad face id '" + s + "'");
        return *f;
    };

    for (std::size_t n = header("parts"), i = 0; i < n; ++i) {
        std::istringstream ls(next());
        std::string w, label;
        Part p;
        ls >> w >> label >> p.slab >> p.z_lo >> p.z_hi >> p.theta_deg;
        auto pl = PartLabel::parse(label);
        if (w != "part" || !pl || !ls) bad(lineno, "malformed part");
        p.label = *pl;
        p.footprint = read_poly(ls);
        if (!by_label.emplace(label, static_cast<int>(m.parts.size())).second) bad(lineno, "duplicate label " + label);
        m.parts.push_back(std::move(p));
    }
    // Tie lines may be removed by hand; the count is informational and the
    // audit reports whatever ends up unconstrained.
    const std::size_t declared_ties = header("ties");
    for (;;) {
        const std::string l = next();
        if (l.rfind("tie ", 0) != 0) {
            held = true;
            break;
        }
        std::istringstream ls(l);
        std::string w, ml, mf, sl, sf;
        TieConstraint t;
        ls >> w >> ml >> mf >> sl >> sf >> t.overlap_area;
        if (w != "tie" || !ls) bad(lineno, "malformed tie");
        t.master = {part_of(ml), face_of(mf)};
        t.slave = {part_of(sl), face_of(sf)};
        m.ties.push_back(t);
    }
    if (m.ties.size() != declared_ties)
        m.warnings.push_back("model file declares " + std::to_string(declared_ties) + " ties, " +
                             std::to_string(m.ties.size()) + " present");
    for (std::size_t n = header("suppressed"), i = 0; i < n; ++i) {
        std::istringstream ls(next());
        std::string w;
        SuppressedRecord s;
        ls >> w >> s.lower_ply >> s.area;
        if (w != "cell") bad(lineno, "malformed suppressed cell");
        std::size_t nv = 0;
        ls >> nv;
        std::vector<Vec2> pts(nv);
        for (auto& p : pts) ls >> p.x >> p.y;
        // Suppressed cells can be too thin to survive normalization.
        if (auto poly = ConvexPolygon::try_from_points(pts, tol)) s.poly = *poly;
        m.suppressed.push_back(std::move(s));
    }
    for (std::size_t n = header("facesets"), i = 0; i < n; ++i) {
        std::istringstream ls(next());
        std::string w, name;
        std::size_t count = 0;
        ls >> w >> name >> count;
        auto& set = m.face_sets[name];
        for (std::size_t k = 0; k < count; ++k) {
            std::string l, f;
            ls >> l >> f;
            set.push_back({part_of(l), face_of(f)});
        }
        if (w != "faceset" || !ls) bad(lineno, "malformed face set");
    }
    for (std::size_t n = header("partsets"), i = 0; i < n; ++i) {
        std::istringstream ls(next());
        std::string w, name;
        std::size_t count = 0;
        ls >> w >> name >> count;
        auto& set = m.part_sets[name];
        for (std::size_t k = 0; k < count; ++k) {
            std::string l;
            ls >> l;
            set.push_back(part_of(l));
        }
        if (w != "partset" || !ls) bad(lineno, "malformed part set");
    }
    for (std::size_t n = header("warnings"), i = 0; i < n; ++i) m.warnings.push_back(next().substr(8));
    for (std::size_t n = header("notes"), i = 0; i < n; ++i) m.notes.push_back(next().substr(5));
    if (next() != "end") bad(lineno, "expected 'end'");
    return m;
}

void save_model(const Model& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << write_model(model);
}

Model load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return read_model(s.str());
}

}  // namespace lamgen
