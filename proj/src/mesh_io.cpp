#include <algorithm>
#include <sstream>

#include "lamgen/format.hpp"
#include "lamgen/mesher.hpp"

namespace lamgen {

std::string write_vtk(const Model& model, const MeshedModel& mesh, const std::vector<VtkField>& point_vectors,
                      const std::vector<VtkField>& cell_scalars) {
    std::ostringstream o;
    o << "# vtk DataFile Version 3.0\nlamgen mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    o << "POINTS " << mesh.nodes.size() << " double\n";
    for (const auto& n : mesh.nodes) o << format_double(n.x) << ' ' << format_double(n.y) << ' ' << format_double(n.z) << '\n';

    std::size_t size = 0;
    for (const auto& e : mesh.elements) size += 1 + static_cast<std::size_t>(e.node_count());
    o << "CELLS " << mesh.elements.size() << ' ' << size << '\n';
    for (const auto& e : mesh.elements) {
        if (e.type == ElementType::Hex8) {
            o << 8;
            for (int k = 0; k < 8; ++k) o << ' ' << e.nodes[static_cast<std::size_t>(k)];
        } else {
            // VTK orders the wedge base clockwise seen from the opposite face.
            o << 6;
            for (int k : {0, 2, 1, 3, 5, 4}) o << ' ' << e.nodes[static_cast<std::size_t>(k)];
        }
        o << '\n';
    }
    o << "CELL_TYPES " << mesh.elements.size() << '\n';
    for (const auto& e : mesh.elements) o << (e.type == ElementType::Hex8 ? 12 : 13) << '\n';

    o << "CELL_DATA " << mesh.elements.size() << '\n';
    o << "SCALARS part_id int 1\nLOOKUP_TABLE default\n";
    for (const auto& e : mesh.elements) o << e.part << '\n';
    o << "SCALARS role int 1\nLOOKUP_TABLE default\n";
    for (const auto& e : mesh.elements)
        o << static_cast<int>(model.parts[static_cast<std::size_t>(e.part)].label.role) << '\n';
    for (const auto& f : cell_scalars) {
        o << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
        for (double v : f.values) o << format_double(v) << '\n';
    }
    if (!point_vectors.empty()) {
        o << "POINT_DATA " << mesh.nodes.size() << '\n';
        for (const auto& f : point_vectors) {
            o << "VECTORS " << f.name << " double\n";
            for (std::size_t i = 0; i + 2 < f.values.size(); i += 3)
                o << format_double(f.values[i]) << ' ' << format_double(f.values[i + 1]) << ' '
                  << format_double(f.values[i + 2]) << '\n';
        }
    }
    return o.str();
}

namespace {

const char* fill(PartRole r) {
    switch (r) {
        case PartRole::YarnSegment: return "#9ecae1";
        case PartRole::YarnCracklet: return "#e6550d";
        case PartRole::MatrixCracklet: return "#31a354";
        case PartRole::DelaminationCracklet: return "#fdd0a2";
    }
    return "#cccccc";
}

std::string points_attr(const ConvexPolygon& p, double W) {
    std::string s;
    for (const auto& v : p.vertices()) {
        if (!s.empty()) s += ' ';
        s += format_double(v.x) + "," + format_double(W - v.y);
    }
    return s;
}

std::string svg(const Model& model, const std::string& title, const std::vector<const Part*>& parts,
                const std::vector<const SuppressedRecord*>& suppressed) {
    const auto& lam = model.config.laminate;
    const double stroke = 0.002 * std::max(lam.L, lam.W);
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << format_double(lam.L) << ' '
      << format_double(lam.W) << "\" width=\"" << 1000 << "\" height=\""
      << static_cast<int>(std::lround(1000 * lam.W / lam.L)) << "\">\n";
    o << "<title>" << title << "</title>\n";
    for (const Part* p : parts)
        o << "<polygon class=\"" << to_string(p->label.role) << "\" data-label=\"" << p->label.str() << "\" points=\""
          << points_attr(p->footprint, lam.W) << "\" fill=\"" << fill(p->label.role)
          << "\" stroke=\"#333333\" stroke-width=\"" << format_double(stroke) << "\"/>\n";
    for (const auto* s : suppressed)
        if (s->poly.size() >= 3)
            o << "<polygon class=\"suppressed\" points=\"" << points_attr(s->poly, lam.W)
              << "\" fill=\"#ff0000\" stroke=\"#ff0000\" stroke-width=\"" << format_double(4 * stroke) << "\"/>\n";
    o << "</svg>\n";
    return o.str();
}

}  // namespace

std::string plot_ply_svg(const Model& model, int ply) {
    if (ply < 1 || ply > model.config.laminate.ply_count()) throw std::out_of_range("no ply " + std::to_string(ply));
    std::vector<const Part*> parts;
    for (const auto& p : model.parts)
        if (p.slab == 2 * (ply - 1)) parts.push_back(&p);
    return svg(model, "ply " + std::to_string(ply), parts, {});
}

std::string plot_interface_svg(const Model& model, int interface) {
    if (interface < 1 || interface >= model.config.laminate.ply_count())
        throw std::out_of_range("no ply interface " + std::to_string(interface));
    std::vector<const Part*> parts;
    for (const auto& p : model.parts)
        if (p.slab == 2 * interface - 1) parts.push_back(&p);
    std::vector<const SuppressedRecord*> sup;
    for (const auto& s : model.suppressed)
        if (s.lower_ply == interface - 1) sup.push_back(&s);
    return svg(model, "interface " + std::to_string(interface), parts, sup);
}

// ---------------------------------------------------------------------------
// native mesh file

namespace {

constexpr const char* kMeshMagic = "lamgen-mesh 1";

[[noreturn]] void bad(int line, const std::string& what) {
    throw std::runtime_error("mesh file line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string write_mesh(const Model& model, const MeshedModel& mesh) {
    std::ostringstream o;
    o << kMeshMagic << '\n';
    const std::string cfg = serialize_spec(model.config);
    o << "config " << std::count(cfg.begin(), cfg.end(), '\n') << '\n' << cfg;
    o << "sizes " << format_double(mesh.sizes.yarn_size) << ' ' << format_double(mesh.sizes.interface_size) << ' '
      << mesh.sizes.ply_layers << '\n';
    o << "parts " << mesh.parts.size() << '\n';
    for (std::size_t p = 0; p < mesh.parts.size(); ++p) {
        const auto& pm = mesh.parts[p];
        o << "part " << model.parts[p].label.str() << ' ' << format_double(model.parts[p].theta_deg) << ' '
          << pm.node_begin << ' ' << pm.node_end << ' ' << pm.elem_begin << ' ' << pm.elem_end << ' ' << pm.layers
          << '\n';
    }
    o << "nodes " << mesh.nodes.size() << '\n';
    for (const auto& n : mesh.nodes) o << format_double(n.x) << ' ' << format_double(n.y) << ' ' << format_double(n.z) << '\n';
    o << "elements " << mesh.elements.size() << '\n';
    for (const auto& e : mesh.elements) {
        o << (e.type == ElementType::Hex8 ? 'H' : 'W') << ' ' << e.part;
        for (int k = 0; k < e.node_count(); ++k) o << ' ' << e.nodes[static_cast<std::size_t>(k)];
        o << '\n';
    }
    o << "nodesets " << mesh.node_sets.size() << '\n';
    for (const auto& [name, ids] : mesh.node_sets) {
        o << "nodeset " << name << ' ' << ids.size();
        for (int i : ids) o << ' ' << i;
        o << '\n';
    }
    o << "ties " << mesh.ties.size() << '\n';
    for (const auto& t : mesh.ties) {
        o << "tie " << t.tie << ' ' << t.links.size() << '\n';
        for (const auto& l : t.links) {
            o << l.slave << ' ' << l.count;
            for (int k = 0; k < l.count; ++k)
                o << ' ' << l.master[static_cast<std::size_t>(k)] << ' ' << format_double(l.weight[static_cast<std::size_t>(k)]);
            o << '\n';
        }
    }
    o << "end\n";
    return o.str();
}

MeshFile read_mesh(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto next = [&]() -> std::string {
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
    if (next() != kMeshMagic) bad(1, "not a lamgen mesh file");
    MeshFile f;
    {
        const std::size_t n = header("config");
        std::string cfg;
        for (std::size_t i = 0; i < n; ++i) cfg += next() + '\n';
        f.config = load_spec(cfg);
    }
    {
        std::istringstream ls(next());
        std::string w;
        ls >> w >> f.mesh.sizes.yarn_size >> f.mesh.sizes.interface_size >> f.mesh.sizes.ply_layers;
        if (w != "sizes" || !ls) bad(lineno, "expected sizes");
    }
    for (std::size_t n = header("parts"), i = 0; i < n; ++i) {
        std::istringstream ls(next());
        std::string w, label;
        double theta = 0.0;
        PartMesh pm;
        ls >> w >> label >> theta >> pm.node_begin >> pm.node_end >> pm.elem_begin >> pm.elem_end >> pm.layers;
        auto pl = PartLabel::parse(label);
        if (w != "part" || !pl || !ls) bad(lineno, "malformed part");
        f.labels.push_back(*pl);
        f.theta.push_back(theta);
        f.mesh.parts.push_back(pm);
    }
    for (std::size_t n = header("nodes"), i = 0; i < n; ++i) {
        std::istringstream ls(next());
        Vec3 v;
        ls >> v.x >> v.y >> v.z;
        if (!ls) bad(lineno, "malformed node");
        f.mesh.nodes.push_back(v);
    }
    f.mesh.node_part.assign(f.mesh.nodes.size(), -1);
    for (std::size_t p = 0; p < f.mesh.parts.size(); ++p)
        for (int k = f.mesh.parts[p].node_begin; k < f.mesh.parts[p].node_end; ++k)
            f.mesh.node_part.at(static_cast<std::size_t>(k)) = static_cast<int>(p);
    for (std::size_t n = header("elements"), i = 0; i < n; ++i) {
        std::istringstream ls(next());
        char kind = 0;
        Element e;
        ls >> kind >> e.part;
        e.type = kind == 'H' ? ElementType::Hex8 : ElementType::Wedge6;
        for (int k = 0; k < e.node_count(); ++k) ls >> e.nodes[static_cast<std::size_t>(k)];
        if (!ls || (kind != 'H' && kind != 'W')) bad(lineno, "malformed element");
        f.mesh.elements.push_back(e);
    }
    for (std::size_t n = header("nodesets"), i = 0; i < n; ++i) {
        std::istringstream ls(next());
        std::string w, name;
        std::size_t count = 0;
        ls >> w >> name >> count;
        auto& ids = f.mesh.node_sets[name];
        ids.resize(count);
        for (auto& id : ids) ls >> id;
        if (w != "nodeset" || !ls) bad(lineno, "malformed node set");
    }
    for (std::size_t n = header("ties"), i = 0; i < n; ++i) {
        std::istringstream ls(next());
        std::string w;
        RealizedTie t;
        std::size_t nl = 0;
        ls >> w >> t.tie >> nl;
        if (w != "tie" || !ls) bad(lineno, "malformed tie");
        for (std::size_t k = 0; k < nl; ++k) {
            std::istringstream ll(next());
            TieLink l;
            ll >> l.slave >> l.count;
            if (l.count < 1 || l.count > 4) bad(lineno, "bad link size");
            for (int j = 0; j < l.count; ++j)
                ll >> l.master[static_cast<std::size_t>(j)] >> l.weight[static_cast<std::size_t>(j)];
            if (!ll) bad(lineno, "malformed link");
            t.links.push_back(l);
        }
        f.mesh.ties.push_back(std::move(t));
    }
    if (next() != "end") bad(lineno, "expected 'end'");
    return f;
}

}  // namespace lamgen
