#include "lamgen/validation.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lamgen/format.hpp"
#include "lamgen/spatial_index.hpp"

namespace lamgen {

double ValidationReport::max_tiling_residual() const {
    double r = 0.0;
    for (const auto& t : tiling) r = std::max(r, t.residual());
    return r;
}

ValidationReport validate_model(const Model& model, const MeshedModel* mesh) {
    ValidationReport rep;
    const auto& lam = model.config.laminate;
    const auto& tol = lam.tol;
    auto fail = [&](std::string msg) { rep.failures.push_back(std::move(msg)); };

    // Tiling: each slab's footprints cover the W x L rectangle.
    const int nslab = 2 * lam.ply_count() - 1;
    std::vector<SlabTiling> slabs(static_cast<std::size_t>(std::max(nslab, 0)));
    for (int s = 0; s < nslab; ++s) {
        auto& t = slabs[static_cast<std::size_t>(s)];
        t.name = (s % 2 == 0 ? "ply-" : "interface-") + std::to_string(s / 2 + 1);
        t.expected = lam.W * lam.L;
    }
    std::vector<std::vector<int>> by_slab(slabs.size());
    for (std::size_t p = 0; p < model.parts.size(); ++p) {
        const auto& part = model.parts[p];
        if (part.slab < 0 || part.slab >= nslab) {
            fail("part " + part.label.str() + " lies in no slab");
            continue;
        }
        slabs[static_cast<std::size_t>(part.slab)].covered += part.footprint.area();
        by_slab[static_cast<std::size_t>(part.slab)].push_back(static_cast<int>(p));
    }
    for (const auto& s : model.suppressed) {
        const int slab = 2 * s.lower_ply + 1;
        if (slab >= 0 && slab < nslab) slabs[static_cast<std::size_t>(slab)].covered += s.area;
    }
    rep.tiling = slabs;
    for (const auto& t : rep.tiling)
        if (t.residual() >= rep.tiling_tol)
            fail("tiling residual " + format_double(t.residual()) + " in " + t.name);

    // Pairwise overlaps within each slab.
    const Box domain{0.0, 0.0, lam.L, lam.W};
    for (const auto& ids : by_slab) {
        GridIndex index = GridIndex::for_items(domain, ids.size());
        for (int p : ids) {
            const auto b = model.parts[static_cast<std::size_t>(p)].footprint.bounds();
            index.insert(p, {b[0], b[1], b[2], b[3]});
        }
        for (int p : ids) {
            const auto& fp = model.parts[static_cast<std::size_t>(p)].footprint;
            const auto b = fp.bounds();
            for (int q : index.query({b[0], b[1], b[2], b[3]}, tol.coincidence_eps)) {
                if (q <= p) continue;
                const auto inter = intersect_convex(fp, model.parts[static_cast<std::size_t>(q)].footprint, tol);
                if (inter && inter->area() > tol.area_threshold) rep.overlaps.push_back({p, q, inter->area()});
            }
        }
    }
    for (const auto& o : rep.overlaps)
        fail("overlap of " + format_double(o.area) + " mm^2 between " + model.parts[static_cast<std::size_t>(o.a)].label.str() +
             " and " + model.parts[static_cast<std::size_t>(o.b)].label.str());

    rep.constraints = audit_constraints(model);
    for (const auto& a : rep.constraints.missing)
        fail("orphan face: " + model.face_label(a.a) + " touches " + model.face_label(a.b) + " without a constraint");
    for (const auto& t : rep.constraints.spurious)
        fail("constraint without contact: " + model.face_label(t.master) + " / " + model.face_label(t.slave));
    for (const auto& f : rep.constraints.repeated_slaves) fail("slave face in several constraints: " + model.face_label(f));
    for (const auto& t : rep.constraints.role_violations)
        fail("master/slave order violated: " + model.face_label(t.master) + " / " + model.face_label(t.slave));
    if (rep.constraints.volume_residual > 1e-9)
        fail("volume residual " + format_double(rep.constraints.volume_residual));

    if (mesh) {
        rep.mesh_checked = true;
        rep.conformity = check_conformity(model, *mesh);
        for (const auto& c : rep.conformity) fail("conformity: " + c.message);
        for (const auto& e : mesh->elements) {
            const auto J = corner_jacobians(*mesh, e);
            if (std::any_of(J.begin(), J.end(), [](double j) { return !(j > 0.0); })) ++rep.inverted_elements;
        }
        if (rep.inverted_elements > 0)
            fail(std::to_string(rep.inverted_elements) + " element(s) with a non-positive corner Jacobian");
    }

    rep.suppressed = model.suppressed;
    rep.warnings = model.warnings;
    return rep;
}

std::string ValidationReport::text() const {
    std::ostringstream o;
    o << "validation: " << (passed() ? "PASS" : "FAIL") << '\n';
    o << "tiling (tolerance " << format_double(tiling_tol) << "):\n";
    for (const auto& t : tiling)
        o << "  " << t.name << "  residual " << format_double(t.residual()) << (t.residual() < tiling_tol ? "" : "  FAIL")
          << '\n';
    o << "overlaps: " << overlaps.size() << '\n';
    o << "constraints: missing " << constraints.missing.size() << ", spurious " << constraints.spurious.size()
      << ", repeated slaves " << constraints.repeated_slaves.size() << ", role violations "
      << constraints.role_violations.size() << ", volume residual " << format_double(constraints.volume_residual)
      << '\n';
    if (mesh_checked)
        o << "mesh: conformity violations " << conformity.size() << ", inverted elements " << inverted_elements << '\n';
    else
        o << "mesh: not checked\n";
    o << "suppressed cells: " << suppressed.size() << '\n';
    for (const auto& s : suppressed)
        o << "  interface " << s.lower_ply + 1 << "  area " << format_double(s.area) << " mm^2\n";
    o << "warnings: " << warnings.size() << '\n';
    for (const auto& w : warnings) o << "  " << w << '\n';
    o << "failures: " << failures.size() << '\n';
    for (const auto& f : failures) o << "  " << f << '\n';
    return o.str();
}

std::string ValidationReport::json() const {
    using nlohmann::ordered_json;
    ordered_json j;
    j["passed"] = passed();
    j["tiling_tolerance"] = tiling_tol;
    auto& t = j["tiling"] = ordered_json::array();
    for (const auto& s : tiling)
        t.push_back({{"slab", s.name}, {"covered", s.covered}, {"expected", s.expected}, {"residual", s.residual()}});
    auto& ov = j["overlaps"] = ordered_json::array();
    for (const auto& o : overlaps) ov.push_back({{"a", o.a}, {"b", o.b}, {"area", o.area}});
    j["constraints"] = {{"missing", constraints.missing.size()},
                        {"spurious", constraints.spurious.size()},
                        {"repeated_slaves", constraints.repeated_slaves.size()},
                        {"role_violations", constraints.role_violations.size()},
                        {"volume_residual", constraints.volume_residual}};
    if (mesh_checked) {
        auto& cv = j["conformity"] = ordered_json::array();
        for (const auto& c : conformity)
            cv.push_back({{"tie", c.tie}, {"point", {c.point.x, c.point.y, c.point.z}}, {"message", c.message}});
        j["inverted_elements"] = inverted_elements;
    } else {
        j["conformity"] = nullptr;
        j["inverted_elements"] = nullptr;
    }
    auto& sp = j["suppressed"] = ordered_json::array();
    for (const auto& s : suppressed) sp.push_back({{"interface", s.lower_ply + 1}, {"area", s.area}});
    j["warnings"] = warnings;
    j["failures"] = failures;
    return j.dump(2) + "\n";
}

}  // namespace lamgen
