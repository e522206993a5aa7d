// Python bindings: configuration, model generation, meshing, validation and
// the constitutive helpers. Heavy data comes back as numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lamgen/fixtures.hpp"
#include "lamgen/validation.hpp"

namespace py = pybind11;
using namespace lamgen;

namespace {

py::dict ply_dict(const PlySpec& p) {
    py::dict d;
    d["theta"] = p.theta_deg;
    d["h"] = p.h;
    d["d"] = p.d;
    d["l"] = p.l;
    d["yarn_cracklets"] = p.yarn_cracklets;
    return d;
}

py::array_t<double> footprint(const ConvexPolygon& poly) {
    py::array_t<double> a({static_cast<py::ssize_t>(poly.size()), py::ssize_t{2}});
    auto r = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        r(static_cast<py::ssize_t>(i), 0) = poly.vertex(i).x;
        r(static_cast<py::ssize_t>(i), 1) = poly.vertex(i).y;
    }
    return a;
}

}  // namespace

PYBIND11_MODULE(_lamgen, m) {
    m.doc() = "Laminate model generator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<GeometryError>(m, "GeometryError", PyExc_RuntimeError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::class_<Config>(m, "Config")
        .def_static("from_text", [](const std::string& s) { return load_spec(s); }, py::arg("text"))
        .def_static("from_file", &load_spec_file, py::arg("path"))
        .def_static("random", &random_config, py::arg("seed"), "A small random laminate from the property-test ranges.")
        .def("to_text", &serialize_spec)
        .def_property_readonly("L", [](const Config& c) { return c.laminate.L; })
        .def_property_readonly("W", [](const Config& c) { return c.laminate.W; })
        .def_property_readonly("plies", [](const Config& c) {
            py::list l;
            for (const auto& p : c.laminate.plies) l.append(ply_dict(p));
            return l;
        })
        .def_property_readonly("warnings", [](const Config& c) { return c.warnings; })
        .def("__eq__", [](const Config& a, const Config& b) { return a == b; })
        .def("__repr__", [](const Config& c) {
            return "<Config " + std::to_string(c.laminate.ply_count()) + " plies, " + std::to_string(c.laminate.L) +
                   " x " + std::to_string(c.laminate.W) + " mm>";
        });

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_property_readonly("passed", &ValidationReport::passed)
        .def_property_readonly("failures", [](const ValidationReport& r) { return r.failures; })
        .def_property_readonly("warnings", [](const ValidationReport& r) { return r.warnings; })
        .def_property_readonly("max_tiling_residual", &ValidationReport::max_tiling_residual)
        .def("text", &ValidationReport::text)
        .def("json", &ValidationReport::json);

    py::class_<Model>(m, "Model")
        .def_static("generate", &generate_model, py::arg("config"), py::arg("threads") = 1,
                    py::call_guard<py::gil_scoped_release>())
        .def_static("from_text", &read_model, py::arg("text"))
        .def("to_text", &write_model)
        .def_readonly("config", &Model::config)
        .def_property_readonly("part_count", [](const Model& md) { return md.parts.size(); })
        .def_property_readonly("tie_count", [](const Model& md) { return md.ties.size(); })
        .def_property_readonly("suppressed_count", [](const Model& md) { return md.suppressed.size(); })
        .def("parts", [](const Model& md) {
            py::list out;
            for (const auto& p : md.parts) {
                py::dict d;
                d["label"] = p.label.str();
                d["role"] = to_string(p.label.role);
                d["slab"] = p.slab;
                d["z"] = py::make_tuple(p.z_lo, p.z_hi);
                d["theta"] = p.theta_deg;
                d["footprint"] = footprint(p.footprint);
                out.append(d);
            }
            return out;
        })
        .def("ties", [](const Model& md) {
            py::list out;
            for (const auto& t : md.ties)
                out.append(py::make_tuple(md.face_label(t.master), md.face_label(t.slave), t.overlap_area));
            return out;
        })
        .def("validate", [](const Model& md) { return validate_model(md); })
        .def("ply_svg", &plot_ply_svg, py::arg("ply"))
        .def("interface_svg", &plot_interface_svg, py::arg("interface"));

    py::class_<MeshedModel>(m, "Mesh")
        .def_static(
            "build",
            [](const Model& md, std::optional<double> yarn_size, std::optional<double> interface_size,
               std::optional<int> ply_layers, int threads) {
                MeshSpec s = md.config.mesh;
                if (yarn_size) s.yarn_size = *yarn_size;
                if (interface_size) s.interface_size = *interface_size;
                if (ply_layers) s.ply_layers = *ply_layers;
                py::gil_scoped_release release;
                return mesh_model(md, s, threads);
            },
            py::arg("model"), py::arg("yarn_size") = py::none(), py::arg("interface_size") = py::none(),
            py::arg("ply_layers") = py::none(), py::arg("threads") = 1)
        .def_property_readonly("node_count", [](const MeshedModel& s) { return s.nodes.size(); })
        .def_property_readonly("element_count", [](const MeshedModel& s) { return s.elements.size(); })
        .def_property_readonly("nodes", [](const MeshedModel& s) {
            py::array_t<double> a({static_cast<py::ssize_t>(s.nodes.size()), py::ssize_t{3}});
            auto r = a.mutable_unchecked<2>();
            for (std::size_t i = 0; i < s.nodes.size(); ++i) {
                const auto k = static_cast<py::ssize_t>(i);
                r(k, 0) = s.nodes[i].x;
                r(k, 1) = s.nodes[i].y;
                r(k, 2) = s.nodes[i].z;
            }
            return a;
        })
        .def("validate", [](const MeshedModel& s, const Model& md) { return validate_model(md, &s); }, py::arg("model"))
        .def("to_text", [](const MeshedModel& s, const Model& md) { return write_mesh(md, s); }, py::arg("model"))
        .def("vtk", [](const MeshedModel& s, const Model& md) { return write_vtk(md, s); }, py::arg("model"));

    m.def(
        "elastic_reaction",
        [](const Model& md, const MeshedModel& mesh, double displacement) {
            py::gil_scoped_release release;
            return solve_elastic(mesh, part_materials(md), md.config.material, default_bcs(md.config), displacement)
                .reaction;
        },
        py::arg("model"), py::arg("mesh"), py::arg("displacement"),
        "Reaction (N) of the undamaged model to an end displacement (mm).");

    m.def("reduce_strength", &reduce_strength, py::arg("E"), py::arg("Gc"), py::arg("Ne"), py::arg("le"),
          py::arg("exact") = false);
    m.def(
        "bk_toughness",
        [](double B, double G_IC, double G_IIC, double eta) {
            CohesiveParams p;
            p.G_IC = G_IC;
            p.G_IIC = G_IIC;
            p.eta = eta;
            return bk_toughness(B, p);
        },
        py::arg("B"), py::arg("G_IC") = 0.0876, py::arg("G_IIC") = 0.315, py::arg("eta") = 2.68);
    m.def(
        "fiber_damage",
        [](double eps, double S11, double eps0, double epsu) { return fiber_damage(eps, FiberParams{S11, eps0, epsu}); },
        py::arg("eps"), py::arg("S11") = 1515.0, py::arg("eps0") = 0.0109, py::arg("epsu") = 0.013);
}
