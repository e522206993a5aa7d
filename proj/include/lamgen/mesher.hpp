#ifndef LAMGEN_MESHER_HPP
#define LAMGEN_MESHER_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "lamgen/assembler.hpp"
#include "lamgen/geometry.hpp"
#include "lamgen/layup_config.hpp"

namespace lamgen {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
    bool operator==(const Vec3&) const = default;
};

/// Planar mesh of one footprint: quads and triangles, counter-clockwise.
struct Mesh2D {
    std::vector<Vec2> points;
    std::vector<std::array<int, 4>> quads;
    std::vector<std::array<int, 3>> tris;
    /// For each footprint edge k, the point ids along it from vertex k to k+1.
    std::vector<std::vector<int>> edge_points;
};

/// Subdivision count of an edge: ceil(length / size), at least 1. Depends
/// only on the unordered endpoint pair.
int edge_divisions(const Vec2& a, const Vec2& b, double size);

/// Points along [a, b] (both ends included) placed from the lexicographically
/// smaller endpoint, so coincident edges of different parts get
/// bit-identical nodes.
std::vector<Vec2> edge_nodes(const Vec2& a, const Vec2& b, double size);

/// Structured grid for quadrilaterals with matching opposite subdivisions,
/// constrained Delaunay triangles otherwise.
Mesh2D mesh_footprint(const ConvexPolygon& poly, double size, const Tolerances& tol);

/// Constrained Delaunay triangulation of a convex ring of boundary points
/// (counter-clockwise, collinear runs allowed) plus interior points.
std::vector<std::array<int, 3>> triangulate_convex(const std::vector<Vec2>& ring,
                                                   const std::vector<Vec2>& interior);

enum class ElementType { Hex8, Wedge6 };

struct Element {
    ElementType type = ElementType::Hex8;
    std::array<int, 8> nodes{};
    int part = 0;
    [[nodiscard]] int node_count() const noexcept { return type == ElementType::Hex8 ? 8 : 6; }
};

struct PartMesh {
    int node_begin = 0, node_end = 0;
    int elem_begin = 0, elem_end = 0;
    int layers = 1;
    Mesh2D plan;  // node id = node_begin + layer * plan.points.size() + point id
};

/// Slave node following a weighted combination of master nodes.
struct TieLink {
    int slave = 0;
    std::array<int, 4> master{};
    std::array<double, 4> weight{};
    int count = 0;
};

struct RealizedTie {
    int tie = 0;  // index into Model::ties
    std::vector<TieLink> links;
};

struct MeshedModel {
    std::vector<Vec3> nodes;
    std::vector<int> node_part;
    std::vector<Element> elements;
    std::vector<PartMesh> parts;
    std::vector<RealizedTie> ties;
    /// Node sets resolved from the model's boundary face sets.
    std::map<std::string, std::vector<int>> node_sets;
    MeshSpec sizes;

    [[nodiscard]] int node_id(int part, int layer, int point) const {
        const auto& pm = parts[static_cast<std::size_t>(part)];
        return pm.node_begin + layer * static_cast<int>(pm.plan.points.size()) + point;
    }
};

/// Meshes every part (in parallel when threads > 1) and realizes each tie as
/// slave-node interpolation links. Throws GeometryError for degenerate footprints.
MeshedModel mesh_model(const Model& model, const MeshSpec& sizes, int threads = 1);

/// Scalar Jacobian determinant at each element corner; an element is valid
/// when all are positive.
std::vector<double> corner_jacobians(const MeshedModel& mesh, const Element& e);
double element_volume(const MeshedModel& mesh, const Element& e);

struct ConformityViolation {
    int tie = 0;
    Vec3 point;
    std::string message;
};

/// For every tie, each master-face corner lying on the slave face must have a
/// slave node within coincidence_eps.
std::vector<ConformityViolation> check_conformity(const Model& model, const MeshedModel& mesh);

/// Legacy-text VTK unstructured grid with part id and role cell data plus
/// optional point vectors and cell scalars.
struct VtkField {
    std::string name;
    std::vector<double> values;  // 3 per point for vectors, 1 per cell for scalars
};
std::string write_vtk(const Model& model, const MeshedModel& mesh, const std::vector<VtkField>& point_vectors = {},
                      const std::vector<VtkField>& cell_scalars = {});

/// Top-down SVG of ply `index` (1-based, layer parts) or ply interface
/// `index` (1-based, delamination cracklets and suppressed cells).
std::string plot_ply_svg(const Model& model, int ply);
std::string plot_interface_svg(const Model& model, int interface);

/// Self-contained mesh file: configuration, parts, nodes, elements, node sets
/// and tie links. Read back by the solver.
std::string write_mesh(const Model& model, const MeshedModel& mesh);

struct MeshFile {
    Config config;
    std::vector<PartLabel> labels;
    std::vector<double> theta;  // per part
    MeshedModel mesh;
};
MeshFile read_mesh(const std::string& text);

}  // namespace lamgen

#endif
