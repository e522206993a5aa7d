#ifndef LAMGEN_FIXTURES_HPP
#define LAMGEN_FIXTURES_HPP

/// @file fixtures.hpp
/// @brief Small hand-built models used to verify the solver: single
/// cracklet pulls, the T-crack (crack meeting an interface), and monolithic
/// reference meshes with shared nodes instead of ties.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "lamgen/assembler.hpp"
#include "lamgen/mesher.hpp"
#include "lamgen/mini_solver.hpp"

namespace lamgen {

/// Ties, boundary face sets and part sets for an arbitrary list of parts
/// inside the box [0, L] x [0, W] given by cfg.
Model assemble_parts(const Config& cfg, std::vector<Part> parts);

/// Two yarn segments joined across x by one cracklet of the given role
/// (matrix cracklet: theta 90, normal along x; yarn cracklet: theta 0).
Model cracklet_pull_model(const Config& cfg, PartRole role, double length, double width, double thickness,
                          double gap);

/// A ply cracked through its thickness (gap at crack_x), an intact ply
/// above, and a delamination layer between them. When matched, the
/// delamination layer is split at both crack faces so that its mesh has
/// nodes there; otherwise it is a single cell spanning the crack.
struct TCrackGeometry {
    double length = 10.0;
    double width = 0.25;
    double ply = 0.2;        // thickness of each ply
    double interface = 0.01;  // delamination layer thickness
    double gap = 0.03;        // crack width
    double crack_x = 5.0;
    double theta_cracked = 90.0;
    double theta_intact = 0.0;
};

Model tcrack_model(const Config& cfg, const TCrackGeometry& g, bool matched);

/// The same geometry as one conforming structured mesh with shared nodes
/// (no ties), graded from `fine` at the crack to `coarse` far away.
struct Monolith {
    MeshedModel mesh;
    std::vector<PartMaterial> parts;
};
Monolith tcrack_monolith(const TCrackGeometry& g, double fine, double coarse, int layers_per_ply);

/// Plies bonded directly (each ply also fills the interface slab above it),
/// no cracklets. Node sets: x-min, x-max, y-min, y-max, z-min, z-max.
Monolith ply_stack_monolith(const LaminateSpec& lam, double size, int layers_per_ply);

/// Displacement at point p interpolated inside the first listed element
/// that contains it.
std::optional<std::array<double, 3>> sample_displacement(const MeshedModel& mesh, const std::vector<double>& u,
                                                         const std::vector<int>& elements, const Vec3& p);

/// A valid laminate drawn from the property-test ranges: 1-4 plies, theta
/// uniform in [-90, 90], d in [0.3, 3] mm, at most 10 x 10 mm. Deterministic
/// for a given seed.
Config random_config(std::uint64_t seed);

/// Elements belonging to parts with the given role.
std::vector<int> elements_with_role(const MeshedModel& mesh, const std::vector<PartMaterial>& parts, PartRole role);

}  // namespace lamgen

#endif
