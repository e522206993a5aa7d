#ifndef LAMGEN_MINI_SOLVER_HPP
#define LAMGEN_MINI_SOLVER_HPP

/// @file mini_solver.hpp
/// @brief Explicit central-difference solver for small generated models.
///
/// Tie links are realized as a linear map from independent (master) nodes to
/// all nodes; slave nodes carry no degrees of freedom of their own. Cracklets
/// are interface elements: the displacement jump across the element's
/// thickness drives the cohesive or fiber-damage law, and in-plane
/// (membrane) stiffness is zero.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lamgen/assembler.hpp"
#include "lamgen/constitutive.hpp"
#include "lamgen/mesher.hpp"

namespace lamgen {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PartMaterial {
    PartRole role = PartRole::YarnSegment;
    double theta_deg = 0.0;
    std::string label;
};

std::vector<PartMaterial> part_materials(const Model& model);
std::vector<PartMaterial> part_materials(const MeshFile& file);

struct BoundaryConditions {
    std::string fixed_set = "x-min";   // all components held at zero
    std::string loaded_set = "x-max";  // displaced along load_axis
    int load_axis = 0;
    bool clamp_loaded_transverse = true;
    /// Node set whose z displacement is held at zero (symmetry plane).
    std::optional<std::string> symmetry_set;
};

/// Grips at x = 0 and x = L; the top face is the symmetry plane when the
/// configuration models half of a symmetric laminate.
BoundaryConditions default_bcs(const Config& cfg);

struct EnergyLedger {
    double strain = 0.0;
    double kinetic = 0.0;
    double cohesive_dissipation = 0.0;
    double fiber_dissipation = 0.0;
    double external_work = 0.0;
    double damping_loss = 0.0;

    /// external - (strain + kinetic + dissipation + damping), relative to
    /// the external work.
    [[nodiscard]] double balance_error() const;
};

struct Frame {
    double time = 0.0;
    double applied = 0.0;   // mm along the load axis
    double reaction = 0.0;  // N, summed over the loaded node set
    EnergyLedger energy;
    std::vector<double> displacement;  // 3 per node, when fields are kept
    std::vector<double> damage;        // per element, max over points
    bool ke_breach = false;
};

struct RunOptions {
    bool keep_fields = true;
    /// KE/SE is audited only once strain energy exceeds this fraction of its
    /// value at peak load (the ratio is unbounded as the load starts).
    double ke_audit_floor = 0.01;
};

struct RunResult {
    std::vector<Frame> frames;
    double peak_reaction = 0.0;
    int peak_frame = 0;
    long long steps = 0;
    double dt = 0.0;
    double stable_dt = 0.0;   // before any mass scaling
    double mass_scale = 1.0;  // last density factor used
    int independent_nodes = 0;
    std::vector<std::string> warnings;

    [[nodiscard]] std::vector<int> ke_breaches() const;
};

RunResult run(const MeshedModel& mesh, const std::vector<PartMaterial>& parts, const MaterialSpec& material,
              const BoundaryConditions& bcs, const SolverSpec& solver, const RunOptions& options = {});

/// Linear static response of the undamaged model to the loaded-set
/// displacement, with the same ties and boundary conditions as run().
/// Used for elastic slopes and displacement comparisons, where settling an
/// explicit run would cost far more.
struct ElasticResult {
    std::vector<double> displacement;  // 3 per node
    double reaction = 0.0;
    double strain_energy = 0.0;
};

ElasticResult solve_elastic(const MeshedModel& mesh, const std::vector<PartMaterial>& parts,
                            const MaterialSpec& material, const BoundaryConditions& bcs, double displacement);

/// (applied displacement, reaction) per frame.
std::vector<std::pair<double, double>> reaction_curve(const RunResult& result);

std::string reaction_csv(const RunResult& result);
std::string energy_csv(const RunResult& result);

/// Smooth-step amplitude of a piecewise load curve at time fraction f.
double load_amplitude(const std::vector<LoadPoint>& curve, double f);

/// Each slave node expressed through independent nodes, following the link
/// whose master part has the lowest role rank and resolving chains.
struct ConstraintMap {
    std::vector<int> independent;          // node ids
    std::vector<int> dof_of;               // node -> index into independent, or -1
    std::vector<int> row_begin;            // node -> range in entries
    std::vector<std::pair<int, double>> entries;  // (independent index, weight)
    std::vector<std::string> warnings;
};
ConstraintMap resolve_ties(const MeshedModel& mesh, const std::vector<PartMaterial>& parts);

}  // namespace lamgen

#endif
