#ifndef LAMGEN_LAYUP_CONFIG_HPP
#define LAMGEN_LAYUP_CONFIG_HPP

/// @file layup_config.hpp
/// @brief Laminate, material and solver description: parsing, validation,
/// serialization.
///
/// The configuration format is a small sectioned key/value text format:
///
/// @code
///   [laminate]
///   W = 5.0            # mm
///   L = 5.0            # mm
///   t_f = 0.01         # yarn cracklet thickness, mm
///   t_m = 0.03         # matrix cracklet thickness, mm
///   t_d = 0.005        # delamination cracklet thickness, mm
///   symmetric = false  # model the bottom half of a symmetric layup
///
///   [plies]
///   # theta_deg  h_mm  d_mm  l_mm  yarn_cracklets
///     -18        0.2   0.5   2.0   on
///     10         0.15  1.5   1.0   on
/// @endcode
///
/// Optional sections: [material], [solver], [mesh], [tolerances]. Every key
/// in those sections has a default (T300/976 for the material). See
/// docs/config_format.md for the full schema.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lamgen/geometry.hpp"

namespace lamgen {

/// Parse or validation failure. `line` is 0 when the error is not tied to a
/// specific line (for example a missing key).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, int line, const std::string& what)
        : std::runtime_error(format(field, line, what)), field_(std::move(field)), line_(line) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, int line, const std::string& what);
    std::string field_;
    int line_;
};

struct PlySpec {
    double theta_deg = 0.0;  // layup angle, [-90, 90]
    double h = 0.0;          // ply thickness, mm
    double d = 0.0;          // matrix crack spacing (yarn width), mm
    double l = 0.0;          // yarn fracture spacing, mm
    bool yarn_cracklets = true;

    bool operator==(const PlySpec&) const = default;
};

struct LaminateSpec {
    double W = 0.0;  // width, extent along y, mm
    double L = 0.0;  // length, extent along x (loading direction), mm
    std::vector<PlySpec> plies;
    double t_f = 0.0;
    double t_m = 0.0;
    double t_d = 0.0;
    bool symmetric = false;
    Tolerances tol{};

    [[nodiscard]] int ply_count() const noexcept { return static_cast<int>(plies.size()); }
    /// z of the bottom of ply i (0-based), with delamination slabs in between.
    [[nodiscard]] double ply_z_lo(int i) const noexcept;
    [[nodiscard]] double ply_z_hi(int i) const noexcept { return ply_z_lo(i) + plies[static_cast<std::size_t>(i)].h; }
    [[nodiscard]] double total_thickness() const noexcept;
    [[nodiscard]] ConvexPolygon rectangle() const { return ConvexPolygon::rectangle(0.0, 0.0, L, W); }
    [[nodiscard]] Vec2 center() const noexcept { return {0.5 * L, 0.5 * W}; }

    bool operator==(const LaminateSpec& o) const;
};

enum class StrengthReduction { Approximate, Exact, None };

struct MaterialSpec {
    // Ply elasticity (MPa), density in tonne/mm^3.
    double rho = 1.76e-9;
    double E11 = 139200.0, E22 = 9720.0, E33 = 9720.0;
    double G12 = 5580.0, G13 = 5580.0, G23 = 3450.0;
    double nu12 = 0.29, nu13 = 0.29, nu23 = 0.4;
    // Fiber damage in yarn cracklets.
    double S11 = 1515.0;
    double eps11_0 = 0.0109;
    double eps11_u = 0.013;
    // Interface cohesive law.
    double Tn = 44.5, Ts = 106.9;  // unreduced strengths, MPa
    double G_IC = 0.0876, G_IIC = 0.315;  // N/mm (= kJ/m^2)
    double Kn = 1e6, Ks = 1e6, Kt = 1e6;  // N/mm^3
    double eta = 2.68;
    int Ne = 5;
    double le = 1.0;  // mm
    StrengthReduction reduction = StrengthReduction::Approximate;

    bool operator==(const MaterialSpec&) const = default;
};

struct LoadPoint {
    double time_fraction = 0.0;  // of SolverSpec::duration
    double amplitude = 0.0;      // fraction of total_displacement

    bool operator==(const LoadPoint&) const = default;
};

struct SolverSpec {
    double total_displacement = 0.01;  // mm, applied along +x at x = L
    double duration = 1e-3;            // s
    std::vector<LoadPoint> load_curve{{0.0, 0.0}, {1.0, 1.0}};
    double target_dt = 1e-6;           // s
    bool mass_scaling = true;
    int rescale_interval = 10000;      // steps between mass-scaling updates
    double damping = 0.0;              // mass-proportional damping, 1/s
    int output_frames = 100;
    double ke_se_limit = 0.05;
    int threads = 1;

    bool operator==(const SolverSpec&) const = default;
};

struct MeshSpec {
    double yarn_size = 1.0;       // mm, ply-slab parts
    double interface_size = 1.0;  // mm, delamination cracklets
    int ply_layers = 1;           // elements through each ply thickness

    bool operator==(const MeshSpec&) const = default;
};

/// Symmetry-plane boundary condition produced by `symmetric = true`: only the
/// listed (bottom-half) plies are modeled and u_z = 0 is imposed at z.
struct SymmetryPlane {
    double z = 0.0;
    bool operator==(const SymmetryPlane&) const = default;
};

struct Config {
    LaminateSpec laminate;
    MaterialSpec material;
    SolverSpec solver;
    MeshSpec mesh;
    std::optional<SymmetryPlane> symmetry;
    std::vector<std::string> warnings;

    bool operator==(const Config& o) const {
        return laminate == o.laminate && material == o.material && solver == o.solver && mesh == o.mesh &&
               symmetry == o.symmetry;
    }
};

/// Parses and validates a configuration document. Soft checks go to
/// Config::warnings; hard violations throw ConfigError naming the field.
Config load_spec(std::string_view text);
Config load_spec_file(const std::string& path);

/// Writes a document that load_spec reads back to an identical Config.
std::string serialize_spec(const Config& cfg);

/// Validation shared by load_spec and programmatic construction.
void validate(Config& cfg);

/// Applies LAMGEN_COINCIDENCE_EPS / LAMGEN_AREA_THRESHOLD / LAMGEN_ANGLE_EPS.
void apply_tolerance_overrides(Tolerances& tol);

}  // namespace lamgen

#endif
