#ifndef LAMGEN_CONSTITUTIVE_HPP
#define LAMGEN_CONSTITUTIVE_HPP

/// @file constitutive.hpp
/// @brief Ply elasticity, fiber damage in yarn cracklets, and the mixed-mode
/// cohesive law used by matrix and delamination cracklets.

#include <array>

#include <Eigen/Dense>

#include "lamgen/layup_config.hpp"

namespace lamgen {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// Voigt order: 11, 22, 33, 23, 13, 12 with engineering shear strains.
struct OrthotropicElasticity {
    double E11 = 0, E22 = 0, E33 = 0;
    double G12 = 0, G13 = 0, G23 = 0;
    double nu12 = 0, nu13 = 0, nu23 = 0;

    static OrthotropicElasticity from(const MaterialSpec& m);

    [[nodiscard]] Matrix6 compliance() const;
    [[nodiscard]] Matrix6 stiffness() const;
    /// Smallest compliance eigenvalue; positive for an admissible material.
    [[nodiscard]] double min_compliance_eigenvalue() const;
};

/// Stiffness in global axes for a material whose 1-axis lies in the x-y plane
/// at theta_deg from x (3-axis = z).
Matrix6 rotate_about_z(const Matrix6& local, double theta_deg);

// ---------------------------------------------------------------------------
// Fiber damage

struct FiberParams {
    double S11 = 1515.0;
    double eps0 = 0.0109;  // damage-initiating strain
    double epsu = 0.013;   // ultimate strain

    static FiberParams from(const MaterialSpec& m);
    /// Secant modulus consistent with the initiation point, S11 / eps0.
    [[nodiscard]] double modulus() const { return S11 / eps0; }
};

struct FiberDamageState {
    double D = 0.0;
    double eps_max = 0.0;  // largest tensile strain seen
};

struct FiberResponse {
    double sigma = 0.0;
    FiberDamageState state;
};

/// Damage as a function of the largest tensile strain seen; zero until the
/// stress criterion is met, one at and beyond epsu.
double fiber_damage(double eps_max, const FiberParams& p);

/// Energy per unit area (nominal unit thickness) dissipated while damage
/// grows from D0 to D1 along the softening branch; totals S11 epsu / 2.
double fiber_dissipation(double D0, double D1, const FiberParams& p);

/// Uniaxial update. Compression never initiates damage and is carried at
/// full stiffness.
FiberResponse fiber_damage_update(const FiberDamageState& state, double eps, const FiberParams& p);

// ---------------------------------------------------------------------------
// Cohesive law

struct CohesiveParams {
    double Kn = 1e6, Ks = 1e6, Kt = 1e6;  // N/mm^3
    double Tn = 44.5, Ts = 44.5, Tt = 44.5;  // MPa
    double G_IC = 0.0876, G_IIC = 0.315;  // N/mm
    double eta = 2.68;

    /// Strengths follow MaterialSpec::reduction (Tt = Ts).
    static CohesiveParams from(const MaterialSpec& m);
};

/// Mixed-mode toughness G_IC + (G_IIC - G_IC) B^eta.
double bk_toughness(double B, const CohesiveParams& p);

/// Interface strength adjusted for coarse elements: sqrt(E Gc / (Ne le)),
/// or with the 9 pi / 32 prefactor when exact is set.
double reduce_strength(double E, double Gc, double Ne, double le, bool exact = false);

struct CohesiveState {
    double D = 0.0;
    std::array<double, 3> delta{};  // n, s, t at the last update
    double dissipated = 0.0;        // per unit area
    double B = 0.0;                 // mode mixity at the last damaging update
    bool initiated = false;
};

struct CohesiveResponse {
    std::array<double, 3> traction{};
    CohesiveState state;
    double elastic_energy = 0.0;  // recoverable, per unit area
};

/// Quadratic-traction initiation, linear softening in effective separation
/// with B-K toughness; every stiffness is scaled by (1 - D) except normal
/// compression, which keeps the full penalty.
CohesiveResponse cohesive_response(const CohesiveState& state, const std::array<double, 3>& delta,
                                   const CohesiveParams& p);

/// Effective separations at initiation and at full failure for a given
/// separation direction; used by tests and the solver's diagnostics.
struct CohesiveEnvelope {
    double delta0 = 0.0, deltaf = 0.0, B = 0.0, Gc = 0.0;
};
CohesiveEnvelope cohesive_envelope(const std::array<double, 3>& delta, const CohesiveParams& p);

}  // namespace lamgen

#endif
