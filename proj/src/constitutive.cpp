#include "lamgen/constitutive.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lamgen {

OrthotropicElasticity OrthotropicElasticity::from(const MaterialSpec& m) {
    return {m.E11, m.E22, m.E33, m.G12, m.G13, m.G23, m.nu12, m.nu13, m.nu23};
}

Matrix6 OrthotropicElasticity::compliance() const {
    Matrix6 S = Matrix6::Zero();
    S(0, 0) = 1 / E11;
    S(1, 1) = 1 / E22;
    S(2, 2) = 1 / E33;
    S(0, 1) = S(1, 0) = -nu12 / E11;
    S(0, 2) = S(2, 0) = -nu13 / E11;
    S(1, 2) = S(2, 1) = -nu23 / E22;
    S(3, 3) = 1 / G23;
    S(4, 4) = 1 / G13;
    S(5, 5) = 1 / G12;
    return S;
}

Matrix6 OrthotropicElasticity::stiffness() const { return compliance().inverse(); }

double OrthotropicElasticity::min_compliance_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix6> es(compliance());
    return es.eigenvalues().minCoeff();
}

namespace {

// Voigt (engineering) strain <-> symmetric tensor.
Eigen::Matrix3d strain_tensor(const Vector6& e) {
    Eigen::Matrix3d t;
    t << e(0), 0.5 * e(5), 0.5 * e(4), 0.5 * e(5), e(1), 0.5 * e(3), 0.5 * e(4), 0.5 * e(3), e(2);
    return t;
}

Vector6 stress_voigt(const Eigen::Matrix3d& s) {
    Vector6 v;
    v << s(0, 0), s(1, 1), s(2, 2), s(1, 2), s(0, 2), s(0, 1);
    return v;
}

Eigen::Matrix3d stress_tensor(const Vector6& s) {
    Eigen::Matrix3d t;
    t << s(0), s(5), s(4), s(5), s(1), s(3), s(4), s(3), s(2);
    return t;
}

}  // namespace

Matrix6 rotate_about_z(const Matrix6& local, double theta_deg) {
    const double th = theta_deg * std::numbers::pi / 180.0;
    const double c = std::cos(th), s = std::sin(th);
    // Columns of R are the local axes expressed in global coordinates.
    Eigen::Matrix3d R;
    R << c, -s, 0, s, c, 0, 0, 0, 1;
    Matrix6 C;
    for (int j = 0; j < 6; ++j) {
        Vector6 e = Vector6::Zero();
        e(j) = 1.0;
        const Eigen::Matrix3d eps_l = R.transpose() * strain_tensor(e) * R;
        Vector6 el;
        el << eps_l(0, 0), eps_l(1, 1), eps_l(2, 2), 2 * eps_l(1, 2), 2 * eps_l(0, 2), 2 * eps_l(0, 1);
        const Eigen::Matrix3d sig_g = R * stress_tensor(local * el) * R.transpose();
        C.col(j) = stress_voigt(sig_g);
    }
    return 0.5 * (C + C.transpose());
}

FiberParams FiberParams::from(const MaterialSpec& m) { return {m.S11, m.eps11_0, m.eps11_u}; }

double fiber_dissipation(double D0, double D1, const FiberParams& p) {
    if (D1 <= D0) return 0.0;
    auto hist = [&](double d) { return p.epsu * p.eps0 / (p.epsu - d * (p.epsu - p.eps0)); };
    return 0.5 * p.modulus() * p.eps0 * p.epsu * (hist(D1) - hist(D0)) / (p.epsu - p.eps0);
}

double fiber_damage(double eps_max, const FiberParams& p) {
    if (p.modulus() * eps_max < p.S11) return 0.0;
    if (eps_max >= p.epsu) return 1.0;
    const double D = p.epsu * (eps_max - p.eps0) / (eps_max * (p.epsu - p.eps0));
    return std::clamp(D, 0.0, 1.0);
}

FiberResponse fiber_damage_update(const FiberDamageState& state, double eps, const FiberParams& p) {
    FiberResponse r;
    r.state = state;
    if (eps > r.state.eps_max) r.state.eps_max = eps;
    r.state.D = std::max(state.D, fiber_damage(r.state.eps_max, p));
    const double E = p.modulus();
    r.sigma = eps > 0 ? (1.0 - r.state.D) * E * eps : E * eps;
    return r;
}

CohesiveParams CohesiveParams::from(const MaterialSpec& m) {
    CohesiveParams p;
    p.Kn = m.Kn;
    p.Ks = m.Ks;
    p.Kt = m.Kt;
    p.G_IC = m.G_IC;
    p.G_IIC = m.G_IIC;
    p.eta = m.eta;
    switch (m.reduction) {
    case StrengthReduction::None:
        p.Tn = m.Tn;
        p.Ts = m.Ts;
        break;
    case StrengthReduction::Approximate:
    case StrengthReduction::Exact: {
        const bool exact = m.reduction == StrengthReduction::Exact;
        p.Tn = reduce_strength(m.E22, m.G_IC, m.Ne, m.le, exact);
        p.Ts = reduce_strength(m.E22, m.G_IIC, m.Ne, m.le, exact);
        break;
    }
    }
    p.Tt = p.Ts;
    return p;
}

double bk_toughness(double B, const CohesiveParams& p) {
    if (B <= 0.0) return p.G_IC;
    if (B >= 1.0) return p.G_IIC;
    return p.G_IC + (p.G_IIC - p.G_IC) * std::pow(B, p.eta);
}

double reduce_strength(double E, double Gc, double Ne, double le, bool exact) {
    const double f = exact ? 9.0 * std::numbers::pi / 32.0 : 1.0;
    return std::sqrt(f * E * Gc / (Ne * le));
}

CohesiveEnvelope cohesive_envelope(const std::array<double, 3>& delta, const CohesiveParams& p) {
    const double dn = std::max(delta[0], 0.0);
    const double gn = p.Kn * dn * dn;
    const double gs = p.Ks * delta[1] * delta[1] + p.Kt * delta[2] * delta[2];
    const double dm2 = dn * dn + delta[1] * delta[1] + delta[2] * delta[2];
    CohesiveEnvelope env;
    if (dm2 <= 0.0) {
        env.delta0 = p.Tn / p.Kn;
        env.Gc = p.G_IC;
        env.deltaf = 2.0 * env.Gc / p.Tn;
        return env;
    }
    const double dm = std::sqrt(dm2);
    const double cn = dn / dm, cs = delta[1] / dm, ct = delta[2] / dm;
    const double q = std::pow(p.Kn * cn / p.Tn, 2) + std::pow(p.Ks * cs / p.Ts, 2) + std::pow(p.Kt * ct / p.Tt, 2);
    env.delta0 = 1.0 / std::sqrt(q);
    env.B = gs / (gn + gs);
    env.Gc = bk_toughness(env.B, p);
    const double Keff = (gn + gs) / dm2;
    env.deltaf = std::max(2.0 * env.Gc / (Keff * env.delta0), env.delta0 * (1.0 + 1e-9));
    return env;
}

CohesiveResponse cohesive_response(const CohesiveState& state, const std::array<double, 3>& delta,
                                   const CohesiveParams& p) {
    CohesiveResponse r;
    r.state = state;
    r.state.delta = delta;

    const double dn = std::max(delta[0], 0.0);
    const double dm = std::sqrt(dn * dn + delta[1] * delta[1] + delta[2] * delta[2]);
    const double two_w = p.Kn * dn * dn + p.Ks * delta[1] * delta[1] + p.Kt * delta[2] * delta[2];

    if (dm > 0.0 && state.D < 1.0) {
        const auto env = cohesive_envelope(delta, p);
        if (dm >= env.delta0) {
            r.state.initiated = true;
            double D = dm >= env.deltaf ? 1.0 : env.deltaf * (dm - env.delta0) / (dm * (env.deltaf - env.delta0));
            D = std::clamp(D, 0.0, 1.0);
            if (D > state.D) {
                // Exact along the softening branch: the history separation
                // for each damage value, r(D) = df d0 / (df - D (df - d0)).
                const double Keff = two_w / (dm * dm);
                auto hist = [&](double d) { return env.deltaf * env.delta0 / (env.deltaf - d * (env.deltaf - env.delta0)); };
                r.state.dissipated += 0.5 * Keff * env.delta0 * env.deltaf * (hist(D) - hist(state.D)) /
                                      (env.deltaf - env.delta0);
                r.state.D = D;
                r.state.B = env.B;
            }
        }
    }

    const double s = 1.0 - r.state.D;
    r.traction[0] = delta[0] >= 0.0 ? s * p.Kn * delta[0] : p.Kn * delta[0];
    r.traction[1] = s * p.Ks * delta[1];
    r.traction[2] = s * p.Kt * delta[2];
    const double dneg = std::min(delta[0], 0.0);
    r.elastic_energy = 0.5 * s * two_w + 0.5 * p.Kn * dneg * dneg;
    return r;
}

}  // namespace lamgen
