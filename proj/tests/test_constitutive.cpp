#include <doctest.h>

#include <random>

#include "lamgen/constitutive.hpp"

using namespace lamgen;

namespace {

// Material tables used throughout: T300/976-type ply and interface.
constexpr double kE22 = 9720.0, kGIC = 0.0876, kGIIC = 0.315, kEta = 2.68;

double bk(double B) { return kGIC + (kGIIC - kGIC) * std::pow(B, kEta); }

CohesiveParams interface_params(double K = 1e6) {
    CohesiveParams p;
    p.Kn = p.Ks = p.Kt = K;
    p.Tn = 13.0;
    p.Ts = p.Tt = 24.7;
    p.G_IC = kGIC;
    p.G_IIC = kGIIC;
    p.eta = kEta;
    return p;
}

// Ramps separation along a fixed direction until failure and returns the
// dissipated energy per area.
double ramp_to_failure(const std::array<double, 3>& dir, const CohesiveParams& p, int steps) {
    const auto env = cohesive_envelope(dir, p);
    const double n = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
    CohesiveState st;
    for (int i = 1; i <= steps; ++i) {
        const double lam = 1.2 * env.deltaf * i / steps / n;
        st = cohesive_response(st, {dir[0] * lam, dir[1] * lam, dir[2] * lam}, p).state;
    }
    CHECK(st.D == 1.0);
    return st.dissipated;
}

}  // namespace

TEST_CASE("strength reduction reproduces the adjusted interface strengths") {
    CHECK(reduce_strength(kE22, kGIC, 5, 1.0) == doctest::Approx(13.0).epsilon(0.005));
    CHECK(reduce_strength(kE22, kGIIC, 5, 1.0) == doctest::Approx(24.7).epsilon(0.005));
    CHECK(reduce_strength(kE22, kGIC, 1, 1.0) == doctest::Approx(29.2).epsilon(0.005));
    CHECK(reduce_strength(kE22, kGIIC, 1, 1.0) == doctest::Approx(55.3).epsilon(0.005));
    // The prefactor form is 9 pi / 32 times larger under the root.
    const double ratio = reduce_strength(kE22, kGIC, 5, 1.0, true) / reduce_strength(kE22, kGIC, 5, 1.0);
    CHECK(ratio * ratio == doctest::Approx(9.0 * 3.14159265358979 / 32.0));
}

TEST_CASE("fiber damage at the initiation and ultimate strains") {
    const FiberParams p{1515.0, 0.0109, 0.013};
    auto a = fiber_damage_update({}, 0.0109, p);
    CHECK(a.state.D == 0.0);
    CHECK(a.sigma == doctest::Approx(1515.0).epsilon(1e-9));
    CHECK(std::abs(a.sigma - 1515.0) <= 1e-6 * 1515.0);
    auto b = fiber_damage_update({}, 0.013, p);
    CHECK(b.state.D == 1.0);
    CHECK(b.sigma == 0.0);
    auto c = fiber_damage_update({}, 0.02, p);
    CHECK(c.state.D == 1.0);
    CHECK(c.sigma == 0.0);
}

TEST_CASE("fiber damage between the endpoints") {
    const FiberParams p{1515.0, 0.0109, 0.013};
    // Linear softening in strain: D = eu (e - e0) / (e (eu - e0)).
    const double e = 0.011950;
    const double oracle = 0.013 * (e - 0.0109) / (e * (0.013 - 0.0109));
    CHECK(oracle == doctest::Approx(0.5439).epsilon(2e-4));
    CHECK(fiber_damage(e, p) == doctest::Approx(0.5439).epsilon(2e-4));
    // Stress falls linearly from S11 to zero.
    const double sigma = fiber_damage_update({}, e, p).sigma;
    CHECK(sigma == doctest::Approx(1515.0 * (0.013 - e) / (0.013 - 0.0109)).epsilon(1e-12));
}

TEST_CASE("fiber: compression never damages and unloading keeps damage") {
    const FiberParams p{1515.0, 0.0109, 0.013};
    auto r = fiber_damage_update({}, -0.05, p);
    CHECK(r.state.D == 0.0);
    CHECK(r.sigma == doctest::Approx(p.modulus() * -0.05));
    auto s = fiber_damage_update({}, 0.012, p);
    const double D = s.state.D;
    CHECK(D > 0.0);
    for (double e : {0.011, 0.0, -0.01, 0.0115, 0.012}) {
        s = fiber_damage_update(s.state, e, p);
        CHECK(s.state.D == D);
    }
}

TEST_CASE("fiber dissipation totals S11 eu / 2 and is additive") {
    const FiberParams p{1515.0, 0.0109, 0.013};
    CHECK(fiber_dissipation(0.0, 1.0, p) == doctest::Approx(0.5 * 1515.0 * 0.013).epsilon(1e-12));
    CHECK(fiber_dissipation(0.0, 0.3, p) + fiber_dissipation(0.3, 1.0, p) ==
          doctest::Approx(fiber_dissipation(0.0, 1.0, p)).epsilon(1e-12));
    CHECK(fiber_dissipation(0.5, 0.2, p) == 0.0);
}

TEST_CASE("B-K toughness") {
    const auto p = interface_params();
    CHECK(bk_toughness(0.0, p) == kGIC);
    CHECK(bk_toughness(1.0, p) == kGIIC);
    CHECK(bk_toughness(0.5, p) == doctest::Approx(bk(0.5)).epsilon(1e-12));
    CHECK(std::abs(bk_toughness(0.5, p) - 0.1231) <= 1e-3);
}

TEST_CASE("cohesive: zero separation") {
    const auto r = cohesive_response({}, {0, 0, 0}, interface_params());
    CHECK(r.traction == std::array<double, 3>{0, 0, 0});
    CHECK(r.state.D == 0.0);
    CHECK(r.state.dissipated == 0.0);
}

TEST_CASE("cohesive: Mode I to failure dissipates G_IC") {
    const auto p = interface_params(1e6);
    const double G = ramp_to_failure({1, 0, 0}, p, 2000);
    CHECK(G == doctest::Approx(kGIC).epsilon(0.01));
    CHECK(std::abs(G - kGIC) <= 1e-9);
    // Peak traction equals the normal strength.
    const auto peak = cohesive_response({}, {p.Tn / p.Kn, 0, 0}, p);
    CHECK(peak.traction[0] == doctest::Approx(p.Tn));
    CHECK(peak.state.D == 0.0);
}

TEST_CASE("cohesive: fixed-ratio mixed mode dissipates G_C(B)") {
    const auto p = interface_params(1e6);
    for (double phi : {0.2, 0.5, 0.785398, 1.1, 1.4}) {
        CAPTURE(phi);
        const std::array<double, 3> dir{std::cos(phi), std::sin(phi), 0.0};
        // Equal penalties: B is the shear share of the squared separation.
        const double B = std::sin(phi) * std::sin(phi);
        const double G = ramp_to_failure(dir, p, 2000);
        CHECK(G == doctest::Approx(bk(B)).epsilon(0.02));
        CHECK(cohesive_envelope(dir, p).B == doctest::Approx(B).epsilon(1e-12));
    }
    CHECK(ramp_to_failure({0, 0.6, 0.8}, p, 2000) == doctest::Approx(kGIIC).epsilon(0.02));
}

TEST_CASE("cohesive: all tractions vanish together at full damage") {
    const auto p = interface_params();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e-3, 1e-3);
    CohesiveState failed;
    failed.D = 1.0;
    for (int i = 0; i < 200; ++i) {
        const std::array<double, 3> d{std::abs(u(rng)), u(rng), u(rng)};
        const auto r = cohesive_response(failed, d, p);
        CHECK(r.traction == std::array<double, 3>{0, 0, 0});
    }
    // Compression keeps the full penalty even when failed.
    const auto c = cohesive_response(failed, {-1e-4, 0, 0}, p);
    CHECK(c.traction[0] == doctest::Approx(-1e-4 * p.Kn));
}

TEST_CASE("cohesive: compression does not enter the initiation criterion") {
    const auto p = interface_params();
    // Shear just below initiation with and without normal compression.
    const double ds = 0.99 * p.Ts / p.Ks;
    const auto a = cohesive_response({}, {0.0, ds, 0.0}, p);
    const auto b = cohesive_response({}, {-5e-3, ds, 0.0}, p);
    CHECK(a.state.D == 0.0);
    CHECK(b.state.D == 0.0);
    CHECK_FALSE(b.state.initiated);
    const double ds2 = 1.05 * p.Ts / p.Ks;
    CHECK(cohesive_response({}, {-5e-3, ds2, 0.0}, p).state.D == cohesive_response({}, {0.0, ds2, 0.0}, p).state.D);
}

TEST_CASE("cohesive: pre-initiation response is linear and path-independent") {
    const auto p = interface_params();
    const std::array<double, 3> target{5e-6, -4e-6, 3e-6};
    const auto direct = cohesive_response({}, target, p);
    CohesiveState st;
    for (const auto& d : {std::array<double, 3>{1e-6, 0, 0}, {0, -4e-6, 0}, {2e-6, 1e-6, 3e-6}, target})
        st = cohesive_response(st, d, p).state;
    const auto via = cohesive_response(st, target, p);
    CHECK(via.traction == direct.traction);
    CHECK(direct.traction[0] == doctest::Approx(p.Kn * 5e-6));
    CHECK(direct.traction[1] == doctest::Approx(p.Ks * -4e-6));
    CHECK(direct.traction[2] == doctest::Approx(p.Kt * 3e-6));
    CHECK(direct.state.D == 0.0);
}

TEST_CASE("cohesive: damage is monotone, unloading changes nothing, energy bounded") {
    const auto p = interface_params();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double phi = 1.5 * u(rng);
        const std::array<double, 3> dir{std::cos(phi), std::sin(phi), 0.0};
        const auto env = cohesive_envelope(dir, p);
        CohesiveState st;
        double lam = 0.0, prevD = 0.0, prevG = 0.0;
        const double step = env.deltaf / 1000.0;
        while (lam < 1.1 * env.deltaf) {
            lam += step * (0.2 + 1.8 * u(rng));
            st = cohesive_response(st, {dir[0] * lam, dir[1] * lam, 0.0}, p).state;
            CHECK(st.D >= prevD);
            CHECK(st.dissipated >= prevG);
            prevD = st.D;
            prevG = st.dissipated;
            if (u(rng) < 0.1) {
                const double back = lam * u(rng);
                const auto un = cohesive_response(st, {dir[0] * back, dir[1] * back, 0.0}, p);
                CHECK(un.state.D == st.D);
                CHECK(un.state.dissipated == st.dissipated);
            }
        }
        CHECK(st.dissipated <= env.Gc * (1.0 + 1e-3));
    }
}

TEST_CASE("orthotropic elasticity") {
    const auto e = OrthotropicElasticity::from(MaterialSpec{});
    const Matrix6 S = e.compliance();
    CHECK((S - S.transpose()).norm() <= 1e-15 * S.norm());
    CHECK(e.min_compliance_eigenvalue() > 0.0);
    CHECK(S(0, 0) == doctest::Approx(1.0 / 139200.0));
    CHECK(S(0, 1) == doctest::Approx(-0.29 / 139200.0));
    CHECK(S(5, 5) == doctest::Approx(1.0 / 5580.0));
    CHECK((e.stiffness() * S - Matrix6::Identity()).norm() < 1e-10);

    const Matrix6 C = e.stiffness();
    CHECK((rotate_about_z(C, 0.0) - C).norm() <= 1e-9 * C.norm());
    CHECK((rotate_about_z(C, 180.0) - C).norm() <= 1e-9 * C.norm());
    const Matrix6 R = rotate_about_z(C, 90.0);
    CHECK(R(0, 0) == doctest::Approx(C(1, 1)));
    CHECK(R(1, 1) == doctest::Approx(C(0, 0)));
    CHECK(R(3, 3) == doctest::Approx(C(4, 4)));
    // Axial modulus at 45 degrees from the compliance transformation.
    const Matrix6 S45 = rotate_about_z(C, 45.0).inverse();
    const double c2 = 0.5, s2 = 0.5;
    const double inv = c2 * c2 / 139200.0 + s2 * s2 / 9720.0 + c2 * s2 * (1.0 / 5580.0 - 2.0 * 0.29 / 139200.0);
    CHECK(S45(0, 0) == doctest::Approx(inv).epsilon(1e-9));
}
