#include <doctest.h>

#include <cstdlib>
#include <string>

#include "lamgen/layup_config.hpp"

using namespace lamgen;

namespace {

const char* kThreePly = R"(
[laminate]
W = 5
L = 5
t_m = 0.03
t_f = 0.01
t_d = 0.005

[plies]
# theta  h     d    l
  -18    0.2   0.5  2.0
  10     0.15  1.5  1.0
  55     0.2   0.8  1.5
)";

std::string with_laminate(const std::string& extra_laminate, const std::string& plies) {
    return "[laminate]\nW = 5\nL = 5\nt_f = 0.01\nt_m = 0.03\nt_d = 0.005\n" + extra_laminate + "\n[plies]\n" + plies;
}

// Field named by the ConfigError thrown for `text`, or "" when it parses.
std::string error_field(const std::string& text) {
    try {
        load_spec(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST_CASE("three-ply example config parses") {
    const Config cfg = load_spec(kThreePly);
    const auto& lam = cfg.laminate;
    REQUIRE(lam.ply_count() == 3);
    CHECK(lam.W == 5.0);
    CHECK(lam.L == 5.0);
    CHECK(lam.plies[0].theta_deg == -18.0);
    CHECK(lam.plies[1].theta_deg == 10.0);
    CHECK(lam.plies[2].theta_deg == 55.0);
    CHECK(lam.plies[1].d == 1.5);
    CHECK(lam.plies[2].l == 1.5);
    CHECK(lam.plies[1].h == 0.15);
    CHECK(lam.t_m == 0.03);
    CHECK(lam.t_f == 0.01);
    CHECK(lam.t_d == 0.005);
    CHECK_FALSE(cfg.symmetry);
}

TEST_CASE("shipped config files load") {
    for (const char* f : {"single_ply.cfg", "two_ply_interface.cfg", "three_ply.cfg"}) {
        CAPTURE(f);
        CHECK_NOTHROW(load_spec_file(std::string(LAMGEN_CONFIG_DIR) + "/" + f));
    }
}

TEST_CASE("array form: angle array shorter than N is rejected by name") {
    const std::string text = "[laminate]\nW = 5\nL = 5\nt_f = 0.01\nt_m = 0.03\nt_d = 0.005\nN = 3\n"
                             "theta = [0, 90]\nh = [0.2, 0.2, 0.2]\nd = [1, 1, 1]\nl = [2, 2, 2]\n";
    try {
        load_spec(text);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "laminate.theta");
        CHECK(std::string(e.what()).find("array length") != std::string::npos);
    }
}

TEST_CASE("array form matches the table form") {
    const std::string arrays = "[laminate]\nW = 5\nL = 5\nt_f = 0.01\nt_m = 0.03\nt_d = 0.005\nN = 3\n"
                               "theta = [-18, 10, 55]\nh = [0.2, 0.15, 0.2]\nd = [0.5, 1.5, 0.8]\nl = [2, 1, 1.5]\n";
    CHECK(load_spec(arrays) == load_spec(kThreePly));
}

TEST_CASE("t_m equal to d warns but loads") {
    const Config cfg = load_spec(with_laminate("", "0 0.2 0.03 2.0\n"));
    bool found = false;
    for (const auto& w : cfg.warnings)
        if (w.find("interface thickness not small relative to crack spacing") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("t_f large relative to l warns") {
    const Config cfg = load_spec(with_laminate("", "0 0.2 1.0 0.05\n"));
    bool found = false;
    for (const auto& w : cfg.warnings)
        if (w.find("yarn cracklet thickness not small") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("every hard invariant has a config that triggers it") {
    const std::string ply = "0 0.2 1.0 2.0\n";
    struct Case {
        std::string text;
        std::string field;
    };
    const std::vector<Case> cases = {
        {"[laminate]\nW = -1\nL = 5\nt_f = 0.01\nt_m = 0.03\nt_d = 0.005\n[plies]\n" + ply, "laminate.W"},
        {"[laminate]\nW = 5\nL = 0\nt_f = 0.01\nt_m = 0.03\nt_d = 0.005\n[plies]\n" + ply, "laminate.L"},
        {"[laminate]\nW = 5\nL = 5\nt_f = 0\nt_m = 0.03\nt_d = 0.005\n[plies]\n" + ply, "laminate.t_f"},
        {"[laminate]\nW = 5\nL = 5\nt_f = 0.01\nt_m = -0.03\nt_d = 0.005\n[plies]\n" + ply, "laminate.t_m"},
        {"[laminate]\nW = 5\nL = 5\nt_f = 0.01\nt_m = 0.03\nt_d = 0\n[plies]\n" + ply, "laminate.t_d"},
        {"[laminate]\nW = 5\nL = 5\nt_f = 0.01\nt_m = 0.03\nt_d = 0.005\n", "plies"},
        {with_laminate("", "91 0.2 1 2\n"), "plies[1].theta"},
        {with_laminate("", "-90.5 0.2 1 2\n"), "plies[1].theta"},
        {with_laminate("", "0 0 1 2\n"), "plies[1].h"},
        {with_laminate("", "0 0.2 0 2\n"), "plies[1].d"},
        {with_laminate("", "0 0.2 1 0 on\n"), "plies[1].l"},
        {with_laminate("N = 2", ply), "laminate.N"},
        {with_laminate("", ply) + "[material]\nE22 = -1\n", "material.E22"},
        {with_laminate("", ply) + "[material]\nrho = 0\n", "material.rho"},
        {with_laminate("", ply) + "[material]\neps11_u = 0.01\n", "material.eps11_u"},
        {with_laminate("", ply) + "[material]\nG_IIC = 0.05\n", "material.G_IIC"},
        {with_laminate("", ply) + "[material]\nKn = 0\n", "material.Kn"},
        {with_laminate("", ply) + "[material]\neta = -2\n", "material.eta"},
        {with_laminate("", ply) + "[material]\nNe = 0\n", "material.Ne"},
        {with_laminate("", ply) + "[material]\nnu12 = 4\n", "material.nu12"},
        {with_laminate("", ply) + "[solver]\nke_se_limit = 1.5\n", "solver.ke_se_limit"},
        {with_laminate("", ply) + "[solver]\ntarget_dt = 0\n", "solver.target_dt"},
        {with_laminate("", ply) + "[solver]\nload_curve = 0 0, 0.5 0.8, 1 0.4\n", "solver.load_curve"},
        {with_laminate("", ply) + "[mesh]\nyarn_size = 0\n", "mesh.yarn_size"},
        {with_laminate("", ply) + "[tolerances]\narea_threshold = 0\n", "tolerances.area_threshold"},
    };
    for (const auto& c : cases) {
        CAPTURE(c.text);
        CHECK(error_field(c.text) == c.field);
    }
}

TEST_CASE("l may be zero when yarn cracklets are disabled") {
    const Config cfg = load_spec(with_laminate("", "0 0.2 1.0 0 off\n"));
    CHECK_FALSE(cfg.laminate.plies[0].yarn_cracklets);
}

TEST_CASE("parse errors carry the line number") {
    try {
        load_spec("[laminate]\nW = 5\nL = five\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
        CHECK(e.field() == "laminate.L");
    }
    try {
        load_spec(with_laminate("colour = blue", "0 0.2 1 2\n"));
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "laminate.colour");
        CHECK(e.line() == 7);
    }
}

TEST_CASE("round trip: serialize then load gives the same config") {
    Config cfg = load_spec(kThreePly);
    cfg.material.Ne = 1;
    cfg.material.reduction = StrengthReduction::Exact;
    cfg.solver.load_curve = {{0.0, 0.0}, {0.3, 0.25}, {1.0, 1.0}};
    cfg.solver.damping = 1234.5;
    cfg.mesh.yarn_size = 0.3;
    cfg.laminate.plies[1].yarn_cracklets = false;
    cfg.laminate.tol.coincidence_eps = 2e-10;
    validate(cfg);
    const Config back = load_spec(serialize_spec(cfg));
    CHECK(back == cfg);
    CHECK(serialize_spec(back) == serialize_spec(cfg));
}

TEST_CASE("symmetric layup records a symmetry plane at the half-model top") {
    const Config cfg = load_spec(with_laminate("symmetric = true", "30 0.2 1 25\n90 0.2 1 25\n-30 0.1 1 25\n"));
    REQUIRE(cfg.symmetry);
    CHECK(cfg.laminate.ply_count() == 3);
    CHECK(cfg.symmetry->z == doctest::Approx(0.5 + 2 * 0.005));
    CHECK(load_spec(serialize_spec(cfg)) == cfg);
}

TEST_CASE("eps11_0 inconsistent with S11/E11 warns") {
    const Config cfg = load_spec(with_laminate("", "0 0.2 1 2\n") + "[material]\neps11_0 = 0.012\n");
    bool found = false;
    for (const auto& w : cfg.warnings)
        if (w.find("eps11_0") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("tolerance overrides from the environment") {
    Tolerances tol;
    ::setenv("LAMGEN_AREA_THRESHOLD", "1e-8", 1);
    apply_tolerance_overrides(tol);
    ::unsetenv("LAMGEN_AREA_THRESHOLD");
    CHECK(tol.area_threshold == 1e-8);
    CHECK(tol.coincidence_eps == 1e-9);
}
