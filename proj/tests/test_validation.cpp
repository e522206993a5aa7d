#include <doctest.h>

#include <json.hpp>

#include "lamgen/validation.hpp"

using namespace lamgen;

namespace {

Config load(const std::string& name) { return load_spec_file(std::string(LAMGEN_CONFIG_DIR) + "/" + name); }

}  // namespace

TEST_CASE("shipped examples pass with and without the mesh") {
    for (const char* name : {"single_ply.cfg", "two_ply_interface.cfg", "three_ply.cfg"}) {
        CAPTURE(name);
        const Config cfg = load(name);
        const Model m = generate_model(cfg);
        const auto rep = validate_model(m);
        CHECK(rep.passed());
        CHECK_FALSE(rep.mesh_checked);
        CHECK(rep.tiling.size() == static_cast<std::size_t>(2 * cfg.laminate.ply_count() - 1));
        CHECK(rep.max_tiling_residual() < 1e-9);
        CHECK(rep.overlaps.empty());

        const auto mesh = mesh_model(m, cfg.mesh, 2);
        const auto full = validate_model(m, &mesh);
        CHECK(full.passed());
        CHECK(full.mesh_checked);
        CHECK(full.conformity.empty());
        CHECK(full.inverted_elements == 0);
    }
}

TEST_CASE("a missing constraint is reported as an orphan face first") {
    Model m = generate_model(load("three_ply.cfg"));
    const auto dropped = m.ties.front();
    m.ties.erase(m.ties.begin());
    const auto rep = validate_model(m);
    REQUIRE_FALSE(rep.passed());
    CHECK(rep.failures.front().rfind("orphan face: ", 0) == 0);
    CHECK(rep.failures.front().find(m.face_label(dropped.master)) != std::string::npos);
    CHECK(rep.failures.front().find(m.face_label(dropped.slave)) != std::string::npos);
}

TEST_CASE("an overlapping part breaks tiling and overlap checks") {
    Model m = generate_model(load("single_ply.cfg"));
    Part extra = m.parts.front();
    extra.label.index = 999;
    m.parts.push_back(extra);
    const auto rep = validate_model(m);
    CHECK_FALSE(rep.passed());
    CHECK(rep.overlaps.size() >= 1);
    CHECK(rep.max_tiling_residual() > 1e-9);
    CHECK(rep.failures.front().find("tiling residual") == 0);
}

TEST_CASE("a displaced mesh node shows up as a conformity failure") {
    const Config cfg = load("single_ply.cfg");
    const Model m = generate_model(cfg);
    auto mesh = mesh_model(m, cfg.mesh, 1);
    // Move a slave-side node that sits on a tied face.
    const auto& link = mesh.ties.front().links.front();
    mesh.nodes[static_cast<std::size_t>(link.slave)].z += 1e-6;
    const auto rep = validate_model(m, &mesh);
    CHECK_FALSE(rep.passed());
    CHECK_FALSE(rep.conformity.empty());
}

TEST_CASE("text and JSON reports agree") {
    for (bool broken : {false, true}) {
        Model m = generate_model(load("three_ply.cfg"));
        if (broken) m.ties.pop_back();
        const auto rep = validate_model(m);
        const auto j = nlohmann::json::parse(rep.json());
        const std::string text = rep.text();
        CHECK(j["passed"].get<bool>() == rep.passed());
        CHECK(text.rfind(rep.passed() ? "validation: PASS" : "validation: FAIL", 0) == 0);
        CHECK(j["tiling"].size() == rep.tiling.size());
        for (const auto& t : rep.tiling) CHECK(text.find("  " + t.name + "  residual") != std::string::npos);
        CHECK(j["constraints"]["missing"].get<std::size_t>() == rep.constraints.missing.size());
        CHECK(text.find("missing " + std::to_string(rep.constraints.missing.size()) + ",") != std::string::npos);
        REQUIRE(j["failures"].size() == rep.failures.size());
        for (std::size_t i = 0; i < rep.failures.size(); ++i) {
            CHECK(j["failures"][i].get<std::string>() == rep.failures[i]);
            CHECK(text.find(rep.failures[i]) != std::string::npos);
        }
        CHECK(j["suppressed"].size() == rep.suppressed.size());
        CHECK(j["conformity"].is_null());
    }
}
