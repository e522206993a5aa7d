#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lamgen/assembler.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;  // stdout and stderr together
};

Result cli(const std::string& args) {
    const std::string cmd = std::string(LAMGEN_CLI) + " " + args + " 2>&1";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::path(LAMGEN_SCRATCH_DIR) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string cfg(const std::string& name) { return std::string(LAMGEN_CONFIG_DIR) + "/" + name; }

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("generate, mesh and check succeed on the examples") {
    for (const std::string stem : {"single_ply", "two_ply_interface", "three_ply"}) {
        CAPTURE(stem);
        const auto d = scratch("ok-" + stem);
        const auto g = cli("generate --config " + cfg(stem + ".cfg") + " --out-dir " + d.string());
        CHECK(g.code == 0);
        CHECK(g.out.find("validation: PASS") != std::string::npos);
        const auto model = d / (stem + ".model");
        REQUIRE(fs::exists(model));
        CHECK(fs::exists(d / (stem + ".report.json")));

        const auto m = cli("mesh --model " + model.string() + " --out-dir " + d.string());
        CHECK(m.code == 0);
        CHECK(fs::exists(d / (stem + ".vtk")));
        const auto mesh = d / (stem + ".mesh");
        REQUIRE(fs::exists(mesh));

        const auto c = cli("check --model " + model.string() + " --mesh " + mesh.string() + " --out-dir " + d.string());
        CHECK(c.code == 0);
        CHECK(c.out.find("conformity violations 0") != std::string::npos);
    }
}

TEST_CASE("a deleted constraint line fails the check with exit 1") {
    const auto d = scratch("orphan");
    REQUIRE(cli("generate --config " + cfg("three_ply.cfg") + " --out-dir " + d.string()).code == 0);
    const auto model = d / "three_ply.model";
    // Delete the fourth tie line by hand.
    std::istringstream in(slurp(model));
    std::ostringstream out;
    int seen = 0;
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("tie ", 0) == 0 && ++seen == 4) continue;
        out << line << '\n';
    }
    REQUIRE(seen > 4);
    const auto bad = d / "broken.model";
    std::ofstream(bad, std::ios::binary) << out.str();
    const auto c = cli("check --model " + bad.string() + " --out-dir " + d.string());
    CHECK(c.code == 1);
    CHECK(c.out.find("error: orphan face: ") != std::string::npos);
    CHECK(fs::exists(d / "broken.report.txt"));
}

TEST_CASE("usage and configuration errors exit 2, runtime errors 3") {
    CHECK(cli("").code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("generate").code == 2);
    CHECK(cli("mesh --model /nonexistent/file.model").code == 2);
    const auto d = scratch("errors");
    std::ofstream(d / "bad.cfg") << "[laminate]\nL = -1\n";
    const auto b = cli("generate --config " + (d / "bad.cfg").string() + " --out-dir " + d.string());
    CHECK(b.code == 2);
    CHECK(b.out.find("laminate") != std::string::npos);
    std::ofstream(d / "junk.model") << "junk\n";
    CHECK(cli("check --model " + (d / "junk.model").string() + " --out-dir " + d.string()).code == 3);
    REQUIRE(cli("generate --config " + cfg("three_ply.cfg") + " --out-dir " + d.string()).code == 0);
    CHECK(cli("plot --model " + (d / "three_ply.model").string() + " --interface 5 --out-dir " + d.string())
              .code == 2);
}

TEST_CASE("outputs are byte-identical across runs and thread counts") {
    const auto a = scratch("det-a"), b = scratch("det-b");
    const std::string c = cfg("two_ply_interface.cfg");
    REQUIRE(cli("generate --config " + c + " --threads 1 --out-dir " + a.string()).code == 0);
    REQUIRE(cli("generate --config " + c + " --threads 4 --out-dir " + b.string()).code == 0);
    CHECK(slurp(a / "two_ply_interface.model") == slurp(b / "two_ply_interface.model"));
    REQUIRE(cli("mesh --model " + (a / "two_ply_interface.model").string() + " --threads 1 --out-dir " + a.string())
                .code == 0);
    REQUIRE(cli("mesh --model " + (b / "two_ply_interface.model").string() + " --threads 3 --out-dir " + b.string())
                .code == 0);
    CHECK(slurp(a / "two_ply_interface.mesh") == slurp(b / "two_ply_interface.mesh"));
    CHECK(slurp(a / "two_ply_interface.vtk") == slurp(b / "two_ply_interface.vtk"));
    CHECK(slurp(a / "two_ply_interface.report.json") == slurp(b / "two_ply_interface.report.json"));
}

TEST_CASE("interface plot draws every delamination cracklet") {
    const auto d = scratch("plot");
    REQUIRE(cli("generate --config " + cfg("two_ply_interface.cfg") + " --out-dir " + d.string()).code == 0);
    const auto model = d / "two_ply_interface.model";
    const auto p = cli("plot --model " + model.string() + " --interface 1 --out-dir " + d.string());
    REQUIRE(p.code == 0);
    const std::string svg = slurp(d / "two_ply_interface.interface-1.svg");
    const lamgen::Model m = lamgen::read_model(slurp(model));
    std::size_t cells = 0;
    for (const auto& part : m.parts) cells += part.label.role == lamgen::PartRole::DelaminationCracklet;
    CHECK(count(svg, "class=\"delamination-cracklet\"") == cells);
    CHECK(count(svg, "class=\"suppressed\"") == m.suppressed.size());
    CHECK(cli("plot --model " + model.string() + " --ply 2 --out-dir " + d.string()).code == 0);
    CHECK(fs::exists(d / "two_ply_interface.ply-2.svg"));
}

TEST_CASE("seeded random laminate and a short solve") {
    const auto d = scratch("seed");
    const auto g = cli("generate --seed 7 --out-dir " + d.string());
    CHECK(g.code == 0);
    CHECK(fs::exists(d / "random-7.cfg"));
    CHECK(fs::exists(d / "random-7.model"));

    REQUIRE(cli("generate --config " + cfg("single_ply.cfg") + " --out-dir " + d.string()).code == 0);
    REQUIRE(cli("mesh --model " + (d / "single_ply.model").string() + " --out-dir " + d.string()).code == 0);
    const auto s = cli("solve --mesh " + (d / "single_ply.mesh").string() + " --frames 5 --out-dir " + d.string());
    CHECK(s.code == 0);
    const std::string csv = slurp(d / "single_ply.reaction.csv");
    CHECK(csv.rfind("displacement_mm,reaction_N\n", 0) == 0);
    CHECK(count(csv, "\n") == 7);
}
