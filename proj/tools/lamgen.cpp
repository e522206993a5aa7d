// lamgen: laminate model generator front end.
//
//   lamgen generate --config lam.cfg --out-dir out
//   lamgen mesh --model out/lam.model --yarn-size 0.5
//   lamgen plot --model out/lam.model --interface 1
//   lamgen solve --mesh out/lam.mesh --frames 50
//   lamgen check --model out/lam.model --mesh out/lam.mesh
//
// Exit codes: 0 all hard invariants pass, 1 an invariant failed (the first
// failure is printed), 2 bad usage or configuration, 3 I/O, geometry or
// solver error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lamgen/assembler.hpp"
#include "lamgen/fixtures.hpp"
#include "lamgen/mesher.hpp"
#include "lamgen/mini_solver.hpp"
#include "lamgen/validation.hpp"

namespace fs = std::filesystem;
using namespace lamgen;

namespace {

enum Exit { kOk = 0, kInvariant = 1, kUsage = 2, kRuntime = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
    if (!out) throw std::runtime_error("error writing " + p.string());
    return p;
}

int report(const ValidationReport& rep, const fs::path& dir, const std::string& stem) {
    write_file(dir, stem + ".report.txt", rep.text());
    write_file(dir, stem + ".report.json", rep.json());
    std::cout << rep.text();
    if (rep.passed()) return kOk;
    std::cerr << "error: " << rep.failures.front() << '\n';
    return kInvariant;
}

struct Options {
    std::string config, model, mesh;
    std::string out_dir = ".";
    std::optional<double> yarn_size, interface_size;
    int threads = 1;
    std::optional<std::uint64_t> seed;
    std::optional<int> frames;
    std::optional<int> ply, interface;
};

MeshSpec mesh_sizes(const Config& cfg, const Options& o) {
    MeshSpec ms = cfg.mesh;
    if (o.yarn_size) ms.yarn_size = *o.yarn_size;
    if (o.interface_size) ms.interface_size = *o.interface_size;
    if (!(ms.yarn_size > 0.0) || !(ms.interface_size > 0.0)) throw UsageError("mesh sizes must be positive");
    return ms;
}

int cmd_generate(const Options& o) {
    Config cfg;
    std::string stem;
    if (!o.config.empty()) {
        cfg = load_spec_file(o.config);
        stem = fs::path(o.config).stem().string();
    } else if (o.seed) {
        cfg = random_config(*o.seed);
        stem = "random-" + std::to_string(*o.seed);
        write_file(o.out_dir, stem + ".cfg", serialize_spec(cfg));
    } else {
        throw UsageError("generate needs --config or --seed");
    }
    cfg.mesh = mesh_sizes(cfg, o);
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
    const Model model = generate_model(cfg, o.threads);
    const auto path = write_file(o.out_dir, stem + ".model", write_model(model));
    std::cout << "model: " << path.string() << " (" << model.parts.size() << " parts, " << model.ties.size()
              << " ties)\n";
    return report(validate_model(model), o.out_dir, stem);
}

int cmd_mesh(const Options& o) {
    if (o.model.empty()) throw UsageError("mesh needs --model");
    const Model model = read_model(read_file(o.model));
    const std::string stem = fs::path(o.model).stem().string();
    const MeshedModel mesh = mesh_model(model, mesh_sizes(model.config, o), o.threads);
    write_file(o.out_dir, stem + ".mesh", write_mesh(model, mesh));
    write_file(o.out_dir, stem + ".vtk", write_vtk(model, mesh));
    std::cout << "mesh: " << mesh.nodes.size() << " nodes, " << mesh.elements.size() << " elements\n";
    return report(validate_model(model, &mesh), o.out_dir, stem);
}

int cmd_plot(const Options& o) {
    if (o.model.empty()) throw UsageError("plot needs --model");
    if (o.ply.has_value() == o.interface.has_value()) throw UsageError("plot needs exactly one of --ply, --interface");
    const Model model = read_model(read_file(o.model));
    const std::string stem = fs::path(o.model).stem().string();
    const int n = model.config.laminate.ply_count();
    fs::path p;
    if (o.ply) {
        if (*o.ply < 1 || *o.ply > n) throw UsageError("--ply out of range 1.." + std::to_string(n));
        p = write_file(o.out_dir, stem + ".ply-" + std::to_string(*o.ply) + ".svg", plot_ply_svg(model, *o.ply));
    } else {
        if (*o.interface < 1 || *o.interface >= n)
            throw UsageError("--interface out of range 1.." + std::to_string(n - 1));
        p = write_file(o.out_dir, stem + ".interface-" + std::to_string(*o.interface) + ".svg",
                       plot_interface_svg(model, *o.interface));
    }
    std::cout << "plot: " << p.string() << '\n';
    return kOk;
}

int cmd_solve(const Options& o) {
    if (o.mesh.empty()) throw UsageError("solve needs --mesh");
    const MeshFile file = read_mesh(read_file(o.mesh));
    const std::string stem = fs::path(o.mesh).stem().string();
    SolverSpec spec = file.config.solver;
    if (o.frames) spec.output_frames = *o.frames;
    spec.threads = o.threads;
    RunOptions ro;
    ro.keep_fields = false;
    const auto res = run(file.mesh, part_materials(file), file.config.material, default_bcs(file.config), spec, ro);
    write_file(o.out_dir, stem + ".reaction.csv", reaction_csv(res));
    write_file(o.out_dir, stem + ".energy.csv", energy_csv(res));
    const auto& last = res.frames.back().energy;
    std::cout << "solve: " << res.steps << " steps, dt " << res.dt << " s, mass scale " << res.mass_scale << '\n'
              << "peak reaction " << res.peak_reaction << " N at frame " << res.peak_frame << '\n'
              << "energy balance error " << last.balance_error() << '\n';
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
    return kOk;
}

int cmd_check(const Options& o) {
    if (o.model.empty()) throw UsageError("check needs --model");
    const Model model = read_model(read_file(o.model));
    const std::string stem = fs::path(o.model).stem().string();
    if (o.mesh.empty()) return report(validate_model(model), o.out_dir, stem);
    const MeshFile file = read_mesh(read_file(o.mesh));
    if (file.labels.size() != model.parts.size())
        throw std::runtime_error("mesh " + o.mesh + " does not belong to model " + o.model);
    return report(validate_model(model, &file.mesh), o.out_dir, stem);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laminate model generator: cracklet partitioning, meshing and a small explicit solver"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--out-dir", o.out_dir, "Directory for output files")->capture_default_str();
        c->add_option("--threads", o.threads, "Worker thread cap")->check(CLI::PositiveNumber)->capture_default_str();
    };
    auto sizes = [&](CLI::App* c) {
        c->add_option("--yarn-size", o.yarn_size, "Element size in plies (mm)")->check(CLI::PositiveNumber);
        c->add_option("--interface-size", o.interface_size, "Element size in delamination layers (mm)")
            ->check(CLI::PositiveNumber);
    };

    auto* gen = app.add_subcommand("generate", "Config -> model file + validation report");
    gen->add_option("--config", o.config, "Laminate configuration file")->check(CLI::ExistingFile);
    gen->add_option("--seed", o.seed, "Generate a random test laminate instead of reading --config");
    common(gen);
    sizes(gen);

    auto* mesh = app.add_subcommand("mesh", "Model -> mesh file (+ VTK) and conformity report");
    mesh->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
    common(mesh);
    sizes(mesh);

    auto* plot = app.add_subcommand("plot", "Top-down SVG of one ply or ply interface");
    plot->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
    plot->add_option("--ply", o.ply, "1-based ply index");
    plot->add_option("--interface", o.interface, "1-based ply interface index");
    common(plot);

    auto* solve = app.add_subcommand("solve", "Mesh -> reaction and energy histories (CSV)");
    solve->add_option("--mesh", o.mesh, "Mesh file")->required()->check(CLI::ExistingFile);
    solve->add_option("--frames", o.frames, "Output frames")->check(CLI::PositiveNumber);
    common(solve);

    auto* check = app.add_subcommand("check", "Validation report for a model (and mesh)");
    check->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
    check->add_option("--mesh", o.mesh, "Mesh file")->check(CLI::ExistingFile);
    common(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*gen) return cmd_generate(o);
        if (*mesh) return cmd_mesh(o);
        if (*plot) return cmd_plot(o);
        if (*solve) return cmd_solve(o);
        if (*check) return cmd_check(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kUsage;
}
