#include "scemrd/cli/commands.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

scemrd::cli::RunManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw scemrd::cli::ConfigError("cannot read manifest " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return scemrd::cli::manifest_from_json(nlohmann::json::parse(ss.str()));
    } catch (const nlohmann::json::exception& e) {
        throw scemrd::cli::ConfigError("manifest " + path + " is not valid JSON: " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace scemrd::cli;

    CLI::App app{"Hybrid asymptotic-numerical solver for singularly perturbed reaction-diffusion systems"};
    std::string command;
    std::string problem = "example1";
    std::string eps_text;
    std::string n_text;
    std::string out_dir = ".";
    std::string grid_text;
    std::string manifest_path;
    std::size_t jobs = 1;
    bool no_adapt = false;
    bool dump_config = false;

    app.add_option("command", command, "solve, convergence or plotdata")
        ->required()
        ->check(CLI::IsMember({"solve", "convergence", "plotdata"}));
    app.add_option("--problem", problem, "built-in name (example1, example2) or JSON problem file");
    app.add_option("--eps", eps_text, "eps values: 0.01,1e-4 or 2^-1..2^-15");
    app.add_option("--n", n_text, "mesh intervals: 64,128 or 64..1024 (doubling)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--grid", grid_text, "evaluation grid: paper, a point count, or x values");
    app.add_flag("--no-adapt", no_adapt, "keep the initial uniform layer meshes");
    app.add_option("--manifest", manifest_path, "run from a manifest written by --dump-config");
    app.add_flag("--dump-config", dump_config, "print the resolved manifest as JSON and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    RunManifest manifest;
    try {
        if (!manifest_path.empty()) {
            manifest = read_manifest(manifest_path);
        } else {
            manifest.problem = load_problem(problem);
            if (eps_text.empty()) {
                throw ConfigError("--eps is required");
            }
            manifest.eps_list = parse_eps_list(eps_text);
            if (!n_text.empty()) {
                manifest.n_list = parse_n_list(n_text);
            }
            manifest.output_dir = out_dir;
            if (!grid_text.empty()) {
                manifest.grid = parse_grid(grid_text);
            }
            manifest.adapt = !no_adapt;
            manifest.jobs = jobs;
            validate(manifest);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    if (dump_config) {
        std::cout << to_json(manifest).dump(2) << "\n";
        return 0;
    }

    try {
        if (command == "solve") {
            for (const auto& f : cmd_solve(manifest)) {
                std::cout << f.string() << "\n";
            }
        } else if (command == "convergence") {
            for (const auto& f : cmd_convergence(manifest).files) {
                std::cout << f.string() << "\n";
            }
        } else {
            for (const auto& f : cmd_plotdata(manifest)) {
                std::cout << f.string() << "\n";
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SolverFailure& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return 0;
}
