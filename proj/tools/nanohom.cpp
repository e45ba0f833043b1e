#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nanohom/commands.hpp"

namespace {

void add_common(CLI::App* cmd, nanohom::CommandOptions& opt, std::string& grid, std::string& dense) {
    cmd->add_option("--config", opt.config_path, "configuration file")->required();
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_flag("--strict-conditions", opt.strict_conditions, "exit with code 4 when a condition check fails");
    cmd->add_option("--dense-limit", dense, "maximum dense system dimension");
    cmd->add_option("--grid", grid, "far-field grid NTHETAxNPHI");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Foldy-Lax scattering by nanoparticle lattices and its effective-medium limit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", nanohom::version);

    nanohom::CommandOptions opt;
    std::string grid, dense, levels;
    auto* scatter = app.add_subcommand("scatter", "discrete far-field of the particle lattice");
    auto* effective = app.add_subcommand("effective", "effective coefficients and effective-medium far-field");
    auto* compare = app.add_subcommand("compare", "convergence of the effective far-field over cell sizes");
    for (auto* c : {scatter, effective, compare}) add_common(c, opt, grid, dense);
    compare->add_option("--d-levels", levels, "comma-separated cell sizes, p/q allowed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : nanohom::ExitConfig;
    }

    try {
        if (!grid.empty()) opt.grid = nanohom::parse_grid(grid);
        if (!dense.empty()) {
            std::size_t used = 0;
            const long v = std::stol(dense, &used);
            if (used != dense.size() || v <= 0) throw std::invalid_argument(dense);
            opt.dense_limit = static_cast<std::size_t>(v);
        }
        if (!levels.empty()) opt.d_levels = nanohom::parse_levels(levels);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return nanohom::ExitConfig;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    return nanohom::run_command(name, opt, std::cerr);
}
