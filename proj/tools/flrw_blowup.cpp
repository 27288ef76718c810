// Command-line front end: flrw_blowup analyze|ode|pde|cone-check|sweep --scenario <path> [options]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flrw_blowup/cli_runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Blow-up certificates and simulations for semilinear Klein-Gordon equations in FLRW spacetimes"};
    app.require_subcommand(1);

    flrw::CliOptions opt;
    opt.workers = flrw::default_workers();
    std::string out_dir;
    double grid_h = 0.0, t_end = 0.0;

    const char* commands[][2] = {
        {"analyze", "check the blow-up hypotheses and write certificate.json"},
        {"ode", "integrate the comparison ODE and write trajectory.csv"},
        {"pde", "evolve the radial PDE and write observables and snapshots"},
        {"cone-check", "evolve the PDE and report forward-cone containment"},
        {"sweep", "evaluate the certificate over the sweep grid"},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c[0], c[1]);
        sub->add_option("--scenario", opt.scenario_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides run.output)");
        sub->add_option("--workers", opt.workers, "sweep worker threads (default: $FLRW_BLOWUP_WORKERS or 1)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--grid-h", grid_h, "radial grid spacing")->check(CLI::PositiveNumber);
        sub->add_option("--t-end", t_end, "final time")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? flrw::kExitOk : flrw::kExitError;
    }
    if (!out_dir.empty()) opt.out_dir = out_dir;
    if (grid_h > 0.0) opt.grid_h = grid_h;
    if (t_end > 0.0) opt.t_end = t_end;
    const std::string command = app.get_subcommands().front()->get_name();
    return flrw::run_command(command, opt, std::cout, std::cerr);
}
