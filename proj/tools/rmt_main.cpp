#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "rmt/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"finite-element laboratory for the thermoelastic plate system"};
    app.require_subcommand(1);

    std::string config_path, out_dir, mode = "stokes", csv_path;
    double t_start = 0.0;

    CLI::App* sim = app.add_subcommand("simulate", "run a time-domain simulation");
    sim->add_option("--config", config_path, "JSON config path")->required();
    sim->add_option("--out", out_dir, "output directory (default: config output_dir)");

    CLI::App* eig = app.add_subcommand("eigen", "eigenvalue studies");
    eig->add_option("--config", config_path, "JSON config path")->required();
    eig->add_option("--mode", mode, "stokes|korn|laplace");
    eig->add_option("--out", out_dir, "output directory");

    CLI::App* bog = app.add_subcommand("bogovskii", "divergence-inversion report");
    bog->add_option("--config", config_path, "JSON config path")->required();
    bog->add_option("--out", out_dir, "output directory");

    CLI::App* fit = app.add_subcommand("decay-fit", "fit a decay rate from a CSV");
    fit->add_option("csv", csv_path, "timeseries CSV path")->required();
    fit->add_option("--t-start", t_start, "fit window start time");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (fit->parsed()) return rmt::run_decay_fit(csv_path, t_start);

    rmt::RunConfig cfg;
    try {
        cfg = rmt::load_config(config_path);
    } catch (const rmt::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    std::string out = out_dir.empty() ? cfg.output_dir : out_dir;

    if (sim->parsed()) return rmt::run_simulate(cfg, out);
    if (eig->parsed()) return rmt::run_eigen(cfg, mode, out);
    if (bog->parsed()) return rmt::run_bogovskii(cfg, out);
    return 2;
}
