#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "rholab/config.hpp"
#include "rholab/experiments.hpp"
#include "rholab/parallel.hpp"
#include "rholab/tables.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "rholab: quantitative boundary-regularity experiments for the "
        "pluripotential envelope on lattice domains"};

    std::string config_path;
    std::string out_dir = "out";
    int workers = 0;
    double tol = 0.0;
    long max_iter = 0;

    app.add_option("--config", config_path, "experiment configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (default: out)");
    app.add_option("--workers", workers,
                   "worker thread count (results are identical for any value)")
        ->check(CLI::PositiveNumber);
    app.add_option("--tol", tol, "override run.tol from the config")
        ->check(CLI::PositiveNumber);
    app.add_option("--max-iter", max_iter, "override run.max_iter from the config")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (workers > 0) rholab::set_global_workers(workers);

        rholab::ConfigMap map = rholab::ConfigMap::parse_file(config_path);
        if (tol > 0.0) map.override_value("run.tol", rholab::format_g17(tol));
        if (max_iter > 0)
            map.override_value("run.max_iter", std::to_string(max_iter));
        const rholab::ExperimentConfig cfg = rholab::resolve_config(map);

        const rholab::ExperimentResult res = rholab::run_experiment(cfg, out_dir);
        std::fputs(res.summary.c_str(), stdout);
        return res.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
