#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "balfield/experiments.hpp"
#include "balfield/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"balanced fourth-order interface engine"};
    app.name("balance-field");

    std::string experiment;
    std::string config_path;
    std::string out_dir;
    int snapshots = -1;
    app.add_option("experiment", experiment,
                   "gl-shrink | balanced-stasis | profile-recovery | "
                   "reinit-bench | oracle-report | compare")
        ->required();
    app.add_option("--config", config_path, "experiment config file")
        ->required();
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--snapshots", snapshots,
                   "write a field snapshot every N steps (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    balfield::ExperimentConfig cfg;
    try {
        cfg = balfield::load_config(config_path);
        cfg.experiment = balfield::experiment_from_name(experiment);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (snapshots >= 0) cfg.snapshot_every = snapshots;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        balfield::ExperimentResult result = balfield::run_experiment(cfg);
        balfield::write_result(result, std::cout);
        std::cout << "\nartifacts under " << cfg.out_dir << ":\n";
        for (const std::string& name : result.artifacts)
            std::cout << "  " << name << '\n';
        return result.pass() ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
