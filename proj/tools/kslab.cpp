/**
 * @file kslab.cpp
 * @brief Command line entry point: run, compare and audit.
 *
 * Exit codes: 0 success, 1 run failure or compare differences above tolerance,
 * 2 invalid config or unusable inputs.
 */
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "kslab/error.hpp"
#include "kslab/experiment.hpp"
#include "kslab/io.hpp"
#include "kslab/parallel.hpp"

namespace {

int resolve_workers(int flag_value) {
    if (flag_value > 0) return flag_value;
    return kslab::workers_from_env(1);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chemotaxis-logistic simulation and analysis runs"};
    app.require_subcommand(1);

    std::string config_path, out_dir, dir1, dir2;
    int workers = 0;
    double tolerance = 0.0;

    auto* run = app.add_subcommand("run", "Run the experiment described by a config");
    run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory (overrides the config's out key)");
    run->add_option("--workers", workers, "Worker threads (default: KSLAB_WORKERS or 1)")->check(CLI::PositiveNumber);

    auto* audit = app.add_subcommand("audit", "Print the closed-form constants of a config's model");
    audit->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    audit->add_option("--out", out_dir, "Also write an oracle-audit run directory here");

    auto* compare = app.add_subcommand("compare", "Diff the reports of two run directories");
    compare->add_option("dir1", dir1, "First run directory")->required();
    compare->add_option("dir2", dir2, "Second run directory")->required();
    compare->add_option("--tolerance", tolerance, "Largest absolute difference accepted")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            const auto cfg = kslab::load_experiment(config_path);
            const auto outcome = kslab::run_experiment(cfg, out_dir, resolve_workers(workers));
            if (!outcome.ok) {
                std::cerr << "run failed: " << outcome.error << "\n";
                std::cout << outcome.dir << " failed " << outcome.content_hash << "\n";
                return 1;
            }
            for (const auto& [k, v] : outcome.summary) std::cout << k << " = " << kslab::format_number(v) << "\n";
            std::cout << outcome.dir << " ok " << outcome.content_hash << "\n";
            return 0;
        }
        if (audit->parsed()) {
            auto cfg = kslab::load_experiment(config_path);
            std::cout << "quantity,value\n";
            for (const auto& [k, v] : kslab::audit_table(cfg)) std::cout << k << "," << kslab::format_number(v) << "\n";
            if (!out_dir.empty()) {
                cfg.kind = kslab::ExperimentKind::oracle_audit;
                const auto outcome = kslab::run_experiment(cfg, out_dir, 1);
                if (!outcome.ok) {
                    std::cerr << "audit failed: " << outcome.error << "\n";
                    return 1;
                }
            }
            return 0;
        }
        const auto diff = kslab::compare_runs(dir1, dir2);
        for (const auto& n : diff.notes) std::cout << "note: " << n << "\n";
        for (const auto& e : diff.entries)
            std::cout << e.file << " " << e.column << " max_abs=" << kslab::format_number(e.max_abs)
                      << " max_rel=" << kslab::format_number(e.max_rel) << " rows=" << e.rows << "\n";
        if (diff.empty()) std::cout << "identical\n";
        return diff.within(tolerance) ? 0 : 1;
    } catch (const kslab::PreconditionError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const kslab::FormatError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
