#include "cli/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace cli = hyperlab::cli;

int main(int argc, char** argv)
{
    CLI::App app{"hyperlab: batch runner for the weighted hyperbolic Cauchy problem experiments"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "validate a JSON config and run the experiment");
    std::string config_path;
    cli::RunOptions opt;
    unsigned threads = 0;
    std::string out_dir;
    double cfl = 0.0, grading = 0.0;
    run->add_option("config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    auto* threads_opt = run->add_option("--threads", threads, "cap on worker threads")->check(CLI::PositiveNumber);
    auto* out_opt = run->add_option("--out", out_dir, "output directory (overrides HYPERLAB_OUT and the config)");
    auto* cfl_opt = run->add_option("--cfl", cfl, "Courant number for solver kinds")->check(CLI::Range(0.0, 1.0));
    auto* grading_opt = run->add_option("--grading", grading, "time-mesh grading exponent for solver kinds")
                            ->check(CLI::Range(1.0, 1e6));
    run->add_flag("--snapshots", opt.snapshots, "persist solver snapshots as binary grid files");
    run->add_flag("-q,--quiet", opt.quiet, "print nothing on success");

    auto* list = app.add_subcommand("list", "print the experiment catalog");
    bool as_json = false;
    std::string schema_of;
    list->add_flag("--json", as_json, "emit the catalog with full schemas as JSON");
    list->add_option("--schema", schema_of, "emit the JSON schema of one kind");

    CLI11_PARSE(app, argc, argv);

    if (*list) {
        if (!schema_of.empty()) {
            const auto* k = cli::find_kind(schema_of);
            if (!k) {
                std::cerr << "unknown kind '" << schema_of << "'\n";
                return static_cast<int>(cli::ExitCode::validation);
            }
            std::cout << k->schema.dump(2) << '\n';
        } else if (as_json) {
            std::cout << cli::catalog_json().dump(2) << '\n';
        } else {
            for (const auto& k : cli::catalog())
                std::cout << k.name << std::string(18 - std::min<std::size_t>(k.name.size(), 17), ' ') << k.summary << '\n';
        }
        return 0;
    }

    if (*threads_opt)
        opt.threads = threads;
    if (*out_opt)
        opt.out = out_dir;
    if (*cfl_opt)
        opt.cfl = cfl;
    if (*grading_opt)
        opt.grading = grading;

    const auto outcome = cli::run_config_file(config_path, opt);
    if (outcome.code == cli::ExitCode::ok) {
        if (!opt.quiet)
            std::cout << "ok: " << outcome.message << " [" << outcome.out_dir.string() << "]\n";
    } else {
        const cli::json record = {{"status", cli::to_string(outcome.code)},
                                  {"exit_code", static_cast<int>(outcome.code)},
                                  {"message", outcome.message},
                                  {"errors", outcome.errors.is_null() ? cli::json::array() : outcome.errors},
                                  {"output_dir", outcome.out_dir.string()}};
        std::cerr << record.dump() << '\n';
    }
    return static_cast<int>(outcome.code);
}
