#pragma once

#include "cli.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace hyperlab::cli {

enum class Verdict { ok, inconclusive, failure };

struct ExperimentContext {
    std::filesystem::path out_dir;
    RunOptions options;
    std::string timestamp; ///< run start, stamped into sidecars
};

struct ExperimentResult {
    Verdict verdict = Verdict::ok;
    json summary = json::object();
    std::vector<std::string> outputs; ///< file names relative to out_dir
    std::string message;
};

/// `config` is validated and has defaults applied.
ExperimentResult run_experiment(const json& config, const ExperimentContext& ctx);

} // namespace hyperlab::cli
