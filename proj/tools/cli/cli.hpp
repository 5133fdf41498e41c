#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace hyperlab::cli {

using nlohmann::json;

enum class ExitCode : int { ok = 0, internal = 1, validation = 2, inconclusive = 3, numerical = 4 };

std::string_view to_string(ExitCode c);

// ---- schema ----------------------------------------------------------------

struct SchemaIssue {
    std::string path; ///< JSON pointer into the document
    std::string message;
};

/// Validates against the JSON Schema subset used by the catalog: type, properties, required,
/// additionalProperties, enum, const, minimum, maximum, exclusiveMinimum, exclusiveMaximum,
/// items, minItems, maxItems. Any other assertion keyword in the schema is a programming error.
std::vector<SchemaIssue> validate(const json& schema, const json& doc);

/// Fills absent object members that carry a "default", recursing into nested objects.
json apply_defaults(const json& schema, json doc);

// ---- catalog ---------------------------------------------------------------

struct ExperimentKind {
    std::string name;
    std::string summary;
    json schema;
};

const std::vector<ExperimentKind>& catalog();
const ExperimentKind* find_kind(std::string_view name);

/// [{kind, summary, schema}] in catalog order.
json catalog_json();

// ---- running ---------------------------------------------------------------

struct RunOptions {
    std::optional<unsigned> threads;
    std::optional<std::filesystem::path> out; ///< beats HYPERLAB_OUT, which beats the config's output_dir
    std::optional<double> cfl;
    std::optional<double> grading;
    bool snapshots = false;
    bool quiet = false;
};

struct RunOutcome {
    ExitCode code = ExitCode::ok;
    std::filesystem::path out_dir;
    json summary;        ///< kind-specific headline numbers
    json errors;         ///< array of {path, message} on validation failure
    std::string message; ///< one-line status
    std::vector<std::string> outputs;
};

/// Validates, normalises (defaults applied) and runs one experiment. Never throws.
RunOutcome run_config(const std::string& raw_text, const RunOptions& opt);
RunOutcome run_config_file(const std::filesystem::path& path, const RunOptions& opt);

/// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

/// %.17g, the shortest format that round-trips every double.
std::string format_double(double v);

} // namespace hyperlab::cli
