#include "cli.hpp"
#include "experiments.hpp"

#include <hyperlab/errors.hpp>
#include <hyperlab/parallel.hpp>

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#ifndef HYPERLAB_VERSION
#define HYPERLAB_VERSION "0.0.0"
#endif

namespace hyperlab::cli {

namespace fs = std::filesystem;

std::string_view to_string(ExitCode c)
{
    switch (c) {
    case ExitCode::ok:
        return "ok";
    case ExitCode::internal:
        return "internal-error";
    case ExitCode::validation:
        return "validation-error";
    case ExitCode::inconclusive:
        return "inconclusive";
    case ExitCode::numerical:
        return "numerical-failure";
    }
    return "?";
}

std::string sha256_hex(std::string_view bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string utc_timestamp(std::chrono::system_clock::time_point tp)
{
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::optional<fs::path> resolve_out_dir(const RunOptions& opt, const json& doc, const std::string& kind)
{
    if (opt.out)
        return *opt.out;
    if (const char* env = std::getenv("HYPERLAB_OUT"); env && *env)
        return fs::path(env);
    if (doc.is_object() && doc.contains("output_dir") && doc["output_dir"].is_string()
        && !doc["output_dir"].get<std::string>().empty())
        return fs::path(doc["output_dir"].get<std::string>());
    if (!kind.empty())
        return fs::path("hyperlab-out") / kind;
    return std::nullopt;
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

RunOutcome reject(RunOutcome out, ExitCode code, json errors, std::string message, const std::string& kind)
{
    out.code = code;
    out.errors = std::move(errors);
    out.message = std::move(message);
    // The error record is best effort: the output directory may itself be the problem.
    if (!out.out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(out.out_dir, ec);
        if (!ec) {
            try {
                write_json(out.out_dir / "error.json",
                           {{"status", to_string(code)}, {"kind", kind}, {"message", out.message}, {"errors", out.errors}});
                out.outputs.push_back("error.json");
            } catch (const std::exception&) {
            }
        }
    }
    return out;
}

json issue(const std::string& path, const std::string& message) { return {{"path", path}, {"message", message}}; }

} // namespace

RunOutcome run_config(const std::string& raw_text, const RunOptions& opt)
{
    RunOutcome out;
    const auto started = std::chrono::system_clock::now();
    const auto clock0 = std::chrono::steady_clock::now();

    json doc;
    try {
        doc = json::parse(raw_text);
    } catch (const json::parse_error& e) {
        if (auto dir = resolve_out_dir(opt, json(), ""))
            out.out_dir = *dir;
        return reject(out, ExitCode::validation, json::array({issue("/", e.what())}), "config is not valid JSON", "");
    }
    std::string kind = doc.is_object() && doc.contains("kind") && doc["kind"].is_string() ? doc["kind"].get<std::string>() : "";
    const ExperimentKind* entry = find_kind(kind);
    if (auto dir = resolve_out_dir(opt, doc, entry ? kind : ""))
        out.out_dir = *dir;
    if (!entry) {
        json known = json::array();
        for (const auto& k : catalog())
            known.push_back(k.name);
        return reject(out, ExitCode::validation, json::array({issue("/kind", "expected one of " + known.dump())}),
                      "unknown or missing experiment kind", kind);
    }

    const auto issues = validate(entry->schema, doc);
    if (!issues.empty()) {
        json errs = json::array();
        for (const auto& i : issues)
            errs.push_back(issue(i.path, i.message));
        return reject(out, ExitCode::validation, errs, "config does not match the " + kind + " schema", kind);
    }
    const json config = apply_defaults(entry->schema, doc);

    std::error_code ec;
    fs::create_directories(out.out_dir, ec);
    if (ec)
        return reject(out, ExitCode::validation, json::array({issue("/output_dir", ec.message())}),
                      "output directory is not writable", kind);

    if (opt.threads)
        set_max_threads(*opt.threads);

    ExperimentContext ctx{out.out_dir, opt, utc_timestamp(started)};
    try {
        auto res = run_experiment(config, ctx);
        out.summary = std::move(res.summary);
        out.outputs = std::move(res.outputs);
        out.message = std::move(res.message);
        out.code = res.verdict == Verdict::ok             ? ExitCode::ok
                   : res.verdict == Verdict::inconclusive ? ExitCode::inconclusive
                                                          : ExitCode::numerical;
    } catch (const ValidationError& e) {
        return reject(out, ExitCode::validation, json::array({issue("/", e.what())}), e.what(), kind);
    } catch (const NumericalError& e) {
        out = reject(out, ExitCode::numerical, json::array({issue("/", e.what())}), e.what(), kind);
    } catch (const std::exception& e) {
        return reject(out, ExitCode::internal, json::array({issue("/", e.what())}), e.what(), kind);
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();
    const json manifest = {{"kind", kind},
                           {"tool", "hyperlab"},
                           {"version", HYPERLAB_VERSION},
                           {"config_sha256", sha256_hex(raw_text)},
                           {"normalized_config_sha256", sha256_hex(config.dump())},
                           {"config", config},
                           {"seed", config["seed"]},
                           {"threads", max_threads()},
                           {"started_at", utc_timestamp(started)},
                           {"wall_time_seconds", wall},
                           {"exit_code", static_cast<int>(out.code)},
                           {"status", to_string(out.code)},
                           {"message", out.message},
                           {"summary", out.summary},
                           {"outputs", out.outputs}};
    try {
        write_json(out.out_dir / "manifest.json", manifest);
    } catch (const std::exception& e) {
        out.code = ExitCode::internal;
        out.message = e.what();
    }
    return out;
}

RunOutcome run_config_file(const fs::path& path, const RunOptions& opt)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        RunOutcome out;
        out.code = ExitCode::validation;
        out.message = "cannot read config " + path.string();
        out.errors = json::array({issue("/", out.message)});
        return out;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return run_config(ss.str(), opt);
}

} // namespace hyperlab::cli
