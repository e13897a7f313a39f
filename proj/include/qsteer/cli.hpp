#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

namespace qsteer::cli {

using nlohmann::json;

struct RunOptions {
    std::filesystem::path out_dir = "out";
    std::optional<std::uint64_t> seed;        // overrides config seed
    bool emit_schedule = false;
    std::optional<int> verify_truncation;     // overrides derived truncations
};

struct RunResult {
    int exit_code = 0;       // 0 ok, 1 task invariants failed, 2 usage error
    json report;
};

/// Execute one task described by the config (fields: task, seed, model, plus
/// task parameters). Writes report.json and task artifacts into out_dir; a
/// task failure leaves partial artifacts plus a FAILED marker file.
RunResult run_task(const json& config, const RunOptions& opts);

/// Run every config of a sweep (a "runs" array, or "base" + "vary" lists) in
/// parallel and aggregate key metrics into sweep.csv, ordered by config
/// index. Per-run failures become status rows, never abort the sweep.
RunResult run_sweep(const json& config, const RunOptions& opts);

/// Entry point used by the command-line tool; `forced_task` overrides the
/// config's task field (subcommand name).
int dispatch(const std::string& forced_task, const json& config,
             const RunOptions& opts);

}  // namespace qsteer::cli
