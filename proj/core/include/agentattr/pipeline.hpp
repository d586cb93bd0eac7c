#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agentattr/evaluation.hpp"
#include "agentattr/report.hpp"
#include "agentattr/scorer.hpp"

namespace agentattr {

// Exit codes shared by the CLI subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitParse = 3;
inline constexpr int kExitScorer = 4;
inline constexpr int kExitIo = 5;

struct RunConfig {
    std::string trajectory_path;
    ScorerConfig scorer;
    RenderTemplate tmpl;
    SegmenterConfig segmenter;
    SelectionPolicy selection;
    HoldMode hold_mode = HoldMode::Literal;
    bool run_loo = false;
    bool run_contextcite = false;
    ContextCiteConfig contextcite;
    std::string out_path;            // report JSON (required)
    std::optional<std::string> html_path;
    std::uint64_t seed = 0;
    int concurrency = 4;
    bool emit_timing = false;
};

struct EvalConfig {
    std::string cases_dir;
    std::string gt_dir;
    std::vector<std::string> methods;  // drop_hold | loo | contextcite
    std::vector<std::size_t> ks = {1, 3, 5};
    std::string out_path;
    std::string model_path;  // defaults to <cases_dir>/model.json
    SelectionPolicy selection;
    HoldMode hold_mode = HoldMode::Literal;
    ContextCiteConfig contextcite;
    std::uint64_t seed = 0;
    int concurrency = 4;
};

struct SynthOutConfig {
    SynthConfig synth;
    std::string out_dir;
};

// Level 1 (temporal gains) then Level 2 (drop/hold) plus optional
// baselines, against an already-constructed scorer.
AttributionReport run_attribution(const Trajectory& traj, Scorer& scorer,
                                  const RunConfig& cfg);

// Subcommand engines. Each returns a process exit code and reports
// failures on stderr; output files are written atomically (write to a
// temp name, then rename), so a failed run leaves no partial file.
int cmd_attribute(const RunConfig& cfg);
int cmd_eval(const EvalConfig& cfg);
int cmd_synth(const SynthOutConfig& cfg);

// Plain-text Hit@k table, one row per method.
std::string format_eval_table(const EvalResult& result);
std::string eval_result_to_json(const EvalResult& result, int indent = 2);

// Shared by cmd_eval and tests: run every requested method over paired
// case/ground-truth files and aggregate.
EvalResult evaluate_cases(const std::vector<SynthCase>& cases, Scorer& scorer,
                          const EvalConfig& cfg);

void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace agentattr
