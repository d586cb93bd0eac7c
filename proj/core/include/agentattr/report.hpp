#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentattr/attribution.hpp"
#include "agentattr/baselines.hpp"
#include "agentattr/errors.hpp"
#include "agentattr/sentence_attribution.hpp"
#include "agentattr/trajectory.hpp"

namespace agentattr {

struct SentenceEntry {
    SentenceScore score;
    std::string text;
    std::size_t span_begin = 0;
    std::size_t span_end = 0;
};

struct LooEntry {
    std::size_t component_index = 0;
    std::vector<double> scores;
};

struct ContextCiteEntry {
    std::size_t component_index = 0;
    SurrogateFit fit;
};

struct BaselineResults {
    std::vector<LooEntry> loo;
    std::vector<ContextCiteEntry> contextcite;
    ContextCiteConfig contextcite_config;
    bool loo_enabled = false;
    bool contextcite_enabled = false;
};

// Everything one attribution run produced, index-consistent with the
// trajectory. Round-trips losslessly through its JSON schema.
struct AttributionReport {
    std::string tool_version = kVersion;
    std::string scoring_model;
    Trajectory trajectory;
    std::vector<double> psi;       // N+1
    std::vector<double> gains;     // N
    std::vector<RankedComponent> component_ranking;
    std::vector<std::size_t> selected_components;
    std::vector<SentenceEntry> sentence_scores;
    std::vector<SentenceRanking> sentence_rankings;
    std::string hold_mode = "literal";
    std::optional<BaselineResults> baselines;
    std::uint64_t scorer_calls = 0;
    bool cache_enabled = true;
    std::uint64_t seed = 0;
    // Wall-clock is off by default so identical runs emit identical bytes.
    std::optional<double> elapsed_ms;
};

std::string report_to_json(const AttributionReport& report, int indent = 2);
AttributionReport report_from_json(std::string_view raw_json);

// Self-contained static page: components with gain badges, selected ones
// tinted, sentences shaded on a phi gradient with drop/hold/phi hover
// detail, baseline rankings side by side when present. No scripts, no
// external resources.
std::string emit_html(const AttributionReport& report);

}  // namespace agentattr
