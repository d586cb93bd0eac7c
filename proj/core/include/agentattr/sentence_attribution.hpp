#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "agentattr/scorer.hpp"
#include "agentattr/trajectory.hpp"

namespace agentattr {

// Conditioning of the hold minuend. Literal scores the sentence alone
// (with its role header) as the whole context; Contextual keeps components
// before i and only sentence j inside component i.
enum class HoldMode { Literal, Contextual };

std::string hold_mode_name(HoldMode m);

struct SentenceScore {
    std::size_t component_index = 0;
    std::size_t sentence_index = 0;
    double drop = 0.0;
    double hold = 0.0;
    double phi = 0.0;  // always exactly drop + hold
};

// Descending phi within one component, ties toward the smaller sentence
// index. `evidence` holds the top-m sentence indices.
struct SentenceRanking {
    std::size_t component_index = 0;
    std::vector<std::size_t> order;     // all N_i sentences
    std::vector<std::size_t> evidence;  // top-m prefix of `order`
};

struct SentenceAttributionOptions {
    HoldMode hold_mode = HoldMode::Literal;
    std::size_t evidence_m = 5;
    int concurrency = 4;
    SegmenterConfig segmenter;
    RenderTemplate tmpl;
};

// Necessity: score of the full prefix through component i minus the score
// with sentence j ablated.
double prob_drop(const Trajectory& traj, std::size_t i, std::size_t j,
                 Scorer& scorer, const RenderTemplate& tmpl = {},
                 const SegmenterConfig& seg = {});

// Sufficiency: score under the sentence-alone (or keep-only-this-sentence)
// context minus the full-prefix score.
double prob_hold(const Trajectory& traj, std::size_t i, std::size_t j,
                 Scorer& scorer, const RenderTemplate& tmpl = {},
                 const SegmenterConfig& seg = {},
                 HoldMode mode = HoldMode::Literal);

// phi = drop + hold. Throws NumericsError on non-finite input.
double combined_phi(double drop, double hold);

// Drop/hold/phi for every sentence of component i. Issues exactly
// 2*N_i + 1 scorer calls (1 full prefix, N_i ablations, N_i holds);
// per-sentence calls fan out over at most opts.concurrency threads.
std::vector<SentenceScore> score_sentences(const Trajectory& traj, std::size_t i,
                                           Scorer& scorer,
                                           const SentenceAttributionOptions& opts = {});

SentenceRanking rank_sentences(const std::vector<SentenceScore>& scores,
                               std::size_t evidence_m = 5);

}  // namespace agentattr
