#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "agentattr/ngram.hpp"
#include "agentattr/trajectory.hpp"

namespace agentattr {

struct GroundTruth {
    std::string case_id;
    std::size_t component_index = 0;
    std::set<std::size_t> sentence_indices;  // non-empty
};

// 1 iff one of the first k ranked sentences is in the ground-truth set.
// k past the end of the ranking truncates.
int hit_at_k(const std::vector<std::size_t>& ranked, const GroundTruth& gt, std::size_t k);

struct PerCaseHits {
    std::string case_id;
    std::map<std::size_t, int> component_hits;               // k -> 0/1
    std::map<std::string, std::map<std::size_t, int>> method_hits;  // method -> k -> 0/1
};

struct EvalResult {
    // method -> k -> mean hit over cases
    std::map<std::string, std::map<std::size_t, double>> methods;
    std::map<std::size_t, double> component;  // k -> mean component hit
    std::vector<PerCaseHits> per_case;
    std::size_t num_cases = 0;
};

EvalResult aggregate(const std::vector<PerCaseHits>& hits, const std::vector<std::size_t>& ks);

// Parses {"case_id", "component_index", "sentence_indices"} and validates
// the indices against the segmented trajectory.
GroundTruth load_ground_truth(std::string_view raw_json);
GroundTruth load_ground_truth_checked(std::string_view raw_json, const Trajectory& traj,
                                      const SegmenterConfig& seg = {});

std::string ground_truth_to_json(const GroundTruth& gt, int indent = 2);

// ---- synthetic planted-driver cases ---------------------------------------

struct SynthConfig {
    std::uint64_t seed = 42;
    std::size_t num_cases = 50;
    std::size_t min_components = 4;
    std::size_t max_components = 8;
    std::size_t min_sentences = 3;   // sentences in the driver component
    std::size_t max_sentences = 6;
    std::uint64_t trigger_strength = 20;  // trigger-bigram multiplicity in the corpus
    int order = 2;
    double alpha = 0.1;
};

struct SynthCase {
    Trajectory trajectory;
    GroundTruth ground_truth;
};

struct SynthSuite {
    std::vector<SynthCase> cases;
    std::vector<std::string> corpus;  // reference corpus the model was built from
    NGramModel model;                 // shared across all cases
};

// Builds num_cases trajectories, each with one driver component whose final
// sentence carries a unique trigger token, plus a shared bigram corpus in
// which that token immediately precedes the target action's opening tokens
// with multiplicity trigger_strength. Every emitted case passes a
// sequential brute-force self-check (planted component has the maximal
// gain, planted sentence the maximal drop); failing layouts are redrawn.
// Deterministic in cfg.seed.
SynthSuite generate_suite(const SynthConfig& cfg);

// Single-case view of the suite: (trajectory, ground truth, shared model).
SynthCase generate_synthetic_case(const SynthConfig& cfg, std::size_t case_index);

// True when the driver's trigger token appears nowhere in the trajectory
// outside the planted sentence.
bool trigger_is_unique(const Trajectory& traj, const GroundTruth& gt,
                       const std::string& trigger_token,
                       const SegmenterConfig& seg = {});

}  // namespace agentattr
