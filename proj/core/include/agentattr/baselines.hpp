#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "agentattr/scorer.hpp"
#include "agentattr/sentence_attribution.hpp"
#include "agentattr/trajectory.hpp"

namespace agentattr {

// Keep/drop bit per sentence of one component (true = kept).
struct AblationMask {
    std::vector<bool> bits;

    std::size_t count_kept() const;
    static AblationMask all_kept(std::size_t n);
};

struct SurrogateFit {
    std::vector<double> weights;
    double intercept = 0.0;
    double lambda = 0.0;
    std::size_t num_samples = 0;
    double rmse = 0.0;
    int sweeps = 0;
};

struct ContextCiteConfig {
    std::size_t num_samples = 64;
    double keep_prob = 0.5;
    double lambda = 0.01;
    std::uint64_t seed = 0;
    // Score all 2^N_i masks instead of sampling (for small components).
    bool full_enumeration = false;
};

// Leave-one-out sentence scores for component i: likelihood drop after
// removing each sentence. Same code path as prob_drop, so the values are
// bit-identical to it.
std::vector<double> loo_attribution(const Trajectory& traj, std::size_t i,
                                    Scorer& scorer, const RenderTemplate& tmpl = {},
                                    const SegmenterConfig& seg = {});

// Independent Bernoulli(keep_prob) bits, reproducible from the seed.
// Sample 0 is always the all-kept mask.
std::vector<AblationMask> sample_masks(std::size_t n_sentences, std::size_t num_samples,
                                       double keep_prob, std::uint64_t seed);

std::vector<AblationMask> enumerate_masks(std::size_t n_sentences);

// Renders the prefix with component i holding only the kept sentences
// (space-joined) and scores the target action.
double surrogate_score(const Trajectory& traj, std::size_t i, const AblationMask& mask,
                       Scorer& scorer, const RenderTemplate& tmpl = {},
                       const SegmenterConfig& seg = {});

// Coordinate-descent lasso on mask bits (0/1 design) with objective
//   (1/2m) * ||y - Xw - b||^2 + lambda * ||w||_1.
// Converges when the largest coordinate update drops below 1e-8; throws
// NumericsError after 10,000 sweeps or for all-identical masks.
SurrogateFit fit_lasso(const std::vector<AblationMask>& masks,
                       const std::vector<double>& scores, double lambda);

// Largest KKT violation of a fit: for zero weights |grad| may exceed
// lambda, for active weights grad must equal -+lambda. Zero at an exact
// optimum.
double lasso_kkt_violation(const SurrogateFit& fit,
                           const std::vector<AblationMask>& masks,
                           const std::vector<double>& scores);

// sample_masks -> surrogate_score -> fit_lasso; the fitted weights are the
// per-sentence attributions.
SurrogateFit contextcite_attribution(const Trajectory& traj, std::size_t i,
                                     Scorer& scorer, const ContextCiteConfig& cfg = {},
                                     const RenderTemplate& tmpl = {},
                                     const SegmenterConfig& seg = {},
                                     int concurrency = 4);

}  // namespace agentattr
