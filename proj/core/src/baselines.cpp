#include "agentattr/baselines.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "internal/parallel.hpp"

namespace agentattr {

std::size_t AblationMask::count_kept() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

AblationMask AblationMask::all_kept(std::size_t n) {
    return AblationMask{std::vector<bool>(n, true)};
}

std::vector<double> loo_attribution(const Trajectory& traj, std::size_t i, Scorer& scorer,
                                    const RenderTemplate& tmpl, const SegmenterConfig& seg) {
    const auto sentences = segment_sentences(traj.components[i], seg);
    std::vector<double> out(sentences.size());
    for (std::size_t j = 0; j < sentences.size(); ++j) {
        out[j] = prob_drop(traj, i, j, scorer, tmpl, seg);
    }
    return out;
}

std::vector<AblationMask> sample_masks(std::size_t n_sentences, std::size_t num_samples,
                                       double keep_prob, std::uint64_t seed) {
    if (num_samples < 1) throw std::invalid_argument("sample_masks: num_samples must be >= 1");
    if (!(keep_prob > 0.0 && keep_prob < 1.0)) {
        throw std::invalid_argument("sample_masks: keep_prob must be in (0, 1)");
    }
    std::vector<AblationMask> masks;
    masks.reserve(num_samples);
    masks.push_back(AblationMask::all_kept(n_sentences));

    std::mt19937_64 rng(seed);
    // fixed bit-to-uniform mapping; distribution classes vary across stdlibs
    auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (std::size_t s = 1; s < num_samples; ++s) {
        AblationMask m;
        m.bits.resize(n_sentences);
        for (std::size_t j = 0; j < n_sentences; ++j) m.bits[j] = uniform() < keep_prob;
        masks.push_back(std::move(m));
    }
    return masks;
}

std::vector<AblationMask> enumerate_masks(std::size_t n_sentences) {
    if (n_sentences > 20) {
        throw std::invalid_argument("enumerate_masks: 2^" + std::to_string(n_sentences) +
                                    " masks is too many");
    }
    const std::size_t total = std::size_t{1} << n_sentences;
    std::vector<AblationMask> masks;
    masks.reserve(total);
    for (std::size_t code = 0; code < total; ++code) {
        AblationMask m;
        m.bits.resize(n_sentences);
        for (std::size_t j = 0; j < n_sentences; ++j) m.bits[j] = (code >> j) & 1;
        masks.push_back(std::move(m));
    }
    return masks;
}

double surrogate_score(const Trajectory& traj, std::size_t i, const AblationMask& mask,
                       Scorer& scorer, const RenderTemplate& tmpl,
                       const SegmenterConfig& seg) {
    const auto sentences = segment_sentences(traj.components[i], seg);
    if (mask.bits.size() != sentences.size()) {
        throw std::invalid_argument("surrogate_score: mask length " +
                                    std::to_string(mask.bits.size()) + " != sentence count " +
                                    std::to_string(sentences.size()));
    }
    std::string kept;
    for (std::size_t j = 0; j < sentences.size(); ++j) {
        if (!mask.bits[j]) continue;
        if (!kept.empty()) kept += ' ';
        kept += sentences[j].text;
    }
    const std::string ctx = render_with_component_text(traj, i, kept, tmpl);
    return scorer.score({ctx, traj.target_action}).total_logprob;
}

SurrogateFit contextcite_attribution(const Trajectory& traj, std::size_t i, Scorer& scorer,
                                     const ContextCiteConfig& cfg, const RenderTemplate& tmpl,
                                     const SegmenterConfig& seg, int concurrency) {
    const auto sentences = segment_sentences(traj.components[i], seg);
    const auto masks = cfg.full_enumeration
                           ? enumerate_masks(sentences.size())
                           : sample_masks(sentences.size(), cfg.num_samples, cfg.keep_prob,
                                          cfg.seed);
    std::vector<double> scores(masks.size());
    internal::for_each_index(masks.size(), concurrency, [&](std::size_t k) {
        scores[k] = surrogate_score(traj, i, masks[k], scorer, tmpl, seg);
    });
    return fit_lasso(masks, scores, cfg.lambda);
}

}  // namespace agentattr
