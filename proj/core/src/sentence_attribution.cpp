#include "agentattr/sentence_attribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "agentattr/errors.hpp"
#include "internal/parallel.hpp"

namespace agentattr {

namespace {

std::string literal_hold_context(const Trajectory& traj, std::size_t i,
                                 const std::string& sentence_text,
                                 const RenderTemplate& tmpl) {
    return tmpl.header(traj.components[i].kind) + sentence_text;
}

}  // namespace

std::string hold_mode_name(HoldMode m) {
    return m == HoldMode::Literal ? "literal" : "contextual";
}

double prob_drop(const Trajectory& traj, std::size_t i, std::size_t j, Scorer& scorer,
                 const RenderTemplate& tmpl, const SegmenterConfig& seg) {
    const double full =
        scorer.score({render_context(traj, i, tmpl), traj.target_action}).total_logprob;
    const double ablated =
        scorer.score({ablate_sentence(traj, i, j, tmpl, seg), traj.target_action})
            .total_logprob;
    return full - ablated;
}

double prob_hold(const Trajectory& traj, std::size_t i, std::size_t j, Scorer& scorer,
                 const RenderTemplate& tmpl, const SegmenterConfig& seg, HoldMode mode) {
    const auto sentences = segment_sentences(traj.components[i], seg);
    if (j >= sentences.size()) {
        throw std::out_of_range("prob_hold: sentence index " + std::to_string(j) +
                                " out of range");
    }
    const std::string minuend_ctx =
        mode == HoldMode::Literal
            ? literal_hold_context(traj, i, sentences[j].text, tmpl)
            : render_with_component_text(traj, i, sentences[j].text, tmpl);
    const double alone = scorer.score({minuend_ctx, traj.target_action}).total_logprob;
    const double full =
        scorer.score({render_context(traj, i, tmpl), traj.target_action}).total_logprob;
    return alone - full;
}

double combined_phi(double drop, double hold) {
    if (!std::isfinite(drop) || !std::isfinite(hold)) {
        throw NumericsError("combined_phi: non-finite input");
    }
    return drop + hold;
}

std::vector<SentenceScore> score_sentences(const Trajectory& traj, std::size_t i,
                                           Scorer& scorer,
                                           const SentenceAttributionOptions& opts) {
    if (i >= traj.size()) {
        throw std::out_of_range("score_sentences: component index " + std::to_string(i) +
                                " out of range");
    }
    const auto sentences = segment_sentences(traj.components[i], opts.segmenter);
    const double full =
        scorer.score({render_context(traj, i, opts.tmpl), traj.target_action}).total_logprob;

    std::vector<SentenceScore> out(sentences.size());
    internal::for_each_index(sentences.size(), opts.concurrency, [&](std::size_t j) {
        const double ablated =
            scorer.score({ablate_sentence(traj, i, j, opts.tmpl, opts.segmenter),
                          traj.target_action})
                .total_logprob;
        const std::string hold_ctx =
            opts.hold_mode == HoldMode::Literal
                ? literal_hold_context(traj, i, sentences[j].text, opts.tmpl)
                : render_with_component_text(traj, i, sentences[j].text, opts.tmpl);
        const double alone = scorer.score({hold_ctx, traj.target_action}).total_logprob;

        SentenceScore s;
        s.component_index = i;
        s.sentence_index = j;
        s.drop = full - ablated;
        s.hold = alone - full;
        s.phi = combined_phi(s.drop, s.hold);
        out[j] = s;
    });
    return out;
}

SentenceRanking rank_sentences(const std::vector<SentenceScore>& scores,
                               std::size_t evidence_m) {
    SentenceRanking out;
    if (scores.empty()) return out;
    out.component_index = scores.front().component_index;
    std::vector<std::size_t> perm(scores.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a].phi != scores[b].phi) return scores[a].phi > scores[b].phi;
        return scores[a].sentence_index < scores[b].sentence_index;
    });
    out.order.reserve(perm.size());
    for (std::size_t p : perm) out.order.push_back(scores[p].sentence_index);
    const std::size_t m = std::min(evidence_m, out.order.size());
    out.evidence.assign(out.order.begin(), out.order.begin() + static_cast<std::ptrdiff_t>(m));
    return out;
}

}  // namespace agentattr
