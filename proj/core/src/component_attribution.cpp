#include "agentattr/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "agentattr/errors.hpp"
#include "internal/parallel.hpp"

namespace agentattr {

PrefixSupportVector prefix_supports(const Trajectory& traj, Scorer& scorer,
                                    const RenderTemplate& tmpl, int concurrency) {
    const std::size_t n = traj.size();
    PrefixSupportVector out;
    out.psi.assign(n + 1, 0.0);
    internal::for_each_index(n + 1, concurrency, [&](std::size_t idx) {
        const PrefixIndex upto = idx == 0 ? kEmptyPrefix : PrefixIndex(idx - 1);
        ScoreRequest req{render_context(traj, upto, tmpl), traj.target_action};
        try {
            out.psi[idx] = scorer.score(req).total_logprob;
        } catch (const ScorerError& e) {
            throw ScorerError("prefix " + std::to_string(idx) + ": " + e.what());
        }
    });
    return out;
}

GainVector temporal_gains(const PrefixSupportVector& psi) {
    if (psi.psi.size() < 2) {
        throw std::invalid_argument("temporal_gains: need at least 2 prefix scores, got " +
                                    std::to_string(psi.psi.size()));
    }
    GainVector out;
    out.gains.reserve(psi.psi.size() - 1);
    for (std::size_t i = 1; i < psi.psi.size(); ++i) {
        out.gains.push_back(psi.psi[i] - psi.psi[i - 1]);
    }
    return out;
}

ComponentRanking rank_components(const GainVector& gains, const SelectionPolicy& policy) {
    ComponentRanking out;
    out.ranking.reserve(gains.gains.size());
    for (std::size_t i = 0; i < gains.gains.size(); ++i) {
        out.ranking.push_back({i, gains.gains[i]});
    }
    std::sort(out.ranking.begin(), out.ranking.end(),
              [](const RankedComponent& a, const RankedComponent& b) {
                  if (a.gain != b.gain) return a.gain > b.gain;
                  return a.component_index < b.component_index;
              });

    if (policy.z_threshold) {
        const std::size_t n = gains.gains.size();
        double mean = 0.0;
        for (double g : gains.gains) mean += g;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double g : gains.gains) var += (g - mean) * (g - mean);
        var /= static_cast<double>(n);
        const double sd = std::sqrt(var);
        for (const auto& rc : out.ranking) {
            const double z = sd > 0.0 ? (rc.gain - mean) / sd : 0.0;
            if (z > *policy.z_threshold) out.selected.push_back(rc.component_index);
        }
    } else {
        const std::size_t k = std::min(policy.top_k, out.ranking.size());
        for (std::size_t r = 0; r < k; ++r) {
            out.selected.push_back(out.ranking[r].component_index);
        }
    }
    return out;
}

}  // namespace agentattr
