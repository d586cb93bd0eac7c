#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "agentattr/scorer.hpp"
#include "agentattr/trajectory.hpp"

namespace agentattr {

// psi[0] is the score under the empty (system-prompt-only) context;
// psi[i], i >= 1, the score after revealing component i-1. Length N+1.
struct PrefixSupportVector {
    std::vector<double> psi;

    std::size_t num_components() const noexcept {
        return psi.empty() ? 0 : psi.size() - 1;
    }
};

// gains[i] = psi[i+1] - psi[i]: the marginal support component i adds when
// first revealed. Telescopes: sum(gains) == psi[N] - psi[0].
struct GainVector {
    std::vector<double> gains;
};

struct RankedComponent {
    std::size_t component_index = 0;
    double gain = 0.0;
};

// Full descending ranking (ties toward the earlier component) plus the
// subset promoted to sentence-level analysis.
struct ComponentRanking {
    std::vector<RankedComponent> ranking;
    std::vector<std::size_t> selected;  // in rank order
};

// Either keep the k best components or everything with a gain z-score
// above the threshold.
struct SelectionPolicy {
    std::size_t top_k = 3;
    std::optional<double> z_threshold;
};

// Scores every prefix of the trajectory. Calls fan out over at most
// `concurrency` threads; results land by index, so the outcome does not
// depend on completion order. Scorer failures rethrow as ScorerError with
// the failing prefix index attached.
PrefixSupportVector prefix_supports(const Trajectory& traj, Scorer& scorer,
                                    const RenderTemplate& tmpl = {},
                                    int concurrency = 4);

GainVector temporal_gains(const PrefixSupportVector& psi);

ComponentRanking rank_components(const GainVector& gains,
                                 const SelectionPolicy& policy = {});

}  // namespace agentattr
