#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "agentattr/evaluation.hpp"

namespace agentattr {

namespace {

// All cases share one target so the reference corpus stays small.
constexpr const char* kTargetAction = "execute emergency reroute now";

// Trajectory-only vocabulary: these words never enter the corpus, so they all
// map to <unk> and carry no signal toward the target.
const char* kFillerWords[] = {
    "the",     "relay",  "checked",  "queue",   "status", "nominal", "review",
    "pending", "log",    "entry",    "recorded", "system", "idle",   "routine",
    "scan",    "done",   "anomaly",  "none",    "monitor", "steady", "cycle",
    "update",  "window", "stable",
};
constexpr std::size_t kNumFillerWords = sizeof(kFillerWords) / sizeof(kFillerWords[0]);

const char* kJsonKeys[] = {"status", "risk_level", "region",  "queue_depth",
                           "weather", "phase",      "window_k", "note"};
constexpr std::size_t kNumJsonKeys = sizeof(kJsonKeys) / sizeof(kJsonKeys[0]);

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    return lo + rng() % (hi - lo + 1);
}

std::string random_suffix(std::mt19937_64& rng) {
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::string s;
    for (int i = 0; i < 4; ++i) s += alphabet[bounded(rng, 0, 35)];
    return s;
}

std::string filler_sentence(std::mt19937_64& rng) {
    const std::size_t words = bounded(rng, 3, 6);
    std::string s;
    for (std::size_t w = 0; w < words; ++w) {
        if (!s.empty()) s += ' ';
        s += kFillerWords[bounded(rng, 0, kNumFillerWords - 1)];
    }
    s += '.';
    return s;
}

std::string filler_text(std::mt19937_64& rng, const SynthConfig& cfg) {
    const std::size_t count = bounded(rng, cfg.min_sentences, cfg.max_sentences);
    std::string text;
    for (std::size_t s = 0; s < count; ++s) {
        if (!text.empty()) text += ' ';
        text += filler_sentence(rng);
    }
    return text;
}

// Trigger sentence last and unterminated, so the component's final token is
// the trigger itself: a bigram reference model sees a prefix only through
// its final token.
std::string prose_driver_text(std::mt19937_64& rng, std::size_t n_sentences,
                              const std::string& core) {
    std::string text;
    for (std::size_t s = 0; s + 1 < n_sentences; ++s) {
        if (!text.empty()) text += ' ';
        text += filler_sentence(rng);
    }
    if (!text.empty()) text += ' ';
    text += "escalation signal " + core;
    return text;
}

// Trigger field last for the same reason: the unit's closing quote+brace fuse
// with the core into the component's final token.
std::string json_driver_text(std::mt19937_64& rng, std::size_t n_fields,
                             const std::string& core) {
    std::vector<std::size_t> keys(kNumJsonKeys);
    for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = i;
    for (std::size_t i = keys.size() - 1; i > 0; --i) {
        std::swap(keys[i], keys[bounded(rng, 0, i)]);
    }

    std::string text = "{";
    for (std::size_t f = 0; f < n_fields; ++f) {
        if (f > 0) text += ", ";
        text += '"';
        text += kJsonKeys[keys[f]];
        text += "\": \"";
        if (f + 1 == n_fields) {
            text += core;
        } else {
            text += kFillerWords[bounded(rng, 0, kNumFillerWords - 1)];
            if (bounded(rng, 0, 1)) {
                text += ' ';
                text += kFillerWords[bounded(rng, 0, kNumFillerWords - 1)];
            }
        }
        text += '"';
    }
    text += '}';
    return text;
}

ComponentKind filler_kind(std::size_t i) {
    if (i == 0) return ComponentKind::User;
    switch (i % 3) {
        case 0: return ComponentKind::Tool;
        case 1: return ComponentKind::Thought;
        default: return ComponentKind::Obs;
    }
}

std::string case_id(std::size_t index) {
    std::string digits = std::to_string(index);
    while (digits.size() < 3) digits.insert(digits.begin(), '0');
    return "synth-" + digits;
}

SynthCase build_layout(const SynthConfig& cfg, std::size_t case_index,
                       const std::string& core, std::mt19937_64& rng) {
    const bool json_driver = (case_index % 2 == 1);
    const std::size_t n = bounded(rng, cfg.min_components, cfg.max_components);
    const std::size_t d = bounded(rng, 1, n - 1);
    const std::size_t n_s = bounded(rng, cfg.min_sentences, cfg.max_sentences);

    SynthCase sc;
    sc.trajectory.meta.id = case_id(case_index);
    sc.trajectory.meta.source_model = "ngram-reference";
    sc.trajectory.target_action = kTargetAction;
    for (std::size_t i = 0; i < n; ++i) {
        Component comp;
        comp.index = i;
        if (i == d) {
            comp.kind = json_driver ? ComponentKind::Memory
                                    : (bounded(rng, 0, 1) ? ComponentKind::Tool
                                                          : ComponentKind::Obs);
            comp.text = json_driver ? json_driver_text(rng, n_s, core)
                                    : prose_driver_text(rng, n_s, core);
        } else {
            comp.kind = filler_kind(i);
            comp.text = filler_text(rng, cfg);
        }
        sc.trajectory.components.push_back(std::move(comp));
    }
    sc.ground_truth.case_id = sc.trajectory.meta.id;
    sc.ground_truth.component_index = d;
    sc.ground_truth.sentence_indices = {n_s - 1};
    return sc;
}

// Sequential brute force straight off the count table: the planted component
// must carry the strictly maximal gain and the planted sentence the strictly
// maximal drop.
bool case_passes(const SynthCase& sc, const NGramModel& model,
                 const std::string& trigger_token) {
    const RenderTemplate tmpl;
    const SegmenterConfig seg;
    const Trajectory& traj = sc.trajectory;
    const GroundTruth& gt = sc.ground_truth;

    if (!trigger_is_unique(traj, gt, trigger_token, seg)) return false;

    const auto sentences = segment_sentences(traj.components[gt.component_index], seg);
    const std::size_t j_gt = *gt.sentence_indices.begin();
    if (sentences.size() != j_gt + 1) return false;  // trigger must segment last

    auto score = [&](const std::string& ctx) {
        return model.score_target(ctx, traj.target_action).total_logprob;
    };

    std::vector<double> psi;
    psi.push_back(score(render_context(traj, kEmptyPrefix, tmpl)));
    for (std::size_t i = 0; i < traj.size(); ++i) {
        psi.push_back(score(render_context(traj, i, tmpl)));
    }
    const std::size_t d = gt.component_index;
    const double driver_gain = psi[d + 1] - psi[d];
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (i == d) continue;
        if (psi[i + 1] - psi[i] >= driver_gain) return false;
    }

    const double full = score(render_context(traj, d, tmpl));
    const double trigger_drop = full - score(ablate_sentence(traj, d, j_gt, tmpl, seg));
    if (!(trigger_drop > 0.0)) return false;
    for (std::size_t j = 0; j < sentences.size(); ++j) {
        if (j == j_gt) continue;
        if (full - score(ablate_sentence(traj, d, j, tmpl, seg)) >= trigger_drop) return false;
    }
    return true;
}

void validate(const SynthConfig& cfg) {
    if (cfg.num_cases < 1) throw std::invalid_argument("synth: num_cases must be >= 1");
    if (cfg.min_components < 2 || cfg.min_components > cfg.max_components)
        throw std::invalid_argument("synth: component range must satisfy 2 <= min <= max");
    if (cfg.min_sentences < 2 || cfg.min_sentences > cfg.max_sentences)
        throw std::invalid_argument("synth: sentence range must satisfy 2 <= min <= max");
    if (cfg.trigger_strength < 1) throw std::invalid_argument("synth: trigger_strength must be >= 1");
    if (cfg.order != 2)
        throw std::invalid_argument("synth: the planted-driver construction needs a bigram model");
    if (!(cfg.alpha > 0.0)) throw std::invalid_argument("synth: alpha must be > 0");
}

}  // namespace

bool trigger_is_unique(const Trajectory& traj, const GroundTruth& gt,
                       const std::string& trigger_token, const SegmenterConfig& seg) {
    std::size_t total = 0;
    std::size_t in_driver = 0;
    for (const auto& comp : traj.components) {
        for (const auto& tok : tokenize(comp.text)) {
            if (tok == trigger_token) {
                ++total;
                if (comp.index == gt.component_index) ++in_driver;
            }
        }
    }
    if (total != 1 || in_driver != 1) return false;

    if (gt.component_index >= traj.size()) return false;
    const auto sentences = segment_sentences(traj.components[gt.component_index], seg);
    for (std::size_t idx : gt.sentence_indices) {
        if (idx >= sentences.size()) return false;
        const auto toks = tokenize(sentences[idx].text);
        if (std::find(toks.begin(), toks.end(), trigger_token) == toks.end()) return false;
    }
    return true;
}

SynthSuite generate_suite(const SynthConfig& cfg) {
    validate(cfg);
    std::mt19937_64 master(cfg.seed);

    // Triggers are drawn before any layout so redraws never disturb the
    // corpus; the model is shared by every case.
    std::vector<std::string> cores(cfg.num_cases);
    std::vector<std::string> trigger_tokens(cfg.num_cases);
    for (std::size_t c = 0; c < cfg.num_cases; ++c) {
        cores[c] = "trg" + std::to_string(c) + random_suffix(master);
        const bool json_driver = (c % 2 == 1);
        trigger_tokens[c] = json_driver ? "\"" + cores[c] + "\"}" : cores[c];
    }

    std::vector<std::string> corpus;
    corpus.reserve(cfg.num_cases * cfg.trigger_strength + 64);
    for (std::size_t c = 0; c < cfg.num_cases; ++c) {
        for (std::uint64_t s = 0; s < cfg.trigger_strength; ++s) {
            corpus.push_back(trigger_tokens[c] + " " + kTargetAction);
        }
    }
    // Balance lines lift P(first-target-token | BOS) to at least the unseen
    // -context floor 1/V, so a filler opening the trajectory gains nothing:
    // need balance * (V - 1) >= trigger lines.
    std::set<std::string> vocab;
    for (const auto& line : corpus) {
        for (auto& tok : tokenize(line)) vocab.insert(std::move(tok));
    }
    const std::size_t v = vocab.size() + 1;  // + <unk>
    const std::size_t balance = (corpus.size() + v - 2) / (v - 1);
    for (std::size_t b = 0; b < balance; ++b) corpus.push_back(kTargetAction);

    SynthSuite suite{{}, corpus, build_ngram(corpus, cfg.order, cfg.alpha)};

    std::vector<std::uint64_t> case_seeds(cfg.num_cases);
    for (auto& s : case_seeds) s = master();

    for (std::size_t c = 0; c < cfg.num_cases; ++c) {
        std::mt19937_64 rng(case_seeds[c]);
        bool emitted = false;
        for (int attempt = 0; attempt < 16 && !emitted; ++attempt) {
            SynthCase sc = build_layout(cfg, c, cores[c], rng);
            if (case_passes(sc, suite.model, trigger_tokens[c])) {
                suite.cases.push_back(std::move(sc));
                emitted = true;
            }
        }
        if (!emitted) {
            throw std::runtime_error("synth: case " + std::to_string(c) +
                                     " failed its construction self-check repeatedly");
        }
    }
    return suite;
}

SynthCase generate_synthetic_case(const SynthConfig& cfg, std::size_t case_index) {
    if (case_index >= cfg.num_cases) {
        throw std::out_of_range("generate_synthetic_case: index " + std::to_string(case_index) +
                                " >= num_cases " + std::to_string(cfg.num_cases));
    }
    return generate_suite(cfg).cases[case_index];
}

}  // namespace agentattr
