#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "agentattr/scorer.hpp"

namespace agentattr {

inline constexpr const char* kUnkToken = "<unk>";
inline constexpr const char* kBosToken = "<s>";

// Whitespace-delimited words; '.', '!', '?' are split off as standalone
// tokens wherever they occur.
std::vector<std::string> tokenize(std::string_view text);

// Add-alpha smoothed n-gram model over word tokens. Immutable after build;
// for every context the conditional distribution sums to 1.
class NGramModel {
public:
    NGramModel(int order, double alpha);

    int order() const noexcept { return order_; }
    double alpha() const noexcept { return alpha_; }
    std::size_t vocab_size() const noexcept { return vocab_.size(); }
    bool in_vocab(const std::string& token) const { return vocab_.count(token) > 0; }

    // P(token | context of order-1 tokens); OOV tokens map to <unk>.
    double prob(const std::string& token, const std::vector<std::string>& context) const;
    double log_prob(const std::string& token, const std::vector<std::string>& context) const;

    // Sum of target-token log-probs conditioned on the running sequence
    // (context tokens, then previously scored target tokens), BOS-padded
    // on the left.
    LogProbResult score_target(std::string_view context, std::string_view target) const;

    std::string to_json(int indent = -1) const;
    static NGramModel from_json(std::string_view json_text);

    // Stable fingerprint of (order, alpha, counts); part of the scorer identity.
    std::string fingerprint() const;

private:
    friend NGramModel build_ngram(const std::vector<std::string>&, int, double);

    int order_;
    double alpha_;
    std::unordered_set<std::string> vocab_;
    // context key (order-1 tokens space-joined) -> token -> count
    std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>> counts_;
    std::unordered_map<std::string, std::uint64_t> context_totals_;

    std::string map_token(const std::string& tok) const;
    std::string context_key(const std::vector<std::string>& context) const;
};

// Counts (order-1)-gram continuations over the corpus lines, BOS-padding
// each line. Throws on an empty corpus or invalid order/alpha.
NGramModel build_ngram(const std::vector<std::string>& corpus, int order, double alpha);

class NGramScorer : public Scorer {
public:
    explicit NGramScorer(NGramModel model) : model_(std::move(model)) {}

    LogProbResult score(const ScoreRequest& req) override;
    std::string identity() const override;

    const NGramModel& model() const noexcept { return model_; }
    std::uint64_t calls() const noexcept { return calls_.load(); }

private:
    NGramModel model_;
    std::atomic<std::uint64_t> calls_{0};
};

}  // namespace agentattr
