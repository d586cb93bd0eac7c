#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

#include "agentattr/scorer.hpp"

namespace agentattr {

// Scores through a completions endpoint that echoes the prompt with
// per-token logprobs and character offsets:
//   POST {endpoint}/v1/completions
//   {"model", "prompt": context+target, "max_tokens": 0, "echo": true, "logprobs": 1}
// Target log-prob is the sum over tokens whose start offset falls inside
// the target region. A token straddling the context/target boundary is
// attributed to the target in full, with a warning on the result.
class HttpScorer : public Scorer {
public:
    explicit HttpScorer(HttpConfig cfg);
    ~HttpScorer() override;

    LogProbResult score(const ScoreRequest& req) override;
    std::string identity() const override;

    std::uint64_t requests_sent() const noexcept { return requests_.load(); }

private:
    struct Impl;
    HttpConfig cfg_;
    std::string api_key_;
    std::unique_ptr<Impl> impl_;  // in-flight limiter
    std::atomic<std::uint64_t> requests_{0};

    LogProbResult parse_response(const std::string& body, std::size_t context_len) const;

    friend struct HttpScorerTestHook;
};

// Test seam: offset/straddle extraction without a live endpoint.
struct HttpScorerTestHook {
    static LogProbResult parse_response(const HttpScorer& s, const std::string& body,
                                        std::size_t context_len) {
        return s.parse_response(body, context_len);
    }
};

}  // namespace agentattr
