#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace agentattr {

struct ScoreRequest {
    std::string context;  // may be empty
    std::string target;   // non-empty
};

// Summed log-probability of the target tokens, natural log.
struct LogProbResult {
    double total_logprob = 0.0;
    std::size_t token_count = 0;
    std::optional<std::vector<std::pair<std::string, double>>> per_token;
    std::vector<std::string> warnings;
};

// log p(target | context) provider. Implementations must be safe for
// concurrent score() calls.
class Scorer {
public:
    virtual ~Scorer() = default;

    virtual LogProbResult score(const ScoreRequest& req) = 0;

    // Stable description of the backend (model id, order/alpha, endpoint).
    virtual std::string identity() const = 0;
};

// Memoizing decorator. Values for identical keys are identical by backend
// determinism, so concurrent misses on the same key are benign.
class CachedScorer : public Scorer {
public:
    CachedScorer(std::shared_ptr<Scorer> inner, std::size_t max_entries = 1 << 16);

    LogProbResult score(const ScoreRequest& req) override;
    std::string identity() const override { return inner_->identity(); }

    std::uint64_t hits() const noexcept { return hits_.load(); }
    std::uint64_t misses() const noexcept { return misses_.load(); }

private:
    std::shared_ptr<Scorer> inner_;
    std::size_t max_entries_;

    mutable std::mutex mu_;
    std::list<std::string> lru_;  // front = most recent
    struct Entry {
        LogProbResult value;
        std::list<std::string>::iterator lru_it;
    };
    std::unordered_map<std::string, Entry> map_;
    std::atomic<std::uint64_t> hits_{0};
    std::atomic<std::uint64_t> misses_{0};
};

// Counts score() invocations; used for the report's call accounting.
class CountingScorer : public Scorer {
public:
    explicit CountingScorer(std::shared_ptr<Scorer> inner)
        : inner_(std::move(inner)) {}

    LogProbResult score(const ScoreRequest& req) override {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return inner_->score(req);
    }
    std::string identity() const override { return inner_->identity(); }
    std::uint64_t calls() const noexcept { return calls_.load(); }

private:
    std::shared_ptr<Scorer> inner_;
    std::atomic<std::uint64_t> calls_{0};
};

enum class ScorerBackend { NGram, Http };

struct NGramConfig {
    int order = 2;
    double alpha = 0.1;        // add-alpha smoothing
    std::string model_path;    // serialized model file (vocabulary source)
    std::vector<std::string> corpus;  // alternative source: build from lines
};

struct HttpConfig {
    std::string endpoint;      // e.g. http://localhost:8000
    std::string model;
    int timeout_ms = 30000;
    int max_retries = 2;
    std::string api_key_env = "SCORER_API_KEY";
    int max_inflight = 4;
};

struct CacheConfig {
    bool enabled = true;
    std::size_t max_entries = 1 << 16;
};

struct ScorerConfig {
    ScorerBackend backend = ScorerBackend::NGram;
    NGramConfig ngram;
    HttpConfig http;
    CacheConfig cache;
};

// Builds the configured backend, wrapped in a cache when enabled.
std::shared_ptr<Scorer> make_scorer(const ScorerConfig& cfg);

}  // namespace agentattr
