#include "agentattr/scorer.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "agentattr/errors.hpp"
#include "agentattr/http_scorer.hpp"
#include "agentattr/ngram.hpp"

namespace agentattr {

namespace {

// Length prefix keeps (context, target) pairs unambiguous.
std::string cache_key(const ScoreRequest& req) {
    std::string key = std::to_string(req.context.size());
    key += '\x1f';
    key += req.context;
    key += req.target;
    return key;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path);
    return buf.str();
}

}  // namespace

CachedScorer::CachedScorer(std::shared_ptr<Scorer> inner, std::size_t max_entries)
    : inner_(std::move(inner)), max_entries_(max_entries == 0 ? 1 : max_entries) {}

LogProbResult CachedScorer::score(const ScoreRequest& req) {
    const std::string key = cache_key(req);
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = map_.find(key);
        if (it != map_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second.lru_it);
            hits_.fetch_add(1, std::memory_order_relaxed);
            return it->second.value;
        }
    }

    misses_.fetch_add(1, std::memory_order_relaxed);
    LogProbResult value = inner_->score(req);

    std::lock_guard<std::mutex> lk(mu_);
    auto it = map_.find(key);
    if (it != map_.end()) {
        // another thread filled this key first; identical value by determinism
        lru_.splice(lru_.begin(), lru_, it->second.lru_it);
        return it->second.value;
    }
    lru_.push_front(key);
    map_.emplace(key, Entry{value, lru_.begin()});
    if (map_.size() > max_entries_) {
        map_.erase(lru_.back());
        lru_.pop_back();
    }
    return value;
}

std::shared_ptr<Scorer> make_scorer(const ScorerConfig& cfg) {
    std::shared_ptr<Scorer> backend;
    switch (cfg.backend) {
        case ScorerBackend::NGram: {
            if (!cfg.ngram.model_path.empty()) {
                backend = std::make_shared<NGramScorer>(
                    NGramModel::from_json(read_file(cfg.ngram.model_path)));
            } else if (!cfg.ngram.corpus.empty()) {
                backend = std::make_shared<NGramScorer>(
                    build_ngram(cfg.ngram.corpus, cfg.ngram.order, cfg.ngram.alpha));
            } else {
                throw std::invalid_argument(
                    "ngram scorer needs a model path or a training corpus");
            }
            break;
        }
        case ScorerBackend::Http:
            backend = std::make_shared<HttpScorer>(cfg.http);
            break;
    }
    if (cfg.cache.enabled) {
        return std::make_shared<CachedScorer>(std::move(backend), cfg.cache.max_entries);
    }
    return backend;
}

}  // namespace agentattr
