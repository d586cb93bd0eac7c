#include "agentattr/http_scorer.hpp"

#include <algorithm>
#include <cstdlib>
#include <semaphore>

#include <httplib.h>
#include <json.hpp>

#include "agentattr/errors.hpp"

namespace agentattr {

using nlohmann::json;

namespace {

// endpoint = scheme://host[:port][/prefix]; httplib wants the two halves split
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme = endpoint.find("://");
    const auto path_start =
        endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, path_start), prefix};
}

}  // namespace

struct HttpScorer::Impl {
    explicit Impl(int max_inflight) : sem(std::max(1, max_inflight)) {}
    std::counting_semaphore<> sem;
};

HttpScorer::HttpScorer(HttpConfig cfg)
    : cfg_(std::move(cfg)), impl_(std::make_unique<Impl>(cfg_.max_inflight)) {
    if (cfg_.endpoint.empty()) throw std::invalid_argument("http scorer needs an endpoint");
    if (!cfg_.api_key_env.empty()) {
        if (const char* key = std::getenv(cfg_.api_key_env.c_str())) api_key_ = key;
    }
}

HttpScorer::~HttpScorer() = default;

std::string HttpScorer::identity() const {
    return "http(endpoint=" + cfg_.endpoint + ",model=" + cfg_.model + ")";
}

LogProbResult HttpScorer::score(const ScoreRequest& req) {
    if (req.target.empty()) throw ScorerError("score: empty target");

    const json body_json{{"model", cfg_.model},
                         {"prompt", req.context + req.target},
                         {"max_tokens", 0},
                         {"echo", true},
                         {"logprobs", 1}};
    const std::string body = body_json.dump();

    const auto [base, prefix] = split_endpoint(cfg_.endpoint);
    const std::string path = prefix + "/v1/completions";

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    impl_->sem.acquire();
    struct Release {
        std::counting_semaphore<>* sem;
        ~Release() { sem->release(); }
    } release{&impl_->sem};

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        httplib::Client cli(base);
        cli.set_connection_timeout(0, cfg_.timeout_ms * 1000);
        cli.set_read_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);

        requests_.fetch_add(1, std::memory_order_relaxed);
        auto res = cli.Post(path, headers, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        return parse_response(res->body, req.context.size());
    }
    throw ScorerError("backend " + cfg_.endpoint + " failed after " +
                      std::to_string(cfg_.max_retries + 1) + " attempts: " + last_error);
}

LogProbResult HttpScorer::parse_response(const std::string& body,
                                         std::size_t context_len) const {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) throw ScorerError("malformed backend response: not JSON");

    const json* choices = doc.contains("choices") ? &doc["choices"] : nullptr;
    if (!choices || !choices->is_array() || choices->empty())
        throw ScorerError("malformed backend response: missing choices");
    const json& choice = (*choices)[0];
    if (!choice.contains("logprobs") || !choice["logprobs"].is_object())
        throw ScorerError("malformed backend response: missing logprobs");
    const json& lp = choice["logprobs"];
    for (const char* field : {"tokens", "token_logprobs", "text_offset"}) {
        if (!lp.contains(field) || !lp[field].is_array())
            throw ScorerError(std::string("malformed backend response: missing logprobs.") +
                              field);
    }
    const json& tokens = lp["tokens"];
    const json& logprobs = lp["token_logprobs"];
    const json& offsets = lp["text_offset"];
    const std::size_t n = tokens.size();
    if (logprobs.size() != n || offsets.size() != n)
        throw ScorerError("malformed backend response: logprobs arrays disagree in length");

    LogProbResult res;
    res.per_token.emplace();
    for (std::size_t k = 0; k < n; ++k) {
        if (!offsets[k].is_number()) throw ScorerError("malformed backend response: bad offset");
        const auto off = offsets[k].get<std::size_t>();
        const std::string tok = tokens[k].is_string() ? tokens[k].get<std::string>() : "";
        const std::size_t end =
            (k + 1 < n) ? offsets[k + 1].get<std::size_t>() : off + tok.size();

        const bool in_target = off >= context_len;
        const bool straddles = off < context_len && end > context_len;
        if (!in_target && !straddles) continue;
        if (straddles) {
            res.warnings.push_back("token " + std::to_string(k) +
                                   " straddles the context/target boundary; counted in full");
        }

        double tok_lp = 0.0;
        if (logprobs[k].is_number()) {
            tok_lp = logprobs[k].get<double>();
        } else {
            res.warnings.push_back("null logprob for target token " + std::to_string(k) +
                                   "; counted as 0");
        }
        res.total_logprob += tok_lp;
        res.per_token->emplace_back(tok, tok_lp);
        ++res.token_count;
    }
    if (res.token_count == 0)
        throw ScorerError("backend response contains no target tokens");
    return res;
}

}  // namespace agentattr
