#include "agentattr/ngram.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "agentattr/errors.hpp"

namespace agentattr {

using nlohmann::json;

namespace {

bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> toks;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            toks.push_back(cur);
            cur.clear();
        }
    };
    for (char c : text) {
        if (is_ws(c)) {
            flush();
        } else if (is_terminator(c)) {
            flush();
            toks.emplace_back(1, c);
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return toks;
}

NGramModel::NGramModel(int order, double alpha) : order_(order), alpha_(alpha) {
    if (order < 1) throw std::invalid_argument("ngram order must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("ngram alpha must be > 0");
    vocab_.insert(kUnkToken);
}

std::string NGramModel::map_token(const std::string& tok) const {
    return in_vocab(tok) ? tok : std::string(kUnkToken);
}

std::string NGramModel::context_key(const std::vector<std::string>& context) const {
    const std::size_t need = static_cast<std::size_t>(order_) - 1;
    const std::size_t start = context.size() > need ? context.size() - need : 0;
    std::string key;
    for (std::size_t i = start; i < context.size(); ++i) {
        if (!key.empty()) key += ' ';
        // BOS is a context marker, never a vocabulary word.
        key += (context[i] == kBosToken) ? context[i] : map_token(context[i]);
    }
    return key;
}

double NGramModel::prob(const std::string& token, const std::vector<std::string>& context) const {
    const std::string key = context_key(context);
    const std::string tok = map_token(token);

    std::uint64_t count = 0;
    auto ctx_it = counts_.find(key);
    if (ctx_it != counts_.end()) {
        auto tok_it = ctx_it->second.find(tok);
        if (tok_it != ctx_it->second.end()) count = tok_it->second;
    }
    std::uint64_t total = 0;
    auto tot_it = context_totals_.find(key);
    if (tot_it != context_totals_.end()) total = tot_it->second;

    const double v = static_cast<double>(vocab_.size());
    return (static_cast<double>(count) + alpha_) / (static_cast<double>(total) + alpha_ * v);
}

double NGramModel::log_prob(const std::string& token,
                            const std::vector<std::string>& context) const {
    return std::log(prob(token, context));
}

LogProbResult NGramModel::score_target(std::string_view context, std::string_view target) const {
    const std::vector<std::string> target_toks = tokenize(target);
    if (target_toks.empty()) throw ScorerError("score_target: target has no tokens");

    std::vector<std::string> running(static_cast<std::size_t>(order_ - 1), kBosToken);
    for (auto& tok : tokenize(context)) running.push_back(std::move(tok));

    LogProbResult res;
    res.token_count = target_toks.size();
    res.per_token.emplace();
    res.per_token->reserve(target_toks.size());
    for (const auto& tok : target_toks) {
        const double lp = log_prob(tok, running);
        res.total_logprob += lp;
        res.per_token->emplace_back(tok, lp);
        running.push_back(tok);
    }
    return res;
}

std::string NGramModel::to_json(int indent) const {
    json counts = json::object();
    for (const auto& [key, toks] : counts_) {
        json inner = json::object();
        for (const auto& [tok, n] : toks) inner[tok] = n;
        counts[key] = std::move(inner);
    }
    std::vector<std::string> vocab(vocab_.begin(), vocab_.end());
    std::sort(vocab.begin(), vocab.end());
    json doc{{"order", order_}, {"alpha", alpha_}, {"vocab", vocab}, {"counts", std::move(counts)}};
    return doc.dump(indent);
}

NGramModel NGramModel::from_json(std::string_view json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ParseError("", "malformed model JSON");
    if (!doc.contains("order") || !doc["order"].is_number_integer())
        throw ParseError("order", "missing or not an integer");
    if (!doc.contains("alpha") || !doc["alpha"].is_number())
        throw ParseError("alpha", "missing or not a number");
    if (!doc.contains("vocab") || !doc["vocab"].is_array())
        throw ParseError("vocab", "missing or not an array");
    if (!doc.contains("counts") || !doc["counts"].is_object())
        throw ParseError("counts", "missing or not an object");

    NGramModel model(doc["order"].get<int>(), doc["alpha"].get<double>());
    for (const auto& tok : doc["vocab"]) {
        if (!tok.is_string()) throw ParseError("vocab", "vocabulary entries must be strings");
        model.vocab_.insert(tok.get<std::string>());
    }
    for (const auto& [key, toks] : doc["counts"].items()) {
        if (!toks.is_object()) throw ParseError("counts." + key, "expected an object");
        std::uint64_t total = 0;
        for (const auto& [tok, n] : toks.items()) {
            if (!n.is_number_unsigned() && !n.is_number_integer())
                throw ParseError("counts." + key + "." + tok, "expected a count");
            const std::uint64_t c = n.get<std::uint64_t>();
            model.counts_[key][tok] = c;
            total += c;
        }
        model.context_totals_[key] = total;
    }
    return model;
}

std::string NGramModel::fingerprint() const {
    return to_hex(fnv1a64(to_json(-1)));
}

NGramModel build_ngram(const std::vector<std::string>& corpus, int order, double alpha) {
    if (corpus.empty()) throw std::invalid_argument("build_ngram: corpus is empty");

    NGramModel model(order, alpha);
    std::vector<std::vector<std::string>> lines;
    lines.reserve(corpus.size());
    for (const auto& line : corpus) {
        auto toks = tokenize(line);
        for (const auto& t : toks) model.vocab_.insert(t);
        lines.push_back(std::move(toks));
    }
    const std::size_t pad = static_cast<std::size_t>(order) - 1;
    for (const auto& toks : lines) {
        std::vector<std::string> seq(pad, kBosToken);
        seq.insert(seq.end(), toks.begin(), toks.end());
        for (std::size_t k = pad; k < seq.size(); ++k) {
            std::string key;
            for (std::size_t i = k - pad; i < k; ++i) {
                if (!key.empty()) key += ' ';
                key += seq[i];
            }
            ++model.counts_[key][seq[k]];
            ++model.context_totals_[key];
        }
    }
    return model;
}

LogProbResult NGramScorer::score(const ScoreRequest& req) {
    calls_.fetch_add(1, std::memory_order_relaxed);
    if (req.target.empty()) throw ScorerError("score: empty target");
    return model_.score_target(req.context, req.target);
}

std::string NGramScorer::identity() const {
    return "ngram(order=" + std::to_string(model_.order()) +
           ",alpha=" + json(model_.alpha()).dump() + ",fp=" + model_.fingerprint() + ")";
}

}  // namespace agentattr
