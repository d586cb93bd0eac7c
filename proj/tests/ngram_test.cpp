#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentattr/errors.hpp"
#include "agentattr/ngram.hpp"

using namespace agentattr;

namespace {

std::vector<std::string> vocab_of(const NGramModel& m) {
    auto doc = nlohmann::json::parse(m.to_json(-1));
    return doc.at("vocab").get<std::vector<std::string>>();
}

}  // namespace

TEST_CASE("tokenize splits whitespace and standalone terminators") {
    CHECK(tokenize("a b  c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(tokenize("a.b!c") == std::vector<std::string>{"a", ".", "b", "!", "c"});
    CHECK(tokenize("ready? go!") == std::vector<std::string>{"ready", "?", "go", "!"});
    CHECK(tokenize("3.14") == std::vector<std::string>{"3", ".", "14"});
    CHECK(tokenize("  spaced \t out \n") == std::vector<std::string>{"spaced", "out"});
    CHECK(tokenize("").empty());
    CHECK(tokenize(" .") == std::vector<std::string>{"."});
}

TEST_CASE("unigram probability matches the closed form") {
    // counts: yes=1, b=2, c=1; vocab {yes,b,c,<unk>} so V=4.
    // P(yes) = (1+a)/(4+4a) = 1/4 for every alpha.
    for (double alpha : {0.5, 0.1, 1.0, 2.0}) {
        NGramModel m = build_ngram({"yes b c b"}, 1, alpha);
        CHECK(m.vocab_size() == 4);
        CHECK(m.prob("yes", {}) == 0.25);
        auto res = m.score_target("", "yes");
        CHECK(res.token_count == 1);
        CHECK(res.total_logprob == std::log(0.25));
    }
}

TEST_CASE("unigram ignores context") {
    NGramModel m = build_ngram({"yes b c b"}, 1, 0.5);
    CHECK(m.prob("b", {}) == m.prob("b", {"yes", "c"}));
    CHECK(m.prob("b", {}) == m.prob("b", {"never", "seen", "words"}));
    CHECK(m.score_target("", "b").total_logprob ==
          m.score_target("totally different context", "b").total_logprob);
}

TEST_CASE("bigram conditional counts") {
    NGramModel m = build_ngram({"a b", "a c"}, 2, 0.1);
    // vocab {a,b,c,<unk>}, counts: <s> -> a:2; a -> b:1, c:1.
    CHECK(m.vocab_size() == 4);
    CHECK(m.prob("b", {"a"}) == doctest::Approx((1.0 + 0.1) / (2.0 + 0.1 * 4.0)).epsilon(1e-15));
    CHECK(m.prob("c", {"a"}) == m.prob("b", {"a"}));
    CHECK(m.prob("a", {kBosToken}) ==
          doctest::Approx((2.0 + 0.1) / (2.0 + 0.1 * 4.0)).epsilon(1e-15));
    // Only the last order-1 tokens matter.
    CHECK(m.prob("b", {"c", "c", "a"}) == m.prob("b", {"a"}));
}

TEST_CASE("unseen context gives exactly 1/V") {
    NGramModel m = build_ngram({"a b", "a c"}, 2, 0.1);
    const double v = static_cast<double>(m.vocab_size());
    CHECK(m.prob("b", {"zzz"}) == 1.0 / v);
    CHECK(m.prob("never_seen", {"zzz"}) == 1.0 / v);
}

TEST_CASE("oov tokens map to the unk entry") {
    NGramModel m = build_ngram({"a b", "a c"}, 2, 0.1);
    CHECK(m.in_vocab(kUnkToken));
    CHECK_FALSE(m.in_vocab(kBosToken));
    CHECK_FALSE(m.in_vocab("zzz"));
    // <unk> was never observed after "a", so an OOV prediction gets the
    // pure-smoothing mass.
    CHECK(m.prob("zzz", {"a"}) ==
          doctest::Approx(0.1 / (2.0 + 0.1 * 4.0)).epsilon(1e-15));
}

TEST_CASE("conditionals sum to one over the vocabulary") {
    NGramModel m = build_ngram(
        {"the cat sat on the mat .", "a cat ran away . quickly", "the dog sat down ."},
        2, 0.1);
    const auto vocab = vocab_of(m);
    const std::vector<std::string> pool = {"the", "cat", "sat",  "mat",   ".",
                                           "dog", "ran", "zzz",  "other", "on",
                                           "a",   "!",   "down", "away"};
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> ctx;
        const std::size_t len = rng() % 4;
        for (std::size_t i = 0; i < len; ++i) ctx.push_back(pool[rng() % pool.size()]);
        double sum = 0.0;
        for (const auto& tok : vocab) sum += m.prob(tok, ctx);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("score_target pads with BOS and extends the running context") {
    NGramModel m = build_ngram({"a b"}, 2, 0.1);
    // vocab {a,b,<unk>} V=3; counts: <s> -> a:1; a -> b:1.
    auto first = m.score_target("", "a");
    CHECK(first.token_count == 1);
    CHECK(first.total_logprob ==
          doctest::Approx(std::log((1.0 + 0.1) / (1.0 + 0.1 * 3.0))).epsilon(1e-12));

    auto chained = m.score_target("", "a b");
    REQUIRE(chained.per_token.has_value());
    REQUIRE(chained.per_token->size() == 2);
    CHECK((*chained.per_token)[0].first == "a");
    CHECK((*chained.per_token)[1].first == "b");
    // log P(a|<s>) + log P(b|a)
    CHECK(chained.total_logprob ==
          doctest::Approx(std::log(1.1 / 1.3) + std::log(1.1 / 1.3)).epsilon(1e-12));

    // Context tokens shift the window the same way scored tokens do.
    CHECK(m.score_target("a", "b").total_logprob ==
          (*chained.per_token)[1].second);
}

TEST_CASE("empty target is rejected") {
    NGramModel m = build_ngram({"a b"}, 2, 0.1);
    CHECK_THROWS_AS(m.score_target("a", ""), ScorerError);
    CHECK_THROWS_AS(m.score_target("a", "   "), ScorerError);
}

TEST_CASE("model serialization round-trips") {
    NGramModel m = build_ngram({"the cat sat .", "the dog sat !"}, 2, 0.25);
    NGramModel back = NGramModel::from_json(m.to_json());
    CHECK(back.order() == m.order());
    CHECK(back.alpha() == m.alpha());
    CHECK(back.vocab_size() == m.vocab_size());
    CHECK(back.fingerprint() == m.fingerprint());
    for (const char* probe : {"the cat", "sat .", "unseen words here"}) {
        CHECK(back.score_target("the", probe).total_logprob ==
              m.score_target("the", probe).total_logprob);
    }
}

TEST_CASE("construction validates order and alpha") {
    CHECK_THROWS_AS(NGramModel(0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(NGramModel(2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(NGramModel(2, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_ngram({}, 2, 0.1), std::invalid_argument);
}

TEST_CASE("model json validation") {
    CHECK_THROWS_AS(NGramModel::from_json("nope"), ParseError);
    CHECK_THROWS_AS(NGramModel::from_json("[]"), ParseError);
    CHECK_THROWS_AS(NGramModel::from_json(R"({"order": 2, "alpha": 0.1, "vocab": []})"),
                    ParseError);
    CHECK_THROWS_AS(
        NGramModel::from_json(R"({"order": "x", "alpha": 0.1, "vocab": [], "counts": {}})"),
        ParseError);
}

TEST_CASE("scorer identity is stable and descriptive") {
    NGramScorer s(build_ngram({"a b"}, 2, 0.1));
    const std::string id = s.identity();
    CHECK(id.find("ngram(order=2") != std::string::npos);
    CHECK(id.find("fp=") != std::string::npos);
    CHECK(id == s.identity());

    NGramScorer other(build_ngram({"a b", "c d"}, 2, 0.1));
    CHECK(other.identity() != id);
}

TEST_CASE("ngram scorer counts calls and rejects empty targets") {
    NGramScorer s(build_ngram({"a b"}, 2, 0.1));
    CHECK(s.calls() == 0);
    s.score({"a", "b"});
    s.score({"", "a"});
    CHECK(s.calls() == 2);
    CHECK_THROWS_AS(s.score({"a", ""}), ScorerError);
}
