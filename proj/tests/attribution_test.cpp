#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "agentattr/attribution.hpp"
#include "agentattr/errors.hpp"
#include "agentattr/ngram.hpp"

using namespace agentattr;

namespace {

Trajectory demo_trajectory(std::size_t n_components) {
    Trajectory t;
    t.meta.id = "demo";
    t.meta.source_model = "test";
    const ComponentKind kinds[] = {ComponentKind::User, ComponentKind::Tool,
                                   ComponentKind::Thought, ComponentKind::Obs,
                                   ComponentKind::Memory};
    for (std::size_t i = 0; i < n_components; ++i) {
        Component c;
        c.index = i;
        c.kind = kinds[i % 5];
        c.text = "component " + std::to_string(i) + " says things. and more.";
        t.components.push_back(std::move(c));
    }
    t.target_action = "execute plan now";
    return t;
}

// Scorer with a programmable value per exact context string.
class TableScorer : public Scorer {
public:
    LogProbResult score(const ScoreRequest& req) override {
        calls.fetch_add(1);
        if (fail_on && req.context.find(*fail_on) != std::string::npos) {
            throw ScorerError("injected failure");
        }
        LogProbResult r;
        r.total_logprob = -static_cast<double>(req.context.size());
        r.token_count = 1;
        return r;
    }
    std::string identity() const override { return "table"; }

    std::atomic<int> calls{0};
    std::optional<std::string> fail_on;
};

}  // namespace

TEST_CASE("gains are first differences of prefix scores") {
    PrefixSupportVector psi;
    psi.psi = {-10.0, -10.0, -2.0, -2.0};
    GainVector g = temporal_gains(psi);
    CHECK(g.gains == std::vector<double>{0.0, 8.0, 0.0});
}

TEST_CASE("temporal_gains needs at least one component") {
    PrefixSupportVector psi;
    psi.psi = {-1.0};
    CHECK_THROWS_AS(temporal_gains(psi), std::invalid_argument);
    psi.psi.clear();
    CHECK_THROWS_AS(temporal_gains(psi), std::invalid_argument);
}

TEST_CASE("gains telescope to the end-to-end change") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-50.0, 0.0);
    for (int trial = 0; trial < 50; ++trial) {
        PrefixSupportVector psi;
        const std::size_t n = 2 + rng() % 30;
        for (std::size_t i = 0; i <= n; ++i) psi.psi.push_back(dist(rng));
        GainVector g = temporal_gains(psi);
        double sum = 0.0;
        for (double x : g.gains) sum += x;
        CHECK(std::abs(sum - (psi.psi.back() - psi.psi.front())) <= 1e-9);
    }
}

TEST_CASE("ranking is descending with ties toward the earlier component") {
    GainVector g;
    g.gains = {0.0, 8.0, 0.0, 3.0};
    ComponentRanking r = rank_components(g);
    REQUIRE(r.ranking.size() == 4);
    CHECK(r.ranking[0].component_index == 1);
    CHECK(r.ranking[1].component_index == 3);
    CHECK(r.ranking[2].component_index == 0);  // tie: 0 before 2
    CHECK(r.ranking[3].component_index == 2);
    CHECK(r.selected == std::vector<std::size_t>{1, 3, 0});  // default top_k=3
}

TEST_CASE("top-k selection clamps to the number of components") {
    GainVector g;
    g.gains = {1.0, 2.0};
    SelectionPolicy policy;
    policy.top_k = 10;
    ComponentRanking r = rank_components(g, policy);
    CHECK(r.selected == std::vector<std::size_t>{1, 0});

    policy.top_k = 1;
    CHECK(rank_components(g, policy).selected == std::vector<std::size_t>{1});
}

TEST_CASE("z-threshold selection uses the population deviation") {
    GainVector g;
    g.gains = {0.0, 8.0, 0.0};
    // mean 8/3, population sd sqrt(128/9)/... computed directly:
    const double mean = 8.0 / 3.0;
    double var = 0.0;
    for (double x : g.gains) var += (x - mean) * (x - mean);
    var /= 3.0;
    const double z_of_8 = (8.0 - mean) / std::sqrt(var);
    REQUIRE(z_of_8 > 1.0);
    REQUIRE(z_of_8 < 2.0);

    SelectionPolicy policy;
    policy.z_threshold = 1.0;
    CHECK(rank_components(g, policy).selected == std::vector<std::size_t>{1});
    policy.z_threshold = 2.0;
    CHECK(rank_components(g, policy).selected.empty());
}

TEST_CASE("uniform gains select nothing under a positive z threshold") {
    GainVector g;
    g.gains = {2.0, 2.0, 2.0, 2.0};
    SelectionPolicy policy;
    policy.z_threshold = 0.5;
    ComponentRanking r = rank_components(g, policy);
    CHECK(r.selected.empty());
    // The full ranking still exists, ordered by index on the all-way tie.
    REQUIRE(r.ranking.size() == 4);
    CHECK(r.ranking[0].component_index == 0);
    CHECK(r.ranking[3].component_index == 3);
}

TEST_CASE("prefix_supports scores every prefix including the empty one") {
    Trajectory t = demo_trajectory(4);
    TableScorer scorer;
    PrefixSupportVector psi = prefix_supports(t, scorer, {}, 1);
    REQUIRE(psi.psi.size() == 5);
    CHECK(psi.num_components() == 4);
    CHECK(scorer.calls.load() == 5);
    // The table scorer returns -len(context): psi must be strictly decreasing
    // as prefixes grow.
    for (std::size_t i = 1; i < psi.psi.size(); ++i) CHECK(psi.psi[i] < psi.psi[i - 1]);
    CHECK(psi.psi[0] == 0.0);  // no system prompt: empty context
}

TEST_CASE("prefix_supports matches a sequential oracle at any concurrency") {
    Trajectory t = demo_trajectory(7);
    NGramScorer scorer(build_ngram({"execute plan now", "component says things ."}, 2, 0.1));

    // Oracle: score each prefix directly, in order.
    std::vector<double> expected;
    expected.push_back(scorer.score({render_context(t, kEmptyPrefix), t.target_action}).total_logprob);
    for (std::size_t i = 0; i < t.size(); ++i) {
        expected.push_back(scorer.score({render_context(t, i), t.target_action}).total_logprob);
    }

    for (int concurrency : {1, 2, 8, 64}) {
        PrefixSupportVector psi = prefix_supports(t, scorer, {}, concurrency);
        REQUIRE(psi.psi.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) CHECK(psi.psi[i] == expected[i]);
    }
}

TEST_CASE("scorer failures surface with the failing prefix attached") {
    Trajectory t = demo_trajectory(3);
    TableScorer scorer;
    scorer.fail_on = "component 2";
    CHECK_THROWS_WITH_AS(prefix_supports(t, scorer, {}, 1),
                         doctest::Contains("prefix 3"), ScorerError);
    // Parallel runs rethrow the same error.
    CHECK_THROWS_AS(prefix_supports(t, scorer, {}, 8), ScorerError);
}
