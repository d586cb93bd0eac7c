#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "agentattr/errors.hpp"
#include "agentattr/evaluation.hpp"

using namespace agentattr;

namespace {

GroundTruth gt_with(std::set<std::size_t> indices) {
    GroundTruth gt;
    gt.case_id = "c";
    gt.component_index = 0;
    gt.sentence_indices = std::move(indices);
    return gt;
}

}  // namespace

TEST_CASE("hit_at_k finds ground truth inside the top k") {
    const std::vector<std::size_t> ranked = {4, 1, 3, 0, 2};
    CHECK(hit_at_k(ranked, gt_with({4}), 1) == 1);
    CHECK(hit_at_k(ranked, gt_with({1}), 1) == 0);
    CHECK(hit_at_k(ranked, gt_with({1}), 2) == 1);
    CHECK(hit_at_k(ranked, gt_with({2}), 4) == 0);
    CHECK(hit_at_k(ranked, gt_with({2}), 5) == 1);
    CHECK(hit_at_k(ranked, gt_with({0, 2}), 4) == 1);
    CHECK(hit_at_k(ranked, gt_with({9}), 5) == 0);
}

TEST_CASE("hit_at_k truncates when k exceeds the ranking") {
    const std::vector<std::size_t> ranked = {2, 0};
    CHECK(hit_at_k(ranked, gt_with({0}), 100) == 1);
    CHECK(hit_at_k(ranked, gt_with({5}), 100) == 0);
}

TEST_CASE("hit_at_k rejects empty rankings and k < 1") {
    CHECK_THROWS_AS(hit_at_k({}, gt_with({0}), 1), std::invalid_argument);
    CHECK_THROWS_AS(hit_at_k({1, 2}, gt_with({1}), 0), std::invalid_argument);
}

TEST_CASE("hit rate is monotone in k") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        std::vector<std::size_t> ranked;
        for (std::size_t i = 0; i < n; ++i) ranked.push_back(i);
        for (std::size_t i = n; i > 1; --i) std::swap(ranked[i - 1], ranked[rng() % i]);
        GroundTruth gt = gt_with({rng() % (n + 2), rng() % (n + 2)});

        const std::size_t k1 = 1 + rng() % n;
        const std::size_t k2 = k1 + rng() % 4;
        CHECK(hit_at_k(ranked, gt, k1) <= hit_at_k(ranked, gt, k2));
    }
}

TEST_CASE("aggregate averages per-case hits") {
    std::vector<PerCaseHits> hits;
    for (int i = 0; i < 18; ++i) {
        PerCaseHits h;
        h.case_id = "case-" + std::to_string(i);
        h.component_hits[1] = i == 0 ? 0 : 1;  // 17 of 18
        h.component_hits[3] = 1;
        h.method_hits["drop_hold"][1] = i < 9 ? 1 : 0;  // 9 of 18
        h.method_hits["drop_hold"][3] = 1;
        h.method_hits["loo"][1] = 0;
        h.method_hits["loo"][3] = i == 17 ? 1 : 0;  // 1 of 18
        hits.push_back(std::move(h));
    }
    EvalResult res = aggregate(hits, {1, 3});
    CHECK(res.num_cases == 18);
    CHECK(res.component[1] == doctest::Approx(17.0 / 18.0).epsilon(1e-12));
    CHECK(res.component[3] == 1.0);
    CHECK(res.methods["drop_hold"][1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.methods["drop_hold"][3] == 1.0);
    CHECK(res.methods["loo"][1] == 0.0);
    CHECK(res.methods["loo"][3] == doctest::Approx(1.0 / 18.0).epsilon(1e-12));
    CHECK(res.per_case.size() == 18);
}

TEST_CASE("aggregate is strict about missing entries") {
    CHECK_THROWS_AS(aggregate({}, {1}), std::invalid_argument);

    PerCaseHits complete;
    complete.case_id = "a";
    complete.component_hits[1] = 1;
    complete.method_hits["loo"][1] = 1;

    PerCaseHits missing_method = complete;
    missing_method.case_id = "b";
    missing_method.method_hits.clear();
    CHECK_THROWS_AS(aggregate({complete, missing_method}, {1}), std::invalid_argument);

    PerCaseHits missing_k = complete;
    missing_k.case_id = "c";
    CHECK_THROWS_AS(aggregate({complete, missing_k}, {1, 3}), std::invalid_argument);
}

TEST_CASE("ground truth parsing validates the shape") {
    GroundTruth gt = load_ground_truth(
        R"({"case_id": "synth-001", "component_index": 2, "sentence_indices": [3, 1]})");
    CHECK(gt.case_id == "synth-001");
    CHECK(gt.component_index == 2);
    CHECK(gt.sentence_indices == std::set<std::size_t>{1, 3});

    auto path_of = [](const char* raw) {
        try {
            load_ground_truth(raw);
        } catch (const ParseError& e) {
            return e.path();
        }
        return std::string("(no error)");
    };
    CHECK(path_of("{{{") == "");
    CHECK(path_of(R"({"component_index": 0, "sentence_indices": [0]})") == "case_id");
    CHECK(path_of(R"({"case_id": "x", "sentence_indices": [0]})") == "component_index");
    CHECK(path_of(R"({"case_id": "x", "component_index": -1, "sentence_indices": [0]})") ==
          "component_index");
    CHECK(path_of(R"({"case_id": "x", "component_index": 0})") == "sentence_indices");
    CHECK(path_of(R"({"case_id": "x", "component_index": 0, "sentence_indices": []})") ==
          "sentence_indices");
    CHECK(path_of(R"({"case_id": "x", "component_index": 0, "sentence_indices": [-4]})") ==
          "sentence_indices");
}

TEST_CASE("checked loading catches dangling indices") {
    Trajectory t;
    t.meta.id = "t";
    t.meta.source_model = "m";
    Component c;
    c.index = 0;
    c.kind = ComponentKind::User;
    c.text = "one sentence. two sentences here.";
    t.components = {c};
    t.target_action = "go";

    CHECK_NOTHROW(load_ground_truth_checked(
        R"({"case_id": "x", "component_index": 0, "sentence_indices": [0, 1]})", t));
    CHECK_THROWS_AS(load_ground_truth_checked(
                        R"({"case_id": "x", "component_index": 1, "sentence_indices": [0]})", t),
                    ParseError);
    CHECK_THROWS_AS(load_ground_truth_checked(
                        R"({"case_id": "x", "component_index": 0, "sentence_indices": [2]})", t),
                    ParseError);
}

TEST_CASE("ground truth serialization round-trips") {
    GroundTruth gt = gt_with({2, 0, 5});
    gt.case_id = "synth-007";
    gt.component_index = 3;
    GroundTruth back = load_ground_truth(ground_truth_to_json(gt));
    CHECK(back.case_id == gt.case_id);
    CHECK(back.component_index == gt.component_index);
    CHECK(back.sentence_indices == gt.sentence_indices);
}
