#include "agentattr/report.hpp"

#include <json.hpp>

#include "agentattr/errors.hpp"

namespace agentattr {

using nlohmann::json;

namespace {

json fit_to_json(const SurrogateFit& f) {
    return json{{"weights", f.weights},   {"intercept", f.intercept},
                {"lambda", f.lambda},     {"num_samples", f.num_samples},
                {"rmse", f.rmse},         {"sweeps", f.sweeps}};
}

SurrogateFit fit_from_json(const json& j) {
    SurrogateFit f;
    f.weights = j.at("weights").get<std::vector<double>>();
    f.intercept = j.at("intercept").get<double>();
    f.lambda = j.at("lambda").get<double>();
    f.num_samples = j.at("num_samples").get<std::size_t>();
    f.rmse = j.at("rmse").get<double>();
    f.sweeps = j.at("sweeps").get<int>();
    return f;
}

json cc_config_to_json(const ContextCiteConfig& c) {
    return json{{"num_samples", c.num_samples},
                {"keep_prob", c.keep_prob},
                {"lambda", c.lambda},
                {"seed", c.seed},
                {"full_enumeration", c.full_enumeration}};
}

ContextCiteConfig cc_config_from_json(const json& j) {
    ContextCiteConfig c;
    c.num_samples = j.at("num_samples").get<std::size_t>();
    c.keep_prob = j.at("keep_prob").get<double>();
    c.lambda = j.at("lambda").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.full_enumeration = j.at("full_enumeration").get<bool>();
    return c;
}

json baselines_to_json(const BaselineResults& b) {
    json loo = json::array();
    for (const auto& e : b.loo) {
        loo.push_back({{"component_index", e.component_index}, {"scores", e.scores}});
    }
    json weights = json::array();
    for (const auto& e : b.contextcite) {
        json fit = fit_to_json(e.fit);
        fit["component_index"] = e.component_index;
        weights.push_back(std::move(fit));
    }
    return json{{"loo", std::move(loo)},
                {"contextcite",
                 json{{"config", cc_config_to_json(b.contextcite_config)},
                      {"weights", std::move(weights)}}},
                {"loo_enabled", b.loo_enabled},
                {"contextcite_enabled", b.contextcite_enabled}};
}

BaselineResults baselines_from_json(const json& j) {
    BaselineResults b;
    for (const auto& e : j.at("loo")) {
        b.loo.push_back({e.at("component_index").get<std::size_t>(),
                         e.at("scores").get<std::vector<double>>()});
    }
    const json& cc = j.at("contextcite");
    b.contextcite_config = cc_config_from_json(cc.at("config"));
    for (const auto& e : cc.at("weights")) {
        b.contextcite.push_back(
            {e.at("component_index").get<std::size_t>(), fit_from_json(e)});
    }
    b.loo_enabled = j.at("loo_enabled").get<bool>();
    b.contextcite_enabled = j.at("contextcite_enabled").get<bool>();
    return b;
}

}  // namespace

std::string report_to_json(const AttributionReport& report, int indent) {
    json ranking = json::array();
    for (const auto& rc : report.component_ranking) {
        ranking.push_back({{"component_index", rc.component_index}, {"gain", rc.gain}});
    }

    json sentence_scores = json::array();
    for (const auto& e : report.sentence_scores) {
        sentence_scores.push_back({{"component_index", e.score.component_index},
                                   {"sentence_index", e.score.sentence_index},
                                   {"drop", e.score.drop},
                                   {"hold", e.score.hold},
                                   {"phi", e.score.phi},
                                   {"text", e.text},
                                   {"char_span", {e.span_begin, e.span_end}}});
    }

    json rankings = json::array();
    for (const auto& r : report.sentence_rankings) {
        rankings.push_back({{"component_index", r.component_index},
                            {"order", r.order},
                            {"evidence", r.evidence}});
    }

    json doc{{"tool_version", report.tool_version},
             {"scoring_model", report.scoring_model},
             {"trajectory", json::parse(trajectory_to_json(report.trajectory, -1))},
             {"psi", report.psi},
             {"gains", report.gains},
             {"component_ranking", std::move(ranking)},
             {"selected_components", report.selected_components},
             {"sentence_scores", std::move(sentence_scores)},
             {"sentence_rankings", std::move(rankings)},
             {"hold_mode", report.hold_mode},
             {"scorer_calls", report.scorer_calls},
             {"cache_enabled", report.cache_enabled},
             {"seed", report.seed}};
    if (report.baselines) doc["baselines"] = baselines_to_json(*report.baselines);
    if (report.elapsed_ms) doc["elapsed_ms"] = *report.elapsed_ms;
    return doc.dump(indent);
}

AttributionReport report_from_json(std::string_view raw_json) {
    json doc = json::parse(raw_json, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw ParseError("", "malformed report JSON");
    try {
        AttributionReport r;
        r.tool_version = doc.at("tool_version").get<std::string>();
        r.scoring_model = doc.at("scoring_model").get<std::string>();
        r.trajectory = parse_trajectory(doc.at("trajectory").dump());
        r.psi = doc.at("psi").get<std::vector<double>>();
        r.gains = doc.at("gains").get<std::vector<double>>();
        for (const auto& rc : doc.at("component_ranking")) {
            r.component_ranking.push_back({rc.at("component_index").get<std::size_t>(),
                                           rc.at("gain").get<double>()});
        }
        r.selected_components = doc.at("selected_components").get<std::vector<std::size_t>>();
        for (const auto& e : doc.at("sentence_scores")) {
            SentenceEntry entry;
            entry.score.component_index = e.at("component_index").get<std::size_t>();
            entry.score.sentence_index = e.at("sentence_index").get<std::size_t>();
            entry.score.drop = e.at("drop").get<double>();
            entry.score.hold = e.at("hold").get<double>();
            entry.score.phi = e.at("phi").get<double>();
            entry.text = e.at("text").get<std::string>();
            entry.span_begin = e.at("char_span").at(0).get<std::size_t>();
            entry.span_end = e.at("char_span").at(1).get<std::size_t>();
            r.sentence_scores.push_back(std::move(entry));
        }
        for (const auto& rk : doc.at("sentence_rankings")) {
            SentenceRanking ranking;
            ranking.component_index = rk.at("component_index").get<std::size_t>();
            ranking.order = rk.at("order").get<std::vector<std::size_t>>();
            ranking.evidence = rk.at("evidence").get<std::vector<std::size_t>>();
            r.sentence_rankings.push_back(std::move(ranking));
        }
        r.hold_mode = doc.at("hold_mode").get<std::string>();
        if (doc.contains("baselines") && !doc["baselines"].is_null()) {
            r.baselines = baselines_from_json(doc["baselines"]);
        }
        r.scorer_calls = doc.at("scorer_calls").get<std::uint64_t>();
        r.cache_enabled = doc.at("cache_enabled").get<bool>();
        r.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("elapsed_ms") && !doc["elapsed_ms"].is_null()) {
            r.elapsed_ms = doc["elapsed_ms"].get<double>();
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError("", std::string("report JSON: ") + e.what());
    }
}

}  // namespace agentattr
