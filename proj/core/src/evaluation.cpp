#include "agentattr/evaluation.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "agentattr/errors.hpp"

namespace agentattr {

using nlohmann::json;

int hit_at_k(const std::vector<std::size_t>& ranked, const GroundTruth& gt, std::size_t k) {
    if (ranked.empty()) throw std::invalid_argument("hit_at_k: empty ranking");
    if (k < 1) throw std::invalid_argument("hit_at_k: k must be >= 1");
    const std::size_t top = std::min(k, ranked.size());
    for (std::size_t r = 0; r < top; ++r) {
        if (gt.sentence_indices.count(ranked[r])) return 1;
    }
    return 0;
}

EvalResult aggregate(const std::vector<PerCaseHits>& hits,
                     const std::vector<std::size_t>& ks) {
    if (hits.empty()) throw std::invalid_argument("aggregate: zero cases");
    EvalResult out;
    out.num_cases = hits.size();
    out.per_case = hits;

    const double inv = 1.0 / static_cast<double>(hits.size());
    for (std::size_t k : ks) {
        double comp_sum = 0.0;
        for (const auto& h : hits) {
            auto it = h.component_hits.find(k);
            if (it == h.component_hits.end()) {
                throw std::invalid_argument("aggregate: case " + h.case_id +
                                            " lacks component hit for k=" + std::to_string(k));
            }
            comp_sum += it->second;
        }
        out.component[k] = comp_sum * inv;
    }

    for (const auto& [method, _] : hits.front().method_hits) {
        for (std::size_t k : ks) {
            double sum = 0.0;
            for (const auto& h : hits) {
                auto mit = h.method_hits.find(method);
                if (mit == h.method_hits.end()) {
                    throw std::invalid_argument("aggregate: case " + h.case_id +
                                                " lacks method " + method);
                }
                auto kit = mit->second.find(k);
                if (kit == mit->second.end()) {
                    throw std::invalid_argument("aggregate: case " + h.case_id + " method " +
                                                method + " lacks k=" + std::to_string(k));
                }
                sum += kit->second;
            }
            out.methods[method][k] = sum * inv;
        }
    }
    return out;
}

GroundTruth load_ground_truth(std::string_view raw_json) {
    json doc = json::parse(raw_json, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ParseError("", "malformed ground truth JSON");

    GroundTruth gt;
    if (!doc.contains("case_id") || !doc["case_id"].is_string())
        throw ParseError("case_id", "missing or not a string");
    gt.case_id = doc["case_id"].get<std::string>();

    if (!doc.contains("component_index") || !doc["component_index"].is_number_integer() ||
        doc["component_index"].get<std::int64_t>() < 0)
        throw ParseError("component_index", "missing or not a non-negative integer");
    gt.component_index = doc["component_index"].get<std::size_t>();

    if (!doc.contains("sentence_indices") || !doc["sentence_indices"].is_array())
        throw ParseError("sentence_indices", "missing or not an array");
    for (const auto& idx : doc["sentence_indices"]) {
        if (!idx.is_number_integer() || idx.get<std::int64_t>() < 0)
            throw ParseError("sentence_indices", "entries must be non-negative integers");
        gt.sentence_indices.insert(idx.get<std::size_t>());
    }
    if (gt.sentence_indices.empty())
        throw ParseError("sentence_indices", "ground-truth sentence set is empty");
    return gt;
}

GroundTruth load_ground_truth_checked(std::string_view raw_json, const Trajectory& traj,
                                      const SegmenterConfig& seg) {
    GroundTruth gt = load_ground_truth(raw_json);
    if (gt.component_index >= traj.size()) {
        throw ParseError("component_index",
                         "dangling index " + std::to_string(gt.component_index) +
                             " (trajectory has " + std::to_string(traj.size()) + " components)");
    }
    const auto sentences = segment_sentences(traj.components[gt.component_index], seg);
    for (std::size_t idx : gt.sentence_indices) {
        if (idx >= sentences.size()) {
            throw ParseError("sentence_indices",
                             "dangling index " + std::to_string(idx) + " (component has " +
                                 std::to_string(sentences.size()) + " sentences)");
        }
    }
    return gt;
}

std::string ground_truth_to_json(const GroundTruth& gt, int indent) {
    json doc{{"case_id", gt.case_id},
             {"component_index", gt.component_index},
             {"sentence_indices", std::vector<std::size_t>(gt.sentence_indices.begin(),
                                                           gt.sentence_indices.end())}};
    return doc.dump(indent);
}

}  // namespace agentattr
