#include "agentattr/trajectory.hpp"

#include <cctype>
#include <sstream>

#include <json.hpp>

#include "agentattr/errors.hpp"

namespace agentattr {

using nlohmann::json;

namespace {

const char* kKindNames[kNumComponentKinds] = {"user", "thought", "tool", "obs", "memory"};

bool is_blank(std::string_view s) {
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path + "." + key, "missing field");
    if (!it->is_string()) throw ParseError(path + "." + key, "expected a string");
    return it->get<std::string>();
}

}  // namespace

std::string_view kind_name(ComponentKind k) {
    return kKindNames[static_cast<std::size_t>(k)];
}

std::optional<ComponentKind> kind_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNumComponentKinds; ++i) {
        if (name == kKindNames[i]) return static_cast<ComponentKind>(i);
    }
    return std::nullopt;
}

Trajectory parse_trajectory(std::string_view raw_json) {
    json doc = json::parse(raw_json, nullptr, false);
    if (doc.is_discarded()) throw ParseError("", "malformed JSON");
    if (!doc.is_object()) throw ParseError("", "expected a JSON object");

    Trajectory traj;

    auto meta_it = doc.find("meta");
    if (meta_it == doc.end() || !meta_it->is_object())
        throw ParseError("meta", "missing or not an object");
    traj.meta.id = require_string(*meta_it, "id", "meta");
    traj.meta.source_model = require_string(*meta_it, "source_model", "meta");
    if (auto sp = meta_it->find("system_prompt"); sp != meta_it->end() && !sp->is_null()) {
        if (!sp->is_string()) throw ParseError("meta.system_prompt", "expected a string");
        traj.meta.system_prompt = sp->get<std::string>();
    }

    auto comps_it = doc.find("components");
    if (comps_it == doc.end() || !comps_it->is_array())
        throw ParseError("components", "missing or not an array");
    if (comps_it->empty()) throw ParseError("components", "trajectory needs at least one component");

    traj.components.reserve(comps_it->size());
    for (std::size_t i = 0; i < comps_it->size(); ++i) {
        const json& c = (*comps_it)[i];
        const std::string path = "components[" + std::to_string(i) + "]";
        if (!c.is_object()) throw ParseError(path, "expected an object");

        Component comp;
        comp.index = i;
        const std::string kind_str = require_string(c, "kind", path);
        auto kind = kind_from_name(kind_str);
        if (!kind) throw ParseError(path + ".kind", "unknown kind \"" + kind_str + "\"");
        comp.kind = *kind;
        comp.text = require_string(c, "text", path);
        if (is_blank(comp.text)) throw ParseError(path + ".text", "component text is empty");
        traj.components.push_back(std::move(comp));
    }

    auto tgt_it = doc.find("target_action");
    if (tgt_it == doc.end()) throw ParseError("target_action", "missing field");
    if (!tgt_it->is_string()) throw ParseError("target_action", "expected a string");
    traj.target_action = tgt_it->get<std::string>();
    if (traj.target_action.empty()) throw ParseError("target_action", "target action is empty");

    return traj;
}

std::string trajectory_to_json(const Trajectory& traj, int indent) {
    json meta{{"id", traj.meta.id}, {"source_model", traj.meta.source_model}};
    if (traj.meta.system_prompt) meta["system_prompt"] = *traj.meta.system_prompt;

    json components = json::array();
    for (const auto& c : traj.components) {
        components.push_back({{"kind", std::string(kind_name(c.kind))}, {"text", c.text}});
    }

    json doc{{"meta", std::move(meta)},
             {"components", std::move(components)},
             {"target_action", traj.target_action}};
    return doc.dump(indent);
}

std::string render_context(const Trajectory& traj, PrefixIndex upto,
                           const RenderTemplate& tmpl) {
    if (upto && *upto >= traj.components.size()) {
        throw std::out_of_range("render_context: component index " + std::to_string(*upto) +
                                " out of range (N=" + std::to_string(traj.components.size()) + ")");
    }

    std::string out;
    bool first = true;
    if (traj.meta.system_prompt) {
        out += tmpl.system_prefix;
        out += *traj.meta.system_prompt;
        first = false;
    }
    if (upto) {
        for (std::size_t i = 0; i <= *upto; ++i) {
            if (!first) out += tmpl.separator;
            out += tmpl.header(traj.components[i].kind);
            out += traj.components[i].text;
            first = false;
        }
    }
    return out;
}

std::string render_with_component_text(const Trajectory& traj, std::size_t i,
                                       std::string_view replacement,
                                       const RenderTemplate& tmpl) {
    if (i >= traj.components.size()) {
        throw std::out_of_range("render_with_component_text: component index " +
                                std::to_string(i) + " out of range");
    }

    std::string out;
    bool first = true;
    if (traj.meta.system_prompt) {
        out += tmpl.system_prefix;
        out += *traj.meta.system_prompt;
        first = false;
    }
    for (std::size_t c = 0; c <= i; ++c) {
        if (!first) out += tmpl.separator;
        out += tmpl.header(traj.components[c].kind);
        if (c == i) {
            out += replacement;
        } else {
            out += traj.components[c].text;
        }
        first = false;
    }
    return out;
}

std::string ablate_sentence(const Trajectory& traj, std::size_t i, std::size_t j,
                            const RenderTemplate& tmpl, const SegmenterConfig& seg) {
    if (i >= traj.components.size()) {
        throw std::out_of_range("ablate_sentence: component index " + std::to_string(i) +
                                " out of range");
    }
    const auto sentences = segment_sentences(traj.components[i], seg);
    if (j >= sentences.size()) {
        throw std::out_of_range("ablate_sentence: sentence index " + std::to_string(j) +
                                " out of range (N_i=" + std::to_string(sentences.size()) + ")");
    }

    std::string kept;
    for (std::size_t k = 0; k < sentences.size(); ++k) {
        if (k == j) continue;
        if (!kept.empty()) kept += ' ';
        kept += sentences[k].text;
    }
    return render_with_component_text(traj, i, kept, tmpl);
}

}  // namespace agentattr
