#include "agentattr/schema.hpp"

#include <json.hpp>

namespace agentattr {

using nlohmann::json;

namespace {

std::string type_name(const json& v) {
    switch (v.type()) {
        case json::value_t::object: return "object";
        case json::value_t::array: return "array";
        case json::value_t::string: return "string";
        case json::value_t::boolean: return "boolean";
        case json::value_t::number_integer:
        case json::value_t::number_unsigned: return "integer";
        case json::value_t::number_float: return "number";
        case json::value_t::null: return "null";
        default: return "unknown";
    }
}

bool matches_type(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    if (t == "null") return v.is_null();
    return false;
}

void check(const json& schema, const json& inst, const std::string& path,
           std::vector<std::string>& out) {
    if (!schema.is_object()) return;

    if (auto it = schema.find("type"); it != schema.end() && it->is_string()) {
        const auto t = it->get<std::string>();
        if (!matches_type(inst, t)) {
            out.push_back(path + ": expected " + t + ", got " + type_name(inst));
            return;  // further keywords assume the type held
        }
    }

    if (auto it = schema.find("enum"); it != schema.end() && it->is_array()) {
        bool found = false;
        for (const auto& candidate : *it) {
            if (inst == candidate) {
                found = true;
                break;
            }
        }
        if (!found) out.push_back(path + ": value " + inst.dump() + " not in enum");
    }

    if (auto it = schema.find("minimum"); it != schema.end() && inst.is_number()) {
        if (inst.get<double>() < it->get<double>()) {
            out.push_back(path + ": value below minimum " + it->dump());
        }
    }

    if (inst.is_object()) {
        if (auto it = schema.find("required"); it != schema.end() && it->is_array()) {
            for (const auto& name : *it) {
                if (!inst.contains(name.get<std::string>())) {
                    out.push_back(path + ": missing required property " +
                                  name.get<std::string>());
                }
            }
        }
        if (auto it = schema.find("properties"); it != schema.end() && it->is_object()) {
            for (const auto& [name, sub] : it->items()) {
                if (inst.contains(name)) {
                    check(sub, inst[name], path + "." + name, out);
                }
            }
        }
    }

    if (inst.is_array()) {
        if (auto it = schema.find("minItems"); it != schema.end()) {
            if (inst.size() < it->get<std::size_t>()) {
                out.push_back(path + ": fewer than " + it->dump() + " items");
            }
        }
        if (auto it = schema.find("items"); it != schema.end() && it->is_object()) {
            for (std::size_t i = 0; i < inst.size(); ++i) {
                check(*it, inst[i], path + "[" + std::to_string(i) + "]", out);
            }
        }
    }
}

}  // namespace

std::vector<std::string> schema_violations(std::string_view schema_json,
                                           std::string_view instance_json) {
    std::vector<std::string> out;
    json schema = json::parse(schema_json, nullptr, false);
    if (schema.is_discarded()) {
        out.push_back("$: schema is not valid JSON");
        return out;
    }
    json inst = json::parse(instance_json, nullptr, false);
    if (inst.is_discarded()) {
        out.push_back("$: instance is not valid JSON");
        return out;
    }
    check(schema, inst, "$", out);
    return out;
}

}  // namespace agentattr
