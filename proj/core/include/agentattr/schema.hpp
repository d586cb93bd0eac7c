#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace agentattr {

// Structural validation against the subset of JSON Schema the shipped
// schema files use (type, properties, required, items, enum, minItems,
// minimum). Returns one message per violation; empty means valid.
std::vector<std::string> schema_violations(std::string_view schema_json,
                                           std::string_view instance_json);

}  // namespace agentattr
