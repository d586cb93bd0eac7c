#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace agentattr {

// Functional type of one interaction component. Wire strings are the
// lowercase names ("user", "thought", "tool", "obs", "memory").
enum class ComponentKind { User, Thought, Tool, Obs, Memory };

inline constexpr std::size_t kNumComponentKinds = 5;

std::string_view kind_name(ComponentKind k);
std::optional<ComponentKind> kind_from_name(std::string_view name);

struct Component {
    std::size_t index = 0;  // position in the containing trajectory
    ComponentKind kind = ComponentKind::User;
    std::string text;       // non-empty after whitespace trimming
};

struct TrajectoryMeta {
    std::string id;
    std::string source_model;
    std::optional<std::string> system_prompt;
};

// An agent interaction history plus the realized action under analysis.
// The components are the scored context only; the target action is never
// part of them.
struct Trajectory {
    TrajectoryMeta meta;
    std::vector<Component> components;  // N >= 1
    std::string target_action;         // non-empty

    std::size_t size() const noexcept { return components.size(); }
};

// A contiguous span within one component's text. Spans of one component
// are ordered, non-overlapping, and every byte between them is whitespace,
// so joining the texts (whitespace-insensitively) reproduces the component.
struct Sentence {
    std::size_t component_index = 0;
    std::size_t sentence_index = 0;
    std::size_t span_begin = 0;  // byte offsets, [begin, end)
    std::size_t span_end = 0;
    std::string text;            // == component.text.substr(begin, end - begin)
};

struct SegmenterConfig {
    // Treat a component whose text parses as a JSON object as a list of
    // top-level key/value units instead of prose sentences.
    bool json_field_units = true;
    std::string terminators = ".!?";
};

std::vector<Sentence> segment_sentences(const Component& component,
                                        const SegmenterConfig& cfg = {});

// How components are serialized into scorer context. Rendering is
// deterministic: identical inputs give byte-identical output.
struct RenderTemplate {
    std::array<std::string, kNumComponentKinds> headers = {
        "[USER] ", "[THOUGHT] ", "[TOOL] ", "[OBS] ", "[MEMORY] "};
    std::string separator = "\n";
    std::string system_prefix = "[SYSTEM] ";

    const std::string& header(ComponentKind k) const {
        return headers[static_cast<std::size_t>(k)];
    }
};

// Prefix selector for render_context: kEmptyPrefix renders only the system
// prompt (or nothing), index i renders components 0..i inclusive.
using PrefixIndex = std::optional<std::size_t>;
inline constexpr PrefixIndex kEmptyPrefix = std::nullopt;

// Throws ParseError on malformed input; the error carries the offending
// JSON path. Accepts exactly the schema
//   {"meta": {"id", "source_model", "system_prompt"?},
//    "components": [{"kind", "text"}...], "target_action"}.
Trajectory parse_trajectory(std::string_view raw_json);

std::string trajectory_to_json(const Trajectory& traj, int indent = 2);

// Concatenates system prompt (if any) and components 0..upto, each as
// header + text, joined by the template separator.
std::string render_context(const Trajectory& traj, PrefixIndex upto,
                           const RenderTemplate& tmpl = {});

// render_context up to and including component i, with component i's text
// replaced by `replacement` (empty replacement leaves only the header).
// Shared by sentence ablation, hold conditioning, and mask-based renders,
// which keeps their outputs byte-consistent.
std::string render_with_component_text(const Trajectory& traj, std::size_t i,
                                       std::string_view replacement,
                                       const RenderTemplate& tmpl = {});

// Prefix render with sentence j removed from component i; the remaining
// sentence texts are re-joined with single spaces.
std::string ablate_sentence(const Trajectory& traj, std::size_t i, std::size_t j,
                            const RenderTemplate& tmpl = {},
                            const SegmenterConfig& seg = {});

}  // namespace agentattr
