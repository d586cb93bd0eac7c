#include <cctype>
#include <string_view>

#include <json.hpp>

#include "agentattr/trajectory.hpp"

namespace agentattr {

namespace {

bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_terminator(char c, const SegmenterConfig& cfg) {
    return cfg.terminators.find(c) != std::string::npos;
}

// Scans a validated top-level JSON object and yields one span per key/value
// pair. The first span starts at '{', each span swallows its trailing comma,
// and the last span ends just past '}', so no non-whitespace byte escapes.
std::vector<std::pair<std::size_t, std::size_t>> json_field_spans(std::string_view text) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t open = 0;
    while (open < text.size() && is_ws(text[open])) ++open;

    std::size_t begin = open;
    int depth = 1;
    bool in_string = false;
    bool escaped = false;
    bool pending_begin = false;
    for (std::size_t i = open + 1; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (pending_begin && !is_ws(c)) {
            begin = i;
            pending_begin = false;
        }
        switch (c) {
            case '"': in_string = true; break;
            case '{':
            case '[': ++depth; break;
            case '}':
            case ']':
                if (--depth == 0) {
                    spans.emplace_back(begin, i + 1);
                    return spans;
                }
                break;
            case ',':
                if (depth == 1) {
                    spans.emplace_back(begin, i + 1);
                    pending_begin = true;
                }
                break;
            default: break;
        }
    }
    return spans;
}

std::vector<std::pair<std::size_t, std::size_t>> prose_spans(std::string_view text,
                                                             const SegmenterConfig& cfg) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && is_ws(text[i])) ++i;
        if (i == n) break;
        const std::size_t begin = i;
        std::size_t end = n;
        while (i < n) {
            const char c = text[i];
            if (c == '\n') {
                end = i;
                break;
            }
            if (is_terminator(c, cfg)) {
                std::size_t j = i + 1;
                while (j < n && is_terminator(text[j], cfg)) ++j;
                if (j == n || is_ws(text[j])) {
                    end = j;
                    i = j;
                    break;
                }
                i = j;  // interior punctuation, e.g. "3.14" or "a.b.c"
                continue;
            }
            ++i;
        }
        if (i == n) end = n;
        while (end > begin && is_ws(text[end - 1])) --end;
        if (end > begin) spans.emplace_back(begin, end);
    }
    return spans;
}

bool try_json_object(std::string_view text) {
    std::size_t p = 0;
    while (p < text.size() && is_ws(text[p])) ++p;
    if (p == text.size() || text[p] != '{') return false;
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    return !doc.is_discarded() && doc.is_object();
}

}  // namespace

std::vector<Sentence> segment_sentences(const Component& c, const SegmenterConfig& cfg) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    if (cfg.json_field_units && try_json_object(c.text)) {
        spans = json_field_spans(c.text);
    } else {
        spans = prose_spans(c.text, cfg);
    }

    std::vector<Sentence> out;
    out.reserve(spans.size());
    for (std::size_t j = 0; j < spans.size(); ++j) {
        Sentence s;
        s.component_index = c.index;
        s.sentence_index = j;
        s.span_begin = spans[j].first;
        s.span_end = spans[j].second;
        s.text = c.text.substr(s.span_begin, s.span_end - s.span_begin);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace agentattr
