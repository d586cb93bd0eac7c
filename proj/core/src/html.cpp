#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "agentattr/report.hpp"

namespace agentattr {

namespace {

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// phi > 0 tints green, phi < 0 red; opacity scales within the component
std::string phi_style(double phi, double scale) {
    const double a = scale > 0.0 ? 0.12 + 0.45 * std::abs(phi) / scale : 0.12;
    char buf[96];
    if (phi >= 0.0) {
        std::snprintf(buf, sizeof(buf), "background:rgba(46,160,67,%.3f)", a);
    } else {
        std::snprintf(buf, sizeof(buf), "background:rgba(248,81,73,%.3f)", a);
    }
    return buf;
}

const char* kStyle = R"(
body { font-family: -apple-system, 'Segoe UI', Roboto, sans-serif; margin: 2rem auto;
       max-width: 60rem; color: #1f2328; line-height: 1.5; }
h1 { font-size: 1.4rem; } h2 { font-size: 1.1rem; margin-top: 2rem; }
.meta { color: #57606a; font-size: 0.85rem; }
.meta td { padding: 0.1rem 0.8rem 0.1rem 0; }
.component { border: 1px solid #d0d7de; border-radius: 6px; margin: 0.8rem 0;
             padding: 0.6rem 0.9rem; }
.component.selected { border-color: #bf8700; background: #fff8c5; }
.chead { font-weight: 600; font-size: 0.85rem; color: #57606a; margin-bottom: 0.3rem; }
.gain { float: right; font-family: ui-monospace, monospace; font-size: 0.8rem;
        padding: 0 0.4rem; border-radius: 4px; background: #eaeef2; }
.gain.pos { background: #dafbe1; } .gain.neg { background: #ffebe9; }
.ctext { white-space: pre-wrap; font-size: 0.95rem; }
.sent { border-radius: 3px; padding: 0 1px; cursor: help; }
table.scores { border-collapse: collapse; font-size: 0.85rem; margin: 0.5rem 0; }
table.scores th, table.scores td { border: 1px solid #d0d7de; padding: 0.2rem 0.6rem;
                                   text-align: right; font-family: ui-monospace, monospace; }
table.scores th { background: #f6f8fa; font-family: inherit; }
)";

}  // namespace

std::string emit_html(const AttributionReport& report) {
    // sentence entries grouped per component, ordered by sentence index
    std::map<std::size_t, std::vector<const SentenceEntry*>> per_component;
    for (const auto& e : report.sentence_scores) {
        per_component[e.score.component_index].push_back(&e);
    }
    for (auto& [_, entries] : per_component) {
        std::sort(entries.begin(), entries.end(), [](const auto* a, const auto* b) {
            return a->score.sentence_index < b->score.sentence_index;
        });
    }

    std::string html;
    html += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    html += "<title>Attribution report: " + escape(report.trajectory.meta.id) + "</title>\n";
    html += "<style>" + std::string(kStyle) + "</style>\n</head>\n<body>\n";
    html += "<h1>Attribution report</h1>\n";
    html += "<table class=\"meta\">\n";
    html += "<tr><td>trajectory</td><td>" + escape(report.trajectory.meta.id) + "</td></tr>\n";
    html += "<tr><td>scoring model</td><td>" + escape(report.scoring_model) + "</td></tr>\n";
    html += "<tr><td>target action</td><td>" + escape(report.trajectory.target_action) +
            "</td></tr>\n";
    html += "<tr><td>hold mode</td><td>" + escape(report.hold_mode) + "</td></tr>\n";
    html += "<tr><td>scorer calls</td><td>" + std::to_string(report.scorer_calls) +
            "</td></tr>\n";
    html += "<tr><td>tool version</td><td>" + escape(report.tool_version) + "</td></tr>\n";
    html += "</table>\n";

    html += "<h2>Components</h2>\n";
    for (std::size_t i = 0; i < report.trajectory.components.size(); ++i) {
        const auto& comp = report.trajectory.components[i];
        const bool selected =
            std::find(report.selected_components.begin(), report.selected_components.end(),
                      i) != report.selected_components.end();
        const double gain = i < report.gains.size() ? report.gains[i] : 0.0;

        html += "<div class=\"component" + std::string(selected ? " selected" : "") + "\">\n";
        html += "<div class=\"chead\"><span class=\"gain " +
                std::string(gain >= 0 ? "pos" : "neg") + "\">gain " + num(gain) +
                "</span>#" + std::to_string(i) + " " +
                escape(std::string(kind_name(comp.kind))) + "</div>\n";

        auto it = per_component.find(i);
        if (it == per_component.end()) {
            html += "<div class=\"ctext\">" + escape(comp.text) + "</div>\n";
        } else {
            double scale = 0.0;
            for (const auto* e : it->second) {
                scale = std::max(scale, std::abs(e->score.phi));
            }
            html += "<div class=\"ctext\">";
            std::size_t pos = 0;
            for (const auto* e : it->second) {
                if (e->span_begin > pos) {
                    html += escape(comp.text.substr(pos, e->span_begin - pos));
                }
                html += "<span class=\"sent\" style=\"" + phi_style(e->score.phi, scale) +
                        "\" title=\"drop=" + num(e->score.drop) +
                        " hold=" + num(e->score.hold) + " phi=" + num(e->score.phi) + "\">" +
                        escape(e->text) + "</span>";
                pos = e->span_end;
            }
            if (pos < comp.text.size()) html += escape(comp.text.substr(pos));
            html += "</div>\n";
        }
        html += "</div>\n";
    }

    if (report.baselines && (report.baselines->loo_enabled ||
                             report.baselines->contextcite_enabled)) {
        html += "<h2>Baselines</h2>\n";
        for (std::size_t comp_idx : report.selected_components) {
            auto it = per_component.find(comp_idx);
            if (it == per_component.end()) continue;

            const std::vector<double>* loo = nullptr;
            for (const auto& e : report.baselines->loo) {
                if (e.component_index == comp_idx) loo = &e.scores;
            }
            const SurrogateFit* cc = nullptr;
            for (const auto& e : report.baselines->contextcite) {
                if (e.component_index == comp_idx) cc = &e.fit;
            }

            html += "<h3>Component #" + std::to_string(comp_idx) + "</h3>\n";
            html += "<table class=\"scores\">\n<tr><th>sentence</th><th>drop</th>"
                    "<th>hold</th><th>phi</th>";
            if (loo) html += "<th>loo</th>";
            if (cc) html += "<th>contextcite</th>";
            html += "</tr>\n";
            for (const auto* e : it->second) {
                const std::size_t j = e->score.sentence_index;
                html += "<tr><td>" + std::to_string(j) + "</td><td>" + num(e->score.drop) +
                        "</td><td>" + num(e->score.hold) + "</td><td>" + num(e->score.phi) +
                        "</td>";
                if (loo) html += "<td>" + (j < loo->size() ? num((*loo)[j]) : "") + "</td>";
                if (cc) {
                    html += "<td>" + (j < cc->weights.size() ? num(cc->weights[j]) : "") +
                            "</td>";
                }
                html += "</tr>\n";
            }
            html += "</table>\n";
        }
    }

    html += "</body>\n</html>\n";
    return html;
}

}  // namespace agentattr
