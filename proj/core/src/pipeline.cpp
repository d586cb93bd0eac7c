#include "agentattr/pipeline.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "agentattr/baselines.hpp"
#include "agentattr/errors.hpp"
#include "internal/parallel.hpp"

namespace agentattr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kTrajectorySuffix = ".trajectory.json";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path);
    return buf.str();
}

std::shared_ptr<Scorer> non_owning(Scorer& s) {
    return std::shared_ptr<Scorer>(&s, [](Scorer*) {});
}

std::vector<std::size_t> rank_desc(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;
    });
    return order;
}

int guard(const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ScorerError& e) {
        std::cerr << "scorer error: " << e.what() << "\n";
        return kExitScorer;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

void write_file_atomic(const std::string& path, std::string_view content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("rename to " + path + " failed: " + ec.message());
    }
}

AttributionReport run_attribution(const Trajectory& traj, Scorer& scorer,
                                  const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    CountingScorer counting(non_owning(scorer));

    AttributionReport report;
    report.scoring_model = scorer.identity();
    report.trajectory = traj;
    report.hold_mode = hold_mode_name(cfg.hold_mode);
    report.cache_enabled = cfg.scorer.cache.enabled;
    report.seed = cfg.seed;

    const auto psi = prefix_supports(traj, counting, cfg.tmpl, cfg.concurrency);
    const auto gains = temporal_gains(psi);
    const auto ranking = rank_components(gains, cfg.selection);
    report.psi = psi.psi;
    report.gains = gains.gains;
    report.component_ranking = ranking.ranking;
    report.selected_components = ranking.selected;

    SentenceAttributionOptions opts;
    opts.hold_mode = cfg.hold_mode;
    opts.concurrency = cfg.concurrency;
    opts.segmenter = cfg.segmenter;
    opts.tmpl = cfg.tmpl;

    for (std::size_t i : ranking.selected) {
        const auto sentences = segment_sentences(traj.components[i], cfg.segmenter);
        const auto scores = score_sentences(traj, i, counting, opts);
        report.sentence_rankings.push_back(rank_sentences(scores, opts.evidence_m));
        for (std::size_t j = 0; j < scores.size(); ++j) {
            SentenceEntry e;
            e.score = scores[j];
            e.text = sentences[j].text;
            e.span_begin = sentences[j].span_begin;
            e.span_end = sentences[j].span_end;
            report.sentence_scores.push_back(std::move(e));
        }
    }

    if (cfg.run_loo || cfg.run_contextcite) {
        BaselineResults b;
        b.loo_enabled = cfg.run_loo;
        b.contextcite_enabled = cfg.run_contextcite;
        b.contextcite_config = cfg.contextcite;
        for (std::size_t i : ranking.selected) {
            if (cfg.run_loo) {
                b.loo.push_back({i, loo_attribution(traj, i, counting, cfg.tmpl,
                                                    cfg.segmenter)});
            }
            if (cfg.run_contextcite) {
                b.contextcite.push_back(
                    {i, contextcite_attribution(traj, i, counting, cfg.contextcite,
                                                cfg.tmpl, cfg.segmenter, cfg.concurrency)});
            }
        }
        report.baselines = std::move(b);
    }

    report.scorer_calls = counting.calls();
    if (cfg.emit_timing) {
        report.elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
    }
    return report;
}

int cmd_attribute(const RunConfig& cfg) {
    return guard([&] {
        if (cfg.trajectory_path.empty())
            throw std::invalid_argument("attribute: trajectory path is required");
        if (cfg.out_path.empty()) throw std::invalid_argument("attribute: --out is required");
        const Trajectory traj = parse_trajectory(read_file(cfg.trajectory_path));
        const auto scorer = make_scorer(cfg.scorer);
        const AttributionReport report = run_attribution(traj, *scorer, cfg);
        write_file_atomic(cfg.out_path, report_to_json(report, 2) + "\n");
        if (cfg.html_path) write_file_atomic(*cfg.html_path, emit_html(report));
    });
}

EvalResult evaluate_cases(const std::vector<SynthCase>& cases, Scorer& scorer,
                          const EvalConfig& cfg) {
    if (cases.empty()) throw std::invalid_argument("eval: no cases");
    if (cfg.methods.empty()) throw std::invalid_argument("eval: no methods requested");
    for (const auto& m : cfg.methods) {
        if (m != "drop_hold" && m != "loo" && m != "contextcite") {
            throw std::invalid_argument("eval: unknown method " + m);
        }
    }

    const RenderTemplate tmpl;
    const SegmenterConfig seg;
    std::vector<PerCaseHits> hits(cases.size());
    internal::for_each_index(cases.size(), cfg.concurrency, [&](std::size_t ci) {
        const Trajectory& traj = cases[ci].trajectory;
        const GroundTruth& gt = cases[ci].ground_truth;

        PerCaseHits h;
        h.case_id = gt.case_id;

        const auto psi = prefix_supports(traj, scorer, tmpl, 1);
        const auto gains = temporal_gains(psi);
        const auto ranking = rank_components(gains, cfg.selection);

        for (std::size_t k : cfg.ks) {
            int hit = 0;
            for (std::size_t r = 0; r < std::min(k, ranking.ranking.size()); ++r) {
                if (ranking.ranking[r].component_index == gt.component_index) hit = 1;
            }
            h.component_hits[k] = hit;
        }

        // Sentence hits are measured on the driver component when the
        // selection stage surfaced it; a missed driver scores 0 at every k.
        const bool gt_selected =
            std::find(ranking.selected.begin(), ranking.selected.end(),
                      gt.component_index) != ranking.selected.end();

        for (const auto& method : cfg.methods) {
            std::vector<std::size_t> order;
            if (gt_selected) {
                if (method == "drop_hold") {
                    SentenceAttributionOptions opts;
                    opts.hold_mode = cfg.hold_mode;
                    opts.concurrency = 1;
                    opts.segmenter = seg;
                    opts.tmpl = tmpl;
                    order = rank_sentences(
                                score_sentences(traj, gt.component_index, scorer, opts),
                                opts.evidence_m)
                                .order;
                } else if (method == "loo") {
                    order = rank_desc(
                        loo_attribution(traj, gt.component_index, scorer, tmpl, seg));
                } else {
                    order = rank_desc(contextcite_attribution(traj, gt.component_index,
                                                              scorer, cfg.contextcite, tmpl,
                                                              seg, 1)
                                          .weights);
                }
            }
            for (std::size_t k : cfg.ks) {
                h.method_hits[method][k] = order.empty() ? 0 : hit_at_k(order, gt, k);
            }
        }
        hits[ci] = std::move(h);
    });
    return aggregate(hits, cfg.ks);
}

int cmd_eval(const EvalConfig& cfg) {
    return guard([&] {
        if (cfg.cases_dir.empty()) throw std::invalid_argument("eval: --cases is required");
        if (cfg.out_path.empty()) throw std::invalid_argument("eval: --out is required");
        const std::string gt_dir = cfg.gt_dir.empty() ? cfg.cases_dir : cfg.gt_dir;

        std::vector<fs::path> traj_files;
        for (const auto& entry : fs::directory_iterator(cfg.cases_dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            if (name.size() > kTrajectorySuffix.size() && name.ends_with(kTrajectorySuffix)) {
                traj_files.push_back(entry.path());
            }
        }
        std::sort(traj_files.begin(), traj_files.end());
        if (traj_files.empty()) {
            throw IoError("no *" + std::string(kTrajectorySuffix) + " files in " +
                          cfg.cases_dir);
        }

        std::vector<SynthCase> cases;
        cases.reserve(traj_files.size());
        for (const auto& tf : traj_files) {
            const std::string name = tf.filename().string();
            const std::string id = name.substr(0, name.size() - kTrajectorySuffix.size());
            SynthCase sc;
            sc.trajectory = parse_trajectory(read_file(tf.string()));
            const fs::path gt_path = fs::path(gt_dir) / (id + ".gt.json");
            if (!fs::exists(gt_path)) {
                throw IoError("case " + id + " has no ground truth at " + gt_path.string());
            }
            sc.ground_truth = load_ground_truth_checked(read_file(gt_path.string()),
                                                        sc.trajectory);
            cases.push_back(std::move(sc));
        }

        const std::string model_path =
            cfg.model_path.empty() ? (fs::path(cfg.cases_dir) / "model.json").string()
                                   : cfg.model_path;
        NGramScorer backend(NGramModel::from_json(read_file(model_path)));
        CachedScorer scorer(non_owning(backend));

        const EvalResult result = evaluate_cases(cases, scorer, cfg);
        write_file_atomic(cfg.out_path, eval_result_to_json(result, 2) + "\n");
        std::cout << format_eval_table(result);
    });
}

int cmd_synth(const SynthOutConfig& cfg) {
    return guard([&] {
        if (cfg.out_dir.empty()) throw std::invalid_argument("synth: --out is required");
        const SynthSuite suite = generate_suite(cfg.synth);
        fs::create_directories(cfg.out_dir);
        for (const auto& sc : suite.cases) {
            const std::string& id = sc.ground_truth.case_id;
            write_file_atomic((fs::path(cfg.out_dir) / (id + std::string(kTrajectorySuffix)))
                                  .string(),
                              trajectory_to_json(sc.trajectory, 2) + "\n");
            write_file_atomic((fs::path(cfg.out_dir) / (id + ".gt.json")).string(),
                              ground_truth_to_json(sc.ground_truth, 2) + "\n");
        }
        write_file_atomic((fs::path(cfg.out_dir) / "model.json").string(),
                          suite.model.to_json(2) + "\n");
    });
}

std::string format_eval_table(const EvalResult& result) {
    std::vector<std::size_t> ks;
    for (const auto& [k, _] : result.component) ks.push_back(k);

    std::size_t width = std::string("component").size();
    for (const auto& [m, _] : result.methods) width = std::max(width, m.size());

    std::ostringstream out;
    auto pad = [&](const std::string& s) {
        out << s << std::string(width - s.size() + 2, ' ');
    };
    auto row = [&](const std::string& label, const std::map<std::size_t, double>& cells) {
        pad(label);
        for (std::size_t k : ks) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%7.3f", cells.at(k));
            out << buf;
        }
        out << "\n";
    };

    pad("method");
    for (std::size_t k : ks) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%7s", ("Hit@" + std::to_string(k)).c_str());
        out << buf;
    }
    out << "\n";
    row("component", result.component);
    for (const auto& [m, cells] : result.methods) row(m, cells);
    out << "cases: " << result.num_cases << "\n";
    return out.str();
}

std::string eval_result_to_json(const EvalResult& result, int indent) {
    auto hit_key = [](std::size_t k) { return "hit@" + std::to_string(k); };

    json methods = json::object();
    for (const auto& [m, cells] : result.methods) {
        json row = json::object();
        for (const auto& [k, v] : cells) row[hit_key(k)] = v;
        methods[m] = std::move(row);
    }
    json component = json::object();
    for (const auto& [k, v] : result.component) component[hit_key(k)] = v;

    json per_case = json::array();
    for (const auto& h : result.per_case) {
        json comp = json::object();
        for (const auto& [k, v] : h.component_hits) comp[hit_key(k)] = v;
        json meths = json::object();
        for (const auto& [m, cells] : h.method_hits) {
            json row = json::object();
            for (const auto& [k, v] : cells) row[hit_key(k)] = v;
            meths[m] = std::move(row);
        }
        per_case.push_back({{"case_id", h.case_id},
                            {"component", std::move(comp)},
                            {"methods", std::move(meths)}});
    }

    const json doc{{"methods", std::move(methods)},
                   {"component", std::move(component)},
                   {"num_cases", result.num_cases},
                   {"per_case", std::move(per_case)}};
    return doc.dump(indent);
}

}  // namespace agentattr
