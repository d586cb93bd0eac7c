#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agentattr/errors.hpp"
#include "agentattr/pipeline.hpp"

int main(int argc, char** argv) {
    using namespace agentattr;

    CLI::App app{"Temporal-gain and drop/hold attribution for agent trajectories"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    RunConfig run;
    std::string scorer_name = "ngram";
    std::string run_hold = "literal";
    std::vector<std::string> baselines;
    std::string html_path;
    bool no_cache = false;
    auto* attribute =
        app.add_subcommand("attribute", "Attribute one trajectory's target action");
    attribute->add_option("--trajectory", run.trajectory_path, "Trajectory JSON file")
        ->required();
    attribute->add_option("--scorer", scorer_name, "Scoring backend")
        ->check(CLI::IsMember({"ngram", "http"}))
        ->capture_default_str();
    attribute->add_option("--model-path", run.scorer.ngram.model_path,
                          "Serialized n-gram model (ngram backend)");
    attribute->add_option("--endpoint", run.scorer.http.endpoint,
                          "Completions endpoint (http backend)");
    attribute->add_option("--model", run.scorer.http.model,
                          "Model id sent to the http backend");
    attribute->add_option("--top-k", run.selection.top_k,
                          "Components promoted to sentence analysis")
        ->capture_default_str();
    attribute->add_option("--hold-mode", run_hold, "Hold conditioning")
        ->check(CLI::IsMember({"literal", "contextual"}))
        ->capture_default_str();
    attribute
        ->add_option("--baselines", baselines, "Baselines to run (loo,contextcite)")
        ->delimiter(',');
    attribute->add_option("--out", run.out_path, "Report JSON output path")->required();
    attribute->add_option("--html", html_path, "Also write a static HTML report");
    attribute->add_option("--seed", run.seed, "Seed for baseline mask sampling")
        ->capture_default_str();
    attribute->add_option("--concurrency", run.concurrency, "Bound on parallel scorer calls")
        ->capture_default_str();
    attribute->add_flag("--timings", run.emit_timing,
                        "Record wall-clock in the report (reruns stop being byte-identical)");
    attribute->add_flag("--no-cache", no_cache, "Disable score memoization");

    EvalConfig ev;
    ev.methods = {"drop_hold", "loo", "contextcite"};
    std::string eval_hold = "literal";
    auto* eval =
        app.add_subcommand("eval", "Hit@k evaluation over paired case/ground-truth files");
    eval->add_option("--cases", ev.cases_dir, "Directory of *.trajectory.json cases")
        ->required();
    eval->add_option("--gt", ev.gt_dir, "Ground-truth directory (defaults to --cases)");
    eval->add_option("--methods", ev.methods, "Methods to evaluate")
        ->delimiter(',')
        ->capture_default_str();
    eval->add_option("--k", ev.ks, "Hit@k cutoffs")->delimiter(',')->capture_default_str();
    eval->add_option("--out", ev.out_path, "Evaluation JSON output path")->required();
    eval->add_option("--model-path", ev.model_path,
                     "n-gram model file (defaults to <cases>/model.json)");
    eval->add_option("--top-k", ev.selection.top_k, "Component selection cutoff")
        ->capture_default_str();
    eval->add_option("--hold-mode", eval_hold, "Hold conditioning")
        ->check(CLI::IsMember({"literal", "contextual"}))
        ->capture_default_str();
    eval->add_option("--seed", ev.seed, "Seed for baseline mask sampling")
        ->capture_default_str();
    eval->add_option("--concurrency", ev.concurrency, "Cases evaluated in parallel")
        ->capture_default_str();

    SynthOutConfig sy;
    auto* synth =
        app.add_subcommand("synth", "Generate planted-driver cases with ground truth");
    synth->add_option("--n", sy.synth.num_cases, "Number of cases")->required();
    synth->add_option("--seed", sy.synth.seed, "Generator seed")->capture_default_str();
    synth->add_option("--out", sy.out_dir, "Output directory")->required();
    synth->add_option("--trigger-strength", sy.synth.trigger_strength,
                      "Trigger bigram multiplicity in the reference corpus")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    if (attribute->parsed()) {
        run.scorer.backend =
            scorer_name == "http" ? ScorerBackend::Http : ScorerBackend::NGram;
        run.scorer.cache.enabled = !no_cache;
        run.hold_mode = run_hold == "contextual" ? HoldMode::Contextual : HoldMode::Literal;
        for (const auto& b : baselines) {
            if (b == "loo") {
                run.run_loo = true;
            } else if (b == "contextcite") {
                run.run_contextcite = true;
            } else {
                std::cerr << "usage error: unknown baseline \"" << b << "\"\n";
                return kExitUsage;
            }
        }
        if (!html_path.empty()) run.html_path = html_path;
        run.contextcite.seed = run.seed;
        return cmd_attribute(run);
    }
    if (eval->parsed()) {
        ev.hold_mode = eval_hold == "contextual" ? HoldMode::Contextual : HoldMode::Literal;
        ev.contextcite.seed = ev.seed;
        return cmd_eval(ev);
    }
    return cmd_synth(sy);
}
