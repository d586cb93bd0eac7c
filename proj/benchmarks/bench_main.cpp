#include <benchmark/benchmark.h>

#include <cstddef>
#include <string>
#include <vector>

#include "agentattr/attribution.hpp"
#include "agentattr/baselines.hpp"
#include "agentattr/evaluation.hpp"
#include "agentattr/ngram.hpp"
#include "agentattr/sentence_attribution.hpp"

namespace {

using namespace agentattr;

// One shared planted suite; generation cost stays out of the timed regions.
const SynthSuite& suite() {
    static SynthSuite s = [] {
        SynthConfig cfg;
        cfg.seed = 3;
        cfg.num_cases = 8;
        return generate_suite(cfg);
    }();
    return s;
}

void bm_ngram_score_target(benchmark::State& state) {
    const NGramModel& model = suite().model;
    const Trajectory& traj = suite().cases[0].trajectory;
    const std::string context = render_context(traj, traj.size() - 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.score_target(context, traj.target_action));
    }
}
BENCHMARK(bm_ngram_score_target);

void bm_prefix_supports(benchmark::State& state) {
    NGramScorer scorer(suite().model);
    const Trajectory& traj = suite().cases[0].trajectory;
    const int concurrency = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(prefix_supports(traj, scorer, {}, concurrency));
    }
}
BENCHMARK(bm_prefix_supports)->Arg(1)->Arg(4);

void bm_score_sentences(benchmark::State& state) {
    NGramScorer scorer(suite().model);
    const SynthCase& sc = suite().cases[0];
    SentenceAttributionOptions opts;
    opts.concurrency = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            score_sentences(sc.trajectory, sc.ground_truth.component_index, scorer, opts));
    }
}
BENCHMARK(bm_score_sentences)->Arg(1)->Arg(4);

void bm_fit_lasso(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto masks = enumerate_masks(n);
    std::vector<double> y(masks.size());
    for (std::size_t k = 0; k < masks.size(); ++k) {
        double v = 0.25;
        for (std::size_t j = 0; j < n; ++j) {
            if (masks[k].bits[j]) v += (j % 2 == 0 ? 1.0 : -0.5) * (1.0 + 0.1 * j);
        }
        y[k] = v;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_lasso(masks, y, 0.01));
    }
}
BENCHMARK(bm_fit_lasso)->Arg(6)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
