#include <benchmark/benchmark.h>

#include "akbe/env.hpp"
#include "akbe/policy.hpp"
#include "akbe/rollout.hpp"

namespace {

using namespace akbe;

WorldConfig bench_world() {
    WorldConfig cfg;
    cfg.n_questions = 64;
    cfg.feature_dim = 12;
    cfg.seed = 17;
    return cfg;
}

void BM_FeaturizeAndDistribution(benchmark::State& state) {
    const WorldConfig wcfg = bench_world();
    const auto questions = generate_world(wcfg);
    const Featurizer feat(wcfg.feature_dim, 6);
    Rng rng(3);
    PolicyParams params = PolicyParams::zeros(feat.dim());
    for (int r = 0; r < kNumActions; ++r)
        for (int c = 0; c < feat.dim(); ++c)
            params.weights(r, c) = rng.uniform(-1, 1);

    std::size_t i = 0;
    for (auto _ : state) {
        const QuestionSpec& q = questions[i++ % questions.size()];
        const auto dist =
            action_distribution(params, feat.featurize(q, EnvState{}), true);
        benchmark::DoNotOptimize(dist);
    }
}
BENCHMARK(BM_FeaturizeAndDistribution);

void BM_DualPathRollout(benchmark::State& state) {
    const WorldConfig wcfg = bench_world();
    const auto questions = generate_world(wcfg);
    const Featurizer feat(wcfg.feature_dim, 6);
    Rng rng(5);
    PolicyParams params = PolicyParams::zeros(feat.dim());
    for (int r = 0; r < kNumActions; ++r)
        for (int c = 0; c < feat.dim(); ++c)
            params.weights(r, c) = rng.uniform(-1, 1);

    RolloutBudget budget;
    budget.g_wt = static_cast<int>(state.range(0));
    budget.g_nt = budget.g_wt / 2;

    std::uint64_t seed = 0;
    std::size_t i = 0;
    for (auto _ : state) {
        const QuestionSpec& q = questions[i++ % questions.size()];
        const RolloutGroup group =
            run_dual_path(params, q, budget, feat, wcfg.eta_poison, ++seed);
        benchmark::DoNotOptimize(group);
    }
}
BENCHMARK(BM_DualPathRollout)->Arg(8)->Arg(16);

void BM_GreedyEvalRollout(benchmark::State& state) {
    const WorldConfig wcfg = bench_world();
    const auto questions = generate_world(wcfg);
    const Featurizer feat(wcfg.feature_dim, 6);
    const PolicyParams params = initial_policy(feat.dim());

    std::size_t i = 0;
    for (auto _ : state) {
        const QuestionSpec& q = questions[i++ % questions.size()];
        Rng rng = derived_rng(wcfg.seed, "eval/" + q.id);
        const Trajectory t = rollout_one_greedy(params, q, feat, 6,
                                                /*with_tool=*/true,
                                                wcfg.eta_poison, rng);
        benchmark::DoNotOptimize(t);
    }
}
BENCHMARK(BM_GreedyEvalRollout);

}  // namespace

BENCHMARK_MAIN();
