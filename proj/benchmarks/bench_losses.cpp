#include <benchmark/benchmark.h>

#include "akbe/objectives.hpp"
#include "akbe/rollout.hpp"
#include "akbe/signals.hpp"

namespace {

using namespace akbe;

struct Fixture {
    Featurizer feat{12, 6};
    QuestionSpec question;
    World world;
    PolicyParams params;
    RolloutGroup group;
    AdvantageSet advantages;
    SignalSet signals;

    Fixture() {
        WorldConfig wcfg;
        wcfg.n_questions = 1;
        wcfg.feature_dim = 12;
        wcfg.seed = 23;
        question = generate_world(wcfg).front();
        world = World({question});

        Rng rng(7);
        params = PolicyParams::zeros(feat.dim());
        for (int r = 0; r < kNumActions; ++r)
            for (int c = 0; c < feat.dim(); ++c)
                params.weights(r, c) = rng.uniform(-1, 1);

        RolloutBudget budget;
        budget.g_wt = 8;
        budget.g_nt = 4;
        group = run_dual_path(params, question, budget, feat, wcfg.eta_poison,
                              99);
        std::vector<double> rewards = group_rewards(group, GrpoConfig{});
        if (std::adjacent_find(rewards.begin(), rewards.end(),
                               std::not_equal_to<>()) == rewards.end())
            rewards[0] += 1.0;
        advantages = group_advantages(rewards);

        const DualPathOutcome outcome = classify(group);
        Rng select_rng(1);
        if (auto target = select_target(group, outcome, select_rng))
            signals.items.push_back({question.id, *target, outcome.category});
    }
};

void BM_GrpoLossAndGrad(benchmark::State& state) {
    const Fixture fx;
    GrpoConfig cfg;
    cfg.beta = state.range(0) == 0 ? 0.0 : 0.04;
    for (auto _ : state) {
        const LossTerms terms = grpo_loss_and_grad(
            fx.params, fx.params, fx.params, fx.group, fx.advantages, cfg,
            fx.feat);
        benchmark::DoNotOptimize(terms);
    }
}
BENCHMARK(BM_GrpoLossAndGrad)->Arg(0)->Arg(1);

void BM_BoundaryLossAndGrad(benchmark::State& state) {
    const Fixture fx;
    for (auto _ : state) {
        const LossTerms terms = akbe_loss_and_grad(fx.params, fx.signals,
                                                   fx.world, fx.feat,
                                                   AkbeConfig{});
        benchmark::DoNotOptimize(terms);
    }
}
BENCHMARK(BM_BoundaryLossAndGrad);

void BM_TrajLogprobGrad(benchmark::State& state) {
    const Fixture fx;
    std::size_t i = 0;
    for (auto _ : state) {
        const Trajectory& t = fx.group.with_tool[i++ % fx.group.with_tool.size()];
        benchmark::DoNotOptimize(
            traj_logprob_grad(fx.params, t, fx.question, fx.feat));
    }
}
BENCHMARK(BM_TrajLogprobGrad);

}  // namespace

BENCHMARK_MAIN();
