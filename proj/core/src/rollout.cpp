#include "akbe/rollout.hpp"

#include <cassert>
#include <string>

#include "akbe/errors.hpp"
#include "akbe/objectives.hpp"

namespace akbe {

void validate_budget(const RolloutBudget& budget) {
    if (budget.g_wt < 1) throw ConfigError("budget: g_wt must be >= 1");
    if (budget.g_nt < 1) throw ConfigError("budget: g_nt must be >= 1");
    if (budget.max_turns < 1)
        throw ConfigError("budget: max_turns must be >= 1");
}

namespace {

Trajectory run_episode(const PolicyParams& params, const QuestionSpec& q,
                       const Featurizer& feat, int max_turns, bool with_tool,
                       double eta_poison, bool greedy, Rng& rng) {
    Trajectory traj;
    traj.question_id = q.id;
    traj.path = with_tool ? Path::WithTool : Path::NoTool;
    EnvState state;
    while (true) {
        const bool tool_allowed = with_tool && state.turn < max_turns;
        const ActionDistribution dist =
            action_distribution(params, feat.featurize(q, state), tool_allowed);
        ActionKind action;
        double log_prob;
        if (greedy) {
            action = argmax_action(dist);
            log_prob = std::log(dist.prob[static_cast<int>(action)]);
        } else {
            std::tie(action, log_prob) = sample_action(dist, rng);
        }
        if (action == ActionKind::ToolCall) {
            auto [obs, next] = env_transition(q, state, action, max_turns, rng);
            traj.steps.push_back({action, obs, log_prob});
            state = next;
            continue;
        }
        traj.steps.push_back({action, std::nullopt, log_prob});
        traj.correct = judge(q, state, action, eta_poison, rng);
        traj.format_ok = action != ActionKind::Malformed;
        traj.reward = final_reward(traj.correct, traj.format_ok);
        break;
    }
    traj.tc = tool_call_count(traj);
    assert(!validate_trajectory(traj));
    return traj;
}

}  // namespace

Trajectory rollout_one(const PolicyParams& params, const QuestionSpec& q,
                       const Featurizer& feat, int max_turns, bool with_tool,
                       double eta_poison, Rng& rng) {
    return run_episode(params, q, feat, max_turns, with_tool, eta_poison,
                       /*greedy=*/false, rng);
}

Trajectory rollout_one_greedy(const PolicyParams& params, const QuestionSpec& q,
                              const Featurizer& feat, int max_turns,
                              bool with_tool, double eta_poison, Rng& rng) {
    return run_episode(params, q, feat, max_turns, with_tool, eta_poison,
                       /*greedy=*/true, rng);
}

std::vector<Trajectory> rollout_with_tool(const PolicyParams& params,
                                          const QuestionSpec& q,
                                          const RolloutBudget& budget,
                                          const Featurizer& feat,
                                          double eta_poison,
                                          std::uint64_t seed) {
    validate_budget(budget);
    std::vector<Trajectory> out;
    out.reserve(budget.g_wt);
    for (int i = 0; i < budget.g_wt; ++i) {
        Rng rng = derived_rng(seed, "wt/" + std::to_string(i));
        out.push_back(rollout_one(params, q, feat, budget.max_turns,
                                  /*with_tool=*/true, eta_poison, rng));
    }
    return out;
}

std::vector<Trajectory> rollout_no_tool(const PolicyParams& params,
                                        const QuestionSpec& q,
                                        const RolloutBudget& budget,
                                        const Featurizer& feat,
                                        double eta_poison, std::uint64_t seed) {
    validate_budget(budget);
    std::vector<Trajectory> out;
    out.reserve(budget.g_nt);
    for (int i = 0; i < budget.g_nt; ++i) {
        Rng rng = derived_rng(seed, "nt/" + std::to_string(i));
        out.push_back(rollout_one(params, q, feat, budget.max_turns,
                                  /*with_tool=*/false, eta_poison, rng));
    }
    return out;
}

RolloutGroup run_dual_path(const PolicyParams& params, const QuestionSpec& q,
                           const RolloutBudget& budget, const Featurizer& feat,
                           double eta_poison, std::uint64_t seed) {
    RolloutGroup group;
    group.question = q;
    group.with_tool =
        rollout_with_tool(params, q, budget, feat, eta_poison, seed);
    group.no_tool = rollout_no_tool(params, q, budget, feat, eta_poison, seed);
    return group;
}

}  // namespace akbe
