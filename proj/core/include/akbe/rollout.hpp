#pragma once
// Dual-path rollout execution. Each trajectory draws from its own derived
// RNG stream keyed by (seed, path, rollout index), so results are identical
// whether the group is sampled serially or in parallel.

#include <cstdint>

#include "akbe/env.hpp"
#include "akbe/policy.hpp"
#include "akbe/types.hpp"

namespace akbe {

struct RolloutBudget {
    int g_wt = 16;
    int g_nt = 8;
    int max_turns = 6;
};

void validate_budget(const RolloutBudget& budget);

// One trajectory. With tool access, the support is restricted to terminal
// actions once the turn budget is spent, so every trajectory ends with an
// answer and stays judgeable. The final reward is attached at rollout time.
Trajectory rollout_one(const PolicyParams& params, const QuestionSpec& q,
                       const Featurizer& feat, int max_turns, bool with_tool,
                       double eta_poison, Rng& rng);

// Greedy variant used for held-out evaluation: argmax instead of sampling;
// environment draws still come from rng.
Trajectory rollout_one_greedy(const PolicyParams& params, const QuestionSpec& q,
                              const Featurizer& feat, int max_turns,
                              bool with_tool, double eta_poison, Rng& rng);

std::vector<Trajectory> rollout_with_tool(const PolicyParams& params,
                                          const QuestionSpec& q,
                                          const RolloutBudget& budget,
                                          const Featurizer& feat,
                                          double eta_poison,
                                          std::uint64_t seed);

std::vector<Trajectory> rollout_no_tool(const PolicyParams& params,
                                        const QuestionSpec& q,
                                        const RolloutBudget& budget,
                                        const Featurizer& feat,
                                        double eta_poison, std::uint64_t seed);

// Both paths under independent derived streams.
RolloutGroup run_dual_path(const PolicyParams& params, const QuestionSpec& q,
                           const RolloutBudget& budget, const Featurizer& feat,
                           double eta_poison, std::uint64_t seed);

}  // namespace akbe
