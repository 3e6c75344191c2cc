#pragma once
// Rewards, group-relative advantages, and the clipped policy objective with
// optional KL regularization. Also the shaped-reward baseline that divides
// the outcome reward by tool usage.

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "akbe/policy.hpp"
#include "akbe/types.hpp"

namespace akbe {

enum class RewardMode : int { Standard = 0, OtcShaped = 1 };

struct GrpoConfig {
    double epsilon = 0.2;  // clip threshold
    double beta = 0.0;     // KL coefficient
    RewardMode reward_mode = RewardMode::Standard;
    double otc_alpha = 1.0;
};

void validate_grpo_config(const GrpoConfig& cfg);

// Binary outcome reward on the judge bit.
inline int em_reward(bool correct) { return correct ? 1 : 0; }

// 0 iff the terminal action is Malformed.
int format_indicator(const Trajectory& traj);

// Full reward table: format violation forces -1, otherwise the EM reward.
inline int final_reward(bool correct, bool format_ok) {
    return format_ok ? em_reward(correct) : -1;
}

// Shaped baseline: a correct answer is scaled by 1/(1 + alpha*tc);
// non-positive rewards pass through.
double otc_shaped_reward(const Trajectory& traj, double alpha);

struct AdvantageSet {
    std::vector<double> values;
};

// (r - mean)/std with population std; all-equal rewards map to all zeros.
AdvantageSet group_advantages(const std::vector<double>& rewards);

// Group rewards under the configured mode, aligned with group.with_tool.
std::vector<double> group_rewards(const RolloutGroup& group,
                                  const GrpoConfig& cfg);

// exp(logprob(params) - logprob(old_params)) for one trajectory.
double importance_ratio(const PolicyParams& params,
                        const PolicyParams& old_params, const Trajectory& traj,
                        const QuestionSpec& q, const Featurizer& feat);

// Exact categorical KL D(pi_params || pi_ref) summed over the trajectory's
// action steps.
double kl_divergence(const PolicyParams& params, const PolicyParams& ref_params,
                     const Trajectory& traj, const QuestionSpec& q,
                     const Featurizer& feat);

struct LossTerms {
    double loss = 0.0;
    GradMatrix grad;  // d loss / d weights

    static LossTerms zeros(int feature_dim) {
        return {0.0, GradMatrix::Zero(kNumActions, feature_dim)};
    }
};

// Clipped surrogate for one group:
//   loss = -(1/G) sum_i [ min(r_i A_i, clip(r_i, 1-eps, 1+eps) A_i)
//                         - beta KL_i ]
// The gradient is exact; a term whose min selects the clipped branch at an
// active clip contributes zero policy gradient.
LossTerms grpo_loss_and_grad(const PolicyParams& params,
                             const PolicyParams& old_params,
                             const PolicyParams& ref_params,
                             const RolloutGroup& group,
                             const AdvantageSet& advantages,
                             const GrpoConfig& cfg, const Featurizer& feat);

// Seam for swapping the per-group policy objective: any loss with this
// signature can replace the clipped surrogate without touching the trainer
// or the auxiliary boundary objective.
using RlLossFn = std::function<LossTerms(
    const PolicyParams& params, const PolicyParams& old_params,
    const PolicyParams& ref_params, const RolloutGroup& group,
    const AdvantageSet& advantages, const GrpoConfig& cfg,
    const Featurizer& feat)>;

}  // namespace akbe
