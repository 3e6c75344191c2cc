#include "akbe/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "akbe/errors.hpp"

namespace akbe {

void validate_grpo_config(const GrpoConfig& cfg) {
    if (cfg.epsilon <= 0.0) throw ConfigError("grpo: epsilon must be > 0");
    if (cfg.beta < 0.0) throw ConfigError("grpo: beta must be >= 0");
    if (cfg.otc_alpha <= 0.0) throw ConfigError("grpo: otc_alpha must be > 0");
}

int format_indicator(const Trajectory& traj) {
    if (traj.steps.empty()) throw ContractError("format_indicator: empty trajectory");
    return traj.steps.back().action == ActionKind::Malformed ? 0 : 1;
}

double otc_shaped_reward(const Trajectory& traj, double alpha) {
    if (alpha <= 0.0) throw ContractError("otc_shaped_reward: alpha must be > 0");
    if (traj.reward <= 0) return static_cast<double>(traj.reward);
    return traj.reward / (1.0 + alpha * traj.tc);
}

AdvantageSet group_advantages(const std::vector<double>& rewards) {
    const std::size_t n = rewards.size();
    if (n < 2) throw ConfigError("group_advantages: need at least 2 rewards");
    const bool all_equal =
        std::all_of(rewards.begin(), rewards.end(),
                    [&](double r) { return r == rewards.front(); });
    AdvantageSet adv;
    adv.values.assign(n, 0.0);
    if (all_equal) return adv;
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= static_cast<double>(n);
    const double std_dev = std::sqrt(var);
    for (std::size_t i = 0; i < n; ++i)
        adv.values[i] = (rewards[i] - mean) / std_dev;
    return adv;
}

std::vector<double> group_rewards(const RolloutGroup& group,
                                  const GrpoConfig& cfg) {
    std::vector<double> rewards;
    rewards.reserve(group.with_tool.size());
    for (const Trajectory& traj : group.with_tool) {
        rewards.push_back(cfg.reward_mode == RewardMode::OtcShaped
                              ? otc_shaped_reward(traj, cfg.otc_alpha)
                              : static_cast<double>(traj.reward));
    }
    return rewards;
}

double importance_ratio(const PolicyParams& params,
                        const PolicyParams& old_params, const Trajectory& traj,
                        const QuestionSpec& q, const Featurizer& feat) {
    return std::exp(traj_logprob(params, traj, q, feat) -
                    traj_logprob(old_params, traj, q, feat));
}

double kl_divergence(const PolicyParams& params, const PolicyParams& ref_params,
                     const Trajectory& traj, const QuestionSpec& q,
                     const Featurizer& feat) {
    const auto steps = traj_replay(params, traj, q, feat);
    const auto ref_steps = traj_replay(ref_params, traj, q, feat);
    double total = 0.0;
    for (std::size_t t = 0; t < steps.size(); ++t) {
        for (int a = 0; a < kNumActions; ++a) {
            if (!steps[t].dist.allowed[a]) continue;
            const double p = steps[t].dist.prob[a];
            if (p <= 0.0) continue;
            total += p * std::log(p / ref_steps[t].dist.prob[a]);
        }
    }
    return total;
}

LossTerms grpo_loss_and_grad(const PolicyParams& params,
                             const PolicyParams& old_params,
                             const PolicyParams& ref_params,
                             const RolloutGroup& group,
                             const AdvantageSet& advantages,
                             const GrpoConfig& cfg, const Featurizer& feat) {
    validate_grpo_config(cfg);
    const std::size_t g = group.with_tool.size();
    if (advantages.values.size() != g)
        throw ContractError("grpo_loss_and_grad: advantage set misaligned");

    LossTerms out = LossTerms::zeros(params.feature_dim());
    if (g == 0) return out;
    const double inv_g = 1.0 / static_cast<double>(g);
    const QuestionSpec& q = group.question;

    for (std::size_t i = 0; i < g; ++i) {
        const Trajectory& traj = group.with_tool[i];
        const double adv = advantages.values[i];
        const double ratio = importance_ratio(params, old_params, traj, q, feat);
        const double clipped =
            std::clamp(ratio, 1.0 - cfg.epsilon, 1.0 + cfg.epsilon);
        const double unclipped_term = ratio * adv;
        const double clipped_term = clipped * adv;

        double term;
        double ratio_coef;  // d term / d logprob(params)
        if (unclipped_term <= clipped_term) {
            term = unclipped_term;
            ratio_coef = ratio * adv;
        } else {
            term = clipped_term;
            ratio_coef = (ratio == clipped) ? ratio * adv : 0.0;
        }
        out.loss -= inv_g * term;
        if (ratio_coef != 0.0)
            out.grad -= inv_g * ratio_coef *
                        traj_logprob_grad(params, traj, q, feat);

        if (cfg.beta != 0.0) {
            out.loss += inv_g * cfg.beta *
                        kl_divergence(params, ref_params, traj, q, feat);
            // d KL / d logits at one step: p_a (log(p_a/ref_a) - KL_step).
            const auto steps = traj_replay(params, traj, q, feat);
            const auto ref_steps = traj_replay(ref_params, traj, q, feat);
            for (std::size_t t = 0; t < steps.size(); ++t) {
                double kl_step = 0.0;
                for (int a = 0; a < kNumActions; ++a) {
                    if (!steps[t].dist.allowed[a]) continue;
                    const double p = steps[t].dist.prob[a];
                    if (p > 0.0)
                        kl_step +=
                            p * std::log(p / ref_steps[t].dist.prob[a]);
                }
                for (int a = 0; a < kNumActions; ++a) {
                    if (!steps[t].dist.allowed[a]) continue;
                    const double p = steps[t].dist.prob[a];
                    if (p <= 0.0) continue;
                    const double coef =
                        p * (std::log(p / ref_steps[t].dist.prob[a]) - kl_step);
                    out.grad.row(a) += inv_g * cfg.beta * coef *
                                       steps[t].phi.transpose();
                }
            }
        }
    }
    return out;
}

}  // namespace akbe
