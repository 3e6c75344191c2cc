#include "akbe/signals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "akbe/errors.hpp"

namespace akbe {

void validate_akbe_config(const AkbeConfig& cfg) {
    if (cfg.lambda < 0.0) throw ConfigError("akbe: lambda must be >= 0");
    if (cfg.dpo_beta <= 0.0) throw ConfigError("akbe: dpo_beta must be > 0");
    if (cfg.ce_clip && *cfg.ce_clip <= 0.0)
        throw ConfigError("akbe: ce_clip must be > 0 when set");
}

DualPathOutcome classify(const RolloutGroup& group) {
    DualPathOutcome outcome;
    outcome.question_id = group.question.id;
    for (const Trajectory& t : group.with_tool)
        if (t.reward == 1) outcome.wt = true;
    for (const Trajectory& t : group.no_tool)
        if (t.reward == 1) outcome.nt = true;
    outcome.kb = outcome.nt;
    if (outcome.wt && !outcome.nt)
        outcome.category = Category::ToolDependent;
    else if (outcome.wt && outcome.nt)
        outcome.category = Category::Efficiency;
    else if (!outcome.wt && outcome.nt)
        outcome.category = Category::Hallucination;
    else
        outcome.category = Category::BothWrong;
    return outcome;
}

namespace {

std::optional<Trajectory> pick_uniform(const std::vector<Trajectory>& pool,
                                       const std::vector<std::size_t>& idx,
                                       Rng& rng) {
    if (idx.empty()) return std::nullopt;
    return pool[idx[rng.uniform_index(idx.size())]];
}

}  // namespace

std::optional<Trajectory> select_target(const RolloutGroup& group,
                                        const DualPathOutcome& outcome,
                                        Rng& rng) {
    switch (outcome.category) {
        case Category::BothWrong:
            return std::nullopt;
        case Category::ToolDependent: {
            int min_tc = std::numeric_limits<int>::max();
            for (const Trajectory& t : group.with_tool)
                if (t.reward == 1) min_tc = std::min(min_tc, t.tc);
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < group.with_tool.size(); ++i)
                if (group.with_tool[i].reward == 1 &&
                    group.with_tool[i].tc == min_tc)
                    idx.push_back(i);
            return pick_uniform(group.with_tool, idx, rng);
        }
        case Category::Efficiency:
        case Category::Hallucination: {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < group.no_tool.size(); ++i)
                if (group.no_tool[i].reward == 1) idx.push_back(i);
            return pick_uniform(group.no_tool, idx, rng);
        }
    }
    throw ContractError("select_target: bad category");
}

LossTerms akbe_loss_and_grad(const PolicyParams& params,
                             const SignalSet& signals, const World& world,
                             const Featurizer& feat, const AkbeConfig& cfg) {
    LossTerms out = LossTerms::zeros(params.feature_dim());
    if (signals.items.empty()) return out;
    // Targets are scored tool-aware: a no-tool target's probability competes
    // with the tool action, so reinforcing it suppresses redundant calls.
    constexpr SupportMode kMode = SupportMode::ToolAware;
    for (const Signal& sig : signals.items) {
        const QuestionSpec& q = world.by_id(sig.question_id);
        if (cfg.ce_clip) {
            // PPO-style clipped surrogate on the target with unit advantage:
            // -min(rho, clip(rho, 1-eps, 1+eps)), rho against sampling-time
            // log-probs.
            const double eps = *cfg.ce_clip;
            const double rho =
                std::exp(traj_logprob(params, sig.target, q, feat, kMode) -
                         sig.target.sampled_log_prob());
            const double clipped = std::clamp(rho, 1.0 - eps, 1.0 + eps);
            if (rho <= clipped) {
                out.loss -= rho;
                out.grad -=
                    rho * traj_logprob_grad(params, sig.target, q, feat, kMode);
            } else {
                out.loss -= clipped;  // clip active above: zero gradient
            }
        } else {
            out.loss -= traj_logprob(params, sig.target, q, feat, kMode);
            out.grad -= traj_logprob_grad(params, sig.target, q, feat, kMode);
        }
    }
    if (cfg.normalize_by_signals) {
        const double inv = 1.0 / static_cast<double>(signals.items.size());
        out.loss *= inv;
        out.grad *= inv;
    }
    return out;
}

LossTerms total_loss(const LossTerms& rl_terms, const LossTerms& aux_terms,
                     double lambda) {
    LossTerms out;
    out.loss = rl_terms.loss + lambda * aux_terms.loss;
    out.grad = rl_terms.grad + lambda * aux_terms.grad;
    return out;
}

double lambda_default(int g_wt) {
    if (g_wt < 1) throw ConfigError("lambda_default: g_wt must be >= 1");
    return 1.0 / static_cast<double>(g_wt);
}

std::optional<DpoPair> make_dpo_pair(const RolloutGroup& group,
                                     const Trajectory& preferred, Rng& rng) {
    int max_tc = -1;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < group.with_tool.size(); ++i) {
        const Trajectory& t = group.with_tool[i];
        const bool candidate = t.reward != 1 || t.tc > preferred.tc;
        if (!candidate) continue;
        if (t.tc > max_tc) {
            max_tc = t.tc;
            idx.clear();
        }
        if (t.tc == max_tc) idx.push_back(i);
    }
    if (idx.empty()) return std::nullopt;
    DpoPair pair;
    pair.question_id = group.question.id;
    pair.preferred = preferred;
    pair.rejected = group.with_tool[idx[rng.uniform_index(idx.size())]];
    return pair;
}

LossTerms dpo_loss_and_grad(const PolicyParams& params,
                            const PolicyParams& ref_params,
                            const std::vector<DpoPair>& pairs, double dpo_beta,
                            const World& world, const Featurizer& feat) {
    LossTerms out = LossTerms::zeros(params.feature_dim());
    constexpr SupportMode kMode = SupportMode::ToolAware;
    for (const DpoPair& pair : pairs) {
        const QuestionSpec& q = world.by_id(pair.question_id);
        const double delta_w =
            traj_logprob(params, pair.preferred, q, feat, kMode) -
            traj_logprob(ref_params, pair.preferred, q, feat, kMode);
        const double delta_l =
            traj_logprob(params, pair.rejected, q, feat, kMode) -
            traj_logprob(ref_params, pair.rejected, q, feat, kMode);
        const double x = dpo_beta * (delta_w - delta_l);
        // -ln sigma(x); d/dx = -(1 - sigma(x)) = -sigma(-x)
        out.loss += x > 0.0 ? std::log1p(std::exp(-x))
                            : -x + std::log1p(std::exp(x));
        const double sig_neg = 1.0 / (1.0 + std::exp(x));
        out.grad -= sig_neg * dpo_beta *
                    (traj_logprob_grad(params, pair.preferred, q, feat, kMode) -
                     traj_logprob_grad(params, pair.rejected, q, feat, kMode));
    }
    return out;
}

}  // namespace akbe
