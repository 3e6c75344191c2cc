#pragma once
// Knowledge-boundary signal construction: dual-path classification, target
// selection per category, the auxiliary cross-entropy objective, the joint
// objective, and the DPO-based integration variant.

#include <optional>
#include <vector>

#include "akbe/objectives.hpp"
#include "akbe/rng.hpp"
#include "akbe/types.hpp"

namespace akbe {

enum class AkbeVariant : int { CrossEntropy = 0, Dpo = 1 };

struct AkbeConfig {
    double lambda = 0.05;
    AkbeVariant variant = AkbeVariant::CrossEntropy;
    double dpo_beta = 0.1;
    // Optional clipped-ratio cross-entropy: the ratio is taken against the
    // sampling-time log-probs and clipped at this threshold.
    std::optional<double> ce_clip;
    // Eq-side choice: the auxiliary loss is an unnormalized sum by default;
    // this divides it by the number of signals instead.
    bool normalize_by_signals = false;
};

void validate_akbe_config(const AkbeConfig& cfg);

struct Signal {
    std::string question_id;
    Trajectory target;  // always has reward 1
    Category category;
};

struct SignalSet {
    std::vector<Signal> items;
};

// WT/NT/KB bits and the category truth table:
// (1,0) tool-dependent, (1,1) efficiency, (0,1) hallucination,
// (0,0) both-wrong. "Correct" means reward == 1, so format-violating
// trajectories never count. The target field is left unset.
DualPathOutcome classify(const RolloutGroup& group);

// Tool-dependent: correct with-tool trajectory with minimal tc, uniform among
// ties. Efficiency/Hallucination: uniform among correct no-tool trajectories.
// BothWrong: absent.
std::optional<Trajectory> select_target(const RolloutGroup& group,
                                        const DualPathOutcome& outcome,
                                        Rng& rng);

// -sum log pi(target | question) over the signal set (or the clipped-ratio
// variant when ce_clip is set). Empty set yields zero loss and gradient.
LossTerms akbe_loss_and_grad(const PolicyParams& params,
                             const SignalSet& signals, const World& world,
                             const Featurizer& feat, const AkbeConfig& cfg);

// L_total = L_rl + lambda * L_aux; gradients combine linearly.
LossTerms total_loss(const LossTerms& rl_terms, const LossTerms& aux_terms,
                     double lambda);

// Gradient-balance default: one target trajectory per question against a
// group of g_wt rollouts suggests lambda = 1/g_wt.
double lambda_default(int g_wt);

struct DpoPair {
    std::string question_id;
    Trajectory preferred;
    Trajectory rejected;
};

// Rejected candidate for the DPO variant: among with-tool trajectories that
// are incorrect or use strictly more tool calls than the preferred target,
// the one with maximal tc (uniform among ties).
std::optional<DpoPair> make_dpo_pair(const RolloutGroup& group,
                                     const Trajectory& preferred, Rng& rng);

// -sum ln sigma(beta * [(log pi - log ref)(preferred)
//                       - (log pi - log ref)(rejected)])
LossTerms dpo_loss_and_grad(const PolicyParams& params,
                            const PolicyParams& ref_params,
                            const std::vector<DpoPair>& pairs, double dpo_beta,
                            const World& world, const Featurizer& feat);

}  // namespace akbe
