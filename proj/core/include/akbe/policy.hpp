#pragma once
// Linear-softmax action policy with exact log-probabilities and analytic
// gradients. Parameters are read-only during rollout; updates happen in a
// single-writer phase between batches.

#include <Eigen/Core>
#include <array>
#include <string>

#include "akbe/env.hpp"
#include "akbe/rng.hpp"
#include "akbe/types.hpp"

namespace akbe {

struct PolicyParams {
    Eigen::MatrixXd weights;  // kNumActions x feature dim

    int feature_dim() const { return static_cast<int>(weights.cols()); }

    static PolicyParams zeros(int feature_dim) {
        PolicyParams p;
        p.weights = Eigen::MatrixXd::Zero(kNumActions, feature_dim);
        return p;
    }
};

// Training starts from a mild answer-from-memory prior on the bias feature:
// an untrained agent answers directly until RL teaches it when tools pay off.
PolicyParams initial_policy(int feature_dim);

using FeatureVector = Eigen::VectorXd;
using GradMatrix = Eigen::MatrixXd;  // same shape as PolicyParams::weights

// Builds the policy context vector: question features, then normalized turn
// count, normalized useful-hop count, a sufficient-evidence indicator, a
// misleading indicator, and a trailing bias of 1.
class Featurizer {
  public:
    Featurizer(int question_dim, int max_turns);

    int dim() const { return question_dim_ + kStateFeatures + 1; }
    int question_dim() const { return question_dim_; }
    int max_turns() const { return max_turns_; }

    FeatureVector featurize(const QuestionSpec& q, const EnvState& s) const;

    static constexpr int kStateFeatures = 4;

  private:
    int question_dim_;
    int max_turns_;
};

struct ActionDistribution {
    std::array<double, kNumActions> prob{};
    std::array<bool, kNumActions> allowed{};
};

// Softmax of W*phi over the allowed support. With tool_allowed = 0 the
// ToolCall action is excluded and the remainder renormalized.
ActionDistribution action_distribution(const PolicyParams& params,
                                       const FeatureVector& phi,
                                       bool tool_allowed);

// Draw an action; returns the action and ln(prob) at sampling time.
std::pair<ActionKind, double> sample_action(const ActionDistribution& dist,
                                            Rng& rng);

// Greedy argmax over the allowed support; ties go to the lowest action index.
ActionKind argmax_action(const ActionDistribution& dist);

// Support reconstruction during replay. SamplingTime rebuilds the masks the
// trajectory was sampled under (no-tool paths keep ToolCall masked), which is
// what importance ratios and on-policy checks need. ToolAware scores every
// step against the full support while turns remain, so a no-tool target's
// probability competes with the tool action; boundary-signal losses use this.
enum class SupportMode : int { SamplingTime = 0, ToolAware = 1 };

// Sum of ln pi(a_t | c_t) over the trajectory's action steps, with contexts
// reconstructed from the recorded observations. Observations contribute no
// probability term. Throws DataError when the trajectory cannot be replayed.
double traj_logprob(const PolicyParams& params, const Trajectory& traj,
                    const QuestionSpec& q, const Featurizer& feat,
                    SupportMode mode = SupportMode::SamplingTime);

// Analytic gradient of traj_logprob with respect to the weight matrix:
// sum over steps of (onehot(a_t) - pi(.|c_t)) phi_t^T on the allowed support.
GradMatrix traj_logprob_grad(const PolicyParams& params, const Trajectory& traj,
                             const QuestionSpec& q, const Featurizer& feat,
                             SupportMode mode = SupportMode::SamplingTime);

// Per-step log-probabilities from the same replay; used by tests and by the
// importance-ratio machinery.
std::vector<double> traj_step_logprobs(const PolicyParams& params,
                                       const Trajectory& traj,
                                       const QuestionSpec& q,
                                       const Featurizer& feat);

// Full per-step replay: context vector, action distribution, and the action
// taken. Contexts depend only on the recorded trajectory, never on params.
struct ReplayStep {
    ActionDistribution dist;
    FeatureVector phi;
    int action;
};
std::vector<ReplayStep> traj_replay(const PolicyParams& params,
                                    const Trajectory& traj,
                                    const QuestionSpec& q,
                                    const Featurizer& feat,
                                    SupportMode mode = SupportMode::SamplingTime);

// Flat numeric checkpoint with a small header (format version, action count,
// feature dimension). Values are hex floats and round-trip exactly.
void save_policy(const std::string& path, const PolicyParams& params);
PolicyParams load_policy(const std::string& path);

}  // namespace akbe
