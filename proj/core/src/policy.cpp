#include "akbe/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "akbe/errors.hpp"

namespace akbe {

PolicyParams initial_policy(int feature_dim) {
    PolicyParams p = PolicyParams::zeros(feature_dim);
    p.weights(static_cast<int>(ActionKind::AnswerMemory), feature_dim - 1) = 0.1;
    return p;
}

Featurizer::Featurizer(int question_dim, int max_turns)
    : question_dim_(question_dim), max_turns_(max_turns) {
    if (question_dim < 1) throw ConfigError("featurizer: question_dim < 1");
    if (max_turns < 1) throw ConfigError("featurizer: max_turns < 1");
}

FeatureVector Featurizer::featurize(const QuestionSpec& q,
                                    const EnvState& s) const {
    if (static_cast<int>(q.features.size()) != question_dim_)
        throw ConfigError("featurizer: question feature dim mismatch");
    FeatureVector phi(dim());
    for (int d = 0; d < question_dim_; ++d) phi[d] = q.features[d];
    phi[question_dim_ + 0] = static_cast<double>(s.turn) / max_turns_;
    phi[question_dim_ + 1] = static_cast<double>(s.useful_hops) / max_turns_;
    phi[question_dim_ + 2] = s.useful_hops >= q.hops_required ? 1.0 : 0.0;
    phi[question_dim_ + 3] = s.misleading_count > 0 ? 1.0 : 0.0;
    phi[question_dim_ + 4] = 1.0;  // bias
    return phi;
}

ActionDistribution action_distribution(const PolicyParams& params,
                                       const FeatureVector& phi,
                                       bool tool_allowed) {
    if (params.weights.cols() != phi.size())
        throw ConfigError("policy: feature dimension mismatch");
    ActionDistribution dist;
    for (int a = 0; a < kNumActions; ++a) dist.allowed[a] = true;
    if (!tool_allowed)
        dist.allowed[static_cast<int>(ActionKind::ToolCall)] = false;

    const Eigen::VectorXd logits = params.weights * phi;
    double max_logit = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < kNumActions; ++a)
        if (dist.allowed[a]) max_logit = std::max(max_logit, logits[a]);
    double z = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
        if (!dist.allowed[a]) continue;
        dist.prob[a] = std::exp(logits[a] - max_logit);
        z += dist.prob[a];
    }
    for (int a = 0; a < kNumActions; ++a)
        if (dist.allowed[a]) dist.prob[a] /= z;
    return dist;
}

std::pair<ActionKind, double> sample_action(const ActionDistribution& dist,
                                            Rng& rng) {
    double total = 0.0;
    for (int a = 0; a < kNumActions; ++a)
        if (dist.allowed[a]) total += dist.prob[a];
    if (total <= 0.0)
        throw ContractError("sample_action: empty support");
    const double u = rng.next_double() * total;
    double acc = 0.0;
    int last_allowed = -1;
    for (int a = 0; a < kNumActions; ++a) {
        if (!dist.allowed[a]) continue;
        acc += dist.prob[a];
        last_allowed = a;
        if (u < acc)
            return {static_cast<ActionKind>(a), std::log(dist.prob[a])};
    }
    return {static_cast<ActionKind>(last_allowed),
            std::log(dist.prob[last_allowed])};
}

ActionKind argmax_action(const ActionDistribution& dist) {
    int best = -1;
    double best_p = -1.0;
    for (int a = 0; a < kNumActions; ++a) {
        if (!dist.allowed[a]) continue;
        if (dist.prob[a] > best_p) {
            best_p = dist.prob[a];
            best = a;
        }
    }
    if (best < 0) throw ContractError("argmax_action: empty support");
    return static_cast<ActionKind>(best);
}

namespace {

// Shared replay walk. Reconstructs each step's context from the recorded
// observations and hands the step's distribution to the visitor.
template <typename Visitor>
void replay(const PolicyParams& params, const Trajectory& traj,
            const QuestionSpec& q, const Featurizer& feat, SupportMode mode,
            Visitor&& visit) {
    if (traj.steps.empty()) throw DataError("replay: empty trajectory");
    EnvState state;
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
        const Step& step = traj.steps[i];
        const bool path_allows = mode == SupportMode::ToolAware ||
                                 traj.path == Path::WithTool;
        const bool tool_allowed = path_allows && state.turn < feat.max_turns();
        const FeatureVector phi = feat.featurize(q, state);
        const ActionDistribution dist =
            action_distribution(params, phi, tool_allowed);
        const int a = static_cast<int>(step.action);
        if (!dist.allowed[a] || dist.prob[a] <= 0.0)
            throw DataError("replay: recorded action has zero probability at step " +
                            std::to_string(i));
        visit(dist, phi, a);
        if (step.action == ActionKind::ToolCall) {
            if (!step.observation)
                throw DataError("replay: tool call without observation");
            ++state.turn;
            if (*step.observation == ObservationKind::Misleading)
                ++state.misleading_count;
            else
                ++state.useful_hops;
        } else if (i + 1 != traj.steps.size()) {
            throw DataError("replay: terminal action before final step");
        }
    }
}

}  // namespace

double traj_logprob(const PolicyParams& params, const Trajectory& traj,
                    const QuestionSpec& q, const Featurizer& feat,
                    SupportMode mode) {
    double sum = 0.0;
    replay(params, traj, q, feat, mode,
           [&](const ActionDistribution& dist, const FeatureVector&, int a) {
               sum += std::log(dist.prob[a]);
           });
    return sum;
}

std::vector<double> traj_step_logprobs(const PolicyParams& params,
                                       const Trajectory& traj,
                                       const QuestionSpec& q,
                                       const Featurizer& feat) {
    std::vector<double> out;
    out.reserve(traj.steps.size());
    replay(params, traj, q, feat, SupportMode::SamplingTime,
           [&](const ActionDistribution& dist, const FeatureVector&, int a) {
               out.push_back(std::log(dist.prob[a]));
           });
    return out;
}

std::vector<ReplayStep> traj_replay(const PolicyParams& params,
                                    const Trajectory& traj,
                                    const QuestionSpec& q,
                                    const Featurizer& feat, SupportMode mode) {
    std::vector<ReplayStep> out;
    out.reserve(traj.steps.size());
    replay(params, traj, q, feat, mode,
           [&](const ActionDistribution& dist, const FeatureVector& phi,
               int a) { out.push_back({dist, phi, a}); });
    return out;
}

GradMatrix traj_logprob_grad(const PolicyParams& params, const Trajectory& traj,
                             const QuestionSpec& q, const Featurizer& feat,
                             SupportMode mode) {
    GradMatrix grad = GradMatrix::Zero(kNumActions, params.feature_dim());
    replay(params, traj, q, feat, mode,
           [&](const ActionDistribution& dist, const FeatureVector& phi,
               int taken) {
               for (int a = 0; a < kNumActions; ++a) {
                   if (!dist.allowed[a]) continue;
                   const double coef =
                       (a == taken ? 1.0 : 0.0) - dist.prob[a];
                   grad.row(a) += coef * phi.transpose();
               }
           });
    return grad;
}

void save_policy(const std::string& path, const PolicyParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "akbe-policy v1\n";
    out << "actions " << kNumActions << "\n";
    out << "dim " << params.feature_dim() << "\n";
    char buf[64];
    for (int a = 0; a < kNumActions; ++a) {
        for (int d = 0; d < params.feature_dim(); ++d) {
            std::snprintf(buf, sizeof(buf), "%a", params.weights(a, d));
            out << buf << (d + 1 == params.feature_dim() ? '\n' : ' ');
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

PolicyParams load_policy(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string magic, version, key;
    in >> magic >> version;
    if (magic != "akbe-policy" || version != "v1")
        throw DataError("not a policy checkpoint: " + path);
    int actions = 0, dim = 0;
    in >> key >> actions;
    if (key != "actions" || actions != kNumActions)
        throw DataError("checkpoint action count mismatch: " + path);
    in >> key >> dim;
    if (key != "dim" || dim < 1)
        throw DataError("checkpoint dimension invalid: " + path);
    PolicyParams params = PolicyParams::zeros(dim);
    for (int a = 0; a < kNumActions; ++a)
        for (int d = 0; d < dim; ++d) {
            std::string tok;
            if (!(in >> tok))
                throw DataError("checkpoint truncated: " + path);
            params.weights(a, d) = std::strtod(tok.c_str(), nullptr);
        }
    return params;
}

}  // namespace akbe
