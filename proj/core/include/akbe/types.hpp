#pragma once
// Shared domain types: questions, actions, trajectories, rollout groups, and
// the dual-path outcome taxonomy. All types are immutable after construction
// and safe to share between workers.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace akbe {

inline constexpr int kNumActions = 4;

// ToolCall is the only non-terminal action. Malformed models a structurally
// invalid response and earns the format penalty. AnswerMemory sits at index 0
// so an all-zero policy's argmax answers directly instead of calling tools.
enum class ActionKind : int {
    AnswerMemory = 0,
    AnswerEvidence = 1,
    ToolCall = 2,
    Malformed = 3,
};

inline constexpr bool is_terminal(ActionKind a) {
    return a != ActionKind::ToolCall;
}

enum class ObservationKind : int { Useful = 0, Misleading = 1 };

enum class Path : int { WithTool = 0, NoTool = 1 };

// A synthetic question with a controllable ground-truth knowledge boundary.
struct QuestionSpec {
    std::string id;
    std::vector<double> features;  // dimension D, policy-visible
    double p_param = 0.0;          // P(memory answer is correct)
    int hops_required = 0;         // useful retrievals needed for evidence
    double noise_rate = 0.0;       // P(one retrieval is misleading)
    std::string answer_id;
};

// One agent turn. Observations are environment outputs and carry no policy
// log-probability; only the action's log_prob enters any objective.
struct Step {
    ActionKind action = ActionKind::Malformed;
    std::optional<ObservationKind> observation;  // present iff ToolCall
    double log_prob = 0.0;
};

struct Trajectory {
    std::string question_id;
    Path path = Path::WithTool;
    std::vector<Step> steps;
    int tc = 0;
    bool correct = false;
    bool format_ok = false;
    int reward = 0;  // in {-1, 0, 1}

    double sampled_log_prob() const;  // sum of step log_probs
};

// All rollouts for one question in one batch.
struct RolloutGroup {
    QuestionSpec question;
    std::vector<Trajectory> with_tool;
    std::vector<Trajectory> no_tool;
};

enum class Category : int {
    ToolDependent = 0,
    Efficiency = 1,
    Hallucination = 2,
    BothWrong = 3,
};

inline constexpr int kNumCategories = 4;

const char* to_string(ActionKind a);
const char* to_string(ObservationKind o);
const char* to_string(Path p);
const char* to_string(Category c);

struct DualPathOutcome {
    std::string question_id;
    bool wt = false;  // some with-tool rollout has reward 1
    bool nt = false;  // some no-tool rollout has reward 1
    bool kb = false;  // knowledge boundary bit, equals nt
    Category category = Category::BothWrong;
    std::optional<Trajectory> target;  // absent iff BothWrong
};

int tool_call_count(const Trajectory& traj);

// nullopt when every invariant holds, otherwise the first violation.
std::optional<std::string> validate_trajectory(const Trajectory& traj);

// One-line JSON record per trajectory. Field names are part of the trace
// format: question_id, path, steps[{action, observation?, log_prob}], tc,
// correct, format_ok, reward.
std::string trajectory_to_jsonl(const Trajectory& traj);
Trajectory trajectory_from_jsonl(const std::string& line);
std::vector<Trajectory> read_trajectories_jsonl(const std::string& path);

// Question set with id lookup.
class World {
  public:
    World() = default;
    explicit World(std::vector<QuestionSpec> questions);

    const QuestionSpec& by_id(const std::string& id) const;
    const std::vector<QuestionSpec>& questions() const { return questions_; }
    std::size_t size() const { return questions_.size(); }

  private:
    std::vector<QuestionSpec> questions_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace akbe
