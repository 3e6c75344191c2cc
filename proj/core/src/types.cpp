#include "akbe/types.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "akbe/errors.hpp"

namespace akbe {

using nlohmann::json;

const char* to_string(ActionKind a) {
    switch (a) {
        case ActionKind::ToolCall: return "tool_call";
        case ActionKind::AnswerMemory: return "answer_memory";
        case ActionKind::AnswerEvidence: return "answer_evidence";
        case ActionKind::Malformed: return "malformed";
    }
    return "?";
}

const char* to_string(ObservationKind o) {
    return o == ObservationKind::Useful ? "useful" : "misleading";
}

const char* to_string(Path p) {
    return p == Path::WithTool ? "with_tool" : "no_tool";
}

const char* to_string(Category c) {
    switch (c) {
        case Category::ToolDependent: return "tool_dependent";
        case Category::Efficiency: return "efficiency";
        case Category::Hallucination: return "hallucination";
        case Category::BothWrong: return "both_wrong";
    }
    return "?";
}

double Trajectory::sampled_log_prob() const {
    double sum = 0.0;
    for (const Step& s : steps) sum += s.log_prob;
    return sum;
}

int tool_call_count(const Trajectory& traj) {
    int n = 0;
    for (const Step& s : traj.steps)
        if (s.action == ActionKind::ToolCall) ++n;
    return n;
}

std::optional<std::string> validate_trajectory(const Trajectory& traj) {
    if (traj.steps.empty()) return "empty trajectory";
    for (std::size_t i = 0; i + 1 < traj.steps.size(); ++i) {
        if (is_terminal(traj.steps[i].action))
            return "terminal action before final step";
    }
    if (!is_terminal(traj.steps.back().action))
        return "final step is not terminal";
    for (const Step& s : traj.steps) {
        const bool is_tool = s.action == ActionKind::ToolCall;
        if (is_tool && !s.observation) return "tool call without observation";
        if (!is_tool && s.observation) return "observation on non-tool step";
        if (s.log_prob > 0.0) return "positive log_prob";
    }
    if (traj.path == Path::NoTool && tool_call_count(traj) > 0)
        return "tool call on no-tool path";
    if (traj.tc != tool_call_count(traj)) return "tc does not match step count";
    const bool malformed = traj.steps.back().action == ActionKind::Malformed;
    if (traj.format_ok == malformed)
        return "format_ok inconsistent with terminal action";
    const int expected = traj.format_ok ? (traj.correct ? 1 : 0) : -1;
    if (traj.reward != expected)
        return "reward inconsistent with correct and format_ok";
    return std::nullopt;
}

namespace {

ActionKind action_from_string(const std::string& s) {
    if (s == "tool_call") return ActionKind::ToolCall;
    if (s == "answer_memory") return ActionKind::AnswerMemory;
    if (s == "answer_evidence") return ActionKind::AnswerEvidence;
    if (s == "malformed") return ActionKind::Malformed;
    throw DataError("unknown action: " + s);
}

ObservationKind observation_from_string(const std::string& s) {
    if (s == "useful") return ObservationKind::Useful;
    if (s == "misleading") return ObservationKind::Misleading;
    throw DataError("unknown observation: " + s);
}

Path path_from_string(const std::string& s) {
    if (s == "with_tool") return Path::WithTool;
    if (s == "no_tool") return Path::NoTool;
    throw DataError("unknown path: " + s);
}

}  // namespace

std::string trajectory_to_jsonl(const Trajectory& traj) {
    json steps = json::array();
    for (const Step& s : traj.steps) {
        json rec{{"action", to_string(s.action)}, {"log_prob", s.log_prob}};
        if (s.observation) rec["observation"] = to_string(*s.observation);
        steps.push_back(std::move(rec));
    }
    json rec{{"question_id", traj.question_id},
             {"path", to_string(traj.path)},
             {"steps", std::move(steps)},
             {"tc", traj.tc},
             {"correct", traj.correct ? 1 : 0},
             {"format_ok", traj.format_ok ? 1 : 0},
             {"reward", traj.reward}};
    return rec.dump();
}

Trajectory trajectory_from_jsonl(const std::string& line) {
    json rec;
    try {
        rec = json::parse(line);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("bad trajectory record: ") + e.what());
    }
    try {
        Trajectory traj;
        traj.question_id = rec.at("question_id").get<std::string>();
        traj.path = path_from_string(rec.at("path").get<std::string>());
        for (const json& s : rec.at("steps")) {
            Step step;
            step.action = action_from_string(s.at("action").get<std::string>());
            if (s.contains("observation"))
                step.observation =
                    observation_from_string(s.at("observation").get<std::string>());
            step.log_prob = s.at("log_prob").get<double>();
            traj.steps.push_back(std::move(step));
        }
        traj.tc = rec.at("tc").get<int>();
        traj.correct = rec.at("correct").get<int>() != 0;
        traj.format_ok = rec.at("format_ok").get<int>() != 0;
        traj.reward = rec.at("reward").get<int>();
        return traj;
    } catch (const json::exception& e) {
        throw DataError(std::string("bad trajectory record: ") + e.what());
    }
}

std::vector<Trajectory> read_trajectories_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::vector<Trajectory> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(trajectory_from_jsonl(line));
    }
    return out;
}

World::World(std::vector<QuestionSpec> questions)
    : questions_(std::move(questions)) {
    index_.reserve(questions_.size());
    for (std::size_t i = 0; i < questions_.size(); ++i) {
        auto [it, inserted] = index_.emplace(questions_[i].id, i);
        if (!inserted)
            throw DataError("duplicate question id: " + questions_[i].id);
    }
}

const QuestionSpec& World::by_id(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw DataError("unknown question id: " + id);
    return questions_[it->second];
}

}  // namespace akbe
