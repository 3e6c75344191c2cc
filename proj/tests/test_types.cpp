#include <doctest.h>

#include "akbe/errors.hpp"
#include "akbe/objectives.hpp"
#include "akbe/types.hpp"
#include "test_util.hpp"

using namespace akbe;

namespace {

Trajectory make_traj(Path path, std::vector<ActionKind> actions,
                     bool correct = true) {
    Trajectory t;
    t.question_id = "q0";
    t.path = path;
    for (ActionKind a : actions) {
        Step s;
        s.action = a;
        if (a == ActionKind::ToolCall) s.observation = ObservationKind::Useful;
        s.log_prob = -0.5;
        t.steps.push_back(s);
    }
    t.tc = tool_call_count(t);
    t.correct = correct;
    t.format_ok = actions.back() != ActionKind::Malformed;
    t.reward = final_reward(t.correct, t.format_ok);
    return t;
}

}  // namespace

TEST_CASE("tool_call_count counts tool steps") {
    CHECK(tool_call_count(make_traj(Path::WithTool,
                                    {ActionKind::ToolCall, ActionKind::ToolCall,
                                     ActionKind::AnswerEvidence})) == 2);
    CHECK(tool_call_count(make_traj(Path::NoTool,
                                    {ActionKind::AnswerMemory})) == 0);
    // counted by hand: three tool steps then a memory answer
    CHECK(tool_call_count(make_traj(
              Path::WithTool, {ActionKind::ToolCall, ActionKind::ToolCall,
                               ActionKind::ToolCall, ActionKind::AnswerMemory})) ==
          3);
}

TEST_CASE("tool_call_count ignores relabeling of terminal actions") {
    Trajectory a = make_traj(Path::WithTool,
                             {ActionKind::ToolCall, ActionKind::AnswerMemory});
    Trajectory b = make_traj(Path::WithTool,
                             {ActionKind::ToolCall, ActionKind::AnswerEvidence});
    CHECK(tool_call_count(a) == tool_call_count(b));
}

TEST_CASE("validate_trajectory flags a tool call on the no-tool path") {
    Trajectory t = make_traj(Path::WithTool,
                             {ActionKind::ToolCall, ActionKind::AnswerMemory});
    t.path = Path::NoTool;
    const auto violation = validate_trajectory(t);
    REQUIRE(violation.has_value());
    CHECK(*violation == "tool call on no-tool path");
}

TEST_CASE("validate_trajectory flags format flag inconsistencies") {
    Trajectory t = make_traj(Path::NoTool, {ActionKind::Malformed}, false);
    t.format_ok = true;  // terminal Malformed must have format_ok = 0
    t.reward = 0;
    CHECK(validate_trajectory(t).has_value());
}

TEST_CASE("validate_trajectory accepts a well-formed with-tool trajectory") {
    const Trajectory t = make_traj(
        Path::WithTool, {ActionKind::ToolCall, ActionKind::AnswerEvidence});
    CHECK_FALSE(validate_trajectory(t).has_value());
}

TEST_CASE("validate_trajectory names structural problems") {
    Trajectory empty;
    empty.path = Path::NoTool;
    CHECK(validate_trajectory(empty).has_value());

    Trajectory early_terminal = make_traj(
        Path::WithTool, {ActionKind::ToolCall, ActionKind::AnswerEvidence});
    early_terminal.steps.insert(early_terminal.steps.begin(),
                                Step{ActionKind::AnswerMemory, {}, -0.1});
    CHECK(validate_trajectory(early_terminal).has_value());

    Trajectory bad_reward = make_traj(Path::NoTool, {ActionKind::AnswerMemory});
    bad_reward.reward = -1;
    CHECK(validate_trajectory(bad_reward).has_value());

    Trajectory positive_lp = make_traj(Path::NoTool, {ActionKind::AnswerMemory});
    positive_lp.steps[0].log_prob = 0.25;
    CHECK(validate_trajectory(positive_lp).has_value());

    Trajectory missing_obs = make_traj(
        Path::WithTool, {ActionKind::ToolCall, ActionKind::AnswerEvidence});
    missing_obs.steps[0].observation.reset();
    CHECK(validate_trajectory(missing_obs).has_value());
}

TEST_CASE("trajectory JSONL round-trips randomly sampled trajectories") {
    Rng rng(2024);
    const Featurizer feat(4, 5);
    for (int i = 0; i < 200; ++i) {
        const QuestionSpec q = test::make_question(rng, 4, 3);
        const PolicyParams params = test::random_params(feat.dim(), rng);
        const bool with_tool = rng.bernoulli(0.5);
        const Trajectory t =
            test::sample_trajectory(params, q, feat, 5, with_tool, rng);
        REQUIRE_FALSE(validate_trajectory(t).has_value());

        const Trajectory back = trajectory_from_jsonl(trajectory_to_jsonl(t));
        CHECK(back.question_id == t.question_id);
        CHECK(back.path == t.path);
        CHECK(back.tc == t.tc);
        CHECK(back.correct == t.correct);
        CHECK(back.format_ok == t.format_ok);
        CHECK(back.reward == t.reward);
        REQUIRE(back.steps.size() == t.steps.size());
        for (std::size_t k = 0; k < t.steps.size(); ++k) {
            CHECK(back.steps[k].action == t.steps[k].action);
            CHECK(back.steps[k].observation == t.steps[k].observation);
            CHECK(back.steps[k].log_prob == t.steps[k].log_prob);
        }
    }
}

TEST_CASE("trajectory JSONL rejects malformed records") {
    CHECK_THROWS_AS(trajectory_from_jsonl("{not json"), DataError);
    CHECK_THROWS_AS(trajectory_from_jsonl("{\"path\": \"with_tool\"}"),
                    DataError);
    CHECK_THROWS_AS(
        trajectory_from_jsonl(
            R"({"question_id":"q","path":"sideways","steps":[],"tc":0,"correct":0,"format_ok":1,"reward":0})"),
        DataError);
}

TEST_CASE("world lookup by id") {
    Rng rng(1);
    std::vector<QuestionSpec> qs;
    for (int i = 0; i < 5; ++i)
        qs.push_back(test::make_question(rng, 4, 2, "q" + std::to_string(i)));
    const World world(qs);
    CHECK(world.size() == 5);
    CHECK(world.by_id("q3").id == "q3");
    CHECK_THROWS_AS(world.by_id("nope"), DataError);

    qs.push_back(qs.front());
    CHECK_THROWS_AS(World{qs}, DataError);
}
