#pragma once
// Evaluation metrics, category-distribution tracking, no-tool confidence
// histograms, degradation tracking between checkpoints, and cost-unit
// accounting.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "akbe/types.hpp"

namespace akbe {

// Accuracy per unit of tool usage; +infinity when no tool was called.
// Serialized as the literal string "inf" and excluded from comparisons.
struct MetricsRecord {
    int step = 0;
    double em = 0.0;
    double mean_tc = 0.0;
    double tp = 0.0;
    std::array<double, kNumCategories> category_fractions{};
    double mean_reward = 0.0;
    int signal_count = 0;
    double cost_units = 0.0;
    double loss_grpo = 0.0;
    double loss_akbe = 0.0;
    double loss_total = 0.0;
    // Extra column after the metric block: "train" or "eval".
    std::string phase = "train";
};

struct EvalPoint {
    bool correct = false;
    int tc = 0;
};

struct AggregateMetrics {
    double em = 0.0;
    double mean_tc = 0.0;
    double tp = 0.0;  // +inf sentinel when total tc is zero
};

AggregateMetrics aggregate_metrics(const std::vector<EvalPoint>& evals);

// Fractions in category order: tool_dependent, efficiency, hallucination,
// both_wrong.
std::array<double, kNumCategories> category_distribution(
    const std::vector<DualPathOutcome>& outcomes);

// Histogram over {1..g_nt} of correct no-tool counts, restricted to
// questions whose no-tool path produced at least one reward-1 trajectory.
std::vector<int> nt_confidence_histogram(const std::vector<RolloutGroup>& groups);

enum class DegradationLabel : int {
    Original = 0,     // still correct, tc did not grow
    Redundant = 1,    // still correct, strictly more tool calls
    Hallucinated = 2, // degraded to incorrect
    OutOfScope = 3,   // not correct at the early checkpoint
};

const char* to_string(DegradationLabel label);

struct DegradationSummary {
    std::map<std::string, DegradationLabel> labels;
    int original = 0;
    int redundant = 0;
    int hallucinated = 0;
    int out_of_scope = 0;
};

// Tracks every question in the early map. Questions correct at the early
// checkpoint must exist in the late map, otherwise a DataError names the
// missing id.
DegradationSummary degradation_tracking(
    const std::map<std::string, EvalPoint>& early,
    const std::map<std::string, EvalPoint>& late);

double cost_accounting(const std::vector<Trajectory>& trajs,
                       double cost_per_tool, double cost_per_step);

// Deterministic CSV row/header for the normative column order. Doubles are
// rendered with shortest round-trip formatting.
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& rec);
std::vector<MetricsRecord> read_metrics_csv(const std::string& path);

std::string format_double(double v);

}  // namespace akbe
