#pragma once
// Per-batch training loop, experiment orchestration, and report emission.
//
// Determinism contract: (config, seed) fully determines every emitted byte
// except the timestamp, which lives only in the manifest. The thread count
// never changes results; rollouts use derived RNG streams and all reductions
// run in index order in a single-writer phase.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "akbe/config.hpp"
#include "akbe/metrics.hpp"
#include "akbe/policy.hpp"
#include "akbe/rollout.hpp"
#include "akbe/signals.hpp"
#include "akbe/types.hpp"

namespace akbe {

// Immutable per-run context: worlds, featurizer, and the frozen reference
// policy for KL/DPO terms. rl_loss defaults to the clipped surrogate and is
// the plug-in point for alternative policy objectives.
struct TrainContext {
    TrainConfig cfg;
    World world;
    World eval_world;
    Featurizer feat;
    PolicyParams ref_params;
    RlLossFn rl_loss = grpo_loss_and_grad;
};

TrainContext make_train_context(const TrainConfig& cfg);

// Signals carried across steps when freeze_signals_after is active.
struct FrozenSignals {
    SignalSet signals;
    std::vector<DpoPair> pairs;
};

struct TrainStepOutput {
    PolicyParams params;  // after one plain gradient-descent update
    GradMatrix grad;      // the (clipped) update direction, for other optimizers
    MetricsRecord record;
    std::vector<DualPathOutcome> outcomes;
    std::vector<RolloutGroup> groups;
    FrozenSignals constructed;  // signals/pairs built (or reused) this step
};

// One Algorithm-style batch update: rollouts, classification, target
// selection, loss assembly, and a single gradient-descent step. Throws
// NumericError on non-finite loss or gradient, naming the question and term.
TrainStepOutput train_step(const TrainContext& ctx, const PolicyParams& params,
                           const std::vector<const QuestionSpec*>& batch,
                           int step_index, const FrozenSignals* frozen);

struct EvalResult {
    MetricsRecord record;  // phase = "eval"
    std::map<std::string, EvalPoint> points;
};

// Held-out evaluation with greedy action selection (stochastic behind a
// config flag). Environment draws are keyed by the world seed so different
// runs on the same world share eval randomness.
EvalResult evaluate(const TrainContext& ctx, const PolicyParams& params,
                    int step_index);

struct RunArtifacts {
    std::string out_dir;
    std::string metrics_csv;
    std::string config_snapshot;
    std::string checkpoint;
    std::string world_jsonl;
    std::string eval_snapshots;
    std::optional<std::string> trajectory_jsonl;
    std::string manifest;
};

struct RunOptions {
    std::string out_dir = "out";
    bool trace = false;
    bool svg = false;
};

struct RunOutcome {
    RunArtifacts artifacts;
    std::vector<MetricsRecord> train_records;
    std::vector<MetricsRecord> eval_records;
    PolicyParams final_params;
    // First-vs-last eval checkpoint analyses.
    DegradationSummary degradation;
    std::array<double, kNumCategories> category_early{};
    std::array<double, kNumCategories> category_late{};
    // Correct no-tool counts per NT=1 question over the first/last 40 train
    // steps (dual-path methods only).
    std::vector<int> nt_histogram_early;
    std::vector<int> nt_histogram_late;
    double final_em = 0.0;
    double final_tc = 0.0;
    double final_tp = 0.0;
};

RunOutcome run_experiment(const TrainConfig& cfg, const RunOptions& opts);

struct SweepRow {
    double lambda = 0.0;
    double final_em = 0.0;
    double final_tc = 0.0;
    double final_tp = 0.0;
};

// One run per lambda over a shared world and seed; method forced to akbe.
std::vector<SweepRow> sweep_lambda(const TrainConfig& base_cfg,
                                   const std::vector<double>& grid,
                                   const RunOptions& opts);

struct MethodRun {
    Method method = Method::Grpo;
    std::uint64_t seed = 0;
    RunOutcome outcome;
};

struct ComparisonReport {
    std::vector<MethodRun> runs;
    std::string report_json;  // path
};

// Per-method, per-seed runs over a shared world; seeds are base_cfg.seed + i.
ComparisonReport compare_methods(const TrainConfig& base_cfg,
                                 const std::vector<Method>& methods,
                                 int n_seeds, const RunOptions& opts);

// Human-readable rendering of a report.json produced by compare_methods.
std::string render_report(const std::string& report_json_path);

// Summary of a single finished run directory: final metric rows, first-vs-
// last degradation, and trace statistics when trajectories.jsonl exists.
std::string render_run_summary(const std::string& run_dir);

// Degradation between two eval checkpoints of a finished run directory.
DegradationSummary track_degradation(const std::string& run_dir,
                                     std::optional<int> early_step,
                                     std::optional<int> late_step);

// FNV-1a over a file's bytes, as used in the run manifest.
std::string file_hash_hex(const std::string& path);

}  // namespace akbe
