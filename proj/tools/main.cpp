// Command-line driver: train, eval, sweep-lambda, compare, track-degradation,
// report. Exit codes: 0 success, 2 config error, 3 numeric failure, 4 I/O
// error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "akbe/config.hpp"
#include "akbe/errors.hpp"
#include "akbe/metrics.hpp"
#include "akbe/trainer.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    bool trace = false;
    bool svg = false;
    std::optional<int> threads;
};

akbe::TrainConfig load_config(const CommonFlags& flags) {
    akbe::TrainConfig cfg = akbe::load_train_config(flags.config_path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.threads) cfg.threads = *flags.threads;
    akbe::validate_train_config(cfg);
    return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_out = true) {
    cmd->add_option("--config", flags.config_path, "Experiment config (JSON)")
        ->required();
    cmd->add_option("--seed", flags.seed, "Override the config seed");
    cmd->add_option("--threads", flags.threads,
                    "Override the rollout thread count");
    if (with_out) {
        cmd->add_option("--out-dir", flags.out_dir, "Artifact directory");
        cmd->add_flag("--trace", flags.trace,
                      "Write sampled trajectories as JSONL");
        cmd->add_flag("--svg", flags.svg, "Emit static SVG line charts");
    }
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            grid.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw akbe::ConfigError("bad lambda grid entry: " + tok);
        }
    }
    if (grid.empty()) throw akbe::ConfigError("empty lambda grid");
    return grid;
}

std::vector<akbe::Method> parse_methods(const std::string& text) {
    std::vector<akbe::Method> methods;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) methods.push_back(akbe::method_from_string(tok));
    }
    if (methods.empty()) throw akbe::ConfigError("no methods given");
    return methods;
}

void print_final(const akbe::RunOutcome& out) {
    std::printf("final eval: em %.4f  tc %.4f  tp %s\n", out.final_em,
                out.final_tc, akbe::format_double(out.final_tp).c_str());
    std::printf("degradation (first->last eval): original %d  redundant %d  "
                "hallucinated %d  out_of_scope %d\n",
                out.degradation.original, out.degradation.redundant,
                out.degradation.hallucinated, out.degradation.out_of_scope);
    std::printf("artifacts: %s\n", out.artifacts.out_dir.c_str());
}

void cmd_train(const CommonFlags& flags) {
    const akbe::TrainConfig cfg = load_config(flags);
    akbe::RunOptions opts;
    opts.out_dir = flags.out_dir;
    opts.trace = flags.trace;
    opts.svg = flags.svg;
    const akbe::RunOutcome out = akbe::run_experiment(cfg, opts);
    std::printf("method %s, %d steps, seed %llu\n",
                akbe::to_string(cfg.method), cfg.steps,
                static_cast<unsigned long long>(cfg.seed));
    print_final(out);
}

void cmd_eval(const CommonFlags& flags, const std::string& checkpoint) {
    const akbe::TrainConfig cfg = load_config(flags);
    const akbe::TrainContext ctx = akbe::make_train_context(cfg);
    const akbe::PolicyParams params = akbe::load_policy(checkpoint);
    if (params.feature_dim() != ctx.feat.dim())
        throw akbe::ConfigError(
            "checkpoint dimension does not match the configured world");
    const akbe::EvalResult result = akbe::evaluate(ctx, params, 0);
    const akbe::MetricsRecord& r = result.record;
    std::printf("eval over %d held-out questions\n", cfg.eval_size);
    std::printf("em %.4f  mean_tc %.4f  tp %s  mean_reward %.4f\n", r.em,
                r.mean_tc, akbe::format_double(r.tp).c_str(), r.mean_reward);
    std::printf("categories (dep/eff/hal/both): %.3f %.3f %.3f %.3f\n",
                r.category_fractions[0], r.category_fractions[1],
                r.category_fractions[2], r.category_fractions[3]);
}

void cmd_sweep(const CommonFlags& flags, const std::string& grid_text) {
    const akbe::TrainConfig cfg = load_config(flags);
    akbe::RunOptions opts;
    opts.out_dir = flags.out_dir;
    opts.svg = flags.svg;
    const auto rows = akbe::sweep_lambda(cfg, parse_grid(grid_text), opts);
    std::printf("lambda    final_em  final_tc  final_tp\n");
    for (const akbe::SweepRow& r : rows)
        std::printf("%-8s  %8.4f  %8.4f  %8s\n",
                    akbe::format_double(r.lambda).c_str(), r.final_em,
                    r.final_tc, akbe::format_double(r.final_tp).c_str());
}

void cmd_compare(const CommonFlags& flags, const std::string& methods_text,
                 int n_seeds) {
    const akbe::TrainConfig cfg = load_config(flags);
    akbe::RunOptions opts;
    opts.out_dir = flags.out_dir;
    opts.svg = flags.svg;
    opts.trace = flags.trace;
    const akbe::ComparisonReport report =
        akbe::compare_methods(cfg, parse_methods(methods_text), n_seeds, opts);
    std::printf("%s", akbe::render_report(report.report_json).c_str());
    std::printf("\nreport: %s\n", report.report_json.c_str());
}

void cmd_track(const std::string& run_dir, std::optional<int> early,
               std::optional<int> late) {
    const akbe::DegradationSummary summary =
        akbe::track_degradation(run_dir, early, late);
    std::printf("original %d  redundant %d  hallucinated %d  out_of_scope %d\n",
                summary.original, summary.redundant, summary.hallucinated,
                summary.out_of_scope);
}

void cmd_report(const std::string& in_path, const std::string& run_dir) {
    if (!in_path.empty())
        std::printf("%s", akbe::render_report(in_path).c_str());
    else if (!run_dir.empty())
        std::printf("%s", akbe::render_run_summary(run_dir).c_str());
    else
        throw akbe::ConfigError("report: give --in or --run-dir");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale agentic RL with dual-path knowledge-boundary "
                 "probing"};
    app.require_subcommand(1);

    CommonFlags train_flags;
    CLI::App* train = app.add_subcommand("train", "Run one training job");
    add_common(train, train_flags);
    train->callback([&] { cmd_train(train_flags); });

    CommonFlags eval_flags;
    std::string checkpoint;
    CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
    add_common(eval, eval_flags, /*with_out=*/false);
    eval->add_option("--checkpoint", checkpoint, "Policy checkpoint")
        ->required();
    eval->callback([&] { cmd_eval(eval_flags, checkpoint); });

    CommonFlags sweep_flags;
    std::string grid = "0.05,0.1,0.2,0.3,0.5,1.0";
    CLI::App* sweep =
        app.add_subcommand("sweep-lambda", "One run per lambda value");
    add_common(sweep, sweep_flags);
    sweep->add_option("--grid", grid, "Comma-separated lambda values");
    sweep->callback([&] { cmd_sweep(sweep_flags, grid); });

    CommonFlags compare_flags;
    std::string methods = "grpo,akbe,otc,akbe_dpo";
    int n_seeds = 1;
    CLI::App* compare =
        app.add_subcommand("compare", "Multi-method, multi-seed comparison");
    add_common(compare, compare_flags);
    compare->add_option("--methods", methods, "Comma-separated method list");
    compare->add_option("--seeds", n_seeds, "Seeds per method");
    compare->callback([&] { cmd_compare(compare_flags, methods, n_seeds); });

    std::string run_dir;
    std::optional<int> early_step, late_step;
    CLI::App* track = app.add_subcommand(
        "track-degradation", "Label questions between two eval checkpoints");
    track->add_option("--run-dir", run_dir, "Finished run directory")
        ->required();
    track->add_option("--early-step", early_step, "Early checkpoint step");
    track->add_option("--late-step", late_step, "Late checkpoint step");
    track->callback([&] { cmd_track(run_dir, early_step, late_step); });

    std::string report_in, report_run_dir;
    CLI::App* report = app.add_subcommand(
        "report", "Render a comparison report or a single-run summary");
    report->add_option("--in", report_in, "report.json from compare");
    report->add_option("--run-dir", report_run_dir, "Finished run directory");
    report->callback([&] { cmd_report(report_in, report_run_dir); });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const akbe::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const akbe::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const akbe::NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    } catch (const akbe::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
