// Acceptance suite. Prints one pass/fail line per criterion and exits
// nonzero if any fails. Criteria 1-8 are exact unit/property checks;
// criteria 9-14 are directional desk-scale runs over five seeds.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "akbe/config.hpp"
#include "akbe/metrics.hpp"
#include "akbe/objectives.hpp"
#include "akbe/rollout.hpp"
#include "akbe/signals.hpp"
#include "akbe/trainer.hpp"
#include "test_util.hpp"

using namespace akbe;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool passed,
            const std::string& detail = "") {
    std::printf("[%s] criterion %2d: %s%s%s\n", passed ? "PASS" : "FAIL",
                criterion, name.c_str(), detail.empty() ? "" : " -- ",
                detail.c_str());
    std::fflush(stdout);
    if (!passed) ++g_failures;
}

// ---------------------------------------------------------------- exact ----

bool criterion_classification() {
    struct Case {
        int wt_reward, nt_reward;
        Category expect;
    };
    const Case cases[] = {
        {1, 0, Category::ToolDependent},
        {1, 1, Category::Efficiency},
        {0, 1, Category::Hallucination},
        {0, 0, Category::BothWrong},
    };
    for (const Case& c : cases) {
        RolloutGroup g;
        g.question.id = "q";
        Trajectory wt;
        wt.question_id = "q";
        wt.path = Path::WithTool;
        wt.steps.push_back({ActionKind::ToolCall, ObservationKind::Useful, -1});
        wt.steps.push_back({ActionKind::AnswerEvidence, {}, -1});
        wt.tc = 1;
        wt.correct = c.wt_reward == 1;
        wt.format_ok = true;
        wt.reward = c.wt_reward;
        Trajectory nt;
        nt.question_id = "q";
        nt.path = Path::NoTool;
        nt.steps.push_back({ActionKind::AnswerMemory, {}, -1});
        nt.correct = c.nt_reward == 1;
        nt.format_ok = true;
        nt.reward = c.nt_reward;
        g.with_tool.push_back(wt);
        g.no_tool.push_back(nt);
        const DualPathOutcome outcome = classify(g);
        if (outcome.category != c.expect) return false;
        if (outcome.kb != outcome.nt) return false;
    }
    return true;
}

bool criterion_advantages() {
    Rng rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(31);
        std::vector<double> rewards(n);
        for (double& r : rewards)
            r = static_cast<double>(static_cast<int>(rng.uniform_index(3))) - 1;
        const AdvantageSet adv = group_advantages(rewards);
        const bool all_equal = std::all_of(
            rewards.begin(), rewards.end(),
            [&](double r) { return r == rewards.front(); });
        if (all_equal) {
            for (double v : adv.values)
                if (v != 0.0) return false;
            continue;
        }
        double mean = 0.0;
        for (double v : adv.values) mean += v;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double v : adv.values) var += (v - mean) * (v - mean);
        var /= static_cast<double>(n);
        if (std::abs(mean) >= 1e-9) return false;
        if (std::abs(std::sqrt(var) - 1.0) >= 1e-9) return false;
    }
    return true;
}

bool criterion_reward_table() {
    return final_reward(true, true) == 1 && final_reward(false, true) == 0 &&
           final_reward(true, false) == -1 && final_reward(false, false) == -1;
}

struct GradCheckStats {
    int instances = 0;
    double worst = 0.0;
    bool ok = true;

    void add(const GradMatrix& analytic, const GradMatrix& fd) {
        const double err = test::grad_rel_error(analytic, fd);
        worst = std::max(worst, err);
        if (err >= 1e-5) ok = false;
        ++instances;
    }
};

bool criterion_gradients(std::string& detail) {
    Rng rng(23);
    GradCheckStats logprob, grpo, boundary, total, dpo;
    int clipped_branches = 0, unclipped_branches = 0;

    int attempts = 0;
    while (logprob.instances < 100 || grpo.instances < 100 ||
           boundary.instances < 100 || total.instances < 100 ||
           dpo.instances < 100) {
        const int qdim = 2 + static_cast<int>(rng.uniform_index(5));
        const Featurizer feat(qdim, 3);
        if (feat.dim() > 12) continue;
        const QuestionSpec q =
            test::make_question(rng, qdim, 2, "q" + std::to_string(attempts++));
        const World world({q});
        const PolicyParams sampler = test::random_params(feat.dim(), rng, 0.8);

        RolloutBudget budget;
        budget.g_wt = 4;
        budget.g_nt = 2;
        budget.max_turns = 3;
        const RolloutGroup group =
            run_dual_path(sampler, q, budget, feat, test::kEtaPoison,
                          derived_rng(55, std::to_string(logprob.instances))
                              .next_u64());
        bool too_long = false;
        for (const Trajectory& t : group.with_tool)
            if (t.steps.size() > 6) too_long = true;
        if (too_long) continue;

        PolicyParams at = sampler;
        for (int r = 0; r < kNumActions; ++r)
            for (int c = 0; c < feat.dim(); ++c)
                at.weights(r, c) += rng.uniform(-0.5, 0.5);

        // traj_logprob
        const Trajectory& probe = group.with_tool.front();
        logprob.add(traj_logprob_grad(at, probe, q, feat),
                    test::fd_gradient(
                        [&](const PolicyParams& p) {
                            return traj_logprob(p, probe, q, feat);
                        },
                        at));

        // L_GRPO with both beta values; skip near-boundary ratio instances
        GrpoConfig gcfg;
        gcfg.beta = (logprob.instances % 2 == 0) ? 0.0 : 0.04;
        std::vector<double> rewards = group_rewards(group, gcfg);
        if (std::all_of(rewards.begin(), rewards.end(),
                        [&](double r) { return r == rewards.front(); }))
            rewards[0] += 1.0;
        const AdvantageSet adv = group_advantages(rewards);
        bool near_boundary = false;
        for (const Trajectory& t : group.with_tool) {
            const double ratio = importance_ratio(at, sampler, t, q, feat);
            if (std::abs(std::abs(ratio - 1.0) - gcfg.epsilon) < 1e-3)
                near_boundary = true;
            if (std::abs(ratio - 1.0) > gcfg.epsilon)
                ++clipped_branches;
            else
                ++unclipped_branches;
        }
        if (near_boundary) continue;
        const PolicyParams ref = test::random_params(feat.dim(), rng, 0.5);
        grpo.add(grpo_loss_and_grad(at, sampler, ref, group, adv, gcfg, feat)
                     .grad,
                 test::fd_gradient(
                     [&](const PolicyParams& p) {
                         return grpo_loss_and_grad(p, sampler, ref, group, adv,
                                                   gcfg, feat)
                             .loss;
                     },
                     at));

        // L_AKBE over a constructed signal set (default CE and clipped CE)
        const DualPathOutcome outcome = classify(group);
        Rng select_rng(logprob.instances);
        const auto target = select_target(group, outcome, select_rng);
        SignalSet signals;
        if (target)
            signals.items.push_back({q.id, *target, outcome.category});
        AkbeConfig acfg;
        if (logprob.instances % 2 == 0) acfg.ce_clip = 0.2;
        boundary.add(
            akbe_loss_and_grad(at, signals, world, feat, acfg).grad,
            test::fd_gradient(
                [&](const PolicyParams& p) {
                    return akbe_loss_and_grad(p, signals, world, feat, acfg)
                        .loss;
                },
                at));

        // L_total at lambda 0.05
        total.add(
            total_loss(
                grpo_loss_and_grad(at, sampler, ref, group, adv, gcfg, feat),
                akbe_loss_and_grad(at, signals, world, feat, acfg), 0.05)
                .grad,
            test::fd_gradient(
                [&](const PolicyParams& p) {
                    return total_loss(grpo_loss_and_grad(p, sampler, ref,
                                                         group, adv, gcfg,
                                                         feat),
                                      akbe_loss_and_grad(p, signals, world,
                                                         feat, acfg),
                                      0.05)
                        .loss;
                },
                at));

        // DPO over a preferred/rejected pair when one exists
        if (target) {
            Rng reject_rng(1000 + logprob.instances);
            if (auto pair = make_dpo_pair(group, *target, reject_rng)) {
                const std::vector<DpoPair> pairs{*pair};
                dpo.add(dpo_loss_and_grad(at, ref, pairs, 0.1, world, feat)
                            .grad,
                        test::fd_gradient(
                            [&](const PolicyParams& p) {
                                return dpo_loss_and_grad(p, ref, pairs, 0.1,
                                                         world, feat)
                                    .loss;
                            },
                            at));
            }
        }
    }

    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "worst rel err: logprob %.2e, grpo %.2e (%d clip/%d unclip), "
                  "akbe %.2e, total %.2e, dpo %.2e (%d pairs)",
                  logprob.worst, grpo.worst, clipped_branches,
                  unclipped_branches, boundary.worst, total.worst, dpo.worst,
                  dpo.instances);
    detail = buf;
    return logprob.ok && grpo.ok && boundary.ok && total.ok && dpo.ok &&
           logprob.instances >= 100 && grpo.instances >= 100 &&
           boundary.instances >= 100 && total.instances >= 100 &&
           dpo.instances >= 100 && clipped_branches > 0 &&
           unclipped_branches > 0;
}

bool criterion_min_tc(std::string& detail) {
    Rng rng(29);
    for (int trial = 0; trial < 1000; ++trial) {
        RolloutGroup g;
        g.question.id = "q";
        const int n = 2 + static_cast<int>(rng.uniform_index(7));
        int min_correct_tc = 99;
        bool any_correct = false;
        for (int i = 0; i < n; ++i) {
            Trajectory t;
            t.question_id = "q";
            t.path = Path::WithTool;
            const int tc = static_cast<int>(rng.uniform_index(6));
            for (int k = 0; k < tc; ++k)
                t.steps.push_back(
                    {ActionKind::ToolCall, ObservationKind::Useful, -1});
            t.steps.push_back({ActionKind::AnswerEvidence, {}, -1});
            t.tc = tc;
            t.correct = rng.bernoulli(0.6);
            t.format_ok = true;
            t.reward = t.correct ? 1 : 0;
            if (t.reward == 1) {
                any_correct = true;
                min_correct_tc = std::min(min_correct_tc, tc);
            }
            g.with_tool.push_back(std::move(t));
        }
        if (!any_correct) {
            --trial;
            continue;
        }
        Trajectory nt;
        nt.question_id = "q";
        nt.path = Path::NoTool;
        nt.steps.push_back({ActionKind::AnswerMemory, {}, -1});
        nt.reward = 0;
        g.no_tool.push_back(nt);

        const DualPathOutcome outcome = classify(g);
        if (outcome.category != Category::ToolDependent) return false;
        Rng select_rng(trial);
        const auto target = select_target(g, outcome, select_rng);
        if (!target || target->reward != 1 || target->tc != min_correct_tc)
            return false;
    }

    // tie-break uniformity over 1e4 trials
    RolloutGroup tie;
    tie.question.id = "q";
    for (int i = 0; i < 3; ++i) {
        Trajectory t;
        t.question_id = "q";
        t.path = Path::WithTool;
        t.steps.push_back({ActionKind::ToolCall, ObservationKind::Useful, -1});
        t.steps.push_back({ActionKind::AnswerEvidence, {}, -1.0 - i});
        t.tc = 1;
        t.correct = i != 1;  // middle one incorrect; two tied candidates
        t.format_ok = true;
        t.reward = t.correct ? 1 : 0;
        tie.with_tool.push_back(std::move(t));
    }
    Trajectory nt;
    nt.question_id = "q";
    nt.path = Path::NoTool;
    nt.steps.push_back({ActionKind::AnswerMemory, {}, -1});
    nt.reward = 0;
    tie.no_tool.push_back(nt);

    const DualPathOutcome outcome = classify(tie);
    std::vector<int> counts(2, 0);
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        Rng select_rng(derived_rng(31, "tie/" + std::to_string(i)).next_u64());
        const auto target = select_target(tie, outcome, select_rng);
        ++counts[target->steps.back().log_prob == -1.0 ? 0 : 1];
    }
    const double stat = test::chi2_uniform_stat(counts, trials);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "tie counts %d/%d, chi2 %.3f < %.3f",
                  counts[0], counts[1], stat, test::chi2_crit_p01(1));
    detail = buf;
    return stat < test::chi2_crit_p01(1);
}

TrainConfig tiny_config() {
    TrainConfig cfg;
    cfg.world.n_questions = 48;
    cfg.world.feature_dim = 6;
    cfg.world.seed = 11;
    cfg.world.hop_weights = {0.7, 0.3};
    cfg.budget.g_wt = 4;
    cfg.budget.g_nt = 2;
    cfg.budget.max_turns = 4;
    cfg.batch_size = 8;
    cfg.steps = 6;
    cfg.learning_rate = 0.1;
    cfg.eval_every = 3;
    cfg.eval_size = 16;
    cfg.seed = 5;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bool criterion_lambda_default(const fs::path& work) {
    if (lambda_default(16) != 0.0625) return false;

    TrainConfig grpo_cfg = tiny_config();
    grpo_cfg.method = Method::Grpo;
    RunOptions a;
    a.out_dir = (work / "degen-grpo").string();
    const RunOutcome grpo_run = run_experiment(grpo_cfg, a);

    TrainConfig akbe_cfg = tiny_config();
    akbe_cfg.method = Method::Akbe;
    akbe_cfg.akbe.lambda = 0.0;
    RunOptions b;
    b.out_dir = (work / "degen-akbe").string();
    const RunOutcome akbe_run = run_experiment(akbe_cfg, b);

    return slurp(grpo_run.artifacts.checkpoint) ==
           slurp(akbe_run.artifacts.checkpoint);
}

bool criterion_determinism(const fs::path& work) {
    TrainConfig cfg = tiny_config();
    cfg.threads = 1;
    RunOptions a;
    a.out_dir = (work / "det-1").string();
    const RunOutcome serial = run_experiment(cfg, a);

    cfg.threads = 8;
    RunOptions b;
    b.out_dir = (work / "det-8").string();
    const RunOutcome parallel = run_experiment(cfg, b);

    return slurp(serial.artifacts.metrics_csv) ==
           slurp(parallel.artifacts.metrics_csv);
}

bool criterion_gradient_balance(std::string& detail) {
    Rng rng(41);
    const int g_wt = 8;
    const double lambda = lambda_default(g_wt);
    double ratio_sum = 0.0;
    int counted = 0;
    int attempts = 0;
    while (counted < 400 && attempts < 10000) {
        ++attempts;
        const Featurizer feat(4, 3);
        const QuestionSpec q =
            test::make_question(rng, 4, 2, "q" + std::to_string(attempts));
        const World world({q});
        const PolicyParams p = test::random_params(feat.dim(), rng, 0.7);
        RolloutBudget budget;
        budget.g_wt = g_wt;
        budget.g_nt = 4;
        budget.max_turns = 3;
        const RolloutGroup group = run_dual_path(
            p, q, budget, feat, test::kEtaPoison,
            derived_rng(47, "bal/" + std::to_string(attempts)).next_u64());

        std::vector<double> rewards;
        for (const Trajectory& t : group.with_tool)
            rewards.push_back(t.reward == 1 ? 1.0 : 0.0);
        if (std::all_of(rewards.begin(), rewards.end(),
                        [&](double r) { return r == rewards.front(); }))
            continue;
        const DualPathOutcome outcome = classify(group);
        Rng select_rng(attempts);
        const auto target = select_target(group, outcome, select_rng);
        if (!target) continue;

        const AdvantageSet adv = group_advantages(rewards);
        const LossTerms rl =
            grpo_loss_and_grad(p, p, p, group, adv, GrpoConfig{}, feat);
        SignalSet signals;
        signals.items.push_back({q.id, *target, outcome.category});
        const LossTerms aux =
            akbe_loss_and_grad(p, signals, world, feat, AkbeConfig{});
        if (aux.grad.norm() < 1e-12) continue;
        ratio_sum += rl.grad.norm() / (lambda * aux.grad.norm());
        ++counted;
    }
    const double mean_ratio = ratio_sum / std::max(counted, 1);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "mean ratio %.3f over %d instances",
                  mean_ratio, counted);
    detail = buf;
    return counted >= 400 && mean_ratio > 0.2 && mean_ratio < 5.0;
}

// ---------------------------------------------------------- directional ----

// Desk-scale world per the acceptance setup: 600 questions, 40% memory-easy,
// 40% tool-dependent with hops in {1, 2}, 20% noise-prone; batch 16,
// G_wt = 8, G_nt = 4, 300 steps, 5 seeds.
TrainConfig desk_config() {
    TrainConfig cfg;
    cfg.world.n_questions = 600;
    cfg.world.frac_memory_easy = 0.4;
    cfg.world.frac_tool_dependent = 0.4;
    cfg.world.frac_noise_prone = 0.2;
    cfg.world.hop_weights = {0.75, 0.25};
    cfg.world.memory_easy = {0.95, 1.0, 0.02, 0.08};
    cfg.world.tool_dependent = {0.02, 0.15, 0.0, 0.05};
    cfg.world.noise_prone = {0.4, 0.6, 0.4, 0.6};
    cfg.world.feature_dim = 12;
    cfg.world.seed = 7;
    cfg.budget.g_wt = 8;
    cfg.budget.g_nt = 4;
    cfg.budget.max_turns = 6;
    cfg.batch_size = 16;
    cfg.steps = 300;
    cfg.learning_rate = 0.15;
    cfg.max_grad_norm = 0.3;
    cfg.eval_every = 30;
    cfg.eval_size = 200;
    cfg.seed = 1;
    cfg.threads = 4;
    return cfg;
}

constexpr int kSeeds = 5;
constexpr int kNeeded = 4;  // criteria hold in >= 4/5 seeds

struct DeskRuns {
    // [method][seed]
    std::map<Method, std::vector<RunOutcome>> runs;
    std::vector<std::vector<SweepRow>> sweeps;  // per seed, grid rows
    std::string report_json;
};

DeskRuns run_desk(const fs::path& work) {
    DeskRuns out;
    const TrainConfig base = desk_config();
    RunOptions opts;
    opts.out_dir = (work / "compare").string();
    const std::vector<Method> methods{Method::Grpo, Method::Akbe, Method::Otc,
                                      Method::AkbeDpo};
    const ComparisonReport report =
        compare_methods(base, methods, kSeeds, opts);
    out.report_json = report.report_json;
    for (const MethodRun& run : report.runs)
        out.runs[run.method].push_back(run.outcome);

    for (int s = 0; s < kSeeds; ++s) {
        TrainConfig cfg = base;
        cfg.seed = base.seed + static_cast<std::uint64_t>(s);
        RunOptions sweep_opts;
        sweep_opts.out_dir =
            (work / ("sweep-seed" + std::to_string(cfg.seed))).string();
        out.sweeps.push_back(sweep_lambda(cfg, {0.05, 0.2, 1.0}, sweep_opts));
    }
    return out;
}

double eval_window_mean(const RunOutcome& run, int steps, bool last) {
    const double lo = last ? steps * 0.9 : 0.0;
    const double hi = last ? steps : steps * 0.1;
    double sum = 0.0;
    int n = 0;
    for (const MetricsRecord& r : run.eval_records) {
        if (r.step > lo && r.step <= hi) {
            sum += r.mean_tc;
            ++n;
        }
    }
    return n > 0 ? sum / n : 0.0;
}

bool criterion_offloading(const DeskRuns& desk, std::string& detail) {
    int grow = 0, redundant_seeds = 0;
    std::ostringstream info;
    for (const RunOutcome& run : desk.runs.at(Method::Grpo)) {
        const double first = eval_window_mean(run, 300, false);
        const double last = eval_window_mean(run, 300, true);
        if (last >= first) ++grow;
        if (run.degradation.redundant > 0) ++redundant_seeds;
        info << " " << first << "->" << last << "/r" << run.degradation.redundant;
    }
    detail = "tc first->last, redundant:" + info.str();
    return grow >= kNeeded && redundant_seeds >= kNeeded;
}

bool criterion_efficiency(const DeskRuns& desk, std::string& detail) {
    int joint = 0, tp_wins = 0;
    std::ostringstream info;
    for (int s = 0; s < kSeeds; ++s) {
        const RunOutcome& grpo = desk.runs.at(Method::Grpo)[s];
        const RunOutcome& akbe = desk.runs.at(Method::Akbe)[s];
        const bool tc_ok = akbe.final_tc <= 0.85 * grpo.final_tc;
        const bool em_ok = akbe.final_em >= grpo.final_em - 0.02;
        if (tc_ok && em_ok) ++joint;
        if (std::isfinite(akbe.final_tp) && std::isfinite(grpo.final_tp) &&
            akbe.final_tp > grpo.final_tp)
            ++tp_wins;
        info << " [tc " << akbe.final_tc << " vs " << grpo.final_tc << ", em "
             << akbe.final_em << " vs " << grpo.final_em << "]";
    }
    detail = "akbe vs grpo:" + info.str();
    return joint >= kNeeded && tp_wins >= kNeeded;
}

bool criterion_reward_hacking(const DeskRuns& desk, std::string& detail) {
    int hacked = 0;
    std::ostringstream info;
    for (int s = 0; s < kSeeds; ++s) {
        const RunOutcome& otc = desk.runs.at(Method::Otc)[s];
        const RunOutcome& akbe = desk.runs.at(Method::Akbe)[s];
        const bool ok = otc.final_tc < akbe.final_tc &&
                        otc.final_em <= akbe.final_em - 0.02;
        if (ok) ++hacked;
        info << " [otc tc " << otc.final_tc << " em " << otc.final_em << "]";
    }
    detail = "otc finals:" + info.str();
    return hacked >= kNeeded;
}

bool criterion_category_shift(const DeskRuns& desk, std::string& detail) {
    int shifted = 0;
    std::ostringstream info;
    for (const RunOutcome& run : desk.runs.at(Method::Akbe)) {
        auto window_mean = [&](bool last, Category c) {
            double sum = 0.0;
            int n = 0;
            for (const MetricsRecord& r : run.train_records) {
                const bool in_window = last ? r.step > 300 - 40 : r.step <= 40;
                if (!in_window) continue;
                sum += r.category_fractions[static_cast<int>(c)];
                ++n;
            }
            return sum / std::max(n, 1);
        };
        const double eff_first = window_mean(false, Category::Efficiency);
        const double eff_last = window_mean(true, Category::Efficiency);
        const double bw_first = window_mean(false, Category::BothWrong);
        const double bw_last = window_mean(true, Category::BothWrong);
        if (eff_last > eff_first && bw_last < bw_first) ++shifted;
        info << " [eff " << eff_first << "->" << eff_last << ", bw " << bw_first
             << "->" << bw_last << "]";
    }
    detail = "windows:" + info.str();
    return shifted >= kNeeded;
}

bool criterion_lambda_sweep(const DeskRuns& desk, std::string& detail) {
    int ok_seeds = 0;
    std::ostringstream info;
    for (const auto& rows : desk.sweeps) {
        const bool monotone = rows[0].final_tc >= rows[1].final_tc &&
                              rows[1].final_tc >= rows[2].final_tc;
        const bool em_drop = rows[2].final_em < rows[0].final_em;
        if (monotone && em_drop) ++ok_seeds;
        info << " [tc " << rows[0].final_tc << "/" << rows[1].final_tc << "/"
             << rows[2].final_tc << " em " << rows[0].final_em << "->"
             << rows[2].final_em << "]";
    }
    detail = "lambda 0.05/0.2/1.0:" + info.str();
    return ok_seeds >= kNeeded;
}

bool criterion_dpo_report(const DeskRuns& desk, std::string& detail) {
    // report-only: the comparison report must include the akbe_dpo EM/TC
    // series; no threshold is imposed.
    const std::string raw = slurp(desk.report_json);
    if (raw.find("\"akbe_dpo\"") == std::string::npos) return false;
    const auto& runs = desk.runs.at(Method::AkbeDpo);
    if (runs.size() != kSeeds) return false;
    for (const RunOutcome& run : runs)
        if (run.eval_records.empty()) return false;
    detail = "akbe_dpo em/tc series present for " +
             std::to_string(runs.size()) + " seeds";
    return true;
}

}  // namespace

int main() {
    const fs::path work = fs::current_path() / "acceptance_out";
    fs::remove_all(work);
    fs::create_directories(work);

    std::printf("exact checks\n");
    report(1, "dual-path classification truth table", criterion_classification());
    report(2, "advantage normalization over 1000 random reward vectors",
           criterion_advantages());
    report(3, "reward table (correct, format) -> {1, 0, -1}",
           criterion_reward_table());
    {
        std::string detail;
        const bool ok = criterion_gradients(detail);
        report(4, "analytic gradients match central finite differences", ok,
               detail);
    }
    {
        std::string detail;
        const bool ok = criterion_min_tc(detail);
        report(5, "minimum-tc target selection with uniform tie-break", ok,
               detail);
    }
    report(6, "lambda_default(16) = 0.0625 and lambda-0 = grpo bit-identical",
           criterion_lambda_default(work));
    report(7, "byte-identical metrics at thread counts 1 and 8",
           criterion_determinism(work));
    {
        std::string detail;
        const bool ok = criterion_gradient_balance(detail);
        report(8, "per-question gradient-norm ratio within [0.2, 5]", ok,
               detail);
    }

    std::printf("directional desk-scale runs (5 seeds x 4 methods + sweeps)\n");
    const DeskRuns desk = run_desk(work);
    {
        std::string detail;
        const bool ok = criterion_offloading(desk, detail);
        report(9, "plain grpo grows eval tool calls with redundant questions",
               ok, detail);
    }
    {
        std::string detail;
        const bool ok = criterion_efficiency(desk, detail);
        report(10, "akbe cuts tool calls at least 15% without losing accuracy",
               ok, detail);
    }
    {
        std::string detail;
        const bool ok = criterion_reward_hacking(desk, detail);
        report(11, "shaped-reward baseline suppresses tools and loses accuracy",
               ok, detail);
    }
    {
        std::string detail;
        const bool ok = criterion_category_shift(desk, detail);
        report(12, "efficiency fraction rises and both-wrong falls under akbe",
               ok, detail);
    }
    {
        std::string detail;
        const bool ok = criterion_lambda_sweep(desk, detail);
        report(13, "tool calls non-increasing in lambda, accuracy drops at 1.0",
               ok, detail);
    }
    {
        std::string detail;
        const bool ok = criterion_dpo_report(desk, detail);
        report(14, "comparison report includes the dpo variant series", ok,
               detail);
    }

    std::printf("%d/14 criteria passed\n", 14 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
