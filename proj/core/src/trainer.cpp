#include "akbe/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "akbe/errors.hpp"
#include "akbe/parallel.hpp"
#include "akbe/svg.hpp"

namespace akbe {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr double kOnPolicyTolerance = 1e-10;

bool finite_terms(const LossTerms& t) {
    return std::isfinite(t.loss) && t.grad.allFinite();
}

Category category_of(bool wt, bool nt) {
    if (wt && !nt) return Category::ToolDependent;
    if (wt && nt) return Category::Efficiency;
    if (!wt && nt) return Category::Hallucination;
    return Category::BothWrong;
}

bool is_akbe_method(Method m) {
    return m == Method::Akbe || m == Method::AkbeDpo;
}

AkbeVariant effective_variant(const TrainConfig& cfg) {
    if (cfg.method == Method::AkbeDpo) return AkbeVariant::Dpo;
    return cfg.akbe.variant;
}

double tp_or_inf(double correct_sum, double tc_sum) {
    return tc_sum > 0.0 ? correct_sum / tc_sum
                        : std::numeric_limits<double>::infinity();
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

double json_tp(const json& v) {
    return v.is_null() ? std::numeric_limits<double>::infinity()
                       : v.get<double>();
}

json tp_json(double v) {
    if (std::isinf(v)) return nullptr;  // JSON has no inf
    return v;
}

}  // namespace

TrainContext make_train_context(const TrainConfig& cfg) {
    validate_train_config(cfg);
    World world(generate_world(cfg.world));
    WorldConfig eval_cfg = cfg.world;
    eval_cfg.n_questions = cfg.eval_size;
    eval_cfg.seed = mix_seed(cfg.world.seed, "eval-world");
    World eval_world(generate_world(eval_cfg));
    Featurizer feat(cfg.world.feature_dim, cfg.budget.max_turns);
    PolicyParams ref = initial_policy(feat.dim());
    return TrainContext{cfg, std::move(world), std::move(eval_world), feat,
                        std::move(ref)};
}

TrainStepOutput train_step(const TrainContext& ctx, const PolicyParams& params,
                           const std::vector<const QuestionSpec*>& batch,
                           int step_index, const FrozenSignals* frozen) {
    const TrainConfig& cfg = ctx.cfg;
    const bool akbe_method = is_akbe_method(cfg.method);
    const bool sample_dual = akbe_method && frozen == nullptr;
    const std::uint64_t step_seed =
        mix_seed(cfg.seed, "step/" + std::to_string(step_index));

    std::vector<RolloutGroup> groups(batch.size());
    parallel_for(batch.size(), cfg.threads, [&](std::size_t i) {
        const QuestionSpec& q = *batch[i];
        const std::uint64_t q_seed = mix_seed(step_seed, "q/" + q.id);
        if (sample_dual) {
            groups[i] = run_dual_path(params, q, cfg.budget, ctx.feat,
                                      cfg.world.eta_poison, q_seed);
        } else {
            groups[i].question = q;
            groups[i].with_tool = rollout_with_tool(
                params, q, cfg.budget, ctx.feat, cfg.world.eta_poison, q_seed);
        }
    });

    // Single-writer phase; every reduction below runs in batch index order.
    auto check_on_policy = [&](const RolloutGroup& group,
                               const Trajectory& traj) {
        const double replayed =
            traj_logprob(params, traj, group.question, ctx.feat);
        if (std::abs(replayed - traj.sampled_log_prob()) > kOnPolicyTolerance)
            throw ContractError("on-policy check failed for question " +
                                group.question.id);
    };
    for (const RolloutGroup& group : groups) {
        for (const Trajectory& traj : group.with_tool)
            check_on_policy(group, traj);
        for (const Trajectory& traj : group.no_tool)
            check_on_policy(group, traj);
    }

    GrpoConfig eff_grpo = cfg.grpo;
    if (cfg.method == Method::Otc) eff_grpo.reward_mode = RewardMode::OtcShaped;

    LossTerms rl_sum = LossTerms::zeros(params.feature_dim());
    for (const RolloutGroup& group : groups) {
        const AdvantageSet adv =
            group_advantages(group_rewards(group, eff_grpo));
        const LossTerms terms = ctx.rl_loss(params, params, ctx.ref_params,
                                            group, adv, eff_grpo, ctx.feat);
        if (!finite_terms(terms))
            throw NumericError("non-finite policy-loss term at step " +
                               std::to_string(step_index) + " for question " +
                               group.question.id);
        rl_sum.loss += terms.loss;
        rl_sum.grad += terms.grad;
    }

    std::vector<DualPathOutcome> outcomes;
    outcomes.reserve(groups.size());
    SignalSet signals;
    std::vector<DpoPair> pairs;
    for (const RolloutGroup& group : groups) {
        DualPathOutcome outcome = classify(group);
        if (sample_dual) {
            const std::uint64_t q_seed =
                mix_seed(step_seed, "q/" + group.question.id);
            Rng select_rng = derived_rng(q_seed, "select");
            outcome.target = select_target(group, outcome, select_rng);
            if (outcome.target) {
                signals.items.push_back(
                    {group.question.id, *outcome.target, outcome.category});
                if (effective_variant(cfg) == AkbeVariant::Dpo) {
                    Rng reject_rng = derived_rng(q_seed, "reject");
                    if (auto pair =
                            make_dpo_pair(group, *outcome.target, reject_rng))
                        pairs.push_back(std::move(*pair));
                }
            }
        }
        outcomes.push_back(std::move(outcome));
    }
    if (frozen != nullptr && akbe_method) {
        signals = frozen->signals;
        pairs = frozen->pairs;
    }

    LossTerms aux = LossTerms::zeros(params.feature_dim());
    if (akbe_method) {
        if (effective_variant(cfg) == AkbeVariant::CrossEntropy) {
            aux = akbe_loss_and_grad(params, signals, ctx.world, ctx.feat,
                                     cfg.akbe);
            if (!finite_terms(aux)) {
                for (const Signal& sig : signals.items) {
                    SignalSet single;
                    single.items.push_back(sig);
                    if (!finite_terms(akbe_loss_and_grad(
                            params, single, ctx.world, ctx.feat, cfg.akbe)))
                        throw NumericError(
                            "non-finite boundary-loss term at step " +
                            std::to_string(step_index) + " for question " +
                            sig.question_id);
                }
                throw NumericError("non-finite boundary loss at step " +
                                   std::to_string(step_index));
            }
        } else {
            aux = dpo_loss_and_grad(params, ctx.ref_params, pairs,
                                    cfg.akbe.dpo_beta, ctx.world, ctx.feat);
            if (!finite_terms(aux))
                throw NumericError("non-finite preference-loss term at step " +
                                   std::to_string(step_index));
        }
    }

    const double lambda = akbe_method ? cfg.akbe.lambda : 0.0;
    const LossTerms total = total_loss(rl_sum, aux, lambda);
    if (!finite_terms(total))
        throw NumericError("non-finite total loss at step " +
                           std::to_string(step_index));

    double lr = cfg.learning_rate;
    if (cfg.lr_warmup_steps > 0 && step_index < cfg.lr_warmup_steps)
        lr *= static_cast<double>(step_index) / cfg.lr_warmup_steps;
    GradMatrix update = total.grad;
    if (cfg.max_grad_norm > 0.0) {
        const double norm = update.norm();
        if (norm > cfg.max_grad_norm) update *= cfg.max_grad_norm / norm;
    }

    TrainStepOutput out;
    out.grad = update;
    out.params.weights = params.weights - lr * update;

    double correct_sum = 0.0, tc_sum = 0.0, reward_sum = 0.0;
    std::size_t wt_count = 0;
    std::vector<Trajectory> all_trajs;
    for (const RolloutGroup& group : groups) {
        for (const Trajectory& t : group.with_tool) {
            correct_sum += t.correct ? 1.0 : 0.0;
            tc_sum += t.tc;
            reward_sum += t.reward;
            ++wt_count;
            all_trajs.push_back(t);
        }
        for (const Trajectory& t : group.no_tool) all_trajs.push_back(t);
    }

    MetricsRecord& rec = out.record;
    rec.step = step_index;
    rec.em = correct_sum / static_cast<double>(wt_count);
    rec.mean_tc = tc_sum / static_cast<double>(wt_count);
    rec.tp = tp_or_inf(correct_sum, tc_sum);
    rec.category_fractions = category_distribution(outcomes);
    rec.mean_reward = reward_sum / static_cast<double>(wt_count);
    rec.signal_count = akbe_method ? static_cast<int>(signals.items.size()) : 0;
    rec.cost_units =
        cost_accounting(all_trajs, cfg.cost_per_tool, cfg.cost_per_step);
    rec.loss_grpo = rl_sum.loss;
    rec.loss_akbe = akbe_method ? aux.loss : 0.0;
    rec.loss_total = total.loss;
    rec.phase = "train";

    out.outcomes = std::move(outcomes);
    out.groups = std::move(groups);
    out.constructed = FrozenSignals{std::move(signals), std::move(pairs)};
    return out;
}

EvalResult evaluate(const TrainContext& ctx, const PolicyParams& params,
                    int step_index) {
    const TrainConfig& cfg = ctx.cfg;
    const auto& questions = ctx.eval_world.questions();
    struct PerQuestion {
        Trajectory wt;
        Trajectory nt;
    };
    std::vector<PerQuestion> results(questions.size());
    parallel_for(questions.size(), cfg.threads, [&](std::size_t i) {
        const QuestionSpec& q = questions[i];
        // Keyed by the world seed: runs on the same world share eval draws.
        Rng wt_rng = derived_rng(cfg.world.seed, "eval-wt/" + q.id);
        Rng nt_rng = derived_rng(cfg.world.seed, "eval-nt/" + q.id);
        if (cfg.eval_stochastic) {
            results[i].wt =
                rollout_one(params, q, ctx.feat, cfg.budget.max_turns,
                            /*with_tool=*/true, cfg.world.eta_poison, wt_rng);
            results[i].nt =
                rollout_one(params, q, ctx.feat, cfg.budget.max_turns,
                            /*with_tool=*/false, cfg.world.eta_poison, nt_rng);
        } else {
            results[i].wt = rollout_one_greedy(
                params, q, ctx.feat, cfg.budget.max_turns,
                /*with_tool=*/true, cfg.world.eta_poison, wt_rng);
            results[i].nt = rollout_one_greedy(
                params, q, ctx.feat, cfg.budget.max_turns,
                /*with_tool=*/false, cfg.world.eta_poison, nt_rng);
        }
    });

    EvalResult out;
    double correct_sum = 0.0, tc_sum = 0.0, reward_sum = 0.0;
    std::array<double, kNumCategories> fractions{};
    std::vector<Trajectory> all_trajs;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        const PerQuestion& r = results[i];
        correct_sum += r.wt.correct ? 1.0 : 0.0;
        tc_sum += r.wt.tc;
        reward_sum += r.wt.reward;
        fractions[static_cast<int>(
            category_of(r.wt.reward == 1, r.nt.reward == 1))] += 1.0;
        out.points[questions[i].id] = EvalPoint{r.wt.correct, r.wt.tc};
        all_trajs.push_back(r.wt);
        all_trajs.push_back(r.nt);
    }
    const double n = static_cast<double>(questions.size());
    for (double& f : fractions) f /= n;

    MetricsRecord& rec = out.record;
    rec.step = step_index;
    rec.em = correct_sum / n;
    rec.mean_tc = tc_sum / n;
    rec.tp = tp_or_inf(correct_sum, tc_sum);
    rec.category_fractions = fractions;
    rec.mean_reward = reward_sum / n;
    rec.signal_count = 0;
    rec.cost_units =
        cost_accounting(all_trajs, cfg.cost_per_tool, cfg.cost_per_step);
    rec.phase = "eval";
    return out;
}

std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot hash missing file: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (!in) break;
    }
    char out[32];
    std::snprintf(out, sizeof(out), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(h));
    return out;
}

RunOutcome run_experiment(const TrainConfig& cfg, const RunOptions& opts) {
    validate_train_config(cfg);
    TrainContext ctx = make_train_context(cfg);

    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cannot create out dir: " + opts.out_dir);

    RunArtifacts art;
    art.out_dir = opts.out_dir;
    art.metrics_csv = (fs::path(opts.out_dir) / "metrics.csv").string();
    art.config_snapshot = (fs::path(opts.out_dir) / "config.json").string();
    art.checkpoint = (fs::path(opts.out_dir) / "policy.txt").string();
    art.world_jsonl = (fs::path(opts.out_dir) / "world.jsonl").string();
    art.eval_snapshots =
        (fs::path(opts.out_dir) / "eval_snapshots.jsonl").string();
    art.manifest = (fs::path(opts.out_dir) / "manifest.json").string();

    save_train_config(art.config_snapshot, cfg);
    export_world(art.world_jsonl, ctx.world.questions());

    std::ofstream metrics(art.metrics_csv, std::ios::binary);
    if (!metrics) throw IoError("cannot open for writing: " + art.metrics_csv);
    metrics << metrics_csv_header() << '\n';

    std::ofstream snapshots(art.eval_snapshots, std::ios::binary);
    if (!snapshots)
        throw IoError("cannot open for writing: " + art.eval_snapshots);

    std::ofstream trace;
    if (opts.trace) {
        art.trajectory_jsonl =
            (fs::path(opts.out_dir) / "trajectories.jsonl").string();
        trace.open(*art.trajectory_jsonl, std::ios::binary);
        if (!trace)
            throw IoError("cannot open for writing: " + *art.trajectory_jsonl);
    }

    PolicyParams params = initial_policy(ctx.feat.dim());

    // Seeded shuffled batches; a fresh permutation per epoch, remainder
    // dropped when the question count is not a batch multiple.
    const std::size_t n = ctx.world.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::size_t pos = n;
    int epoch = 0;
    auto next_batch = [&]() {
        if (pos + cfg.batch_size > n) {
            Rng rng = derived_rng(cfg.seed, "shuffle/" + std::to_string(epoch));
            ++epoch;
            std::iota(order.begin(), order.end(), 0);
            for (std::size_t i = n - 1; i > 0; --i)
                std::swap(order[i], order[rng.uniform_index(i + 1)]);
            pos = 0;
        }
        std::vector<const QuestionSpec*> batch;
        batch.reserve(cfg.batch_size);
        for (int k = 0; k < cfg.batch_size; ++k)
            batch.push_back(&ctx.world.questions()[order[pos + k]]);
        pos += cfg.batch_size;
        return batch;
    };

    RunOutcome outcome;
    FrozenSignals frozen;
    bool frozen_active =
        cfg.freeze_signals_after && *cfg.freeze_signals_after == 0;

    // Adam state, used only when the adaptive optimizer is selected.
    GradMatrix adam_m = GradMatrix::Zero(kNumActions, ctx.feat.dim());
    GradMatrix adam_v = GradMatrix::Zero(kNumActions, ctx.feat.dim());
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;

    const int window = std::min(40, cfg.steps);
    std::vector<RolloutGroup> early_groups, late_groups;

    std::vector<std::pair<int, std::map<std::string, EvalPoint>>> eval_history;
    for (int t = 1; t <= cfg.steps; ++t) {
        const auto batch = next_batch();
        TrainStepOutput step_out = train_step(
            ctx, params, batch, t, frozen_active ? &frozen : nullptr);
        if (cfg.optimizer == Optimizer::Adam) {
            double lr = cfg.learning_rate;
            if (cfg.lr_warmup_steps > 0 && t < cfg.lr_warmup_steps)
                lr *= static_cast<double>(t) / cfg.lr_warmup_steps;
            adam_m = kBeta1 * adam_m + (1.0 - kBeta1) * step_out.grad;
            adam_v = kBeta2 * adam_v +
                     (1.0 - kBeta2) * step_out.grad.array().square().matrix();
            const double bias1 = 1.0 - std::pow(kBeta1, t);
            const double bias2 = 1.0 - std::pow(kBeta2, t);
            const GradMatrix m_hat = adam_m / bias1;
            const GradMatrix v_hat = adam_v / bias2;
            step_out.params.weights =
                params.weights -
                lr * (m_hat.array() / (v_hat.array().sqrt() + kAdamEps))
                         .matrix();
        }
        params = std::move(step_out.params);
        if (t <= window)
            early_groups.insert(early_groups.end(), step_out.groups.begin(),
                                step_out.groups.end());
        if (t > cfg.steps - window)
            late_groups.insert(late_groups.end(), step_out.groups.begin(),
                               step_out.groups.end());
        metrics << metrics_csv_row(step_out.record) << '\n';
        outcome.train_records.push_back(step_out.record);
        if (opts.trace) {
            for (const RolloutGroup& group : step_out.groups) {
                for (const Trajectory& traj : group.with_tool)
                    trace << trajectory_to_jsonl(traj) << '\n';
                for (const Trajectory& traj : group.no_tool)
                    trace << trajectory_to_jsonl(traj) << '\n';
            }
        }
        if (cfg.freeze_signals_after && !frozen_active &&
            t >= *cfg.freeze_signals_after) {
            frozen = std::move(step_out.constructed);
            frozen_active = true;
        }
        if (t % cfg.eval_every == 0 || t == cfg.steps) {
            EvalResult ev = evaluate(ctx, params, t);
            metrics << metrics_csv_row(ev.record) << '\n';
            outcome.eval_records.push_back(ev.record);
            for (const QuestionSpec& q : ctx.eval_world.questions()) {
                const EvalPoint& p = ev.points.at(q.id);
                json line{{"step", t},
                          {"question_id", q.id},
                          {"correct", p.correct ? 1 : 0},
                          {"tc", p.tc}};
                snapshots << line.dump() << '\n';
            }
            eval_history.emplace_back(t, std::move(ev.points));
        }
    }
    metrics.close();
    snapshots.close();
    if (opts.trace) trace.close();
    if (!metrics || !snapshots) throw IoError("write failed in " + opts.out_dir);

    save_policy(art.checkpoint, params);

    std::vector<std::string> extra_files;
    if (opts.svg) {
        auto series_of = [&](auto pick) {
            ChartSeries train{"train", {}, {}}, eval{"eval", {}, {}};
            for (const MetricsRecord& r : outcome.train_records) {
                train.xs.push_back(r.step);
                train.ys.push_back(pick(r));
            }
            for (const MetricsRecord& r : outcome.eval_records) {
                eval.xs.push_back(r.step);
                eval.ys.push_back(pick(r));
            }
            return std::vector<ChartSeries>{train, eval};
        };
        const std::string em_svg = (fs::path(opts.out_dir) / "em.svg").string();
        const std::string tc_svg = (fs::path(opts.out_dir) / "tc.svg").string();
        const std::string tp_svg = (fs::path(opts.out_dir) / "tp.svg").string();
        write_line_chart(em_svg, "Exact match", "step", "em",
                         series_of([](const MetricsRecord& r) { return r.em; }));
        write_line_chart(
            tc_svg, "Mean tool calls", "step", "tc",
            series_of([](const MetricsRecord& r) { return r.mean_tc; }));
        write_line_chart(
            tp_svg, "Tool productivity", "step", "tp",
            series_of([](const MetricsRecord& r) { return r.tp; }));
        extra_files = {em_svg, tc_svg, tp_svg};
    }

    json manifest;
    manifest["seed"] = cfg.seed;
    manifest["created_utc"] = utc_timestamp();
    json files;
    files["config.json"] = file_hash_hex(art.config_snapshot);
    files["metrics.csv"] = file_hash_hex(art.metrics_csv);
    files["policy.txt"] = file_hash_hex(art.checkpoint);
    files["world.jsonl"] = file_hash_hex(art.world_jsonl);
    files["eval_snapshots.jsonl"] = file_hash_hex(art.eval_snapshots);
    if (art.trajectory_jsonl)
        files["trajectories.jsonl"] = file_hash_hex(*art.trajectory_jsonl);
    for (const std::string& f : extra_files)
        files[fs::path(f).filename().string()] = file_hash_hex(f);
    manifest["files"] = std::move(files);
    {
        std::ofstream out(art.manifest, std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + art.manifest);
        out << manifest.dump(2) << '\n';
    }

    outcome.artifacts = std::move(art);
    outcome.final_params = std::move(params);
    outcome.degradation = degradation_tracking(eval_history.front().second,
                                               eval_history.back().second);
    outcome.category_early = outcome.eval_records.front().category_fractions;
    outcome.category_late = outcome.eval_records.back().category_fractions;
    outcome.nt_histogram_early = nt_confidence_histogram(early_groups);
    outcome.nt_histogram_late = nt_confidence_histogram(late_groups);
    outcome.final_em = outcome.eval_records.back().em;
    outcome.final_tc = outcome.eval_records.back().mean_tc;
    outcome.final_tp = outcome.eval_records.back().tp;
    return outcome;
}

std::vector<SweepRow> sweep_lambda(const TrainConfig& base_cfg,
                                   const std::vector<double>& grid,
                                   const RunOptions& opts) {
    if (grid.empty()) throw ConfigError("sweep: empty lambda grid");
    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cannot create out dir: " + opts.out_dir);

    std::vector<SweepRow> rows;
    for (double lambda : grid) {
        TrainConfig cfg = base_cfg;
        cfg.method = Method::Akbe;
        cfg.akbe.lambda = lambda;
        RunOptions sub = opts;
        sub.out_dir = (fs::path(opts.out_dir) /
                       ("lambda_" + format_double(lambda)))
                          .string();
        const RunOutcome out = run_experiment(cfg, sub);
        rows.push_back({lambda, out.final_em, out.final_tc, out.final_tp});
    }
    const std::string table =
        (fs::path(opts.out_dir) / "lambda_sweep.csv").string();
    std::ofstream out(table, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + table);
    out << "lambda,final_em,final_mean_tc,final_tp\n";
    for (const SweepRow& r : rows)
        out << format_double(r.lambda) << ',' << format_double(r.final_em)
            << ',' << format_double(r.final_tc) << ','
            << format_double(r.final_tp) << '\n';
    return rows;
}

ComparisonReport compare_methods(const TrainConfig& base_cfg,
                                 const std::vector<Method>& methods,
                                 int n_seeds, const RunOptions& opts) {
    if (methods.empty()) throw ConfigError("compare: no methods given");
    if (n_seeds < 1) throw ConfigError("compare: n_seeds must be >= 1");
    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cannot create out dir: " + opts.out_dir);

    ComparisonReport report;
    json runs = json::array();
    for (Method m : methods) {
        for (int s = 0; s < n_seeds; ++s) {
            TrainConfig cfg = base_cfg;
            cfg.method = m;
            cfg.seed = base_cfg.seed + static_cast<std::uint64_t>(s);
            RunOptions sub = opts;
            sub.out_dir = (fs::path(opts.out_dir) / to_string(m) /
                           ("seed_" + std::to_string(cfg.seed)))
                              .string();
            MethodRun run;
            run.method = m;
            run.seed = cfg.seed;
            run.outcome = run_experiment(cfg, sub);
            const RunOutcome& out = run.outcome;

            json rec;
            rec["method"] = to_string(m);
            rec["seed"] = cfg.seed;
            rec["final_em"] = out.final_em;
            rec["final_tc"] = out.final_tc;
            rec["final_tp"] = tp_json(out.final_tp);
            rec["category_early"] = out.category_early;
            rec["category_late"] = out.category_late;
            rec["degradation"] =
                json{{"original", out.degradation.original},
                     {"redundant", out.degradation.redundant},
                     {"hallucinated", out.degradation.hallucinated},
                     {"out_of_scope", out.degradation.out_of_scope}};
            rec["nt_histogram_early"] = out.nt_histogram_early;
            rec["nt_histogram_late"] = out.nt_histogram_late;
            json steps = json::array(), em = json::array(), tc = json::array(),
                 tp = json::array();
            for (const MetricsRecord& r : out.eval_records) {
                steps.push_back(r.step);
                em.push_back(r.em);
                tc.push_back(r.mean_tc);
                tp.push_back(tp_json(r.tp));
            }
            rec["eval_steps"] = std::move(steps);
            rec["eval_em"] = std::move(em);
            rec["eval_tc"] = std::move(tc);
            rec["eval_tp"] = std::move(tp);
            runs.push_back(std::move(rec));
            report.runs.push_back(std::move(run));
        }
    }

    json j;
    j["base_seed"] = base_cfg.seed;
    j["n_seeds"] = n_seeds;
    json method_names = json::array();
    for (Method m : methods) method_names.push_back(to_string(m));
    j["methods"] = std::move(method_names);
    j["runs"] = std::move(runs);

    report.report_json = (fs::path(opts.out_dir) / "report.json").string();
    std::ofstream out(report.report_json, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + report.report_json);
    out << j.dump(2) << '\n';
    return report;
}

std::string render_report(const std::string& report_json_path) {
    std::ifstream in(report_json_path, std::ios::binary);
    if (!in) throw IoError("cannot open report: " + report_json_path);
    json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("bad report file: ") + e.what());
    }

    std::ostringstream text;
    char line[256];
    text << "method      seed  final_em  final_tc  final_tp  orig  redun  "
            "halluc\n";
    struct Agg {
        double em = 0, tc = 0;
        int n = 0;
    };
    std::map<std::string, Agg> per_method;
    for (const json& run : j.at("runs")) {
        const double tp = json_tp(run.at("final_tp"));
        const json& deg = run.at("degradation");
        std::snprintf(line, sizeof(line),
                      "%-10s %5llu  %8.4f  %8.4f  %8s  %4d  %5d  %6d\n",
                      run.at("method").get<std::string>().c_str(),
                      static_cast<unsigned long long>(
                          run.at("seed").get<std::uint64_t>()),
                      run.at("final_em").get<double>(),
                      run.at("final_tc").get<double>(),
                      format_double(tp).c_str(),
                      deg.at("original").get<int>(),
                      deg.at("redundant").get<int>(),
                      deg.at("hallucinated").get<int>());
        text << line;
        Agg& agg = per_method[run.at("method").get<std::string>()];
        agg.em += run.at("final_em").get<double>();
        agg.tc += run.at("final_tc").get<double>();
        ++agg.n;
    }
    text << "\nper-method means:\n";
    for (const auto& [name, agg] : per_method) {
        std::snprintf(line, sizeof(line), "%-10s  em %.4f  tc %.4f\n",
                      name.c_str(), agg.em / agg.n, agg.tc / agg.n);
        text << line;
    }
    text << "\ncategory shift (early -> late eval fractions, "
            "tool_dependent/efficiency/hallucination/both_wrong):\n";
    for (const json& run : j.at("runs")) {
        const json& early = run.at("category_early");
        const json& late = run.at("category_late");
        std::snprintf(line, sizeof(line),
                      "%-10s %5llu  %.2f/%.2f/%.2f/%.2f -> "
                      "%.2f/%.2f/%.2f/%.2f\n",
                      run.at("method").get<std::string>().c_str(),
                      static_cast<unsigned long long>(
                          run.at("seed").get<std::uint64_t>()),
                      early.at(0).get<double>(), early.at(1).get<double>(),
                      early.at(2).get<double>(), early.at(3).get<double>(),
                      late.at(0).get<double>(), late.at(1).get<double>(),
                      late.at(2).get<double>(), late.at(3).get<double>());
        text << line;
    }
    return text.str();
}

std::string render_run_summary(const std::string& run_dir) {
    const std::string metrics_path =
        (fs::path(run_dir) / "metrics.csv").string();
    const auto rows = read_metrics_csv(metrics_path);
    if (rows.empty()) throw DataError("no metric rows in " + metrics_path);

    const MetricsRecord* last_train = nullptr;
    const MetricsRecord* last_eval = nullptr;
    for (const MetricsRecord& r : rows) {
        if (r.phase == "train") last_train = &r;
        if (r.phase == "eval") last_eval = &r;
    }

    std::ostringstream text;
    char line[256];
    text << "run: " << run_dir << "\n";
    if (last_train) {
        std::snprintf(line, sizeof(line),
                      "final train step %d: em %.4f  tc %.4f  signals %d  "
                      "loss_total %.4f\n",
                      last_train->step, last_train->em, last_train->mean_tc,
                      last_train->signal_count, last_train->loss_total);
        text << line;
    }
    if (last_eval) {
        std::snprintf(line, sizeof(line),
                      "final eval step %d: em %.4f  tc %.4f  tp %s\n",
                      last_eval->step, last_eval->em, last_eval->mean_tc,
                      format_double(last_eval->tp).c_str());
        text << line;
        std::snprintf(line, sizeof(line),
                      "final eval categories (dep/eff/hal/both): "
                      "%.3f %.3f %.3f %.3f\n",
                      last_eval->category_fractions[0],
                      last_eval->category_fractions[1],
                      last_eval->category_fractions[2],
                      last_eval->category_fractions[3]);
        text << line;
    }

    const DegradationSummary deg =
        track_degradation(run_dir, std::nullopt, std::nullopt);
    std::snprintf(line, sizeof(line),
                  "degradation first->last eval: original %d  redundant %d  "
                  "hallucinated %d  out_of_scope %d\n",
                  deg.original, deg.redundant, deg.hallucinated,
                  deg.out_of_scope);
    text << line;

    const std::string trace_path =
        (fs::path(run_dir) / "trajectories.jsonl").string();
    if (fs::exists(trace_path)) {
        const auto trajs = read_trajectories_jsonl(trace_path);
        double tc_sum = 0.0, reward_sum = 0.0;
        std::size_t with_tool = 0;
        for (const Trajectory& t : trajs) {
            if (t.path != Path::WithTool) continue;
            ++with_tool;
            tc_sum += t.tc;
            reward_sum += t.reward;
        }
        std::snprintf(line, sizeof(line),
                      "trace: %zu trajectories (%zu with-tool), sampled mean "
                      "tc %.4f, mean reward %.4f\n",
                      trajs.size(), with_tool,
                      with_tool ? tc_sum / with_tool : 0.0,
                      with_tool ? reward_sum / with_tool : 0.0);
        text << line;
    }
    return text.str();
}

DegradationSummary track_degradation(const std::string& run_dir,
                                     std::optional<int> early_step,
                                     std::optional<int> late_step) {
    const std::string path =
        (fs::path(run_dir) / "eval_snapshots.jsonl").string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open eval snapshots: " + path);
    std::map<int, std::map<std::string, EvalPoint>> by_step;
    std::string text;
    while (std::getline(in, text)) {
        if (text.empty()) continue;
        json line;
        try {
            line = json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(std::string("bad eval snapshot line: ") + e.what());
        }
        EvalPoint p;
        p.correct = line.at("correct").get<int>() != 0;
        p.tc = line.at("tc").get<int>();
        by_step[line.at("step").get<int>()]
               [line.at("question_id").get<std::string>()] = p;
    }
    if (by_step.empty()) throw DataError("no eval snapshots in " + path);
    const int early = early_step ? *early_step : by_step.begin()->first;
    const int late = late_step ? *late_step : by_step.rbegin()->first;
    if (!by_step.count(early))
        throw DataError("no eval snapshot at step " + std::to_string(early));
    if (!by_step.count(late))
        throw DataError("no eval snapshot at step " + std::to_string(late));
    return degradation_tracking(by_step.at(early), by_step.at(late));
}

}  // namespace akbe
