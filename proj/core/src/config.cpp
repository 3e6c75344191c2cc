#include "akbe/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "akbe/errors.hpp"

namespace akbe {

using json = nlohmann::ordered_json;

const char* to_string(Method m) {
    switch (m) {
        case Method::Grpo: return "grpo";
        case Method::Akbe: return "akbe";
        case Method::Otc: return "otc";
        case Method::AkbeDpo: return "akbe_dpo";
    }
    return "?";
}

Method method_from_string(const std::string& s) {
    if (s == "grpo") return Method::Grpo;
    if (s == "akbe") return Method::Akbe;
    if (s == "otc") return Method::Otc;
    if (s == "akbe_dpo") return Method::AkbeDpo;
    throw ConfigError("unknown method: " + s);
}

void validate_train_config(const TrainConfig& cfg) {
    validate_world_config(cfg.world);
    validate_budget(cfg.budget);
    validate_grpo_config(cfg.grpo);
    validate_akbe_config(cfg.akbe);
    if (static_cast<int>(cfg.world.hop_weights.size()) > cfg.budget.max_turns)
        throw ConfigError("config: hop distribution exceeds max_turns");
    if (cfg.budget.g_wt < 2)
        throw ConfigError("config: training needs g_wt >= 2 for group advantages");
    if (cfg.batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
    if (cfg.batch_size > cfg.world.n_questions)
        throw ConfigError("config: batch_size exceeds world size");
    if (cfg.steps < 1) throw ConfigError("config: steps must be >= 1");
    if (cfg.learning_rate <= 0.0)
        throw ConfigError("config: learning_rate must be > 0");
    if (cfg.lr_warmup_steps < 0)
        throw ConfigError("config: lr_warmup_steps must be >= 0");
    if (cfg.max_grad_norm < 0.0)
        throw ConfigError("config: max_grad_norm must be >= 0");
    if (cfg.eval_every < 1) throw ConfigError("config: eval_every must be >= 1");
    if (cfg.eval_size < 1) throw ConfigError("config: eval_size must be >= 1");
    if (cfg.freeze_signals_after && *cfg.freeze_signals_after < 0)
        throw ConfigError("config: freeze_signals_after must be >= 0");
    if (cfg.cost_per_step < 0.0 || cfg.cost_per_tool < 0.0)
        throw ConfigError("config: costs must be >= 0");
    if (cfg.threads < 1) throw ConfigError("config: threads must be >= 1");
}

namespace {

json ranges_json(const StratumRanges& r) {
    return json{{"p", {r.p_lo, r.p_hi}}, {"noise", {r.noise_lo, r.noise_hi}}};
}

StratumRanges ranges_from_json(const json& j) {
    StratumRanges r;
    r.p_lo = j.at("p").at(0).get<double>();
    r.p_hi = j.at("p").at(1).get<double>();
    r.noise_lo = j.at("noise").at(0).get<double>();
    r.noise_hi = j.at("noise").at(1).get<double>();
    return r;
}

json world_json(const WorldConfig& w) {
    return json{{"n_questions", w.n_questions},
                {"frac_memory_easy", w.frac_memory_easy},
                {"frac_tool_dependent", w.frac_tool_dependent},
                {"frac_noise_prone", w.frac_noise_prone},
                {"hop_weights", w.hop_weights},
                {"memory_easy", ranges_json(w.memory_easy)},
                {"tool_dependent", ranges_json(w.tool_dependent)},
                {"noise_prone", ranges_json(w.noise_prone)},
                {"feature_dim", w.feature_dim},
                {"seed", w.seed},
                {"eta_poison", w.eta_poison}};
}

WorldConfig world_from_json(const json& j) {
    WorldConfig w;
    w.n_questions = j.value("n_questions", w.n_questions);
    w.frac_memory_easy = j.value("frac_memory_easy", w.frac_memory_easy);
    w.frac_tool_dependent =
        j.value("frac_tool_dependent", w.frac_tool_dependent);
    w.frac_noise_prone = j.value("frac_noise_prone", w.frac_noise_prone);
    if (j.contains("hop_weights"))
        w.hop_weights = j.at("hop_weights").get<std::vector<double>>();
    if (j.contains("memory_easy"))
        w.memory_easy = ranges_from_json(j.at("memory_easy"));
    if (j.contains("tool_dependent"))
        w.tool_dependent = ranges_from_json(j.at("tool_dependent"));
    if (j.contains("noise_prone"))
        w.noise_prone = ranges_from_json(j.at("noise_prone"));
    w.feature_dim = j.value("feature_dim", w.feature_dim);
    w.seed = j.value("seed", w.seed);
    w.eta_poison = j.value("eta_poison", w.eta_poison);
    return w;
}

}  // namespace

TrainConfig parse_train_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        TrainConfig cfg;
        if (j.contains("world")) cfg.world = world_from_json(j.at("world"));
        if (j.contains("budget")) {
            const json& b = j.at("budget");
            cfg.budget.g_wt = b.value("g_wt", cfg.budget.g_wt);
            cfg.budget.g_nt = b.value("g_nt", cfg.budget.g_nt);
            cfg.budget.max_turns = b.value("max_turns", cfg.budget.max_turns);
        }
        if (j.contains("grpo")) {
            const json& g = j.at("grpo");
            cfg.grpo.epsilon = g.value("epsilon", cfg.grpo.epsilon);
            cfg.grpo.beta = g.value("beta", cfg.grpo.beta);
            if (g.contains("reward_mode")) {
                const std::string mode = g.at("reward_mode").get<std::string>();
                if (mode == "standard")
                    cfg.grpo.reward_mode = RewardMode::Standard;
                else if (mode == "otc_shaped")
                    cfg.grpo.reward_mode = RewardMode::OtcShaped;
                else
                    throw ConfigError("unknown reward_mode: " + mode);
            }
            cfg.grpo.otc_alpha = g.value("otc_alpha", cfg.grpo.otc_alpha);
        }
        if (j.contains("akbe")) {
            const json& a = j.at("akbe");
            cfg.akbe.lambda = a.value("lambda", cfg.akbe.lambda);
            if (a.contains("variant")) {
                const std::string v = a.at("variant").get<std::string>();
                if (v == "ce")
                    cfg.akbe.variant = AkbeVariant::CrossEntropy;
                else if (v == "dpo")
                    cfg.akbe.variant = AkbeVariant::Dpo;
                else
                    throw ConfigError("unknown akbe variant: " + v);
            }
            cfg.akbe.dpo_beta = a.value("dpo_beta", cfg.akbe.dpo_beta);
            if (a.contains("ce_clip") && !a.at("ce_clip").is_null())
                cfg.akbe.ce_clip = a.at("ce_clip").get<double>();
            cfg.akbe.normalize_by_signals = a.value(
                "normalize_akbe_by_signals", cfg.akbe.normalize_by_signals);
        }
        if (j.contains("method"))
            cfg.method = method_from_string(j.at("method").get<std::string>());
        cfg.batch_size = j.value("batch_size", cfg.batch_size);
        cfg.steps = j.value("steps", cfg.steps);
        cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
        cfg.lr_warmup_steps = j.value("lr_warmup_steps", cfg.lr_warmup_steps);
        cfg.max_grad_norm = j.value("max_grad_norm", cfg.max_grad_norm);
        if (j.contains("optimizer")) {
            const std::string opt = j.at("optimizer").get<std::string>();
            if (opt == "sgd")
                cfg.optimizer = Optimizer::Sgd;
            else if (opt == "adam")
                cfg.optimizer = Optimizer::Adam;
            else
                throw ConfigError("unknown optimizer: " + opt);
        }
        cfg.eval_every = j.value("eval_every", cfg.eval_every);
        cfg.eval_size = j.value("eval_size", cfg.eval_size);
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("freeze_signals_after") &&
            !j.at("freeze_signals_after").is_null())
            cfg.freeze_signals_after = j.at("freeze_signals_after").get<int>();
        cfg.cost_per_step = j.value("cost_per_step", cfg.cost_per_step);
        cfg.cost_per_tool = j.value("cost_per_tool", cfg.cost_per_tool);
        cfg.threads = j.value("threads", cfg.threads);
        cfg.eval_stochastic = j.value("eval_stochastic", cfg.eval_stochastic);
        validate_train_config(cfg);
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

std::string train_config_json(const TrainConfig& cfg) {
    json j;
    j["method"] = to_string(cfg.method);
    j["seed"] = cfg.seed;
    j["steps"] = cfg.steps;
    j["batch_size"] = cfg.batch_size;
    j["learning_rate"] = cfg.learning_rate;
    j["lr_warmup_steps"] = cfg.lr_warmup_steps;
    j["max_grad_norm"] = cfg.max_grad_norm;
    j["optimizer"] = cfg.optimizer == Optimizer::Sgd ? "sgd" : "adam";
    j["eval_every"] = cfg.eval_every;
    j["eval_size"] = cfg.eval_size;
    if (cfg.freeze_signals_after)
        j["freeze_signals_after"] = *cfg.freeze_signals_after;
    else
        j["freeze_signals_after"] = nullptr;
    j["cost_per_step"] = cfg.cost_per_step;
    j["cost_per_tool"] = cfg.cost_per_tool;
    j["threads"] = cfg.threads;
    j["eval_stochastic"] = cfg.eval_stochastic;
    j["world"] = world_json(cfg.world);
    j["budget"] = json{{"g_wt", cfg.budget.g_wt},
                       {"g_nt", cfg.budget.g_nt},
                       {"max_turns", cfg.budget.max_turns}};
    j["grpo"] = json{
        {"epsilon", cfg.grpo.epsilon},
        {"beta", cfg.grpo.beta},
        {"reward_mode",
         cfg.grpo.reward_mode == RewardMode::Standard ? "standard" : "otc_shaped"},
        {"otc_alpha", cfg.grpo.otc_alpha}};
    json akbe_j{{"lambda", cfg.akbe.lambda},
                {"variant",
                 cfg.akbe.variant == AkbeVariant::CrossEntropy ? "ce" : "dpo"},
                {"dpo_beta", cfg.akbe.dpo_beta},
                {"normalize_akbe_by_signals", cfg.akbe.normalize_by_signals}};
    if (cfg.akbe.ce_clip)
        akbe_j["ce_clip"] = *cfg.akbe.ce_clip;
    else
        akbe_j["ce_clip"] = nullptr;
    j["akbe"] = std::move(akbe_j);
    return j.dump(2) + "\n";
}

TrainConfig load_train_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_train_config(text.str());
}

void save_train_config(const std::string& path, const TrainConfig& cfg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << train_config_json(cfg);
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace akbe
