#include "akbe/env.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "akbe/errors.hpp"

namespace akbe {

using nlohmann::json;

namespace {

constexpr int kStratumFeatures = 4;  // hops_norm + one-hot stratum

void check_range(const char* name, const StratumRanges& r) {
    auto bad = [](double lo, double hi) {
        return lo < 0.0 || hi > 1.0 || lo > hi;
    };
    if (bad(r.p_lo, r.p_hi) || bad(r.noise_lo, r.noise_hi))
        throw ConfigError(std::string("world: invalid ranges for stratum ") +
                          name);
}

std::string question_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "q%06d", index);
    return buf;
}

const StratumRanges& ranges_for(const WorldConfig& cfg, Stratum s) {
    switch (s) {
        case Stratum::MemoryEasy: return cfg.memory_easy;
        case Stratum::ToolDependent: return cfg.tool_dependent;
        case Stratum::NoiseProne: return cfg.noise_prone;
    }
    throw ContractError("bad stratum");
}

}  // namespace

void validate_world_config(const WorldConfig& cfg) {
    if (cfg.n_questions <= 0)
        throw ConfigError("world: n_questions must be positive");
    const std::array<double, 3> fracs{cfg.frac_memory_easy,
                                      cfg.frac_tool_dependent,
                                      cfg.frac_noise_prone};
    double sum = 0.0;
    for (double f : fracs) {
        if (f < 0.0 || f > 1.0)
            throw ConfigError("world: mixture fractions must be in [0,1]");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("world: mixture fractions must sum to 1");
    if (cfg.hop_weights.empty())
        throw ConfigError("world: hop_weights must be nonempty");
    double wsum = 0.0;
    for (double w : cfg.hop_weights) {
        if (w < 0.0) throw ConfigError("world: hop weights must be >= 0");
        wsum += w;
    }
    if (wsum <= 0.0) throw ConfigError("world: hop weights sum to 0");
    if (cfg.feature_dim < kStratumFeatures)
        throw ConfigError("world: feature_dim must be at least 4");
    if (cfg.eta_poison < 0.0 || cfg.eta_poison > 1.0)
        throw ConfigError("world: eta_poison must be in [0,1]");
    check_range("memory_easy", cfg.memory_easy);
    check_range("tool_dependent", cfg.tool_dependent);
    check_range("noise_prone", cfg.noise_prone);
}

std::array<int, 3> stratum_counts(const WorldConfig& cfg) {
    const std::array<double, 3> fracs{cfg.frac_memory_easy,
                                      cfg.frac_tool_dependent,
                                      cfg.frac_noise_prone};
    std::array<int, 3> counts{};
    std::array<double, 3> remainders{};
    int assigned = 0;
    for (int s = 0; s < 3; ++s) {
        const double exact = fracs[s] * cfg.n_questions;
        counts[s] = static_cast<int>(std::floor(exact));
        remainders[s] = exact - counts[s];
        assigned += counts[s];
    }
    // Largest remainder first; ties resolved by stratum order.
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return remainders[a] > remainders[b];
    });
    for (int k = 0; assigned < cfg.n_questions; ++k)
        ++counts[order[k % 3]], ++assigned;
    return counts;
}

std::vector<QuestionSpec> generate_world(const WorldConfig& cfg) {
    validate_world_config(cfg);
    const std::array<int, 3> counts = stratum_counts(cfg);
    const int max_hops = static_cast<int>(cfg.hop_weights.size());
    const double wsum = std::accumulate(cfg.hop_weights.begin(),
                                        cfg.hop_weights.end(), 0.0);

    std::vector<QuestionSpec> out;
    out.reserve(cfg.n_questions);
    int index = 0;
    for (int s = 0; s < 3; ++s) {
        const auto stratum = static_cast<Stratum>(s);
        const StratumRanges& r = ranges_for(cfg, stratum);
        for (int k = 0; k < counts[s]; ++k, ++index) {
            QuestionSpec q;
            q.id = question_id(index);
            q.answer_id = "a" + q.id.substr(1);
            Rng rng = derived_rng(cfg.seed, "gen/" + q.id);

            const double u = rng.next_double() * wsum;
            double acc = 0.0;
            q.hops_required = max_hops;
            for (int h = 0; h < max_hops; ++h) {
                acc += cfg.hop_weights[h];
                if (u < acc) {
                    q.hops_required = h + 1;
                    break;
                }
            }
            q.p_param = rng.uniform(r.p_lo, r.p_hi);
            q.noise_rate = rng.uniform(r.noise_lo, r.noise_hi);

            q.features.assign(cfg.feature_dim, 0.0);
            q.features[0] =
                static_cast<double>(q.hops_required) / max_hops;
            q.features[1 + s] = 1.0;
            for (int d = kStratumFeatures; d < cfg.feature_dim; ++d)
                q.features[d] = rng.uniform(-1.0, 1.0);
            out.push_back(std::move(q));
        }
    }
    return out;
}

std::pair<ObservationKind, EnvState> env_transition(const QuestionSpec& q,
                                                    const EnvState& s,
                                                    ActionKind a,
                                                    int max_turns, Rng& rng) {
    if (a != ActionKind::ToolCall)
        throw ContractError("env_transition: action is not a tool call");
    if (s.turn >= max_turns)
        throw BudgetError("env_transition: turn budget exhausted");
    EnvState next = s;
    ++next.turn;
    if (rng.bernoulli(q.noise_rate)) {
        ++next.misleading_count;
        return {ObservationKind::Misleading, next};
    }
    ++next.useful_hops;
    return {ObservationKind::Useful, next};
}

bool judge(const QuestionSpec& q, const EnvState& s, ActionKind terminal,
           double eta_poison, Rng& rng) {
    switch (terminal) {
        case ActionKind::ToolCall:
            throw ContractError("judge: non-terminal action");
        case ActionKind::Malformed:
            return false;
        case ActionKind::AnswerMemory:
            return rng.bernoulli(q.p_param);
        case ActionKind::AnswerEvidence: {
            if (s.useful_hops < q.hops_required) return false;
            if (s.misleading_count == 0) return true;
            const double survive =
                std::pow(eta_poison, static_cast<double>(s.misleading_count));
            return rng.bernoulli(survive);
        }
    }
    throw ContractError("judge: bad action");
}

std::string question_to_jsonl(const QuestionSpec& q) {
    json rec{{"id", q.id},
             {"features", q.features},
             {"p_param", q.p_param},
             {"hops_required", q.hops_required},
             {"noise_rate", q.noise_rate},
             {"answer_id", q.answer_id}};
    return rec.dump();
}

QuestionSpec question_from_jsonl(const std::string& line) {
    try {
        const json rec = json::parse(line);
        QuestionSpec q;
        q.id = rec.at("id").get<std::string>();
        q.features = rec.at("features").get<std::vector<double>>();
        q.p_param = rec.at("p_param").get<double>();
        q.hops_required = rec.at("hops_required").get<int>();
        q.noise_rate = rec.at("noise_rate").get<double>();
        q.answer_id = rec.at("answer_id").get<std::string>();
        return q;
    } catch (const json::exception& e) {
        throw DataError(std::string("bad question record: ") + e.what());
    }
}

void export_world(const std::string& path,
                  const std::vector<QuestionSpec>& qs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (const QuestionSpec& q : qs) out << question_to_jsonl(q) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

std::vector<QuestionSpec> import_world(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::vector<QuestionSpec> qs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        qs.push_back(question_from_jsonl(line));
    }
    return qs;
}

}  // namespace akbe
