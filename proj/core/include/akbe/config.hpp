#pragma once
// Experiment configuration: a JSON file mirroring TrainConfig section by
// section. Snapshots written by the trainer reload to an identical config.

#include <cstdint>
#include <optional>
#include <string>

#include "akbe/env.hpp"
#include "akbe/objectives.hpp"
#include "akbe/rollout.hpp"
#include "akbe/signals.hpp"

namespace akbe {

enum class Method : int { Grpo = 0, Akbe = 1, Otc = 2, AkbeDpo = 3 };

// Plain gradient descent keeps every update exactly reproducible; the
// adaptive-moment option is available behind a flag.
enum class Optimizer : int { Sgd = 0, Adam = 1 };

const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct TrainConfig {
    WorldConfig world;
    RolloutBudget budget;
    GrpoConfig grpo;
    AkbeConfig akbe;
    Method method = Method::Akbe;
    int batch_size = 16;
    int steps = 100;
    double learning_rate = 0.05;
    int lr_warmup_steps = 0;   // linear ramp of the learning rate
    double max_grad_norm = 0.0;  // clip threshold for the update; 0 disables
    Optimizer optimizer = Optimizer::Sgd;
    int eval_every = 10;
    int eval_size = 200;
    std::uint64_t seed = 1;
    std::optional<int> freeze_signals_after;
    double cost_per_step = 1.0;
    double cost_per_tool = 5.0;
    int threads = 1;
    bool eval_stochastic = false;
};

void validate_train_config(const TrainConfig& cfg);

TrainConfig parse_train_config(const std::string& json_text);
std::string train_config_json(const TrainConfig& cfg);

TrainConfig load_train_config(const std::string& path);
void save_train_config(const std::string& path, const TrainConfig& cfg);

}  // namespace akbe
