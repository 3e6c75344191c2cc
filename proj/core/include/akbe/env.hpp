#pragma once
// Synthetic tool environment: world generation with known knowledge
// boundaries, tool-call transitions, and answer judging.
//
// Everything is a pure function of explicit state and an explicit RNG
// handle, so rollouts parallelize without shared mutable state.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "akbe/rng.hpp"
#include "akbe/types.hpp"

namespace akbe {

// Environment-visible summary of one episode's context.
struct EnvState {
    int useful_hops = 0;
    int misleading_count = 0;
    int turn = 0;
};

// Per-stratum sampling ranges for the boundary parameters.
struct StratumRanges {
    double p_lo = 0.0, p_hi = 0.0;          // memory-answer success probability
    double noise_lo = 0.0, noise_hi = 0.0;  // per-retrieval misleading rate
};

struct WorldConfig {
    int n_questions = 600;
    double frac_memory_easy = 0.4;
    double frac_tool_dependent = 0.4;
    double frac_noise_prone = 0.2;
    // Weight of hop count h = index + 1; support must stay within the turn
    // budget used for rollouts.
    std::vector<double> hop_weights{0.5, 0.5};
    StratumRanges memory_easy{0.85, 0.98, 0.05, 0.15};
    StratumRanges tool_dependent{0.0, 0.10, 0.0, 0.10};
    StratumRanges noise_prone{0.35, 0.65, 0.35, 0.65};
    int feature_dim = 8;
    std::uint64_t seed = 7;
    // Survival probability of an evidence answer per misleading retrieval.
    double eta_poison = 0.25;
};

// Stratum enumeration in config order.
enum class Stratum : int { MemoryEasy = 0, ToolDependent = 1, NoiseProne = 2 };

void validate_world_config(const WorldConfig& cfg);

// Stratum counts by largest-remainder rounding of the mixture fractions.
std::array<int, 3> stratum_counts(const WorldConfig& cfg);

// Deterministic: identical cfg (including seed) yields identical questions.
std::vector<QuestionSpec> generate_world(const WorldConfig& cfg);

// Apply one tool call: the retrieval is misleading with probability
// q.noise_rate, useful otherwise; the turn counter advances either way.
std::pair<ObservationKind, EnvState> env_transition(const QuestionSpec& q,
                                                    const EnvState& s,
                                                    ActionKind a,
                                                    int max_turns, Rng& rng);

// Judge a terminal action. AnswerMemory succeeds with probability p_param.
// AnswerEvidence needs useful_hops >= hops_required and survives each
// misleading retrieval with probability eta_poison. Malformed never scores.
bool judge(const QuestionSpec& q, const EnvState& s, ActionKind terminal,
           double eta_poison, Rng& rng);

// JSONL round-trip of a question set, for world export/import.
std::string question_to_jsonl(const QuestionSpec& q);
QuestionSpec question_from_jsonl(const std::string& line);
void export_world(const std::string& path, const std::vector<QuestionSpec>& qs);
std::vector<QuestionSpec> import_world(const std::string& path);

}  // namespace akbe
