#pragma once
// Error taxonomy. The CLI maps these onto process exit codes:
// ConfigError/DataError -> 2, NumericError -> 3, IoError -> 4.

#include <stdexcept>
#include <string>

namespace akbe {

// Invalid configuration value or inconsistent config file.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or unreplayable input data (trajectories, worlds, run artifacts).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite loss or gradient during training.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failure; message carries the offending path.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Caller broke an API precondition. Indicates a bug, not bad input.
struct ContractError : std::logic_error {
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// Turn budget exhausted where a transition was requested.
struct BudgetError : std::logic_error {
    explicit BudgetError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace akbe
