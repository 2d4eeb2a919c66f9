// SPDX-License-Identifier: MIT
//
// Built-in problem catalogue and the experiment runner behind the CLI.
#pragma once

#include "emweak/config.hpp"
#include "emweak/killed.hpp"
#include "emweak/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace emweak {

struct BuiltinProblem {
    std::string name;
    std::string description;
    SdeProblem problem;
    PathFunctional functional;
    /// Payoff used by killed pipelines.
    std::optional<KilledPayoff> killed_payoff;
    /// Exact value of the target expectation, when known.
    std::optional<double> known_reference;
    std::string reference_note;
    /// Set when Girsanov-based bounds do not apply as stated (linear growth).
    bool girsanov_warning = false;
};

std::vector<BuiltinProblem> list_builtins();
/// Throws ConfigError for an unknown name.
BuiltinProblem find_builtin(const std::string& name);

/// Named scalar payoff g(x) applied to the first coordinate: identity, tanh,
/// one, zero, abs, square, indicator_abs_le (1{|x| <= param}).
std::function<double(std::span<const double>)> payoff_by_name(const std::string& name,
                                                              std::optional<double> param);

/// Problem and functional described by a config, before validation.
struct ResolvedExperiment {
    BuiltinProblem setup;
    std::vector<std::string> warnings;
};

/// Throws ConfigError for unknown names or malformed fields.
ResolvedExperiment resolve_experiment(const ExperimentConfig& config);

enum ExitStatus : int { kExitPass = 0, kExitAcceptanceFailure = 1, kExitConfigError = 2 };

struct ExperimentResult {
    int status = kExitPass;
    /// CSV text as written (empty on config error).
    std::string csv;
    /// JSON report text as written (empty on config error).
    std::string report;
    std::string message;
};

/// Runs the configured pipeline, writing the CSV ladder and the JSON report
/// into config.output.dir. Config errors never throw; they yield status 2.
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t workers = 0);

/// Same as run_experiment without touching the filesystem.
ExperimentResult run_experiment_in_memory(const ExperimentConfig& config, std::size_t workers = 0);

}  // namespace emweak
