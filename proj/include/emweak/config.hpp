// SPDX-License-Identifier: MIT
//
// Experiment configuration and its JSON dialect.
//
// {
//   "problem": "sign_drift" | { "drift": {"name": "constant", "param": 0.3},
//                               "x0": [0.5], "T": 1.0, "sigma": [[1.0]],
//                               "kind": "plain" | "reflected" | "killed",
//                               "domain": {"interval": [-1, 1], "epsilon": 0, "p": 2},
//                               "holder_alpha": 1.0, "growth": "bounded",
//                               "class_a": [true] },
//   "functional": {"kind": "terminal", "g": "tanh", "g_param": 0.5,
//                  "f": "identity", "beta": 1.0},
//   "pipeline": "weak_order" | "identity_check" | "reflected_law" |
//               "killed_bias" | "weight_diagnostic",
//   "ladder": [0.125, 0.0625], "h_ref": 0.000244140625, "h": 0.015625,
//   "reference_mode": "independent" | "coupled",
//   "n_paths": 100000, "n_batches": 16, "seed": 20240601,
//   "moment_p": 2.0, "moment_schedule": [1000, 10000, 100000],
//   "reference_value": 0.37, "min_slope": 0.2, "max_slope": 1.5,
//   "tolerance": 0.01,
//   "output": {"dir": "out", "csv": "ladder.csv", "json": "report.json"}
// }
//
// Every key except "problem" and "pipeline" is optional. An array under "h"
// is read as the ladder.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace emweak {

enum class Pipeline { weak_order, identity_check, reflected_law, killed_bias, weight_diagnostic };

std::string_view to_string(Pipeline p);
Pipeline pipeline_from_string(std::string_view s);

struct DriftChoice {
    std::string name;
    std::optional<double> param;
    bool operator==(const DriftChoice&) const = default;
};

struct DomainChoice {
    double lower = -1.0;
    double upper = 1.0;
    double epsilon = 0.0;
    double p = 2.0;
    bool operator==(const DomainChoice&) const = default;
};

struct InlineProblem {
    DriftChoice drift;
    std::vector<double> x0;
    double horizon = 1.0;
    std::vector<std::vector<double>> sigma;
    std::string kind = "plain";
    std::optional<DomainChoice> domain;
    // user declarations overriding the catalogue drift's
    std::optional<double> holder_alpha;
    std::optional<std::string> growth;
    std::optional<std::vector<bool>> class_a;
    bool operator==(const InlineProblem&) const = default;
};

struct FunctionalChoice {
    std::string kind = "terminal";
    std::string g = "tanh";
    std::optional<double> g_param;
    std::optional<std::string> f;
    std::optional<double> beta;
    bool operator==(const FunctionalChoice&) const = default;
};

struct OutputChoice {
    std::string dir = ".";
    std::string csv = "ladder.csv";
    std::string json = "report.json";
    bool operator==(const OutputChoice&) const = default;
};

struct ExperimentConfig {
    std::variant<std::string, InlineProblem> problem;
    std::optional<FunctionalChoice> functional;
    Pipeline pipeline = Pipeline::weak_order;
    std::optional<std::vector<double>> ladder;
    std::optional<double> h_ref;
    std::optional<double> h;
    std::string reference_mode = "independent";
    std::size_t n_paths = 100000;
    std::size_t n_batches = 16;
    std::uint64_t seed = 20240601;
    double moment_p = 2.0;
    std::optional<std::vector<std::size_t>> moment_schedule;
    std::optional<double> reference_value;
    std::optional<double> min_slope;
    std::optional<double> max_slope;
    double tolerance = 0.01;
    OutputChoice output;
    bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError on malformed input.
ExperimentConfig parse_config(std::string_view text);
std::string serialize_config(const ExperimentConfig& config);

}  // namespace emweak
