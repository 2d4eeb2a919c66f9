// SPDX-License-Identifier: MIT
//
// Batched Monte Carlo with mergeable sufficient statistics, and log-log
// fitting of weak error ladders.
#pragma once

#include "emweak/sampling.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emweak {

/// Running (count, mean, M2) with Chan's parallel merge, plus invalid samples.
struct RunningStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    std::uint64_t invalid = 0;

    void add(double x);
    void add_invalid() { ++invalid; }
    void merge(const RunningStats& other);
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_paths = 0;
    std::uint64_t invalid_count = 0;
    bool failed = false;

    double sample_std() const;
};

/// Invalid fraction above which an estimate is marked failed.
inline constexpr double kMaxInvalidFraction = 1e-4;

McEstimate to_estimate(const RunningStats& s);

struct McOptions {
    std::uint64_t master_seed = 20240601;
    std::size_t n_batches = 16;
    /// 0: read EMWEAK_WORKERS, falling back to the hardware concurrency.
    std::size_t workers = 0;
};

std::size_t resolve_workers(std::size_t requested);

/// Independent key for a sub-experiment, derived from the master seed.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t salt);

/// One path; std::nullopt marks an invalid sample.
using PathSampler = std::function<std::optional<double>(RngStream&)>;
/// One path producing several coupled outputs; returning false marks the
/// whole path invalid.
using MultiPathSampler = std::function<bool(RngStream&, std::span<double>)>;

/// Per-batch statistics. Batch b draws from stream (master_seed, b) and
/// covers paths [b n / B, (b+1) n / B). The result does not depend on the
/// number of workers. Throws McError when a batch has no valid sample.
std::vector<std::vector<RunningStats>> run_mc_batches(const MultiPathSampler& sampler, std::size_t n_outputs,
                                                      std::size_t n_paths, const McOptions& options);

/// Requires n_paths >= 100 (std::invalid_argument otherwise).
std::vector<McEstimate> run_mc_multi(const MultiPathSampler& sampler, std::size_t n_outputs, std::size_t n_paths,
                                     const McOptions& options);
McEstimate run_mc(const PathSampler& sampler, std::size_t n_paths, const McOptions& options);
McEstimate run_mc(const PathSampler& sampler, std::size_t n_paths, std::size_t n_batches, std::uint64_t master_seed);

/// One rung of a weak-error ladder.
struct LadderPoint {
    double h = 0.0;
    double error = 0.0;
    double std_error = 0.0;
    double reference = 0.0;
};

struct RateReport {
    std::vector<LadderPoint> ladder;
    std::vector<bool> used;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double fit_residual = std::numeric_limits<double>::quiet_NaN();
    double predicted = std::numeric_limits<double>::quiet_NaN();
    std::size_t usable_points = 0;
    bool below_noise_floor = false;
    std::string note;
};

/// Least squares of log|error| on log h over points with |error| > 3 standard errors.
/// More than half the points excluded: below_noise_floor, no slope.
/// Throws ConfigError for a ladder that is not strictly decreasing in h and
/// Error when fewer than two points are usable.
RateReport fit_rate(std::span<const LadderPoint> ladder, double predicted = std::numeric_limits<double>::quiet_NaN());

}  // namespace emweak
