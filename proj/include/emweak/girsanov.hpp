// SPDX-License-Identifier: MIT
//
// Discrete Girsanov weights. Along a Brownian grid path with anchors
// x0 + sigma W_{t_k}, the weight of the Euler-Maruyama law is
//   Y^h_T = sum_k <(sigma^-1 b)(x0 + sigma W_{t_k}), dW_k>
//           - 1/2 sum_k |(sigma^-1 b)(x0 + sigma W_{t_k})|^2 h,
//   Z^h_T = exp(Y^h_T),
// and E[f(X^h)] = E[f(x0 + sigma W) Z^h_T]. The integrand is frozen on each
// step, so Z^h_T is exact given the grid path.
#pragma once

#include "emweak/em.hpp"
#include "emweak/mc.hpp"
#include "emweak/model.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace emweak {

/// Running log-weight. The weight itself is only formed on request.
class WeightAccumulator {
public:
    double log_weight() const { return log_weight_; }
    double weight() const;
    std::size_t steps_consumed() const { return steps_; }

private:
    friend WeightAccumulator accumulate_weight_step(WeightAccumulator acc, std::span<const double> scaled_drift,
                                                    std::span<const double> dw, double h);
    double log_weight_ = 0.0;
    std::size_t steps_ = 0;
};

/// Y += <scaled_drift, dW> - |scaled_drift|^2 h / 2, with scaled_drift the
/// value of sigma^-1 b at the step's anchor. Throws NonFiniteError.
WeightAccumulator accumulate_weight_step(WeightAccumulator acc, std::span<const double> scaled_drift,
                                         std::span<const double> dw, double h);

/// Y^h_T along a Brownian grid path (states W_{t_k}, increments dW_k).
double girsanov_log_weight(const SdeProblem& problem, const GridPath& brownian);

/// log Z^h_T above which exponentiation is treated as overflow.
inline constexpr double kMaxLogWeight = 700.0;

/// E[f(X^h)] estimated as E[f(x0 + sigma W) Z^h_T]. Paths whose weight
/// overflows or whose payoff is non-finite are tagged invalid. Throws
/// ConfigError for super-linear drift or a non-plain problem.
McEstimate weighted_payoff_estimate(const SdeProblem& problem, const PathFunctional& functional, const Grid& grid,
                                    std::size_t n_paths, const McOptions& options);

struct GirsanovIdentityCheck {
    McEstimate direct;
    McEstimate weighted;
    double combined_std_error = 0.0;
    double z_score = 0.0;
    bool passed = false;
};

/// Direct EM and weighted Brownian estimates of E[f(X^h)] on independent
/// streams; passes when they agree within 3 combined standard errors.
GirsanovIdentityCheck girsanov_identity_check(const SdeProblem& problem, const PathFunctional& functional,
                                              const Grid& grid, std::size_t n_paths, const McOptions& options);

struct CoupledWeightEstimate {
    McEstimate estimate;
    std::size_t refinement = 0;
    std::string note;
};

/// Estimate of E[f(X)] - E[f(X^h)] as E[f(x0 + sigma W)(Z~_T - Z^h_T)], Z~
/// being the weight on an m-times finer bridge refinement of the same path.
/// Z~ is itself a discretisation of Z_T, so the estimate carries the bias of
/// the refined grid. Requires m >= 2.
CoupledWeightEstimate coupled_weak_error_estimate(const SdeProblem& problem, const PathFunctional& functional,
                                                  const Grid& grid, std::size_t refinement, std::size_t n_paths,
                                                  const McOptions& options);

struct MomentRecord {
    std::string drift_name;
    double p = 0.0;
    std::size_t n_paths = 0;
    double moment = 0.0;
    /// Largest single Z^p divided by the sum over the first n_paths samples.
    double max_share = 0.0;
};

struct MomentDiagnostic {
    std::vector<MomentRecord> records;
    std::vector<double> successive_ratios;
    bool stabilized = true;
    bool heavy_tail_warning = false;
    std::string message;
};

/// Ratio band within which successive moment estimates count as stable.
inline constexpr double kMomentRatioLow = 0.5;
inline constexpr double kMomentRatioHigh = 2.0;
/// A single sample carrying more than this share of the sum flags a heavy tail.
inline constexpr double kMaxSampleShare = 0.1;

/// Sample p-th moments of Z^h_T on nested prefixes of one run, in schedule
/// order. The schedule must be strictly increasing.
MomentDiagnostic weight_moment_diagnostic(const SdeProblem& problem, const Grid& grid, double p,
                                          std::span<const std::size_t> schedule, const McOptions& options);

}  // namespace emweak
