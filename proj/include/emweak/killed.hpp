// SPDX-License-Identifier: MIT
//
// Diffusions killed on leaving an open domain D, monitored at grid times:
// tau^h = inf{ t_k : X_{t_k} not in D }.
#pragma once

#include "emweak/em.hpp"
#include "emweak/mc.hpp"
#include "emweak/model.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emweak {

struct ExitRecord {
    bool exited = false;
    std::optional<std::size_t> exit_step;
    bool alive_at_T = true;
};

/// First grid index k >= 0 with X_{t_k} outside D (boundary counts as outside).
ExitRecord discrete_exit_time(const GridPath& path, const DomainSpec& domain);

/// Bounded payoff g for killed estimates.
struct KilledPayoff {
    std::string name;
    std::function<double(std::span<const double>)> g;
    /// Declared sup-norm; must be finite.
    double sup_norm = 1.0;
    /// Declared distance from Supp(g) to the boundary of D, when known.
    std::optional<double> support_gap;
};

/// d(Supp g, dD) >= 2 epsilon for a payoff that declares its support gap.
/// Payoffs without a declaration cannot be checked and return true.
bool support_gap_satisfied(const KilledPayoff& payoff, const DomainSpec& domain);

/// Estimate of E[g(X^h_T) 1(tau^h_D > T)]. Throws ConfigError for an
/// unbounded payoff or a problem without a domain.
McEstimate killed_payoff_estimate(const SdeProblem& problem, const KilledPayoff& payoff, const Grid& grid,
                                  std::size_t n_paths, const McOptions& options);

/// Survival probability P(x0 + sigma W_t in (a,b) for all t <= T) from the
/// eigenfunction expansion of the heat equation on the interval:
///   sum_{n odd} 4/(n pi) sin(n pi (x0-a)/L) exp(-n^2 pi^2 sigma^2 T / (2 L^2)),
/// L = b - a, truncated once the next term bound drops below 1e-12.
/// Throws ConfigError for a non-interval domain.
double reference_exit_probability(const DomainSpec& domain, double x0, double sigma, double horizon);

struct KilledIdentityResult {
    McEstimate direct;
    McEstimate weighted;
    double combined_std_error = 0.0;
    double z_score = 0.0;
    bool passed = false;
};

/// Compares E[g(X^h_T) 1(tau^h > T)] with E[g(x0 + sigma W_T) Z^h_T
/// 1(tau^{W,h} > T)], the exit time of the second taken on the plain path
/// x0 + sigma W_{t_k}. The two sides use independent streams; the test
/// passes when they agree within 3 combined standard errors.
KilledIdentityResult killed_identity_test(const SdeProblem& problem, const KilledPayoff& payoff, const Grid& grid,
                                          std::size_t n_paths, const McOptions& options);

/// Survival-type ladder: error(h) = reference - estimate(h).
std::vector<LadderPoint> killed_bias_ladder(const SdeProblem& problem, const KilledPayoff& payoff,
                                            std::span<const double> h_ladder, double reference, std::size_t n_paths,
                                            const McOptions& options);

}  // namespace emweak
