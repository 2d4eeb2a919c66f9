// SPDX-License-Identifier: MIT
//
// Direct estimates of E[f(X^h)] and weak-error ladders against a fine-grid
// reference scheme.
#pragma once

#include "emweak/em.hpp"
#include "emweak/mc.hpp"
#include "emweak/model.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace emweak {

/// E[f(X^h)] by simulating the scheme of the problem's kind (plain or
/// reflected). Non-finite payoffs are tagged invalid.
McEstimate direct_estimate(const SdeProblem& problem, const PathFunctional& functional, const Grid& grid,
                           std::size_t n_paths, const McOptions& options);

enum class ReferenceMode {
    /// Reference and every ladder point estimated on independent streams;
    /// standard errors combined in quadrature.
    independent,
    /// Every path drives the reference grid and all ladder grids with one
    /// Brownian path; error(h) is the mean of the per-path differences.
    coupled,
};

std::string_view to_string(ReferenceMode m);
ReferenceMode reference_mode_from_string(std::string_view s);

/// Ladder values must be of the form T/n, strictly decreasing, and h_ref must
/// not exceed min(ladder)/8; otherwise ConfigError. In coupled mode every
/// ladder step count must divide the reference step count.
///
/// error(h) = E_ref[f] - E_h[f]; `reference` holds the reference estimate.
std::vector<LadderPoint> weak_error_vs_reference(const SdeProblem& problem, const PathFunctional& functional,
                                                 std::span<const double> h_ladder, double h_ref, std::size_t n_paths,
                                                 const McOptions& options,
                                                 ReferenceMode mode = ReferenceMode::independent);

/// h = T 2^-k for k = first..last.
std::vector<double> dyadic_ladder(double horizon, int first, int last);

}  // namespace emweak
