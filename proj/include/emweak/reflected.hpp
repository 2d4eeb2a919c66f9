// SPDX-License-Identifier: MIT
//
// Euler-Maruyama for the one-dimensional SDE reflected at 0:
//   X_{k+1} = X_k + b(X_k) h + sigma dW_k + max(0, A_k - X_k),
//   A_k = sup_{s < h} ( -b(X_k) s - sigma (W_{t_k + s} - W_{t_k}) ),
// with (dW_k, A_k) drawn jointly and exactly.
#pragma once

#include "emweak/em.hpp"
#include "emweak/model.hpp"
#include "emweak/sampling.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace emweak {

struct SkorohodResult {
    std::vector<double> x;
    std::vector<double> ell;
};

/// ell_k = max(0, max_{j<=k}(-z - y_j)), x_k = z + y_k + ell_k.
SkorohodResult skorohod_map_discrete(double z, std::span<const double> y);

struct ReflectedState {
    double position_X = 0.0;
    double local_time_L = 0.0;
    std::size_t step_index = 0;
};

/// One step given the joint sample (U, A) of the Brownian increment and the
/// within-step supremum, drawn with scale a = -sigma, drift c = -b_val.
ReflectedState reflected_em_step_from(const ReflectedState& state, double b_val, double sigma, double h,
                                      const SupremumSample& sample);

ReflectedState reflected_em_step(const ReflectedState& state, double b_val, double sigma, double h, RngStream& stream);

struct ReflectedPath {
    GridPath path;
    std::vector<double> local_time;
};

/// Requires a validated reflected problem (d = 1, x0 >= 0). Throws
/// NonFiniteError on a non-finite drift value.
ReflectedPath simulate_reflected_em_path(const SdeProblem& problem, const Grid& grid, RngStream& stream);

/// Reflected schemes on a fine grid of n_fine steps and on coarser grids of
/// n_coarse[i] steps (each dividing n_fine), all driven by one Brownian path.
///
/// Each fine step draws (dW_j, V_j) in the same order as
/// simulate_reflected_em_path, so entry 0 (the fine path) coincides with it.
/// A coarse step's supremum is the maximum over its fine sub-steps of the
/// conditional bridge suprema built from the same V_j, which keeps every
/// level exact in law.
std::vector<GridPath> simulate_reflected_coupled(const SdeProblem& problem, std::size_t n_fine,
                                                 std::span<const std::size_t> n_coarse, RngStream& stream);

}  // namespace emweak
