// SPDX-License-Identifier: MIT
//
// Euler-Maruyama on the uniform grid t_k = k T / n:
//   X_{k+1} = X_k + b(X_k) h + sigma (W_{t_{k+1}} - W_{t_k}).
#pragma once

#include "emweak/model.hpp"
#include "emweak/sampling.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace emweak {

class Grid {
public:
    Grid(double horizon, std::size_t n_steps);

    /// Accepts h only when h = T/n for an integer n (relative tolerance 1e-9);
    /// otherwise throws ConfigError("h must equal T/n").
    static Grid from_step(double horizon, double h);

    double horizon() const { return horizon_; }
    std::size_t n_steps() const { return n_; }
    double step() const { return h_; }
    /// t_k = k h, with t_n = T exactly.
    double time(std::size_t k) const;
    /// eta_h(s) = k h for s in [k h, (k+1) h).
    double eta(double s) const;

private:
    double horizon_;
    std::size_t n_;
    double h_;
};

/// States X_{t_0..t_n} and the increments that drove them, both flattened
/// row-major with `dim` values per row.
struct GridPath {
    Grid grid;
    std::size_t dim;
    std::vector<double> states;
    std::vector<double> increments;

    GridPath(Grid g, std::size_t d);

    std::span<const double> state(std::size_t k) const { return {states.data() + k * dim, dim}; }
    std::span<double> state(std::size_t k) { return {states.data() + k * dim, dim}; }
    std::span<const double> increment(std::size_t k) const { return {increments.data() + k * dim, dim}; }
    std::span<double> increment(std::size_t k) { return {increments.data() + k * dim, dim}; }
    std::span<const double> terminal() const { return state(grid.n_steps()); }
};

/// Brownian path W_{t_k} with W_0 = 0. Increments are drawn step-major,
/// coordinate-minor, exactly as simulate_em_path draws them.
GridPath simulate_bm_path(RngStream& stream, const Grid& grid, std::size_t dim);

/// Plain EM path. Throws NonFiniteError when the drift returns NaN/Inf.
GridPath simulate_em_path(const SdeProblem& problem, const Grid& grid, RngStream& stream);

/// EM path driven by given Brownian increments (one row per step).
GridPath em_path_from_increments(const SdeProblem& problem, const Grid& grid, std::span<const double> increments);

/// x0 + sigma W_{t_k} for a Brownian grid path.
GridPath shifted_brownian_path(const SdeProblem& problem, const GridPath& brownian);

/// Splits every coarse increment (n rows of `dim` values over steps of
/// length h) into `m` conditionally sampled Brownian-bridge pieces. The
/// pieces of each coarse step sum to the coarse increment.
std::vector<double> refine_increments(std::span<const double> coarse, std::size_t dim, std::size_t m, double h,
                                      RngStream& stream);

/// Functional value on a path; may be non-finite (callers tag such samples invalid).
double evaluate_functional(const GridPath& path, const PathFunctional& functional);

/// Debug dump: header "t,x0,...,x{d-1}" (plus ",L" when local_time is non-empty).
void write_path_csv(std::ostream& os, const GridPath& path, std::span<const double> local_time = {});

}  // namespace emweak
