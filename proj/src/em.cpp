// SPDX-License-Identifier: MIT
#include "emweak/em.hpp"

#include "emweak/error.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace emweak {

Grid::Grid(double horizon, std::size_t n_steps) : horizon_(horizon), n_(n_steps), h_(0.0) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("grid horizon must be finite and > 0");
    if (n_steps < 1) throw ConfigError("grid needs at least one step");
    h_ = horizon / static_cast<double>(n_steps);
}

Grid Grid::from_step(double horizon, double h) {
    if (!(h > 0.0) || !(horizon > 0.0)) throw ConfigError("h must equal T/n");
    const double ratio = horizon / h;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * n) throw ConfigError("h must equal T/n");
    return Grid(horizon, static_cast<std::size_t>(n));
}

double Grid::time(std::size_t k) const {
    if (k >= n_) return horizon_;
    return static_cast<double>(k) * h_;
}

double Grid::eta(double s) const {
    if (s <= 0.0) return 0.0;
    const auto k = static_cast<std::size_t>(std::floor(s / h_));
    return time(std::min(k, n_));
}

GridPath::GridPath(Grid g, std::size_t d)
    : grid(g), dim(d), states((g.n_steps() + 1) * d, 0.0), increments(g.n_steps() * d, 0.0) {}

GridPath simulate_bm_path(RngStream& stream, const Grid& grid, std::size_t dim) {
    GridPath path(grid, dim);
    const double sd = std::sqrt(grid.step());
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        auto dw = path.increment(k);
        fill_gaussian(stream, dw, sd);
        auto prev = path.state(k);
        auto next = path.state(k + 1);
        for (std::size_t i = 0; i < dim; ++i) next[i] = prev[i] + dw[i];
    }
    return path;
}

GridPath em_path_from_increments(const SdeProblem& problem, const Grid& grid, std::span<const double> increments) {
    const std::size_t d = problem.dim();
    GridPath path(grid, d);
    std::copy(increments.begin(), increments.begin() + static_cast<std::ptrdiff_t>(grid.n_steps() * d),
              path.increments.begin());
    std::copy(problem.x0.begin(), problem.x0.end(), path.states.begin());

    std::vector<double> b(d), sdw(d);
    const double h = grid.step();
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        auto x = path.state(k);
        problem.drift.eval(x, b);
        problem.diffusion.apply(path.increment(k), sdw);
        auto next = path.state(k + 1);
        for (std::size_t i = 0; i < d; ++i) {
            if (!std::isfinite(b[i])) {
                throw NonFiniteError("drift '" + problem.drift.name + "' returned a non-finite value at step " +
                                     std::to_string(k));
            }
            next[i] = x[i] + b[i] * h + sdw[i];
        }
    }
    return path;
}

GridPath simulate_em_path(const SdeProblem& problem, const Grid& grid, RngStream& stream) {
    const std::size_t d = problem.dim();
    std::vector<double> dw(grid.n_steps() * d);
    fill_gaussian(stream, dw, std::sqrt(grid.step()));
    return em_path_from_increments(problem, grid, dw);
}

GridPath shifted_brownian_path(const SdeProblem& problem, const GridPath& brownian) {
    const std::size_t d = problem.dim();
    GridPath out(brownian.grid, d);
    out.increments = brownian.increments;
    for (std::size_t k = 0; k <= brownian.grid.n_steps(); ++k) {
        auto dst = out.state(k);
        problem.diffusion.apply(brownian.state(k), dst);
        for (std::size_t i = 0; i < d; ++i) dst[i] += problem.x0[i];
    }
    return out;
}

std::vector<double> refine_increments(std::span<const double> coarse, std::size_t dim, std::size_t m, double h,
                                      RngStream& stream) {
    if (m < 1) throw ConfigError("refinement factor must be >= 1");
    const std::size_t n = coarse.size() / dim;
    const double dt = h / static_cast<double>(m);
    std::vector<double> fine(n * m * dim);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < dim; ++i) {
            double remaining = coarse[k * dim + i];
            double rest_time = h;
            for (std::size_t j = 0; j + 1 < m; ++j) {
                // bridge from 0 to `remaining` over `rest_time`, sampled at dt
                const double mean = remaining * dt / rest_time;
                const double var = dt * (rest_time - dt) / rest_time;
                const double piece = mean + std::sqrt(var) * stream.gaussian();
                fine[(k * m + j) * dim + i] = piece;
                remaining -= piece;
                rest_time -= dt;
            }
            fine[(k * m + m - 1) * dim + i] = remaining;
        }
    }
    return fine;
}

double evaluate_functional(const GridPath& path, const PathFunctional& functional) {
    switch (functional.kind) {
        case FunctionalKind::terminal:
            return functional.g(path.terminal());
        case FunctionalKind::integral: {
            double sum = 0.0;
            for (std::size_t k = 0; k < path.grid.n_steps(); ++k) sum += functional.g(path.state(k));
            return functional.f(path.grid.step() * sum);
        }
        case FunctionalKind::grid_path:
            return functional.f_grid(path.states, path.dim);
    }
    return NAN;
}

void write_path_csv(std::ostream& os, const GridPath& path, std::span<const double> local_time) {
    os << "t";
    for (std::size_t i = 0; i < path.dim; ++i) os << ",x" << i;
    if (!local_time.empty()) os << ",L";
    os << "\n";
    char buf[32];
    for (std::size_t k = 0; k <= path.grid.n_steps(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", path.grid.time(k));
        os << buf;
        for (double x : path.state(k)) {
            std::snprintf(buf, sizeof buf, "%.17g", x);
            os << "," << buf;
        }
        if (!local_time.empty()) {
            std::snprintf(buf, sizeof buf, "%.17g", local_time[k]);
            os << "," << buf;
        }
        os << "\n";
    }
}

}  // namespace emweak
