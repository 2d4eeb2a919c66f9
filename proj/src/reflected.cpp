// SPDX-License-Identifier: MIT
#include "emweak/reflected.hpp"

#include "emweak/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace emweak {

SkorohodResult skorohod_map_discrete(double z, std::span<const double> y) {
    SkorohodResult out;
    out.x.reserve(y.size());
    out.ell.reserve(y.size());
    double ell = 0.0;
    for (double yk : y) {
        ell = std::max(ell, -z - yk);
        out.ell.push_back(ell);
        out.x.push_back(z + yk + ell);
    }
    return out;
}

namespace {

double checked_drift(const SdeProblem& problem, double x) {
    double b = 0.0;
    problem.drift.eval(std::span<const double>(&x, 1), std::span<double>(&b, 1));
    if (!std::isfinite(b)) {
        throw NonFiniteError("drift '" + problem.drift.name + "' returned a non-finite value");
    }
    return b;
}

// New position and local-time increment for a step with endpoint move
// y = -b h - sigma dW and supremum A >= y.
inline void reflect(double x, double y, double sup, double& next_x, double& push) {
    if (sup > x) {
        push = sup - x;
        next_x = sup - y;
    } else {
        push = 0.0;
        next_x = x - y;
    }
}

}  // namespace

ReflectedState reflected_em_step_from(const ReflectedState& state, double b_val, double sigma, double h,
                                      const SupremumSample& sample) {
    const double y = -b_val * h - sigma * sample.increment_U;
    ReflectedState next;
    double push = 0.0;
    reflect(state.position_X, y, sample.running_max_Y, next.position_X, push);
    next.local_time_L = state.local_time_L + push;
    next.step_index = state.step_index + 1;
    return next;
}

ReflectedState reflected_em_step(const ReflectedState& state, double b_val, double sigma, double h, RngStream& stream) {
    const auto sample = sample_running_maximum(stream, -sigma, -b_val, h);
    return reflected_em_step_from(state, b_val, sigma, h, sample);
}

ReflectedPath simulate_reflected_em_path(const SdeProblem& problem, const Grid& grid, RngStream& stream) {
    const double sigma = problem.diffusion.sigma()(0, 0);
    const double h = grid.step();
    ReflectedPath out{GridPath(grid, 1), std::vector<double>(grid.n_steps() + 1, 0.0)};
    ReflectedState state{problem.x0[0], 0.0, 0};
    out.path.states[0] = state.position_X;
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const double b = checked_drift(problem, state.position_X);
        const auto sample = sample_running_maximum(stream, -sigma, -b, h);
        state = reflected_em_step_from(state, b, sigma, h, sample);
        out.path.increments[k] = sample.increment_U;
        out.path.states[k + 1] = state.position_X;
        out.local_time[k + 1] = state.local_time_L;
    }
    return out;
}

std::vector<GridPath> simulate_reflected_coupled(const SdeProblem& problem, std::size_t n_fine,
                                                 std::span<const std::size_t> n_coarse, RngStream& stream) {
    const double horizon = problem.horizon;
    const double sigma = problem.diffusion.sigma()(0, 0);
    const double dt = horizon / static_cast<double>(n_fine);
    for (std::size_t n : n_coarse) {
        if (n == 0 || n_fine % n != 0) throw ConfigError("coarse step counts must divide the fine step count");
    }

    std::vector<double> dw(n_fine), v(n_fine);
    for (std::size_t j = 0; j < n_fine; ++j) {
        dw[j] = std::sqrt(dt) * stream.gaussian();
        v[j] = exponential_variate(stream, 2.0 * dt);
    }

    auto run_level = [&](std::size_t n) {
        const Grid grid(horizon, n);
        const std::size_t r = n_fine / n;
        const double h = grid.step();
        GridPath path(grid, 1);
        double x = problem.x0[0];
        path.states[0] = x;
        for (std::size_t k = 0; k < n; ++k) {
            const double b = checked_drift(problem, x);
            // running value of -b s - sigma (W_s - W_{t_k}) at fine nodes
            double level = 0.0;
            double sup = -std::numeric_limits<double>::infinity();
            double u = 0.0;
            for (std::size_t j = k * r; j < (k + 1) * r; ++j) {
                const double y = -b * dt - sigma * dw[j];
                sup = std::max(sup, level + bridge_supremum(-sigma, y, v[j]));
                level += y;
                u += dw[j];
            }
            const double y = r == 1 ? level : -b * h - sigma * u;
            // the bridge suprema dominate every node, so sup >= y up to rounding
            sup = std::max(sup, y);
            double push = 0.0;
            reflect(x, y, sup, x, push);
            path.increments[k] = u;
            path.states[k + 1] = x;
        }
        return path;
    };

    std::vector<GridPath> out;
    out.reserve(n_coarse.size() + 1);
    out.push_back(run_level(n_fine));
    for (std::size_t n : n_coarse) out.push_back(run_level(n));
    return out;
}

}  // namespace emweak
