// SPDX-License-Identifier: MIT
#include "emweak/weak_error.hpp"

#include "emweak/error.hpp"
#include "emweak/reflected.hpp"

#include <algorithm>
#include <cmath>

namespace emweak {

std::string_view to_string(ReferenceMode m) {
    return m == ReferenceMode::coupled ? "coupled" : "independent";
}

ReferenceMode reference_mode_from_string(std::string_view s) {
    if (s == "independent") return ReferenceMode::independent;
    if (s == "coupled") return ReferenceMode::coupled;
    throw ConfigError("unknown reference mode '" + std::string(s) + "'");
}

std::vector<double> dyadic_ladder(double horizon, int first, int last) {
    std::vector<double> out;
    for (int k = first; k <= last; ++k) out.push_back(std::ldexp(horizon, -k));
    return out;
}

namespace {

GridPath simulate_kind(const SdeProblem& problem, const Grid& grid, RngStream& stream) {
    switch (problem.kind) {
        case ProblemKind::plain:
            return simulate_em_path(problem, grid, stream);
        case ProblemKind::reflected:
            return simulate_reflected_em_path(problem, grid, stream).path;
        case ProblemKind::killed:
            break;
    }
    throw ConfigError("killed problems are estimated through the killed-diffusion estimators");
}

}  // namespace

McEstimate direct_estimate(const SdeProblem& problem, const PathFunctional& functional, const Grid& grid,
                           std::size_t n_paths, const McOptions& options) {
    if (problem.kind == ProblemKind::killed) {
        throw ConfigError("killed problems are estimated through the killed-diffusion estimators");
    }
    const PathSampler sampler = [&](RngStream& stream) -> std::optional<double> {
        try {
            const double v = evaluate_functional(simulate_kind(problem, grid, stream), functional);
            if (!std::isfinite(v)) return std::nullopt;
            return v;
        } catch (const NonFiniteError&) {
            return std::nullopt;
        }
    };
    return run_mc(sampler, n_paths, options);
}

std::vector<LadderPoint> weak_error_vs_reference(const SdeProblem& problem, const PathFunctional& functional,
                                                 std::span<const double> h_ladder, double h_ref, std::size_t n_paths,
                                                 const McOptions& options, ReferenceMode mode) {
    if (problem.kind == ProblemKind::killed) {
        throw ConfigError("killed problems use killed_bias_ladder");
    }
    if (h_ladder.empty()) throw ConfigError("empty h ladder");
    std::vector<Grid> grids;
    for (std::size_t i = 0; i < h_ladder.size(); ++i) {
        grids.push_back(Grid::from_step(problem.horizon, h_ladder[i]));
        if (i > 0 && !(h_ladder[i] < h_ladder[i - 1])) throw ConfigError("ladder h values must be strictly decreasing");
    }
    const Grid ref_grid = Grid::from_step(problem.horizon, h_ref);
    const double h_min = *std::min_element(h_ladder.begin(), h_ladder.end());
    if (h_ref > h_min / 8.0 * (1.0 + 1e-12)) throw ConfigError("h_ref must be <= min(ladder)/8");

    std::vector<LadderPoint> out;
    if (mode == ReferenceMode::independent) {
        McOptions ref_opts = options;
        ref_opts.master_seed = derive_seed(options.master_seed, 0);
        const McEstimate ref = direct_estimate(problem, functional, ref_grid, n_paths, ref_opts);
        for (std::size_t i = 0; i < grids.size(); ++i) {
            McOptions opts = options;
            opts.master_seed = derive_seed(options.master_seed, i + 1);
            const McEstimate est = direct_estimate(problem, functional, grids[i], n_paths, opts);
            out.push_back({h_ladder[i], ref.mean - est.mean, std::hypot(ref.std_error, est.std_error), ref.mean});
        }
        return out;
    }

    const std::size_t n_ref = ref_grid.n_steps();
    std::vector<std::size_t> steps;
    for (const auto& g : grids) {
        if (n_ref % g.n_steps() != 0) throw ConfigError("coupled mode needs ladder step counts dividing the reference");
        steps.push_back(g.n_steps());
    }
    const std::size_t d = problem.dim();
    const std::size_t levels = grids.size();

    const MultiPathSampler sampler = [&](RngStream& stream, std::span<double> values) {
        double f_ref = 0.0;
        if (problem.kind == ProblemKind::reflected) {
            const auto paths = simulate_reflected_coupled(problem, n_ref, steps, stream);
            f_ref = evaluate_functional(paths[0], functional);
            for (std::size_t i = 0; i < levels; ++i) values[i + 1] = f_ref - evaluate_functional(paths[i + 1], functional);
        } else {
            std::vector<double> dw(n_ref * d);
            fill_gaussian(stream, dw, std::sqrt(ref_grid.step()));
            f_ref = evaluate_functional(em_path_from_increments(problem, ref_grid, dw), functional);
            std::vector<double> coarse;
            for (std::size_t i = 0; i < levels; ++i) {
                const std::size_t r = n_ref / steps[i];
                coarse.assign(steps[i] * d, 0.0);
                for (std::size_t j = 0; j < n_ref; ++j) {
                    for (std::size_t c = 0; c < d; ++c) coarse[(j / r) * d + c] += dw[j * d + c];
                }
                values[i + 1] = f_ref - evaluate_functional(em_path_from_increments(problem, grids[i], coarse), functional);
            }
        }
        values[0] = f_ref;
        return true;
    };
    const auto est = run_mc_multi(sampler, levels + 1, n_paths, options);
    for (std::size_t i = 0; i < levels; ++i) {
        out.push_back({h_ladder[i], est[i + 1].mean, est[i + 1].std_error, est[0].mean});
    }
    return out;
}

}  // namespace emweak
