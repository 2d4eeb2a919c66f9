// SPDX-License-Identifier: MIT
#include "emweak/killed.hpp"

#include "emweak/error.hpp"
#include "emweak/girsanov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace emweak {

ExitRecord discrete_exit_time(const GridPath& path, const DomainSpec& domain) {
    if (domain.dim() != path.dim) throw ConfigError("domain and path dimensions differ");
    for (std::size_t k = 0; k <= path.grid.n_steps(); ++k) {
        if (!domain.contains(path.state(k))) return {true, k, false};
    }
    return {};
}

bool support_gap_satisfied(const KilledPayoff& payoff, const DomainSpec& domain) {
    if (!payoff.support_gap) return true;
    return *payoff.support_gap >= 2.0 * domain.payoff_support_gap_epsilon;
}

namespace {

const DomainSpec& require_domain(const SdeProblem& problem) {
    if (!problem.domain) throw ConfigError("killed estimate requires a domain");
    return *problem.domain;
}

void require_bounded(const KilledPayoff& payoff) {
    if (!std::isfinite(payoff.sup_norm) || !payoff.g) throw ConfigError("killed payoff must be bounded");
}

// Payoff of one EM path, 0 once the path leaves D at a grid time.
double killed_path_payoff(const SdeProblem& problem, const DomainSpec& domain, const KilledPayoff& payoff,
                          const Grid& grid, RngStream& stream, std::vector<double>& x, std::vector<double>& scratch) {
    const std::size_t d = problem.dim();
    const double h = grid.step();
    const double sd = std::sqrt(h);
    std::copy(problem.x0.begin(), problem.x0.end(), x.begin());
    std::span<double> b(scratch.data(), d), dw(scratch.data() + d, d), sdw(scratch.data() + 2 * d, d);
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        problem.drift.eval(x, b);
        fill_gaussian(stream, dw, sd);
        problem.diffusion.apply(dw, sdw);
        for (std::size_t i = 0; i < d; ++i) {
            if (!std::isfinite(b[i])) throw NonFiniteError("drift '" + problem.drift.name + "' is non-finite");
            x[i] += b[i] * h + sdw[i];
        }
        if (!domain.contains(x)) return 0.0;
    }
    return payoff.g(x);
}

}  // namespace

McEstimate killed_payoff_estimate(const SdeProblem& problem, const KilledPayoff& payoff, const Grid& grid,
                                  std::size_t n_paths, const McOptions& options) {
    const auto& domain = require_domain(problem);
    require_bounded(payoff);
    const std::size_t d = problem.dim();
    const PathSampler sampler = [&](RngStream& stream) -> std::optional<double> {
        std::vector<double> x(d), scratch(3 * d);
        try {
            const double v = killed_path_payoff(problem, domain, payoff, grid, stream, x, scratch);
            if (!std::isfinite(v)) return std::nullopt;
            return v;
        } catch (const NonFiniteError&) {
            return std::nullopt;
        }
    };
    return run_mc(sampler, n_paths, options);
}

double reference_exit_probability(const DomainSpec& domain, double x0, double sigma, double horizon) {
    const auto* interval = std::get_if<Interval>(&domain.shape);
    if (!interval) throw ConfigError("reference exit probability needs an interval domain");
    if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
    if (!(x0 > interval->lower && x0 < interval->upper)) return 0.0;

    const double length = interval->upper - interval->lower;
    const double y = x0 - interval->lower;
    const double pi = std::numbers::pi;
    const double rate = pi * pi * sigma * sigma * horizon / (2.0 * length * length);
    double sum = 0.0;
    for (long n = 1;; n += 2) {
        const double nn = static_cast<double>(n);
        const double bound = 4.0 / (nn * pi) * std::exp(-nn * nn * rate);
        if (bound < 1e-12) break;
        sum += bound * std::sin(nn * pi * y / length);
    }
    return std::clamp(sum, 0.0, 1.0);
}

KilledIdentityResult killed_identity_test(const SdeProblem& problem, const KilledPayoff& payoff, const Grid& grid,
                                          std::size_t n_paths, const McOptions& options) {
    const auto& domain = require_domain(problem);
    require_bounded(payoff);
    if (problem.drift.growth != GrowthClass::bounded) throw ConfigError("killed identity test needs a bounded drift");

    KilledIdentityResult out;
    McOptions direct_opts = options;
    direct_opts.master_seed = derive_seed(options.master_seed, 303);
    out.direct = killed_payoff_estimate(problem, payoff, grid, n_paths, direct_opts);

    McOptions weighted_opts = options;
    weighted_opts.master_seed = derive_seed(options.master_seed, 404);
    const std::size_t d = problem.dim();
    const PathSampler weighted = [&](RngStream& stream) -> std::optional<double> {
        const auto w = simulate_bm_path(stream, grid, d);
        const auto plain = shifted_brownian_path(problem, w);
        if (discrete_exit_time(plain, domain).exited) return 0.0;
        const double log_w = girsanov_log_weight(problem, w);
        if (!(log_w < kMaxLogWeight)) return std::nullopt;
        const double v = payoff.g(plain.terminal()) * std::exp(log_w);
        if (!std::isfinite(v)) return std::nullopt;
        return v;
    };
    out.weighted = run_mc(weighted, n_paths, weighted_opts);

    out.combined_std_error = std::hypot(out.direct.std_error, out.weighted.std_error);
    const double diff = out.direct.mean - out.weighted.mean;
    out.z_score = out.combined_std_error > 0.0 ? diff / out.combined_std_error : (diff == 0.0 ? 0.0 : INFINITY);
    out.passed = std::abs(diff) <= 3.0 * out.combined_std_error && !out.direct.failed && !out.weighted.failed;
    return out;
}

std::vector<LadderPoint> killed_bias_ladder(const SdeProblem& problem, const KilledPayoff& payoff,
                                            std::span<const double> h_ladder, double reference, std::size_t n_paths,
                                            const McOptions& options) {
    std::vector<LadderPoint> out;
    for (std::size_t i = 0; i < h_ladder.size(); ++i) {
        if (i > 0 && !(h_ladder[i] < h_ladder[i - 1])) throw ConfigError("ladder h values must be strictly decreasing");
        const Grid grid = Grid::from_step(problem.horizon, h_ladder[i]);
        McOptions opts = options;
        opts.master_seed = derive_seed(options.master_seed, i + 1);
        const auto est = killed_payoff_estimate(problem, payoff, grid, n_paths, opts);
        out.push_back({h_ladder[i], reference - est.mean, est.std_error, reference});
    }
    return out;
}

}  // namespace emweak
