// SPDX-License-Identifier: MIT
#include "emweak/girsanov.hpp"

#include "emweak/error.hpp"
#include "emweak/weak_error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace emweak {

double WeightAccumulator::weight() const { return std::exp(log_weight_); }

WeightAccumulator accumulate_weight_step(WeightAccumulator acc, std::span<const double> scaled_drift,
                                         std::span<const double> dw, double h) {
    double ito = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < scaled_drift.size(); ++i) {
        const double v = scaled_drift[i];
        if (!std::isfinite(v)) throw NonFiniteError("non-finite drift in Girsanov weight");
        ito += v * dw[i];
        sq += v * v;
    }
    acc.log_weight_ += ito - 0.5 * sq * h;
    ++acc.steps_;
    return acc;
}

namespace {

// Log-weight along increments `dw` (n rows of d values, step h) anchored at
// x0 + sigma W.
double log_weight_from_increments(const SdeProblem& problem, std::span<const double> dw, double h) {
    const std::size_t d = problem.dim();
    const std::size_t n = dw.size() / d;
    std::vector<double> w(d, 0.0), anchor(d), b(d), scaled(d);
    WeightAccumulator acc;
    for (std::size_t k = 0; k < n; ++k) {
        problem.diffusion.apply(w, anchor);
        for (std::size_t i = 0; i < d; ++i) anchor[i] += problem.x0[i];
        problem.drift.eval(anchor, b);
        problem.diffusion.apply_inverse(b, scaled);
        const auto step = dw.subspan(k * d, d);
        acc = accumulate_weight_step(acc, scaled, step, h);
        for (std::size_t i = 0; i < d; ++i) w[i] += step[i];
    }
    return acc.log_weight();
}

void require_weightable(const SdeProblem& problem) {
    if (problem.drift.growth == GrowthClass::super_linear) {
        throw ConfigError("Girsanov weights are not defined for super-linear drift");
    }
}

}  // namespace

double girsanov_log_weight(const SdeProblem& problem, const GridPath& brownian) {
    return log_weight_from_increments(problem, brownian.increments, brownian.grid.step());
}

McEstimate weighted_payoff_estimate(const SdeProblem& problem, const PathFunctional& functional, const Grid& grid,
                                    std::size_t n_paths, const McOptions& options) {
    require_weightable(problem);
    if (problem.kind != ProblemKind::plain) throw ConfigError("weighted estimator applies to plain problems");
    const PathSampler sampler = [&](RngStream& stream) -> std::optional<double> {
        const auto w = simulate_bm_path(stream, grid, problem.dim());
        const double log_w = girsanov_log_weight(problem, w);
        if (!(log_w < kMaxLogWeight)) return std::nullopt;
        const double payoff = evaluate_functional(shifted_brownian_path(problem, w), functional);
        const double v = payoff * std::exp(log_w);
        if (!std::isfinite(v)) return std::nullopt;
        return v;
    };
    return run_mc(sampler, n_paths, options);
}

GirsanovIdentityCheck girsanov_identity_check(const SdeProblem& problem, const PathFunctional& functional,
                                              const Grid& grid, std::size_t n_paths, const McOptions& options) {
    GirsanovIdentityCheck out;
    McOptions direct_opts = options;
    direct_opts.master_seed = derive_seed(options.master_seed, 101);
    McOptions weighted_opts = options;
    weighted_opts.master_seed = derive_seed(options.master_seed, 202);
    out.direct = direct_estimate(problem, functional, grid, n_paths, direct_opts);
    out.weighted = weighted_payoff_estimate(problem, functional, grid, n_paths, weighted_opts);
    out.combined_std_error = std::hypot(out.direct.std_error, out.weighted.std_error);
    const double diff = out.direct.mean - out.weighted.mean;
    out.z_score = out.combined_std_error > 0.0 ? diff / out.combined_std_error : (diff == 0.0 ? 0.0 : INFINITY);
    out.passed = std::abs(diff) <= 3.0 * out.combined_std_error && !out.direct.failed && !out.weighted.failed;
    return out;
}

CoupledWeightEstimate coupled_weak_error_estimate(const SdeProblem& problem, const PathFunctional& functional,
                                                  const Grid& grid, std::size_t refinement, std::size_t n_paths,
                                                  const McOptions& options) {
    require_weightable(problem);
    if (refinement < 2) throw ConfigError("refinement factor must be >= 2");
    const std::size_t d = problem.dim();
    const double fine_h = grid.step() / static_cast<double>(refinement);
    const PathSampler sampler = [&](RngStream& stream) -> std::optional<double> {
        const auto w = simulate_bm_path(stream, grid, d);
        const auto fine = refine_increments(w.increments, d, refinement, grid.step(), stream);
        const double log_coarse = log_weight_from_increments(problem, w.increments, grid.step());
        const double log_fine = log_weight_from_increments(problem, fine, fine_h);
        if (!(log_coarse < kMaxLogWeight) || !(log_fine < kMaxLogWeight)) return std::nullopt;
        const double payoff = evaluate_functional(shifted_brownian_path(problem, w), functional);
        const double v = payoff * (std::exp(log_fine) - std::exp(log_coarse));
        if (!std::isfinite(v)) return std::nullopt;
        return v;
    };
    CoupledWeightEstimate out;
    out.estimate = run_mc(sampler, n_paths, options);
    out.refinement = refinement;
    std::ostringstream os;
    os << "reference weight computed on a " << refinement
       << "x bridge-refined grid; the estimate includes that grid's own discretisation bias";
    out.note = os.str();
    return out;
}

MomentDiagnostic weight_moment_diagnostic(const SdeProblem& problem, const Grid& grid, double p,
                                          std::span<const std::size_t> schedule, const McOptions& options) {
    require_weightable(problem);
    if (!(p > 0.0)) throw ConfigError("moment order p must be > 0");
    if (schedule.empty()) throw ConfigError("moment schedule is empty");
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        if (!(schedule[i] > schedule[i - 1])) throw ConfigError("moment schedule must be strictly increasing");
    }

    constexpr std::size_t kChunk = 10000;
    MomentDiagnostic out;
    double sum = 0.0;
    double largest = 0.0;
    std::size_t done = 0;
    std::size_t next_record = 0;
    RngStream stream(options.master_seed, 0);
    while (next_record < schedule.size()) {
        if (done % kChunk == 0) stream = RngStream(options.master_seed, done / kChunk);
        const auto w = simulate_bm_path(stream, grid, problem.dim());
        const double scaled = p * girsanov_log_weight(problem, w);
        const double zp = scaled < kMaxLogWeight ? std::exp(scaled) : std::numeric_limits<double>::infinity();
        sum += zp;
        largest = std::max(largest, zp);
        ++done;
        if (done == schedule[next_record]) {
            MomentRecord rec;
            rec.drift_name = problem.drift.name;
            rec.p = p;
            rec.n_paths = done;
            rec.moment = sum / static_cast<double>(done);
            rec.max_share = std::isfinite(sum) && sum > 0.0 ? largest / sum : 1.0;
            out.records.push_back(rec);
            ++next_record;
        }
    }

    for (std::size_t i = 1; i < out.records.size(); ++i) {
        const double ratio = out.records[i].moment / out.records[i - 1].moment;
        out.successive_ratios.push_back(ratio);
        if (!(ratio >= kMomentRatioLow && ratio <= kMomentRatioHigh)) out.stabilized = false;
    }
    const auto& last = out.records.back();
    if (!std::isfinite(last.moment)) out.stabilized = false;
    // the share rule needs enough samples for 1/N to sit well below the threshold
    if (last.n_paths >= 1000 && last.max_share > kMaxSampleShare) out.stabilized = false;
    out.heavy_tail_warning = !out.stabilized;

    std::ostringstream os;
    if (out.heavy_tail_warning) {
        os << "heavy-tailed Girsanov weight: sample moments of order " << p << " for drift '" << problem.drift.name
           << "' do not stabilise (last max share " << last.max_share << ")";
    } else {
        os << "moments of order " << p << " stabilised across the schedule";
    }
    out.message = os.str();
    return out;
}

}  // namespace emweak
