// SPDX-License-Identifier: MIT
#include "emweak/experiment.hpp"

#include "emweak/drifts.hpp"
#include "emweak/error.hpp"
#include "emweak/girsanov.hpp"
#include "emweak/reflected.hpp"
#include "emweak/stats.hpp"
#include "emweak/weak_error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace emweak {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::function<double(double)> scalar_fn(const std::string& name, std::optional<double> param) {
    if (name == "identity") return [](double x) { return x; };
    if (name == "tanh") return [](double x) { return std::tanh(x); };
    if (name == "one") return [](double) { return 1.0; };
    if (name == "zero") return [](double) { return 0.0; };
    if (name == "abs") return [](double x) { return std::abs(x); };
    if (name == "square") return [](double x) { return x * x; };
    if (name == "indicator_abs_le") {
        if (!param || !(*param >= 0.0)) throw ConfigError("indicator_abs_le needs g_param >= 0");
        const double r = *param;
        return [r](double x) { return std::abs(x) <= r ? 1.0 : 0.0; };
    }
    throw ConfigError("unknown payoff '" + name + "'");
}

double payoff_sup_norm(const std::string& name) {
    if (name == "tanh" || name == "one" || name == "indicator_abs_le") return 1.0;
    if (name == "zero") return 0.0;
    return kInf;
}

std::optional<double> payoff_support_gap(const std::string& name, std::optional<double> param,
                                         const DomainSpec& domain) {
    if (name != "indicator_abs_le" || !param) return std::nullopt;
    const auto* iv = std::get_if<Interval>(&domain.shape);
    if (!iv) return std::nullopt;
    return std::max(0.0, std::min(iv->upper - *param, -*param - iv->lower));
}

KilledPayoff make_killed_payoff(const std::string& name, std::optional<double> param,
                                const std::optional<DomainSpec>& domain) {
    KilledPayoff p;
    p.name = name;
    p.g = payoff_by_name(name, param);
    p.sup_norm = payoff_sup_norm(name);
    if (domain) p.support_gap = payoff_support_gap(name, param, *domain);
    return p;
}

PathFunctional make_functional(const FunctionalChoice& choice) {
    if (choice.kind == "terminal") {
        PathFunctional f = terminal_functional(choice.g, payoff_by_name(choice.g, choice.g_param));
        if (choice.g == "indicator_abs_le") f.g_class_a = true;
        return f;
    }
    if (choice.kind == "integral") {
        const std::string outer = choice.f.value_or("identity");
        const bool class_a = choice.g == "indicator_abs_le";
        std::optional<double> beta = choice.beta;
        if (!beta && !class_a) beta = 1.0;
        return integral_functional(outer + "(int " + choice.g + ")", scalar_fn(outer, std::nullopt),
                                   payoff_by_name(choice.g, choice.g_param), beta, class_a);
    }
    throw ConfigError("unknown functional kind '" + choice.kind + "'");
}

BuiltinProblem make_builtin(std::string name, std::string description, DriftSpec drift, double x0,
                            ProblemKind kind, const std::string& payoff,
                            std::optional<double> payoff_param = std::nullopt) {
    BuiltinProblem b;
    b.name = std::move(name);
    b.description = std::move(description);
    b.problem.x0 = {x0};
    b.problem.drift = std::move(drift);
    b.problem.kind = kind;
    b.functional = terminal_functional(payoff, payoff_by_name(payoff, payoff_param));
    b.functional.g_class_a = payoff == "indicator_abs_le";
    return b;
}

SdeProblem inline_problem(const InlineProblem& spec) {
    const std::size_t d = spec.x0.size();
    if (d == 0) throw ConfigError("problem.x0 must not be empty");
    SdeProblem p;
    p.x0 = spec.x0;
    p.horizon = spec.horizon;
    p.drift = drifts::by_name(spec.drift.name, spec.drift.param.value_or(std::numeric_limits<double>::quiet_NaN()), d);
    if (spec.holder_alpha) p.drift.holder_alpha = spec.holder_alpha;
    if (spec.growth) p.drift.growth = growth_class_from_string(*spec.growth);
    if (spec.class_a) p.drift.class_a_components = *spec.class_a;
    if (spec.sigma.empty()) {
        p.diffusion = inverse_diffusion(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d),
                                                                  static_cast<Eigen::Index>(d)));
    } else {
        if (spec.sigma.size() != d) throw ConfigError("problem.sigma must be d x d");
        Eigen::MatrixXd s(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < d; ++i) {
            if (spec.sigma[i].size() != d) throw ConfigError("problem.sigma must be d x d");
            for (std::size_t j = 0; j < d; ++j) {
                s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = spec.sigma[i][j];
            }
        }
        try {
            p.diffusion = inverse_diffusion(s);
        } catch (const SingularMatrixError& e) {
            throw ConfigError(std::string("problem.sigma: ") + e.what());
        }
    }
    p.kind = problem_kind_from_string(spec.kind);
    if (spec.domain) {
        DomainSpec dom;
        if (d == 1) {
            dom.shape = Interval{spec.domain->lower, spec.domain->upper};
        } else {
            dom.shape = Box{std::vector<double>(d, spec.domain->lower), std::vector<double>(d, spec.domain->upper)};
        }
        dom.payoff_support_gap_epsilon = spec.domain->epsilon;
        dom.holder_p = spec.domain->p;
        p.domain = dom;
    }
    return p;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string ladder_csv(const std::vector<LadderPoint>& ladder) {
    std::string out = "h,error,stderr,reference\n";
    for (const auto& p : ladder) {
        out += format_double(p.h) + "," + format_double(p.error) + "," + format_double(p.std_error) + "," +
               format_double(p.reference) + "\n";
    }
    return out;
}

json ladder_json(const std::vector<LadderPoint>& ladder) {
    json arr = json::array();
    for (const auto& p : ladder) {
        arr.push_back({{"h", p.h}, {"error", p.error}, {"stderr", p.std_error}, {"reference", p.reference}});
    }
    return arr;
}

json estimate_json(const McEstimate& e) {
    return {{"mean", e.mean},
            {"stderr", e.std_error},
            {"n_paths", e.n_paths},
            {"invalid", e.invalid_count},
            {"failed", e.failed}};
}

json optional_number(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct PipelineOutput {
    bool pass = true;
    std::string csv;
    json report = json::object();
};

std::vector<double> ladder_or(const ExperimentConfig& config, double horizon, int first, int last) {
    std::vector<double> ladder = config.ladder ? *config.ladder : dyadic_ladder(horizon, first, last);
    for (double h : ladder) Grid::from_step(horizon, h);
    if (ladder.size() < 2) throw ConfigError("ladder needs at least two h values");
    return ladder;
}

double step_or(const ExperimentConfig& config, double horizon, int k) {
    const double h = config.h.value_or(std::ldexp(horizon, -k));
    Grid::from_step(horizon, h);
    return h;
}

void add_fit(json& report, const RateReport& fit) {
    report["measured_kappa"] = finite_or_null(fit.slope);
    report["intercept"] = finite_or_null(fit.intercept);
    report["fit_residual"] = finite_or_null(fit.fit_residual);
    report["usable_points"] = fit.usable_points;
    report["below_noise_floor"] = fit.below_noise_floor;
    report["fit_note"] = fit.note;
}

// |stderr| < |error|/5 at the finest ladder point; reported, never enforced.
json noise_rule(const std::vector<LadderPoint>& ladder) {
    const auto& last = ladder.back();
    return {{"h_min", last.h},
            {"stderr", last.std_error},
            {"abs_error", std::abs(last.error)},
            {"satisfied", last.std_error < std::abs(last.error) / 5.0}};
}

bool slope_rule(const RateReport& fit, double min_slope, double max_slope, json& rules) {
    if (fit.below_noise_floor) {
        rules["slope"] = "below noise floor";
        return true;
    }
    const bool ok = fit.slope >= min_slope && fit.slope <= max_slope;
    rules["slope"] = ok;
    return ok;
}

PipelineOutput run_killed_bias(const ExperimentConfig& config, const BuiltinProblem& setup,
                               const RateDescription& predicted, const McOptions& options) {
    const SdeProblem& problem = setup.problem;
    if (problem.kind != ProblemKind::killed) throw ConfigError("killed_bias needs a killed problem");
    if (!setup.killed_payoff) throw ConfigError("killed_bias needs a bounded payoff");
    if (!support_gap_satisfied(*setup.killed_payoff, *problem.domain)) {
        throw ConfigError("payoff support must keep distance >= 2 epsilon from the boundary");
    }
    const std::optional<double> reference = config.reference_value ? config.reference_value : setup.known_reference;
    if (!reference) throw ConfigError("killed_bias needs a reference_value for this problem");

    const auto ladder_h = ladder_or(config, problem.horizon, 4, 9);
    const auto ladder = killed_bias_ladder(problem, *setup.killed_payoff, ladder_h, *reference, config.n_paths, options);
    const RateReport fit = fit_rate(ladder, predicted.has_rate ? predicted.exponent : std::nan(""));

    double default_min = 0.0;
    if (predicted.has_rate) {
        default_min = 0.7 * std::min(predicted.exponent, predicted.barrier_exponent.value_or(predicted.exponent));
    }
    const double min_slope = config.min_slope.value_or(default_min);
    const double max_slope = config.max_slope.value_or(kInf);

    PipelineOutput out;
    json rules = json::object();
    bool monotone = true;
    for (const auto& p : ladder) monotone = monotone && p.error <= 3.0 * p.std_error;
    rules["estimate_above_reference"] = monotone;
    out.pass = slope_rule(fit, min_slope, max_slope, rules) && monotone;
    out.csv = ladder_csv(ladder);
    out.report["ladder"] = ladder_json(ladder);
    out.report["reference"] = *reference;
    out.report["noise_rule"] = noise_rule(ladder);
    out.report["acceptance"] = {{"min_slope", min_slope}, {"max_slope", finite_or_null(max_slope)}, {"rules", rules}};
    add_fit(out.report, fit);
    return out;
}

PipelineOutput run_weak_order(const ExperimentConfig& config, const BuiltinProblem& setup,
                              const RateDescription& predicted, const McOptions& options) {
    if (setup.problem.kind == ProblemKind::killed) return run_killed_bias(config, setup, predicted, options);
    const SdeProblem& problem = setup.problem;
    const auto ladder_h = ladder_or(config, problem.horizon, 3, 8);
    const double h_ref = config.h_ref.value_or(std::ldexp(problem.horizon, -12));
    const ReferenceMode mode = reference_mode_from_string(config.reference_mode);
    const auto ladder =
        weak_error_vs_reference(problem, setup.functional, ladder_h, h_ref, config.n_paths, options, mode);
    const RateReport fit = fit_rate(ladder, predicted.has_rate ? predicted.exponent : std::nan(""));

    const double min_slope = config.min_slope.value_or(predicted.has_rate ? 0.7 * predicted.exponent : 0.0);
    const double max_slope = config.max_slope.value_or(kInf);

    PipelineOutput out;
    json rules = json::object();
    out.pass = slope_rule(fit, min_slope, max_slope, rules);
    out.csv = ladder_csv(ladder);
    out.report["ladder"] = ladder_json(ladder);
    out.report["h_ref"] = h_ref;
    out.report["reference_mode"] = std::string(to_string(mode));
    out.report["noise_rule"] = noise_rule(ladder);
    out.report["acceptance"] = {{"min_slope", min_slope}, {"max_slope", finite_or_null(max_slope)}, {"rules", rules}};
    add_fit(out.report, fit);
    return out;
}

PipelineOutput run_identity_check(const ExperimentConfig& config, const BuiltinProblem& setup,
                                  const McOptions& options) {
    const SdeProblem& problem = setup.problem;
    const double h = step_or(config, problem.horizon, 6);
    const Grid grid = Grid::from_step(problem.horizon, h);
    McEstimate direct, weighted;
    double combined = 0.0;
    bool passed = false;
    if (problem.kind == ProblemKind::plain) {
        const auto r = girsanov_identity_check(problem, setup.functional, grid, config.n_paths, options);
        direct = r.direct;
        weighted = r.weighted;
        combined = r.combined_std_error;
        passed = r.passed;
    } else if (problem.kind == ProblemKind::killed) {
        if (!setup.killed_payoff) throw ConfigError("identity_check on a killed problem needs a bounded payoff");
        const auto r = killed_identity_test(problem, *setup.killed_payoff, grid, config.n_paths, options);
        direct = r.direct;
        weighted = r.weighted;
        combined = r.combined_std_error;
        passed = r.passed;
    } else {
        throw ConfigError("identity_check applies to plain and killed problems");
    }
    const std::vector<LadderPoint> row{{h, direct.mean - weighted.mean, combined, weighted.mean}};
    PipelineOutput out;
    out.pass = passed;
    out.csv = ladder_csv(row);
    out.report["ladder"] = ladder_json(row);
    out.report["direct"] = estimate_json(direct);
    out.report["weighted"] = estimate_json(weighted);
    out.report["acceptance"] = {{"rules", {{"within_3_stderr", passed}}}};
    return out;
}

PipelineOutput run_reflected_law(const ExperimentConfig& config, const BuiltinProblem& setup,
                                 const McOptions& options) {
    const SdeProblem& problem = setup.problem;
    if (problem.kind != ProblemKind::reflected) throw ConfigError("reflected_law needs a reflected problem");
    std::vector<double> probe{1.0}, b(1);
    problem.drift.eval(probe, b);
    if (problem.drift.name != "zero" || b[0] != 0.0) {
        throw ConfigError("reflected_law compares against reflected Brownian motion and needs zero drift");
    }
    const double h = step_or(config, problem.horizon, 8);
    const Grid grid = Grid::from_step(problem.horizon, h);
    if (config.n_paths < 100) throw ConfigError("n_paths must be >= 100");

    std::vector<double> samples;
    samples.reserve(config.n_paths);
    const std::size_t batches = std::max<std::size_t>(1, std::min(options.n_batches, config.n_paths));
    for (std::size_t bi = 0; bi < batches; ++bi) {
        RngStream stream(options.master_seed, bi);
        const std::size_t lo = bi * config.n_paths / batches;
        const std::size_t hi = (bi + 1) * config.n_paths / batches;
        for (std::size_t i = lo; i < hi; ++i) {
            samples.push_back(simulate_reflected_em_path(problem, grid, stream).path.terminal()[0]);
        }
    }
    RunningStats rs;
    for (double x : samples) rs.add(x);
    const McEstimate est = to_estimate(rs);

    const double scale = std::abs(problem.diffusion.sigma()(0, 0)) * std::sqrt(problem.horizon);
    const double x0 = problem.x0[0];
    const double exact = stats::folded_normal_mean(x0, scale);
    const auto ks = stats::ks_test(samples, [&](double y) { return stats::folded_normal_cdf(y, x0, scale); });
    const bool mean_ok = std::abs(est.mean - exact) <= config.tolerance;
    const bool ks_ok = ks.p_value >= 1e-3;

    const std::vector<LadderPoint> row{{h, exact - est.mean, est.std_error, exact}};
    PipelineOutput out;
    out.pass = mean_ok && ks_ok;
    out.csv = ladder_csv(row);
    out.report["ladder"] = ladder_json(row);
    out.report["estimate"] = estimate_json(est);
    out.report["exact_mean"] = exact;
    out.report["ks_statistic"] = ks.statistic;
    out.report["ks_p_value"] = ks.p_value;
    out.report["acceptance"] = {{"tolerance", config.tolerance},
                                {"ks_significance", 1e-3},
                                {"rules", {{"mean_within_tolerance", mean_ok}, {"ks", ks_ok}}}};
    return out;
}

PipelineOutput run_weight_diagnostic(const ExperimentConfig& config, const BuiltinProblem& setup,
                                     const McOptions& options) {
    const SdeProblem& problem = setup.problem;
    if (problem.kind != ProblemKind::plain) throw ConfigError("weight_diagnostic applies to plain problems");
    const double h = step_or(config, problem.horizon, 6);
    const Grid grid = Grid::from_step(problem.horizon, h);
    const std::vector<std::size_t> schedule =
        config.moment_schedule ? *config.moment_schedule : std::vector<std::size_t>{1000, 10000, 100000};
    const auto diag = weight_moment_diagnostic(problem, grid, config.moment_p, schedule, options);

    PipelineOutput out;
    out.csv = "n_paths,p,moment,max_share\n";
    json records = json::array();
    for (const auto& r : diag.records) {
        out.csv += std::to_string(r.n_paths) + "," + format_double(r.p) + "," + format_double(r.moment) + "," +
                   format_double(r.max_share) + "\n";
        records.push_back({{"n_paths", r.n_paths},
                           {"p", r.p},
                           {"moment", finite_or_null(r.moment)},
                           {"max_share", r.max_share}});
    }
    out.report["h"] = h;
    out.report["moments"] = records;
    out.report["successive_ratios"] = diag.successive_ratios;
    out.report["stabilized"] = diag.stabilized;
    out.report["heavy_tail_warning"] = diag.heavy_tail_warning;
    out.report["diagnostic"] = diag.message;
    out.report["acceptance"] = {{"rules", {{"informational", true}}}};
    return out;
}

ExperimentResult execute(const ExperimentConfig& config, std::size_t workers) {
    ExperimentResult result;
    try {
        const ResolvedExperiment resolved = resolve_experiment(config);
        const BuiltinProblem& setup = resolved.setup;
        ValidationOptions vopts;
        vopts.girsanov_requested =
            config.pipeline == Pipeline::identity_check || config.pipeline == Pipeline::weight_diagnostic;
        const ValidationResult validation = validate_problem(setup.problem, vopts);
        if (!validation.ok()) throw ConfigError(validation.describe());
        if (config.n_paths == 0 || config.n_batches == 0) throw ConfigError("n_paths and n_batches must be >= 1");

        const RateDescription predicted = predicted_weak_order(setup.problem, setup.functional);
        McOptions options;
        options.master_seed = config.seed;
        options.n_batches = config.n_batches;
        options.workers = workers;

        PipelineOutput out;
        switch (config.pipeline) {
            case Pipeline::weak_order: out = run_weak_order(config, setup, predicted, options); break;
            case Pipeline::killed_bias: out = run_killed_bias(config, setup, predicted, options); break;
            case Pipeline::identity_check: out = run_identity_check(config, setup, options); break;
            case Pipeline::reflected_law: out = run_reflected_law(config, setup, options); break;
            case Pipeline::weight_diagnostic: out = run_weight_diagnostic(config, setup, options); break;
        }

        json& report = out.report;
        report["pipeline"] = std::string(to_string(config.pipeline));
        report["problem"] = setup.name;
        report["kind"] = std::string(to_string(setup.problem.kind));
        report["drift"] = setup.problem.drift.name;
        report["functional"] = setup.functional.name;
        report["seed"] = config.seed;
        report["n_paths"] = config.n_paths;
        report["n_batches"] = config.n_batches;
        report["predicted_kappa"] = predicted.has_rate ? json(predicted.exponent) : json(nullptr);
        report["predicted_barrier_exponent"] = optional_number(predicted.barrier_exponent);
        report["predicted_note"] = predicted.note;
        if (!report.contains("measured_kappa")) report["measured_kappa"] = nullptr;
        report["known_reference"] = optional_number(setup.known_reference);
        std::vector<std::string> warnings = resolved.warnings;
        warnings.insert(warnings.end(), validation.warnings.begin(), validation.warnings.end());
        report["warnings"] = warnings;
        report["pass"] = out.pass;

        result.status = out.pass ? kExitPass : kExitAcceptanceFailure;
        result.csv = std::move(out.csv);
        result.report = report.dump(2) + "\n";
        result.message = out.pass ? "pass" : "acceptance failure";
    } catch (const ConfigError& e) {
        result = {};
        result.status = kExitConfigError;
        result.message = e.what();
    }
    return result;
}

}  // namespace

std::function<double(std::span<const double>)> payoff_by_name(const std::string& name,
                                                              std::optional<double> param) {
    auto f = scalar_fn(name, param);
    return [f](std::span<const double> x) { return f(x[0]); };
}

std::vector<BuiltinProblem> list_builtins() {
    std::vector<BuiltinProblem> out;
    {
        auto b = make_builtin("zero_drift", "Brownian motion, f = tanh(X_T)", drifts::zero(), 0.5,
                              ProblemKind::plain, "tanh");
        b.reference_note = "weak error is identically zero";
        out.push_back(std::move(b));
    }
    {
        auto b = make_builtin("constant_drift", "b = 0.3, f = X_T", drifts::constant(0.3), 0.5, ProblemKind::plain,
                              "identity");
        b.known_reference = 0.5 + 0.3;
        b.reference_note = "x0 + c T; weak error is identically zero";
        out.push_back(std::move(b));
    }
    {
        auto b = make_builtin("ou_drift", "b = -x, f = X_T", drifts::ornstein_uhlenbeck(1.0), 1.0, ProblemKind::plain,
                              "identity");
        b.known_reference = std::exp(-1.0);
        b.reference_note = "E[X_T] = x0 exp(-T); E[X^h_T] = x0 (1-h)^(T/h)";
        b.girsanov_warning = true;
        out.push_back(std::move(b));
    }
    out.push_back(make_builtin("sign_drift", "b = -sign(x), class A, bounded, f = tanh(X_T)", drifts::sign(-1.0), 0.5,
                               ProblemKind::plain, "tanh"));
    out.push_back(make_builtin("step_drift", "b = 1{x > 0}, class A, bounded, f = tanh(X_T)",
                               drifts::step_indicator(1.0, 0.0), 0.5, ProblemKind::plain, "tanh"));
    out.push_back(make_builtin("holder_drift", "b = -sign(x) min(|x|,4)^0.5, f = tanh(X_T)", drifts::holder(0.5), 0.5,
                               ProblemKind::plain, "tanh"));
    {
        auto b = make_builtin("linear_drift", "b = x, f = tanh(X_T)", drifts::linear(), 0.0, ProblemKind::plain,
                              "tanh");
        b.girsanov_warning = true;
        out.push_back(std::move(b));
    }
    {
        auto b = make_builtin("reflected_bm", "Brownian motion reflected at 0 from x0 = 0, f = X_T", drifts::zero(),
                              0.0, ProblemKind::reflected, "identity");
        b.known_reference = std::sqrt(2.0 / std::numbers::pi);
        b.reference_note = "E|W_T| = sqrt(2T/pi); X_T is folded normal";
        out.push_back(std::move(b));
    }
    out.push_back(make_builtin("reflected_capped", "b = -min(x,2) reflected at 0 from x0 = 0, f = tanh(X_T)",
                               drifts::capped_pull(2.0), 0.0, ProblemKind::reflected, "tanh"));
    {
        auto b = make_builtin("killed_bm_interval", "Brownian motion killed outside (-1,1), g = 1", drifts::zero(), 0.0,
                              ProblemKind::killed, "one");
        DomainSpec dom;
        dom.shape = Interval{-1.0, 1.0};
        b.problem.domain = dom;
        b.killed_payoff = make_killed_payoff("one", std::nullopt, dom);
        b.known_reference = reference_exit_probability(dom, 0.0, 1.0, 1.0);
        b.reference_note = "survival probability of Brownian motion in (-1,1)";
        out.push_back(std::move(b));
    }
    {
        auto b = make_builtin("killed_sign_interval", "b = -sign(x) killed outside (-1,1), g = 1{|x| <= 0.5}",
                              drifts::sign(-1.0), 0.0, ProblemKind::killed, "indicator_abs_le", 0.5);
        DomainSpec dom;
        dom.shape = Interval{-1.0, 1.0};
        dom.payoff_support_gap_epsilon = 0.25;
        b.problem.domain = dom;
        b.killed_payoff = make_killed_payoff("indicator_abs_le", 0.5, dom);
        out.push_back(std::move(b));
    }
    return out;
}

BuiltinProblem find_builtin(const std::string& name) {
    for (auto& b : list_builtins()) {
        if (b.name == name) return b;
    }
    throw ConfigError("unknown problem '" + name + "'");
}

ResolvedExperiment resolve_experiment(const ExperimentConfig& config) {
    ResolvedExperiment out;
    if (const auto* name = std::get_if<std::string>(&config.problem)) {
        out.setup = find_builtin(*name);
    } else {
        const auto& spec = std::get<InlineProblem>(config.problem);
        out.setup.name = "inline";
        out.setup.description = "user-composed problem";
        out.setup.problem = inline_problem(spec);
        out.setup.functional = make_functional(FunctionalChoice{});
        out.setup.girsanov_warning = out.setup.problem.drift.growth == GrowthClass::linear;
        if (out.setup.problem.kind == ProblemKind::killed) {
            out.setup.killed_payoff = make_killed_payoff("tanh", std::nullopt, out.setup.problem.domain);
        }
    }
    auto& setup = out.setup;
    if (config.functional) {
        setup.functional = make_functional(*config.functional);
        if (setup.problem.kind == ProblemKind::killed) {
            setup.killed_payoff = make_killed_payoff(config.functional->g, config.functional->g_param,
                                                     setup.problem.domain);
            if (setup.name != "inline") setup.known_reference.reset();
        } else if (setup.name != "inline") {
            setup.known_reference.reset();
        }
    }
    if (setup.problem.kind == ProblemKind::killed && setup.killed_payoff &&
        setup.killed_payoff->name == "one" && setup.problem.drift.name == "zero" && setup.problem.dim() == 1 &&
        setup.problem.domain) {
        setup.known_reference = reference_exit_probability(*setup.problem.domain, setup.problem.x0[0],
                                                           setup.problem.diffusion.sigma()(0, 0),
                                                           setup.problem.horizon);
    }
    if (setup.problem.kind == ProblemKind::killed && setup.killed_payoff && !std::isfinite(setup.killed_payoff->sup_norm)) {
        throw ConfigError("killed payoff '" + setup.killed_payoff->name + "' is unbounded");
    }
    if (setup.girsanov_warning) {
        out.warnings.push_back("linear-growth drift: Girsanov weights have finite moments only for small p T^2");
    }
    return out;
}

ExperimentResult run_experiment_in_memory(const ExperimentConfig& config, std::size_t workers) {
    return execute(config, workers);
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t workers) {
    ExperimentResult result = execute(config, workers);
    if (result.status == kExitConfigError) return result;
    namespace fs = std::filesystem;
    const fs::path dir(config.output.dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    auto write = [&](const std::string& file, const std::string& text) {
        std::ofstream os(dir / file, std::ios::binary);
        os << text;
        if (!os) throw Error("cannot write " + (dir / file).string());
    };
    write(config.output.csv, result.csv);
    write(config.output.json, result.report);
    return result;
}

}  // namespace emweak
