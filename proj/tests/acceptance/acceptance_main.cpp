// SPDX-License-Identifier: MIT
//
// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status
// when any criterion fails.
#include "emweak/config.hpp"
#include "emweak/drifts.hpp"
#include "emweak/experiment.hpp"
#include "emweak/girsanov.hpp"
#include "emweak/killed.hpp"
#include "emweak/mc.hpp"
#include "emweak/weak_error.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace emweak;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

SdeProblem plain_1d(DriftSpec drift, double x0) {
    SdeProblem p;
    p.x0 = {x0};
    p.drift = std::move(drift);
    return p;
}

PathFunctional tanh_terminal() {
    return terminal_functional("tanh", [](auto v) { return std::tanh(v[0]); });
}

McOptions seeded(std::uint64_t seed) {
    McOptions o;
    o.master_seed = seed;
    return o;
}

// E[X^h_T] for b(x) = -x from the EM mean recursion m_{k+1} = (1 - h) m_k.
double ou_em_mean(double x0, std::size_t n) {
    const double h = 1.0 / static_cast<double>(n);
    double m = x0;
    for (std::size_t k = 0; k < n; ++k) m *= 1.0 - h;
    return m;
}

json run_pipeline(const ExperimentConfig& c, int& status) {
    const auto r = run_experiment_in_memory(c);
    status = r.status;
    if (r.report.empty()) return json{{"message", r.message}};
    return json::parse(r.report);
}

Outcome girsanov_identity() {
    Outcome o{true, ""};
    const std::vector<DriftSpec> drifts{drifts::sign(-1.0), drifts::step_indicator(1.0, 0.0), drifts::constant(0.3)};
    for (const auto& d : drifts) {
        const auto r = girsanov_identity_check(plain_1d(d, 0.5), tanh_terminal(), Grid(1.0, 64), 1000000, seeded(1));
        o.pass = o.pass && r.passed;
        o.detail += d.name + " z=" + fmt("%.2f", r.z_score) + " ";
    }
    return o;
}

Outcome weight_normalization() {
    Outcome o{true, ""};
    const std::vector<DriftSpec> drifts{drifts::sign(-1.0), drifts::step_indicator(1.0, 0.0), drifts::holder(0.5),
                                        drifts::constant(0.3)};
    for (const auto& d : drifts) {
        const auto p = plain_1d(d, 0.5);
        for (std::size_t n : {std::size_t{16}, std::size_t{256}}) {
            const Grid g(1.0, n);
            const PathSampler z = [&](RngStream& s) -> std::optional<double> {
                return std::exp(girsanov_log_weight(p, simulate_bm_path(s, g, 1)));
            };
            const auto est = run_mc(z, 1000000, seeded(2 + n));
            const double dev = (est.mean - 1.0) / est.std_error;
            o.pass = o.pass && std::abs(dev) <= 3.0 && !est.failed;
            o.detail += d.name + "@" + std::to_string(n) + " " + fmt("%.2f", dev) + "se ";
        }
    }
    return o;
}

Outcome exactness_oracles() {
    Outcome o{true, ""};
    const auto ladder = dyadic_ladder(1.0, 3, 8);
    const double h_ref = std::ldexp(1.0, -12);
    for (const auto& d : {drifts::zero(), drifts::constant(0.3)}) {
        const auto pts = weak_error_vs_reference(plain_1d(d, 0.5), tanh_terminal(), ladder, h_ref, 100000, seeded(3));
        double worst = 0.0;
        for (const auto& pt : pts) worst = std::max(worst, std::abs(pt.error) / pt.std_error);
        o.pass = o.pass && worst <= 3.0;
        o.detail += d.name + " max|err|/se=" + fmt("%.2f", worst) + " ";
    }

    const auto ou = plain_1d(drifts::ornstein_uhlenbeck(1.0), 1.0);
    const auto id = terminal_functional("id", [](auto v) { return v[0]; });
    double worst = 0.0;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const Grid g = Grid::from_step(1.0, ladder[i]);
        const auto est = direct_estimate(ou, id, g, 100000, seeded(30 + i));
        worst = std::max(worst, std::abs(est.mean - ou_em_mean(1.0, g.n_steps())) / est.std_error);
    }
    o.pass = o.pass && worst <= 3.0;
    o.detail += "ou max|mean-closed|/se=" + fmt("%.2f", worst) + " ";

    // coupled differences resolve the bias E[X_T] - E[X^h_T] at every rung
    const auto pts = weak_error_vs_reference(ou, id, ladder, h_ref, 100000, seeded(4), ReferenceMode::coupled);
    bool decreasing = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double closed = ou_em_mean(1.0, 4096) - ou_em_mean(1.0, static_cast<std::size_t>(std::lround(1.0 / pts[i].h)));
        o.pass = o.pass && std::abs(pts[i].error - closed) <= 3.0 * pts[i].std_error;
        if (i > 0) decreasing = decreasing && std::abs(pts[i].error) < std::abs(pts[i - 1].error);
    }
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        const double prev = std::exp(-1.0) - ou_em_mean(1.0, static_cast<std::size_t>(std::lround(1.0 / ladder[i - 1])));
        const double cur = std::exp(-1.0) - ou_em_mean(1.0, static_cast<std::size_t>(std::lround(1.0 / ladder[i])));
        decreasing = decreasing && cur < prev;
    }
    o.pass = o.pass && decreasing;
    o.detail += decreasing ? "ou bias decreasing" : "ou bias not decreasing";
    return o;
}

Outcome reflected_law() {
    ExperimentConfig c;
    c.problem = std::string("reflected_bm");
    c.pipeline = Pipeline::reflected_law;
    c.h = std::ldexp(1.0, -8);
    c.n_paths = 100000;
    c.tolerance = 0.01;
    c.seed = 5;
    int status = 0;
    const auto r = run_pipeline(c, status);
    Outcome o{status == kExitPass, ""};
    if (r.contains("estimate")) {
        o.detail = "mean=" + fmt("%.4f", r["estimate"]["mean"].get<double>()) +
                   " exact=" + fmt("%.4f", r["exact_mean"].get<double>()) +
                   " KS p=" + fmt("%.3g", r["ks_p_value"].get<double>());
    }
    return o;
}

std::string slope_detail(const json& r) {
    std::string s;
    if (r.contains("below_noise_floor") && r["below_noise_floor"].get<bool>()) return "below noise floor";
    if (r.contains("measured_kappa") && r["measured_kappa"].is_number()) {
        s += "kappa_hat=" + fmt("%.3f", r["measured_kappa"].get<double>());
    }
    if (r.contains("predicted_kappa") && r["predicted_kappa"].is_number()) {
        s += " predicted=" + fmt("%.3f", r["predicted_kappa"].get<double>());
    }
    if (r.contains("noise_rule")) s += r["noise_rule"]["satisfied"].get<bool>() ? " noise rule met" : " noise rule unmet";
    if (r.contains("message")) s += r["message"].get<std::string>();
    return s;
}

Outcome reflected_order() {
    ExperimentConfig c;
    c.problem = std::string("reflected_capped");
    c.pipeline = Pipeline::weak_order;
    c.reference_mode = "coupled";
    c.ladder = dyadic_ladder(1.0, 3, 7);
    c.h_ref = std::ldexp(1.0, -12);
    c.n_paths = 100000;
    c.min_slope = 0.35;
    c.seed = 6;
    int status = 0;
    const auto r = run_pipeline(c, status);
    return {status == kExitPass, slope_detail(r)};
}

Outcome killed_bias() {
    ExperimentConfig c;
    c.problem = std::string("killed_bm_interval");
    c.pipeline = Pipeline::killed_bias;
    c.ladder = dyadic_ladder(1.0, 4, 9);
    c.n_paths = 1000000;
    c.min_slope = 0.35;
    c.max_slope = 0.65;
    c.seed = 7;
    int status = 0;
    const auto r = run_pipeline(c, status);
    std::string detail = slope_detail(r);
    if (r.contains("reference")) detail += " reference=" + fmt("%.6f", r["reference"].get<double>());
    if (r.contains("acceptance")) {
        detail += r["acceptance"]["rules"]["estimate_above_reference"].get<bool>() ? " monotone" : " not monotone";
    }
    return {status == kExitPass, detail};
}

Outcome irregular_order() {
    ExperimentConfig c;
    c.problem = std::string("sign_drift");
    c.pipeline = Pipeline::weak_order;
    c.reference_mode = "coupled";
    c.h_ref = std::ldexp(1.0, -12);
    c.n_paths = 100000;
    c.min_slope = 0.2;
    c.seed = 8;
    int status = 0;
    const auto r = run_pipeline(c, status);
    return {status == kExitPass, slope_detail(r)};
}

Outcome rate_fitter() {
    Outcome o{true, ""};
    for (double kappa : {0.25, 0.5, 1.0}) {
        std::vector<LadderPoint> ladder;
        for (int k = 3; k <= 8; ++k) {
            const double h = std::ldexp(1.0, -k);
            ladder.push_back({h, 0.5 * std::pow(h, kappa), 0.0, 0.0});
        }
        const double err = std::abs(fit_rate(ladder).slope - kappa);
        o.pass = o.pass && err <= 1e-9;
        o.detail += fmt("%.2f", kappa) + ":" + fmt("%.1e", err) + " ";
    }
    return o;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

Outcome determinism_and_merge() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "emweak_acceptance_determinism";
    fs::remove_all(base);

    ExperimentConfig c = parse_config(R"({"problem": "sign_drift", "pipeline": "weak_order",
        "reference_mode": "independent", "ladder": [0.125, 0.0625, 0.03125], "h_ref": 0.001953125,
        "n_paths": 20000, "seed": 9})");
    c.output.dir = (base / "a").string();
    const auto ra = run_experiment(c, 1);
    c.output.dir = (base / "b").string();
    const auto rb = run_experiment(c, 2);
    const std::string a = read_file(base / "a" / "ladder.csv");
    const bool identical = ra.status != kExitConfigError && !a.empty() && a == read_file(base / "b" / "ladder.csv");

    const MultiPathSampler sampler = [](RngStream& s, std::span<double> out) {
        out[0] = std::exp(s.gaussian());
        return true;
    };
    McOptions opts = seeded(10);
    opts.n_batches = 64;
    const auto batches = run_mc_batches(sampler, 1, 200000, opts);
    RunningStats forward, reverse, paired;
    for (const auto& b : batches) forward.merge(b[0]);
    for (auto it = batches.rbegin(); it != batches.rend(); ++it) reverse.merge((*it)[0]);
    std::vector<RunningStats> level;
    for (const auto& b : batches) level.push_back(b[0]);
    while (level.size() > 1) {
        std::vector<RunningStats> next;
        for (std::size_t i = 0; i < level.size(); i += 2) {
            RunningStats s = level[i];
            if (i + 1 < level.size()) s.merge(level[i + 1]);
            next.push_back(s);
        }
        level = std::move(next);
    }
    paired = level[0];
    const auto ef = to_estimate(forward), er = to_estimate(reverse), ep = to_estimate(paired);
    const double worst = std::max({rel_diff(ef.mean, er.mean), rel_diff(ef.mean, ep.mean),
                                   rel_diff(ef.std_error, er.std_error), rel_diff(ef.std_error, ep.std_error)});
    fs::remove_all(base);
    return {identical && worst < 1e-12 && rb.status == ra.status,
            std::string(identical ? "CSV byte-identical" : "CSV differs") + ", regrouping rel diff " +
                fmt("%.1e", worst)};
}

Outcome weight_blowup() {
    ExperimentConfig c;
    c.pipeline = Pipeline::weight_diagnostic;
    c.moment_p = 2.0;
    c.moment_schedule = std::vector<std::size_t>{10000, 100000, 1000000};
    c.seed = 11;
    int status = 0;
    c.problem = std::string("linear_drift");
    const auto lin = run_pipeline(c, status);
    const bool flagged = status == kExitPass && lin.value("heavy_tail_warning", false);
    c.problem = std::string("sign_drift");
    const auto sgn = run_pipeline(c, status);
    const bool stable = status == kExitPass && sgn.value("stabilized", false);
    std::string detail = std::string(flagged ? "b=x flagged" : "b=x not flagged") + ", " +
                         (stable ? "sign stabilised" : "sign not stabilised");
    if (sgn.contains("successive_ratios")) {
        detail += " ratios";
        for (const auto& r : sgn["successive_ratios"]) detail += " " + fmt("%.3f", r.get<double>());
    }
    return {flagged && stable, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Girsanov identity", girsanov_identity},
        {"weight normalization", weight_normalization},
        {"exactness oracles", exactness_oracles},
        {"reflected law", reflected_law},
        {"reflected weak order", reflected_order},
        {"killed-diffusion bias", killed_bias},
        {"irregular-drift weak order", irregular_order},
        {"rate-fitter correctness", rate_fitter},
        {"determinism and merge", determinism_and_merge},
        {"weight blow-up diagnostic", weight_blowup},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s  %2zu  %-28s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
