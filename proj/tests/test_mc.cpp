// SPDX-License-Identifier: MIT
#include "emweak/drifts.hpp"
#include "emweak/error.hpp"
#include "emweak/mc.hpp"
#include "emweak/weak_error.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>

using namespace emweak;

namespace {

McOptions seeded(std::uint64_t seed, std::size_t batches = 16, std::size_t workers = 1) {
    McOptions o;
    o.master_seed = seed;
    o.n_batches = batches;
    o.workers = workers;
    return o;
}

double ou_em_mean(double x0, double horizon, std::size_t n) {
    const double h = horizon / static_cast<double>(n);
    double m = x0;
    for (std::size_t k = 0; k < n; ++k) m *= 1.0 - h;
    return m;
}

SdeProblem problem_1d(DriftSpec drift, double x0) {
    SdeProblem p;
    p.x0 = {x0};
    p.drift = std::move(drift);
    return p;
}

std::vector<LadderPoint> synthetic(double c, double kappa) {
    std::vector<LadderPoint> out;
    for (int k = 3; k <= 8; ++k) {
        const double h = std::ldexp(1.0, -k);
        out.push_back({h, c * std::pow(h, kappa), 0.0, 0.0});
    }
    return out;
}

}  // namespace

TEST_CASE("running stats merge is associative and matches a single pass") {
    RngStream s(81, 0);
    std::vector<double> xs(3000);
    for (auto& x : xs) x = 5.0 + s.gaussian();

    RunningStats all;
    for (double x : xs) all.add(x);

    RunningStats a, b, c;
    for (std::size_t i = 0; i < 1000; ++i) a.add(xs[i]);
    for (std::size_t i = 1000; i < 1700; ++i) b.add(xs[i]);
    for (std::size_t i = 1700; i < 3000; ++i) c.add(xs[i]);

    RunningStats left = a;
    left.merge(b);
    left.merge(c);
    RunningStats bc = b;
    bc.merge(c);
    RunningStats right = a;
    right.merge(bc);

    CHECK(left.count == 3000);
    CHECK(left.mean == doctest::Approx(right.mean).epsilon(1e-12));
    CHECK(left.m2 == doctest::Approx(right.m2).epsilon(1e-12));
    CHECK(left.mean == doctest::Approx(all.mean).epsilon(1e-12));
    CHECK(left.m2 == doctest::Approx(all.m2).epsilon(1e-12));

    RunningStats empty;
    empty.merge(a);
    CHECK(empty.mean == a.mean);
    CHECK(empty.m2 == a.m2);
}

TEST_CASE("constant sampler") {
    const PathSampler seven = [](RngStream&) -> std::optional<double> { return 7.0; };
    const auto est = run_mc(seven, 1000, 8, 1);
    CHECK(est.mean == 7.0);
    CHECK(est.std_error == 0.0);
    CHECK(est.n_paths == 1000);
}

TEST_CASE("identical seeds give bit-identical estimates, regardless of workers") {
    const PathSampler g = [](RngStream& s) -> std::optional<double> { return s.gaussian() + s.uniform(); };
    const auto a = run_mc(g, 50000, seeded(82, 16, 1));
    const auto b = run_mc(g, 50000, seeded(82, 16, 1));
    const auto c = run_mc(g, 50000, seeded(82, 16, 4));
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.mean == c.mean);
    CHECK(a.std_error == c.std_error);
}

TEST_CASE("standard normal sampler") {
    const PathSampler g = [](RngStream& s) -> std::optional<double> { return s.gaussian(); };
    const auto est = run_mc(g, 1000000, seeded(83));
    CHECK(std::abs(est.mean) < 0.003);
    CHECK(est.std_error == doctest::Approx(0.001).epsilon(0.01));
}

TEST_CASE("invalid samples are counted and can fail the estimate") {
    const PathSampler sometimes = [](RngStream& s) -> std::optional<double> {
        if (s.uniform() < 0.01) return std::nullopt;
        return 1.0;
    };
    const auto est = run_mc(sometimes, 10000, seeded(84));
    CHECK(est.invalid_count > 0);
    CHECK(est.failed);

    const PathSampler never = [](RngStream&) -> std::optional<double> { return std::nullopt; };
    CHECK_THROWS_AS(run_mc(never, 1000, seeded(85)), McError);

    const PathSampler nan = [](RngStream&) -> std::optional<double> { return NAN; };
    CHECK_THROWS_AS(run_mc(nan, 1000, seeded(85)), McError);

    CHECK_THROWS_AS(run_mc(nan, 10, seeded(85)), std::invalid_argument);
}

TEST_CASE("derived seeds differ per salt and are stable") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("worker count from the environment") {
    CHECK(resolve_workers(3) == 3);
    setenv("EMWEAK_WORKERS", "2", 1);
    CHECK(resolve_workers(0) == 2);
    unsetenv("EMWEAK_WORKERS");
    CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("fit_rate recovers exact power laws") {
    for (double kappa : {0.25, 0.5, 1.0}) {
        const auto fit = fit_rate(synthetic(0.5, kappa), kappa);
        CHECK(std::abs(fit.slope - kappa) < 1e-9);
        CHECK(fit.usable_points == 6);
        CHECK(fit.fit_residual < 1e-9);
    }
    const auto fit = fit_rate(synthetic(3.0, 1.0));
    CHECK(std::abs(fit.slope - 1.0) < 1e-9);
    CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("fit_rate noise floor and degenerate ladders") {
    auto ladder = synthetic(1.0, 0.5);
    for (auto& p : ladder) p.std_error = 1.0;
    const auto floor = fit_rate(ladder);
    CHECK(floor.below_noise_floor);
    CHECK(std::isnan(floor.slope));
    CHECK(floor.note == "error below noise floor");

    auto short_ladder = synthetic(1.0, 0.5);
    short_ladder.resize(3);
    const auto few = fit_rate(short_ladder);
    CHECK(few.usable_points == 3);
    CHECK_FALSE(few.note.empty());

    auto one = synthetic(1.0, 0.5);
    one.resize(1);
    CHECK_THROWS_AS(fit_rate(one), Error);

    auto unordered = synthetic(1.0, 0.5);
    std::swap(unordered[0], unordered[1]);
    CHECK_THROWS_AS(fit_rate(unordered), ConfigError);
}

TEST_CASE("weak error vs reference: zero and constant drift are exact") {
    const auto f = terminal_functional("tanh", [](auto v) { return std::tanh(v[0]); });
    const auto ladder = dyadic_ladder(1.0, 3, 6);
    for (const auto& drift : {drifts::zero(), drifts::constant(0.3)}) {
        const auto p = problem_1d(drift, 0.5);
        const auto pts = weak_error_vs_reference(p, f, ladder, std::ldexp(1.0, -9), 20000, seeded(86));
        for (const auto& pt : pts) CHECK(std::abs(pt.error) <= 3.0 * pt.std_error);

        const auto coupled = weak_error_vs_reference(p, f, ladder, std::ldexp(1.0, -9), 2000, seeded(87),
                                                     ReferenceMode::coupled);
        for (const auto& pt : coupled) CHECK(std::abs(pt.error) < 1e-12);
    }
}

TEST_CASE("weak error vs reference: OU matches the closed-form ladder") {
    const auto p = problem_1d(drifts::ornstein_uhlenbeck(1.0), 1.0);
    const auto f = terminal_functional("id", [](auto v) { return v[0]; });
    const auto ladder = dyadic_ladder(1.0, 3, 8);
    const double ref_mean = ou_em_mean(1.0, 1.0, 4096);
    for (auto mode : {ReferenceMode::independent, ReferenceMode::coupled}) {
        const auto pts = weak_error_vs_reference(p, f, ladder, std::ldexp(1.0, -12), 20000, seeded(88), mode);
        for (const auto& pt : pts) {
            const double expected = ref_mean - ou_em_mean(1.0, 1.0, static_cast<std::size_t>(std::lround(1.0 / pt.h)));
            CHECK(std::abs(pt.error - expected) <= 3.0 * pt.std_error);
        }
    }
}

TEST_CASE("weak error ladder validation") {
    const auto p = problem_1d(drifts::zero(), 0.0);
    const auto f = terminal_functional("id", [](auto v) { return v[0]; });
    const std::vector<double> bad{0.3, 0.1};
    CHECK_THROWS_AS(weak_error_vs_reference(p, f, bad, 1.0 / 1024, 100, {}), ConfigError);
    const std::vector<double> coarse_ref{0.25, 0.125};
    CHECK_THROWS_AS(weak_error_vs_reference(p, f, coarse_ref, 1.0 / 32, 100, {}), ConfigError);
    const std::vector<double> increasing{0.125, 0.25};
    CHECK_THROWS_AS(weak_error_vs_reference(p, f, increasing, 1.0 / 1024, 100, {}), ConfigError);
}
