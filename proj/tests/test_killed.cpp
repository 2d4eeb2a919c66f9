// SPDX-License-Identifier: MIT
#include "emweak/drifts.hpp"
#include "emweak/error.hpp"
#include "emweak/killed.hpp"

#include <doctest.h>

#include <cmath>

using namespace emweak;

namespace {

// Survival of Brownian motion from 0 in (-1,1) by the method of images:
// sum_k (-1)^k [Phi((2k+1)/sqrt(T)) - Phi((2k-1)/sqrt(T))] over all integers k.
double images_survival(double horizon) {
    const auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    const double s = std::sqrt(horizon);
    double sum = 0.0;
    for (int k = -60; k <= 60; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        sum += sign * (phi((2.0 * k + 1.0) / s) - phi((2.0 * k - 1.0) / s));
    }
    return sum;
}

constexpr double kSurvivalFromZero = 0.37077742979952390;

DomainSpec interval(double a, double b, double eps = 0.0) {
    DomainSpec d;
    d.shape = Interval{a, b};
    d.payoff_support_gap_epsilon = eps;
    return d;
}

SdeProblem killed_problem(DriftSpec drift, double x0, DomainSpec dom) {
    SdeProblem p;
    p.x0 = {x0};
    p.drift = std::move(drift);
    p.kind = ProblemKind::killed;
    p.domain = std::move(dom);
    return p;
}

KilledPayoff constant_payoff(double c) {
    KilledPayoff g;
    g.name = "const";
    g.g = [c](auto) { return c; };
    g.sup_norm = std::abs(c);
    return g;
}

McOptions seeded(std::uint64_t seed) {
    McOptions o;
    o.master_seed = seed;
    return o;
}

}  // namespace

TEST_CASE("images oracle matches the frozen survival value") {
    CHECK(images_survival(1.0) == doctest::Approx(kSurvivalFromZero).epsilon(1e-14));
}

TEST_CASE("discrete exit time") {
    const auto dom = interval(-1.0, 1.0);
    GridPath path(Grid(1.0, 3), 1);
    path.states = {0.0, 0.5, 0.2, 0.3};
    CHECK_FALSE(discrete_exit_time(path, dom).exited);

    path.states = {0.0, 0.5, 1.2, 0.3};
    const auto r = discrete_exit_time(path, dom);
    CHECK(r.exited);
    REQUIRE(r.exit_step);
    CHECK(*r.exit_step == 2);
    CHECK_FALSE(r.alive_at_T);

    path.states = {0.0, 1.0, 0.0, 0.0};
    CHECK(discrete_exit_time(path, dom).exited);
}

TEST_CASE("wide interval never kills") {
    const auto p = killed_problem(drifts::zero(), 0.0, interval(-1e6, 1e6));
    const auto est = killed_payoff_estimate(p, constant_payoff(1.0), Grid(1.0, 16), 10000, seeded(61));
    CHECK(std::abs(est.mean - 1.0) <= 3.0 * est.std_error);
}

TEST_CASE("zero payoff gives zero") {
    const auto p = killed_problem(drifts::zero(), 0.0, interval(-1.0, 1.0));
    const auto est = killed_payoff_estimate(p, constant_payoff(0.0), Grid(1.0, 16), 10000, seeded(62));
    CHECK(est.mean == 0.0);
}

TEST_CASE("unbounded payoff or missing domain is rejected") {
    auto p = killed_problem(drifts::zero(), 0.0, interval(-1.0, 1.0));
    KilledPayoff id;
    id.name = "identity";
    id.g = [](auto x) { return x[0]; };
    id.sup_norm = INFINITY;
    CHECK_THROWS_AS(killed_payoff_estimate(p, id, Grid(1.0, 4), 100, {}), ConfigError);
    p.domain.reset();
    CHECK_THROWS_AS(killed_payoff_estimate(p, constant_payoff(1.0), Grid(1.0, 4), 100, {}), ConfigError);
}

TEST_CASE("discrete survival decreases toward the continuous value") {
    const auto p = killed_problem(drifts::zero(), 0.0, interval(-1.0, 1.0));
    double previous = 2.0;
    for (int k = 2; k <= 6; k += 2) {
        const auto est = killed_payoff_estimate(p, constant_payoff(1.0), Grid(1.0, std::size_t{1} << k), 200000,
                                                seeded(63 + static_cast<std::uint64_t>(k)));
        CHECK(est.mean < previous);
        CHECK(est.mean >= kSurvivalFromZero - 3.0 * est.std_error);
        previous = est.mean;
    }
}

TEST_CASE("reference survival probability") {
    const auto dom = interval(-1.0, 1.0);
    CHECK(reference_exit_probability(dom, 0.0, 1.0, 1.0) == doctest::Approx(kSurvivalFromZero).epsilon(1e-12));
    CHECK(reference_exit_probability(dom, 1.0, 1.0, 1.0) == 0.0);
    CHECK(reference_exit_probability(dom, -1.0, 1.0, 1.0) == 0.0);
    CHECK(reference_exit_probability(dom, 0.0, 1.0, 1e-6) >= 1.0 - 1e-9);
    // scaling: sigma = 2 over T = 1 equals sigma = 1 over T = 4
    CHECK(reference_exit_probability(dom, 0.3, 2.0, 1.0) ==
          doctest::Approx(reference_exit_probability(dom, 0.3, 1.0, 4.0)).epsilon(1e-12));
    DomainSpec ball;
    ball.shape = Ball{{0.0}, 1.0};
    CHECK_THROWS_AS(reference_exit_probability(ball, 0.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("support gap check") {
    const auto dom = interval(-1.0, 1.0, 0.25);
    KilledPayoff g = constant_payoff(1.0);
    CHECK(support_gap_satisfied(g, dom));
    g.support_gap = 0.5;
    CHECK(support_gap_satisfied(g, dom));
    g.support_gap = 0.4;
    CHECK_FALSE(support_gap_satisfied(g, dom));
}

TEST_CASE("killed identity: zero drift") {
    const auto p = killed_problem(drifts::zero(), 0.0, interval(-1.0, 1.0));
    const auto r = killed_identity_test(p, constant_payoff(1.0), Grid(1.0, 64), 100000, seeded(71));
    CHECK(r.passed);
}

TEST_CASE("killed identity: negative sign drift with an inner indicator payoff") {
    const auto p = killed_problem(drifts::sign(-1.0), 0.0, interval(-1.0, 1.0, 0.25));
    KilledPayoff g;
    g.name = "inner";
    g.g = [](auto x) { return std::abs(x[0]) <= 0.5 ? 1.0 : 0.0; };
    g.support_gap = 0.5;
    REQUIRE(support_gap_satisfied(g, *p.domain));
    const auto r = killed_identity_test(p, g, Grid(1.0, 64), 1000000, seeded(72));
    CHECK(r.passed);
}

TEST_CASE("killed identity: constant drift") {
    const auto p = killed_problem(drifts::constant(0.3), 0.0, interval(-1.0, 1.0));
    const auto r = killed_identity_test(p, constant_payoff(1.0), Grid(1.0, 64), 200000, seeded(73));
    CHECK(r.passed);
}

TEST_CASE("killed identity needs a bounded drift") {
    const auto p = killed_problem(drifts::ornstein_uhlenbeck(), 0.0, interval(-1.0, 1.0));
    CHECK_THROWS_AS(killed_identity_test(p, constant_payoff(1.0), Grid(1.0, 4), 100, {}), ConfigError);
}
