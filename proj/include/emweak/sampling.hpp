// SPDX-License-Identifier: MIT
//
// Counter-based random streams and the variates used by the schemes:
// Gaussian vectors, exponentials, and the exact joint draw of a Brownian
// increment with the running maximum of a drifted Brownian motion.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace emweak {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Random stream addressed by (master_seed, stream_index, ordinal).
///
/// The ordinal counts uniforms; uniform number k of a stream is a pure
/// function of the triple, so any draw can be regenerated by seek(). Distinct
/// stream indices occupy disjoint counter ranges under the same key.
/// A stream is a value: copy it to fork, never share one between threads.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index, std::uint64_t ordinal = 0);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal (Box-Muller; the sine branch is cached).
    double gaussian();

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_; }
    std::uint64_t ordinal() const { return ordinal_; }
    void seek(std::uint64_t ordinal);

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t ordinal_;
    std::uint64_t block_ = ~std::uint64_t{0};
    std::array<double, 2> lanes_{};
    double cached_gaussian_ = 0.0;
    bool has_cached_gaussian_ = false;
};

/// i.i.d. N(0, variance) coordinates. Throws std::invalid_argument for
/// dim < 1 or variance <= 0.
std::vector<double> gaussian_vector(RngStream& stream, int dim, double variance);
/// Fill `out` with i.i.d. N(0, stddev^2).
void fill_gaussian(RngStream& stream, std::span<double> out, double stddev);

/// Exponential with the given mean (inverse CDF). Throws for mean <= 0.
double exponential_variate(RngStream& stream, double mean);
/// Inverse CDF of Exponential(mean) at u in [0, 1).
double exponential_from_uniform(double u, double mean);

/// (W_t, sup_{s<=t}(a W_s + c s)) drawn jointly.
struct SupremumSample {
    double increment_U;
    double running_max_Y;
    double scale_a;
    double drift_c;
    double duration_t;
};

/// Supremum over [0, t] of a process with scale |a| conditioned to move by
/// `endpoint` over the interval, given v ~ Exponential(mean 2t):
/// (endpoint + sqrt(a^2 v + endpoint^2)) / 2.
double bridge_supremum(double a, double endpoint, double v);

/// Deterministic part of sample_running_maximum for given draws U and V.
SupremumSample running_maximum_from_draws(double a, double c, double t, double u, double v);

/// Draws U ~ N(0, t) then V ~ Exponential(mean 2t) from `stream`, and returns
/// Y = (aU + ct + sqrt(a^2 V + (aU + ct)^2)) / 2. Throws for t <= 0.
SupremumSample sample_running_maximum(RngStream& stream, double a, double c, double t);

}  // namespace emweak
