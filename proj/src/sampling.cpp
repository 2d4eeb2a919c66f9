// SPDX-License-Identifier: MIT
#include "emweak/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace emweak {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index, std::uint64_t ordinal)
    : seed_(master_seed), stream_(stream_index), ordinal_(ordinal) {}

void RngStream::refill() {
    const std::uint64_t block = ordinal_ >> 1;
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    const auto r = philox4x32(ctr, key);
    lanes_[0] = to_unit(r[0], r[1]);
    lanes_[1] = to_unit(r[2], r[3]);
    block_ = block;
}

double RngStream::uniform() {
    if ((ordinal_ >> 1) != block_) refill();
    const double u = lanes_[ordinal_ & 1];
    ++ordinal_;
    return u;
}

double RngStream::gaussian() {
    if (has_cached_gaussian_) {
        has_cached_gaussian_ = false;
        return cached_gaussian_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_gaussian_ = r * std::sin(theta);
    has_cached_gaussian_ = true;
    return r * std::cos(theta);
}

void RngStream::seek(std::uint64_t ordinal) {
    ordinal_ = ordinal;
    has_cached_gaussian_ = false;
}

std::vector<double> gaussian_vector(RngStream& stream, int dim, double variance) {
    if (dim < 1) throw std::invalid_argument("gaussian_vector: dim must be >= 1");
    if (!(variance > 0.0)) throw std::invalid_argument("gaussian_vector: variance must be > 0");
    std::vector<double> out(static_cast<std::size_t>(dim));
    fill_gaussian(stream, out, std::sqrt(variance));
    return out;
}

void fill_gaussian(RngStream& stream, std::span<double> out, double stddev) {
    for (double& x : out) x = stddev * stream.gaussian();
}

double exponential_from_uniform(double u, double mean) { return -mean * std::log1p(-u); }

double exponential_variate(RngStream& stream, double mean) {
    if (!(mean > 0.0)) throw std::invalid_argument("exponential_variate: mean must be > 0");
    return exponential_from_uniform(stream.uniform(), mean);
}

double bridge_supremum(double a, double endpoint, double v) {
    return 0.5 * (endpoint + std::sqrt(a * a * v + endpoint * endpoint));
}

SupremumSample running_maximum_from_draws(double a, double c, double t, double u, double v) {
    return SupremumSample{u, bridge_supremum(a, a * u + c * t, v), a, c, t};
}

SupremumSample sample_running_maximum(RngStream& stream, double a, double c, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("sample_running_maximum: t must be > 0");
    const double u = std::sqrt(t) * stream.gaussian();
    const double v = exponential_variate(stream, 2.0 * t);
    return running_maximum_from_draws(a, c, t, u, v);
}

}  // namespace emweak
