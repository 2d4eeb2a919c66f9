// SPDX-License-Identifier: MIT
#include "emweak/mc.hpp"

#include "emweak/error.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace emweak {

void RunningStats::add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
}

void RunningStats::merge(const RunningStats& other) {
    invalid += other.invalid;
    if (other.count == 0) return;
    if (count == 0) {
        count = other.count;
        mean = other.mean;
        m2 = other.m2;
        return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double n = na + nb;
    const double delta = other.mean - mean;
    mean += delta * (nb / n);
    m2 += other.m2 + delta * delta * (na * nb / n);
    count += other.count;
}

double McEstimate::sample_std() const { return std_error * std::sqrt(static_cast<double>(n_paths)); }

McEstimate to_estimate(const RunningStats& s) {
    McEstimate e;
    e.mean = s.mean;
    e.n_paths = s.count;
    e.invalid_count = s.invalid;
    e.std_error = s.count > 1 ? std::sqrt(s.m2 / static_cast<double>(s.count - 1) / static_cast<double>(s.count)) : 0.0;
    const double total = static_cast<double>(s.count + s.invalid);
    e.failed = total == 0.0 || static_cast<double>(s.invalid) / total > kMaxInvalidFraction;
    return e;
}

std::size_t resolve_workers(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("EMWEAK_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t salt) {
    // splitmix64 finalizer over the pair
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<std::vector<RunningStats>> run_mc_batches(const MultiPathSampler& sampler, std::size_t n_outputs,
                                                      std::size_t n_paths, const McOptions& options) {
    const std::size_t n_batches = std::max<std::size_t>(1, std::min(options.n_batches, n_paths));
    std::vector<std::vector<RunningStats>> batches(n_batches, std::vector<RunningStats>(n_outputs));

    auto run_batch = [&](std::size_t b) {
        const std::size_t begin = b * n_paths / n_batches;
        const std::size_t end = (b + 1) * n_paths / n_batches;
        RngStream stream(options.master_seed, b);
        std::vector<double> out(n_outputs);
        auto& stats = batches[b];
        for (std::size_t i = begin; i < end; ++i) {
            bool ok = sampler(stream, out);
            if (ok) {
                for (double v : out) {
                    if (!std::isfinite(v)) {
                        ok = false;
                        break;
                    }
                }
            }
            if (ok) {
                for (std::size_t j = 0; j < n_outputs; ++j) stats[j].add(out[j]);
            } else {
                for (auto& s : stats) s.add_invalid();
            }
        }
        if (n_outputs > 0 && stats[0].count == 0) {
            throw McError("batch " + std::to_string(b) + " produced no valid sample");
        }
    };

    const std::size_t workers = std::min(resolve_workers(options.workers), n_batches);
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_batches; ++b) run_batch(b);
        return batches;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t b = next++; b < n_batches; b = next++) {
                try {
                    run_batch(b);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return batches;
}

std::vector<McEstimate> run_mc_multi(const MultiPathSampler& sampler, std::size_t n_outputs, std::size_t n_paths,
                                     const McOptions& options) {
    if (n_paths < 100) throw std::invalid_argument("run_mc: n_paths must be >= 100");
    const auto batches = run_mc_batches(sampler, n_outputs, n_paths, options);
    std::vector<RunningStats> total(n_outputs);
    // merge in batch order so the result is independent of scheduling
    for (const auto& batch : batches) {
        for (std::size_t j = 0; j < n_outputs; ++j) total[j].merge(batch[j]);
    }
    std::vector<McEstimate> out;
    out.reserve(n_outputs);
    for (const auto& s : total) out.push_back(to_estimate(s));
    return out;
}

McEstimate run_mc(const PathSampler& sampler, std::size_t n_paths, const McOptions& options) {
    const MultiPathSampler multi = [&sampler](RngStream& stream, std::span<double> out) {
        const auto v = sampler(stream);
        if (!v) return false;
        out[0] = *v;
        return true;
    };
    return run_mc_multi(multi, 1, n_paths, options).front();
}

McEstimate run_mc(const PathSampler& sampler, std::size_t n_paths, std::size_t n_batches, std::uint64_t master_seed) {
    McOptions options;
    options.n_batches = n_batches;
    options.master_seed = master_seed;
    return run_mc(sampler, n_paths, options);
}

RateReport fit_rate(std::span<const LadderPoint> ladder, double predicted) {
    RateReport report;
    report.ladder.assign(ladder.begin(), ladder.end());
    report.predicted = predicted;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i].h > 0.0)) throw ConfigError("ladder h must be > 0");
        if (i > 0 && !(ladder[i].h < ladder[i - 1].h)) throw ConfigError("ladder h values must be strictly decreasing");
    }

    report.used.resize(ladder.size());
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const auto& p = ladder[i];
        const bool usable = std::isfinite(p.error) && std::abs(p.error) > 3.0 * p.std_error && p.error != 0.0;
        report.used[i] = usable;
        if (usable) {
            xs.push_back(std::log(p.h));
            ys.push_back(std::log(std::abs(p.error)));
        }
    }
    report.usable_points = xs.size();
    const std::size_t excluded = ladder.size() - xs.size();
    if (2 * excluded > ladder.size()) {
        report.below_noise_floor = true;
        report.note = "error below noise floor";
        return report;
    }
    if (xs.size() < 2) throw Error("degenerate ladder: fewer than two usable points");
    if (xs.size() < 4) report.note = "fewer than four usable points";

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    report.slope = sxy / sxx;
    report.intercept = my - report.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (report.intercept + report.slope * xs[i]);
        rss += r * r;
    }
    report.fit_residual = std::sqrt(rss / n);
    return report;
}

}  // namespace emweak
