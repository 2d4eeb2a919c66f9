// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <vector>

namespace emweak::stats {

double normal_cdf(double x);

/// CDF of |N(mu, s^2)| at y.
double folded_normal_cdf(double y, double mu, double s);
/// E|N(mu, s^2)|
double folded_normal_mean(double mu, double s);

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct KsResult {
    double statistic;
    double p_value;
};

/// One-sample Kolmogorov-Smirnov test; p-value from the asymptotic law with
/// Stephens' small-sample correction.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace emweak::stats
