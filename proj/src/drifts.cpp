// SPDX-License-Identifier: MIT
#include "emweak/drifts.hpp"

#include "emweak/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace emweak::drifts {

namespace {

std::string with_param(const char* base, double value) {
    std::ostringstream os;
    os << base << "(" << value << ")";
    return os.str();
}

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

DriftSpec zero(std::size_t dim) {
    DriftSpec d;
    d.name = "zero";
    d.eval = [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
    d.holder_alpha = 1.0;
    d.class_a_components.assign(dim, true);
    d.growth = GrowthClass::bounded;
    return d;
}

DriftSpec constant(double c, std::size_t dim) {
    DriftSpec d;
    d.name = with_param("constant", c);
    d.eval = [c](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), c); };
    d.holder_alpha = 1.0;
    d.class_a_components.assign(dim, true);
    d.growth = GrowthClass::bounded;
    return d;
}

DriftSpec ornstein_uhlenbeck(double rate, std::size_t dim) {
    DriftSpec d;
    d.name = with_param("ou", rate);
    d.eval = [rate](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -rate * x[i];
    };
    d.holder_alpha = 1.0;
    d.class_a_components.assign(dim, true);
    d.growth = GrowthClass::linear;
    return d;
}

DriftSpec linear(std::size_t dim) {
    DriftSpec d;
    d.name = "linear";
    d.eval = [](std::span<const double> x, std::span<double> out) { std::copy(x.begin(), x.end(), out.begin()); };
    d.holder_alpha = 1.0;
    d.class_a_components.assign(dim, true);
    d.growth = GrowthClass::linear;
    return d;
}

DriftSpec sign(double scale, std::size_t dim) {
    DriftSpec d;
    d.name = with_param("sign", scale);
    d.eval = [scale](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * sgn(x[i]);
    };
    d.class_a_components.assign(dim, true);
    d.growth = GrowthClass::bounded;
    return d;
}

DriftSpec step_indicator(double level, double threshold, std::size_t dim) {
    DriftSpec d;
    d.name = with_param("step", level);
    d.eval = [level, threshold](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > threshold ? level : 0.0;
    };
    d.class_a_components.assign(dim, true);
    d.growth = GrowthClass::bounded;
    return d;
}

DriftSpec holder(double alpha, double clip, std::size_t dim) {
    DriftSpec d;
    d.name = with_param("holder", alpha);
    d.eval = [alpha, clip](std::span<const double> x, std::span<double> out) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = -sgn(x[i]) * std::pow(std::min(std::abs(x[i]), clip), alpha);
    };
    d.holder_alpha = alpha;
    // monotone in each coordinate as well
    d.class_a_components.assign(dim, true);
    d.growth = GrowthClass::bounded;
    return d;
}

DriftSpec capped_pull(double cap) {
    DriftSpec d;
    d.name = with_param("capped_pull", cap);
    d.eval = [cap](std::span<const double> x, std::span<double> out) { out[0] = -std::min(x[0], cap); };
    d.holder_alpha = 1.0;
    d.class_a_components.assign(1, true);
    d.growth = GrowthClass::bounded;
    return d;
}

DriftSpec by_name(const std::string& name, double param, std::size_t dim) {
    const bool dflt = std::isnan(param);
    if (name == "zero") return zero(dim);
    if (name == "constant") return constant(dflt ? 0.3 : param, dim);
    if (name == "ou") return ornstein_uhlenbeck(dflt ? 1.0 : param, dim);
    if (name == "linear") return linear(dim);
    if (name == "sign") return sign(dflt ? 1.0 : param, dim);
    if (name == "step") return step_indicator(dflt ? 1.0 : param, 0.0, dim);
    if (name == "holder") return holder(dflt ? 0.5 : param, 4.0, dim);
    if (name == "capped_pull") {
        if (dim != 1) throw ConfigError("capped_pull drift is one-dimensional");
        return capped_pull(dflt ? 2.0 : param);
    }
    throw ConfigError("unknown drift '" + name + "'");
}

}  // namespace emweak::drifts
