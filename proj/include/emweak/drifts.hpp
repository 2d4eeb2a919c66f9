// SPDX-License-Identifier: MIT
//
// Built-in drifts with their regularity declarations. Every entry here is
// declared correctly so tests never depend on user-provided metadata.
#pragma once

#include "emweak/model.hpp"

#include <cstddef>
#include <string>

namespace emweak::drifts {

/// b = 0
DriftSpec zero(std::size_t dim = 1);
/// b = c in every coordinate.
DriftSpec constant(double c, std::size_t dim = 1);
/// b(x) = -rate * x  (Ornstein-Uhlenbeck, linear growth)
DriftSpec ornstein_uhlenbeck(double rate = 1.0, std::size_t dim = 1);
/// b(x) = x (linear growth; Girsanov weights have infinite high moments)
DriftSpec linear(std::size_t dim = 1);
/// b_i(x) = scale * sign(x_i); class A (monotone), bounded.
DriftSpec sign(double scale = 1.0, std::size_t dim = 1);
/// b_i(x) = level * 1{x_i > threshold}; class A, bounded.
DriftSpec step_indicator(double level = 1.0, double threshold = 0.0, std::size_t dim = 1);
/// b_i(x) = -sign(x_i) * min(|x_i|, clip)^alpha; alpha-Hoelder, bounded.
DriftSpec holder(double alpha, double clip = 4.0, std::size_t dim = 1);
/// b(x) = -min(x, cap); Lipschitz. Bounded on the reflected state space [0, inf).
DriftSpec capped_pull(double cap = 2.0);

/// Look up a catalogue drift by name, with parameters taken from `param`
/// (meaning depends on the drift; NaN selects the default).
DriftSpec by_name(const std::string& name, double param, std::size_t dim);

}  // namespace emweak::drifts
