// SPDX-License-Identifier: MIT
#include "emweak/model.hpp"

#include "emweak/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace emweak {

std::string_view to_string(GrowthClass g) {
    switch (g) {
        case GrowthClass::bounded: return "bounded";
        case GrowthClass::sub_linear: return "sub-linear";
        case GrowthClass::linear: return "linear";
        case GrowthClass::super_linear: return "super-linear";
    }
    return "unknown";
}

GrowthClass growth_class_from_string(std::string_view s) {
    if (s == "bounded") return GrowthClass::bounded;
    if (s == "sub-linear" || s == "sub_linear") return GrowthClass::sub_linear;
    if (s == "linear") return GrowthClass::linear;
    if (s == "super-linear" || s == "super_linear") return GrowthClass::super_linear;
    throw ConfigError("unknown growth class '" + std::string(s) + "'");
}

std::string_view to_string(ProblemKind k) {
    switch (k) {
        case ProblemKind::plain: return "plain";
        case ProblemKind::reflected: return "reflected";
        case ProblemKind::killed: return "killed";
    }
    return "unknown";
}

ProblemKind problem_kind_from_string(std::string_view s) {
    if (s == "plain") return ProblemKind::plain;
    if (s == "reflected") return ProblemKind::reflected;
    if (s == "killed") return ProblemKind::killed;
    throw ConfigError("unknown problem kind '" + std::string(s) + "'");
}

std::string_view to_string(FunctionalKind k) {
    switch (k) {
        case FunctionalKind::terminal: return "terminal";
        case FunctionalKind::integral: return "integral";
        case FunctionalKind::grid_path: return "grid_path";
    }
    return "unknown";
}

bool DriftSpec::any_class_a() const {
    return std::any_of(class_a_components.begin(), class_a_components.end(), [](bool b) { return b; });
}

bool DriftSpec::all_class_a() const {
    return !class_a_components.empty() &&
           std::all_of(class_a_components.begin(), class_a_components.end(), [](bool b) { return b; });
}

// ---------------------------------------------------------------------------
// Diffusion

void ConstantDiffusion::apply(std::span<const double> v, std::span<double> out) const {
    const auto d = dim();
    for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += sigma_(i, j) * v[j];
        out[i] = s;
    }
}

void ConstantDiffusion::apply_inverse(std::span<const double> v, std::span<double> out) const {
    const auto d = dim();
    for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += sigma_inv_(i, j) * v[j];
        out[i] = s;
    }
}

double ConstantDiffusion::inversion_residual() const {
    const Eigen::MatrixXd r = sigma_ * sigma_inv_ - Eigen::MatrixXd::Identity(sigma_.rows(), sigma_.cols());
    return r.cwiseAbs().rowwise().sum().maxCoeff();
}

ConstantDiffusion inverse_diffusion(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() < 1 || sigma.rows() != sigma.cols()) {
        throw ConfigError("diffusion matrix must be square with d >= 1");
    }
    if (!sigma.allFinite()) throw ConfigError("diffusion matrix has non-finite entries");

    const double max_row_norm = sigma.cwiseAbs().rowwise().sum().maxCoeff();
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sigma);
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(min_pivot >= 1e-12 * max_row_norm) || max_row_norm == 0.0) {
        std::ostringstream os;
        os << "singular diffusion matrix: pivot " << min_pivot << " below 1e-12 x row norm " << max_row_norm;
        throw SingularMatrixError(os.str());
    }
    ConstantDiffusion out(sigma, lu.inverse());
    if (!(out.inversion_residual() < 1e-10)) {
        throw SingularMatrixError("diffusion matrix too ill-conditioned: inversion residual exceeds 1e-10");
    }
    return out;
}

ConstantDiffusion scalar_diffusion(double sigma) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = sigma;
    return inverse_diffusion(m);
}

// ---------------------------------------------------------------------------
// Domain

std::size_t DomainSpec::dim() const {
    return std::visit(
        [](const auto& s) -> std::size_t {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>) {
                return 1;
            } else if constexpr (std::is_same_v<T, Box>) {
                return s.lower.size();
            } else {
                return s.center.size();
            }
        },
        shape);
}

bool DomainSpec::contains(std::span<const double> x) const {
    return std::visit(
        [&](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>) {
                return x[0] > s.lower && x[0] < s.upper;
            } else if constexpr (std::is_same_v<T, Box>) {
                for (std::size_t i = 0; i < s.lower.size(); ++i) {
                    if (!(x[i] > s.lower[i] && x[i] < s.upper[i])) return false;
                }
                return true;
            } else {
                double r2 = 0.0;
                for (std::size_t i = 0; i < s.center.size(); ++i) {
                    const double dx = x[i] - s.center[i];
                    r2 += dx * dx;
                }
                return r2 < s.radius * s.radius;
            }
        },
        shape);
}

double DomainSpec::distance_to_boundary(std::span<const double> x) const {
    if (!contains(x)) return 0.0;
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>) {
                return std::min(x[0] - s.lower, s.upper - x[0]);
            } else if constexpr (std::is_same_v<T, Box>) {
                double d = INFINITY;
                for (std::size_t i = 0; i < s.lower.size(); ++i) {
                    d = std::min({d, x[i] - s.lower[i], s.upper[i] - x[i]});
                }
                return d;
            } else {
                double r2 = 0.0;
                for (std::size_t i = 0; i < s.center.size(); ++i) {
                    const double dx = x[i] - s.center[i];
                    r2 += dx * dx;
                }
                return s.radius - std::sqrt(r2);
            }
        },
        shape);
}

// ---------------------------------------------------------------------------
// Functionals

PathFunctional terminal_functional(std::string name, std::function<double(std::span<const double>)> g) {
    PathFunctional out;
    out.kind = FunctionalKind::terminal;
    out.g = std::move(g);
    out.name = std::move(name);
    return out;
}

PathFunctional integral_functional(std::string name, std::function<double(double)> f,
                                   std::function<double(std::span<const double>)> g,
                                   std::optional<double> beta, bool g_class_a) {
    PathFunctional out;
    out.kind = FunctionalKind::integral;
    out.f = std::move(f);
    out.g = std::move(g);
    out.g_holder_beta = beta;
    out.g_class_a = g_class_a;
    out.name = std::move(name);
    return out;
}

// ---------------------------------------------------------------------------
// Validation

std::string ValidationResult::describe() const {
    std::ostringstream os;
    for (const auto& v : violations) os << v.field << ": " << v.rule << "\n";
    for (const auto& w : warnings) os << "warning: " << w << "\n";
    return os.str();
}

namespace {

void validate_domain(const DomainSpec& domain, std::vector<Violation>& out) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Interval>) {
                if (!(s.lower < s.upper)) out.push_back({"domain.shape", "interval requires a < b"});
            } else if constexpr (std::is_same_v<T, Box>) {
                if (s.lower.size() != s.upper.size() || s.lower.empty()) {
                    out.push_back({"domain.shape", "box bounds must have equal non-zero length"});
                } else {
                    for (std::size_t i = 0; i < s.lower.size(); ++i) {
                        if (!(s.lower[i] < s.upper[i])) {
                            out.push_back({"domain.shape", "box requires lower < upper in every coordinate"});
                            break;
                        }
                    }
                }
            } else {
                if (!(s.radius > 0.0)) out.push_back({"domain.shape", "ball requires radius > 0"});
                if (s.center.empty()) out.push_back({"domain.shape", "ball center must be non-empty"});
            }
        },
        domain.shape);
    if (!(domain.payoff_support_gap_epsilon >= 0.0)) {
        out.push_back({"domain.payoff_support_gap_epsilon", "epsilon must be >= 0"});
    }
    if (!(domain.holder_p > 1.0)) out.push_back({"domain.holder_p", "p must be > 1"});
}

}  // namespace

ValidationResult validate_problem(const SdeProblem& problem, ValidationOptions options) {
    ValidationResult result;
    auto& v = result.violations;
    const std::size_t d = problem.dim();

    if (d == 0) v.push_back({"x0", "dimension must be >= 1"});
    for (double x : problem.x0) {
        if (!std::isfinite(x)) {
            v.push_back({"x0", "initial point must be finite"});
            break;
        }
    }
    if (!(problem.horizon > 0.0) || !std::isfinite(problem.horizon)) {
        v.push_back({"horizon_T", "horizon must be finite and > 0"});
    }
    if (problem.diffusion.dim() != d) v.push_back({"diffusion", "sigma dimension must match x0"});
    if (!problem.drift.eval) v.push_back({"drift.eval", "drift function missing"});

    const auto& drift = problem.drift;
    if (drift.growth == GrowthClass::super_linear) {
        v.push_back({"drift.growth", "super-linear drift"});
    }
    if (drift.holder_alpha && !(*drift.holder_alpha > 0.0 && *drift.holder_alpha <= 1.0)) {
        v.push_back({"drift.holder_alpha", "alpha must lie in (0,1]"});
    }
    if (!drift.holder_alpha && !drift.any_class_a()) {
        v.push_back({"drift", "declare a Hoelder part or a class-A part"});
    }
    if (!drift.class_a_components.empty() && drift.class_a_components.size() != d) {
        v.push_back({"drift.class_a_components", "one flag per coordinate required"});
    }

    switch (problem.kind) {
        case ProblemKind::plain:
            break;
        case ProblemKind::reflected:
            if (d != 1) {
                v.push_back({"kind", "reflected requires d=1"});
            } else {
                if (!(problem.x0[0] >= 0.0)) v.push_back({"x0", "reflected requires x0 >= 0"});
                if (problem.diffusion.dim() == 1 && problem.diffusion.sigma()(0, 0) == 0.0) {
                    v.push_back({"diffusion", "reflected requires sigma != 0"});
                }
            }
            break;
        case ProblemKind::killed:
            if (!problem.domain) {
                v.push_back({"domain", "killed requires a domain"});
            } else {
                validate_domain(*problem.domain, v);
                if (problem.domain->dim() != d) {
                    v.push_back({"domain", "domain dimension must match x0"});
                } else if (d > 0 && !problem.domain->contains(problem.x0)) {
                    v.push_back({"x0", "killed requires x0 in D"});
                }
            }
            break;
    }

    if (options.girsanov_requested && drift.growth == GrowthClass::linear) {
        result.warnings.push_back(
            "linear-growth drift: moments of the Girsanov weight may be infinite; weighted estimates can be heavy-tailed");
    }
    return result;
}

// ---------------------------------------------------------------------------
// Predicted rates

namespace {

// A drift that is purely class A has a zero Hoelder part, which is Lipschitz.
std::optional<double> effective_alpha(const DriftSpec& drift) {
    if (drift.holder_alpha) return drift.holder_alpha;
    if (drift.all_class_a()) return 1.0;
    return std::nullopt;
}

}  // namespace

RateDescription predicted_weak_order(const SdeProblem& problem, const PathFunctional& functional) {
    RateDescription out;
    const auto& drift = problem.drift;

    if (problem.kind == ProblemKind::reflected) {
        if (!drift.holder_alpha) throw ConfigError("reflected rate requires a declared Hoelder exponent alpha");
        if (drift.growth > GrowthClass::sub_linear) {
            out.note = "convergence without rate (drift not of sub-linear growth)";
            return out;
        }
        out.has_rate = true;
        out.exponent = *drift.holder_alpha / 2.0;
        out.note = "alpha/2";
        return out;
    }

    const auto alpha = effective_alpha(drift);
    if (!alpha) throw ConfigError("rate requires a declared Hoelder exponent alpha");

    if (drift.growth == GrowthClass::linear) {
        out.note = "convergence without rate (linear-growth drift, bounded payoff)";
        return out;
    }
    if (drift.growth == GrowthClass::super_linear) {
        out.note = "no convergence (super-linear drift)";
        return out;
    }

    const double base = std::min(*alpha / 2.0, 0.25);
    if (functional.kind == FunctionalKind::integral) {
        if (drift.growth != GrowthClass::bounded) {
            out.note = "integral-functional rate requires bounded drift";
            return out;
        }
        double beta = 1.0;
        if (functional.g_holder_beta) {
            beta = *functional.g_holder_beta;
        } else if (!functional.g_class_a) {
            throw ConfigError("integral functional requires a declared Hoelder exponent beta");
        }
        out.has_rate = true;
        out.exponent = std::min(base, beta / 2.0);
        out.note = "min(alpha/2, beta/2, 1/4)";
        return out;
    }

    out.has_rate = true;
    out.exponent = base;
    if (problem.kind == ProblemKind::killed) {
        const double p = problem.domain ? problem.domain->holder_p : 2.0;
        out.barrier_exponent = 1.0 / (2.0 * p);
        out.note = "min(alpha/2, 1/4) plus barrier term 1/(2p)";
    } else {
        out.note = "min(alpha/2, 1/4)";
    }
    return out;
}

}  // namespace emweak
