// SPDX-License-Identifier: MIT
//
// Problem description for dX = b(X) dt + sigma dW with a constant invertible
// diffusion matrix: drift regularity declarations, payoff functionals,
// killing domains, validation and predicted weak orders.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace emweak {

enum class GrowthClass { bounded = 0, sub_linear = 1, linear = 2, super_linear = 3 };

std::string_view to_string(GrowthClass g);
GrowthClass growth_class_from_string(std::string_view s);

/// Drift evaluation b(x) written into `out`; both spans have length d.
using DriftFn = std::function<void(std::span<const double> x, std::span<double> out)>;

/// A drift together with the user's regularity declarations.
///
/// The decomposition b = b^H + b^A is declared, not checked: `holder_alpha`
/// names the Hölder exponent of the continuous part and `class_a_components`
/// flags coordinates whose (possibly discontinuous) part is in class A.
struct DriftSpec {
    std::string name;
    DriftFn eval;
    std::optional<double> holder_alpha;
    std::vector<bool> class_a_components;
    GrowthClass growth = GrowthClass::bounded;

    bool any_class_a() const;
    bool all_class_a() const;
};

/// sigma together with its inverse. Construct through inverse_diffusion().
class ConstantDiffusion {
public:
    std::size_t dim() const { return static_cast<std::size_t>(sigma_.rows()); }
    const Eigen::MatrixXd& sigma() const { return sigma_; }
    const Eigen::MatrixXd& sigma_inv() const { return sigma_inv_; }

    /// out = sigma * v
    void apply(std::span<const double> v, std::span<double> out) const;
    /// out = sigma^{-1} * v
    void apply_inverse(std::span<const double> v, std::span<double> out) const;

    /// ||sigma * sigma^{-1} - I||_inf
    double inversion_residual() const;

private:
    friend ConstantDiffusion inverse_diffusion(const Eigen::MatrixXd& sigma);
    ConstantDiffusion(Eigen::MatrixXd sigma, Eigen::MatrixXd sigma_inv)
        : sigma_(std::move(sigma)), sigma_inv_(std::move(sigma_inv)) {}

    Eigen::MatrixXd sigma_;
    Eigen::MatrixXd sigma_inv_;
};

/// Throws SingularMatrixError when an LU pivot falls below 1e-12 times the
/// largest absolute row sum of sigma.
ConstantDiffusion inverse_diffusion(const Eigen::MatrixXd& sigma);
ConstantDiffusion scalar_diffusion(double sigma);

struct Interval {
    double lower;
    double upper;
};

struct Box {
    std::vector<double> lower;
    std::vector<double> upper;
};

struct Ball {
    std::vector<double> center;
    double radius;
};

/// Open killing domain D. Boundary points are outside.
struct DomainSpec {
    std::variant<Interval, Box, Ball> shape;
    double payoff_support_gap_epsilon = 0.0;
    double holder_p = 2.0;

    std::size_t dim() const;
    bool contains(std::span<const double> x) const;
    /// Distance from x to the boundary of D (0 outside).
    double distance_to_boundary(std::span<const double> x) const;
};

enum class ProblemKind { plain, reflected, killed };

std::string_view to_string(ProblemKind k);
ProblemKind problem_kind_from_string(std::string_view s);

struct SdeProblem {
    std::vector<double> x0;
    double horizon = 1.0;
    DriftSpec drift;
    ConstantDiffusion diffusion = scalar_diffusion(1.0);
    ProblemKind kind = ProblemKind::plain;
    std::optional<DomainSpec> domain;

    std::size_t dim() const { return x0.size(); }
};

enum class FunctionalKind { terminal, integral, grid_path };

std::string_view to_string(FunctionalKind k);

/// Payoff evaluated on grid values of a path.
///
/// terminal:  g(X_T)
/// integral:  f(h * sum_{k<n} g(X_{t_k}))      (left-point rule)
/// grid_path: f_grid(X_{t_0}, ..., X_{t_n})
struct PathFunctional {
    FunctionalKind kind = FunctionalKind::terminal;
    std::function<double(std::span<const double>)> g;
    std::function<double(double)> f;
    /// states are flattened row-major: (n+1) rows of `dim` values.
    std::function<double(std::span<const double> states, std::size_t dim)> f_grid;
    std::optional<double> g_holder_beta;
    bool g_class_a = false;
    std::string name;
};

PathFunctional terminal_functional(std::string name, std::function<double(std::span<const double>)> g);
PathFunctional integral_functional(std::string name, std::function<double(double)> f,
                                   std::function<double(std::span<const double>)> g,
                                   std::optional<double> beta, bool g_class_a = false);

struct Violation {
    std::string field;
    std::string rule;
};

struct ValidationResult {
    std::vector<Violation> violations;
    std::vector<std::string> warnings;

    bool ok() const { return violations.empty(); }
    std::string describe() const;
};

struct ValidationOptions {
    bool girsanov_requested = false;
};

ValidationResult validate_problem(const SdeProblem& problem, ValidationOptions options = {});

/// Exponent(s) of the theoretical weak error bound C h^kappa.
struct RateDescription {
    bool has_rate = false;
    double exponent = 0.0;
    /// Second exponent of the barrier term for killed problems, 1/(2p).
    std::optional<double> barrier_exponent;
    std::string note;
};

/// Throws ConfigError when a required Hölder exponent is missing.
RateDescription predicted_weak_order(const SdeProblem& problem, const PathFunctional& functional);

}  // namespace emweak
