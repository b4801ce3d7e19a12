#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include "tlf/stable_dist.hpp"

namespace tlf {

enum class TruncationFamily { MantegnaStanley, Exponential, PowerExponential, Custom };

/// Short CLI names: "ms", "exp", "pexp", "custom".
std::string_view to_string(TruncationFamily family) noexcept;
std::optional<TruncationFamily> parse_family(std::string_view name) noexcept;

/// Even deformation function g evaluated in the dimensionless coordinate
/// xi = x / ell, with g(0) = 1 and 0 <= g <= 1.
///
/// Custom evaluators must be pure and safe to call concurrently; they are
/// called with xi >= 0 only (g is even by contract).
class DeformationSpec {
public:
    using Evaluator = std::function<double(double)>;

    static DeformationSpec mantegna_stanley(double ell);
    static DeformationSpec exponential(double ell);
    static DeformationSpec power_exponential(double ell, double h);
    static DeformationSpec custom(double ell, Evaluator g);

    TruncationFamily family() const noexcept { return family_; }
    double ell() const noexcept { return ell_; }
    /// Shape parameter; meaningful for PowerExponential only.
    double h() const noexcept { return h_; }

    double operator()(double xi) const;

    DeformationSpec with_ell(double ell) const;

private:
    DeformationSpec(TruncationFamily family, double ell, double h, Evaluator g);

    TruncationFamily family_;
    double ell_;
    double h_;
    Evaluator custom_;
};

double deformation_eval(const DeformationSpec& spec, double xi);

/// Closed-form influence function mu_j(alpha) of the named families.
/// Throws UnsupportedFamilyError for Custom.
double influence_closed(const DeformationSpec& spec, int j, double alpha);

/// mu_j(alpha) = integral_0^inf xi^(j-1-alpha) g(xi) dxi by quadrature in
/// log xi. Throws DivergentIntegralError when a Custom g fails the tail
/// admissibility probe.
double influence_numeric(const DeformationSpec& spec, int j, double alpha);

/// Closed form where available, quadrature for Custom.
double influence(const DeformationSpec& spec, int j, double alpha);

/// Half-line raw moment M_k = integral_0^inf xi^k g(xi) dxi. Evaluated by
/// the same quadrature as influence_numeric, so M_(j-2) == mu_j(1) exactly.
double deformation_moment(const DeformationSpec& spec, int k);

/// Smallest power of two Xi >= 1 with g(Xi) * Xi^power < threshold (MS: 1).
/// Throws DivergentIntegralError if none exists below 2^60.
double tail_extent(const DeformationSpec& spec, double power, double threshold = 1e-18);

/// Threshold on epsilon above which scale separation l >> gamma is
/// considered violated and a warning is emitted.
inline constexpr double kEpsilonWarnThreshold = 0.1;

/// Stable law plus deformation. epsilon = (gamma / ell)^alpha is derived on
/// every call.
class TlfModel {
public:
    TlfModel(StableParams stable, DeformationSpec deformation);

    const StableParams& stable() const noexcept { return stable_; }
    const DeformationSpec& deformation() const noexcept { return deformation_; }

    double alpha() const noexcept { return stable_.alpha(); }
    double gamma() const noexcept { return stable_.gamma(); }
    double ell() const noexcept { return deformation_.ell(); }
    double epsilon() const;

    TlfModel with_gamma(double gamma) const;

private:
    StableParams stable_;
    DeformationSpec deformation_;
};

}  // namespace tlf
