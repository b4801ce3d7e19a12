#pragma once

#include <functional>
#include <span>
#include <vector>

#include "tlf/truncation_model.hpp"

namespace tlf {

/// Raw moments of the truncated density, computed by real-space quadrature.
struct MomentVector {
    double m2;
    double m4;
    double m6;
    double normalization_c;
    double epsilon;
};

struct OracleReport {
    int order;
    double m_numeric;
    double kappa_numeric;
    double kappa_asymptotic;
    double rel_error;
    double epsilon;
};

struct LowerCumulants {
    double kappa2;
    double kappa4;
    double kappa6;
};

/// C * P_L(x) * g(x / ell) with the normalizing constant computed once.
class TruncatedDensity {
public:
    explicit TruncatedDensity(TlfModel model);

    double operator()(double x) const;
    double normalization() const noexcept { return c_; }
    const TlfModel& model() const noexcept { return model_; }
    /// Support bound used by the quadratures: ell for MS, ell * Xi otherwise.
    double extent(double power) const;

private:
    TlfModel model_;
    double c_;
};

/// integral_0^X x^power P_L(x) g(x / ell) dx over the effective support,
/// where P_L is the stable density (not renormalized).
double unnormalized_half_moment(const TlfModel& model, int power);

/// C = 1 / integral P_L(x) g(x/ell) dx.
double normalize(const TlfModel& model);

double truncated_pdf(const TlfModel& model, double x);

/// m_j = integral x^j C P_L(x) g(x/ell) dx for even j in [2, 8]; odd j is 0.
double numeric_moment(const TlfModel& model, int j);

MomentVector moment_vector(const TlfModel& model);

/// kappa_2 = m_2, kappa_4 = m_4 - 3 m_2^2, kappa_6 = m_6 - 15 m_2 m_4 + 30 m_2^3.
LowerCumulants cumulants_from_moments(const MomentVector& m);

/// For each epsilon sets ell = gamma / epsilon^(1/alpha) on `shape` and
/// compares the quadrature cumulant with the first-order closed form.
/// order must be 2, 4 or 6; epsilon values must lie in (0, 0.1].
std::vector<OracleReport> convergence_sweep(double alpha, const DeformationSpec& shape, int order,
                                            std::span<const double> eps_list, double gamma = 1.0);

/// Engineering bound on the O(epsilon) remainder used by the acceptance
/// checks; the asymptotic theory fixes only the order, not the constant.
inline constexpr double kRemainderConstant = 5.0;

/// CDF of an even density tabulated on nodes 0 = x_0 < ... < x_n by
/// cumulative quadrature, interpolated with cubic Hermite segments that use
/// the density as derivative. Mass beyond x_n is treated as an atom there.
class SymmetricCdf {
public:
    SymmetricCdf(std::function<double(double)> density, std::vector<double> nodes);

    double cdf(double x) const;
    double quantile(double u) const;
    /// 2 * integral_0^{x_n} density.
    double tabulated_mass() const noexcept { return 2.0 * half_.back(); }

private:
    double half_cdf(std::size_t seg, double x) const;

    std::vector<double> x_;
    std::vector<double> f_;
    std::vector<double> half_;  // integral_0^{x_i} density
};

/// Tabulated CDF of the truncated density of `model`.
SymmetricCdf tabulate_cdf(const TlfModel& model, std::size_t nodes = 4000);

}  // namespace tlf
