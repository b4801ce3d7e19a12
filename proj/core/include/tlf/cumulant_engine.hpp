#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tlf/truncation_model.hpp"

namespace tlf {

/// Largest cumulant order exposed by the engine. Odd orders vanish by
/// symmetry; orders above 8 make the truncated cumulant series unstable.
inline constexpr int kMaxCumulantOrder = 8;

/// A(alpha) = (2/pi) Gamma(alpha + 1) sin(pi alpha / 2), alpha in (0, 2).
double a_coefficient(double alpha);

/// First-order small-epsilon cumulant
///   kappa_j = ell^(j - alpha) gamma^alpha A(alpha) mu_j(alpha).
/// Odd j returns 0 without evaluating anything.
double cumulant(const TlfModel& model, int j);

/// The alpha = 1 form kappa_j = ell^(j-1) gamma 2 M_(j-2) / pi, using the
/// deformation moments. Throws DomainError unless alpha == 1.
double cumulant_cauchy(const TlfModel& model, int j);

/// lambda_j = kappa_j / kappa_2^(j/2), evaluated in the ratio form
/// (ell/gamma)^(alpha (j-2)/2) mu_j / (A^(j/2-1) mu_2^(j/2)). j >= 4.
double cumulant_coefficient(const TlfModel& model, int j);

/// Closed-form variance of the named families.
double family_variance(const TlfModel& model);

/// Closed-form kurtosis coefficient lambda_4 of the named families.
double family_kurtosis(const TlfModel& model);

/// n * kappa_j (cumulant function of the n-step walk).
double walk_cumulant(const TlfModel& model, int j, std::int64_t n);

/// lambda_j / n^(j/2 - 1).
double walk_cumulant_coefficient(const TlfModel& model, int j, std::int64_t n);

enum class Regime { Levy, Crossover, Gaussian };

std::string_view to_string(Regime regime) noexcept;

/// Steps beyond kGaussianMargin * n_gauss are labelled Gaussian. The factor
/// is a convention standing in for the ">>" of the regime condition.
inline constexpr double kGaussianMargin = 10.0;

struct RegimeReport {
    double diffusion;   // kappa_2, length^2 per step
    double n_gauss;     // lambda_4, steps
    double n_levy_max;  // (ell/gamma)^alpha = 1/epsilon, steps
    double epsilon;

    Regime classify(double n) const noexcept;
};

RegimeReport regime_report(const TlfModel& model);

/// Largest |q| at which the series of model_char_fn is accepted: |q| ell <= 1
/// and every term no larger than the one before it. Independent of gamma.
double series_q_max(const TlfModel& model, int j_max);

/// exp(sum_{j even, 2..j_max} n kappa_j (iq)^j / j!). Refuses |q| above
/// series_q_max, where the formal series stops converging.
std::complex<double> model_char_fn(const TlfModel& model, double q, std::int64_t n, int j_max);

/// |theta(q, n, gamma) - theta(q, 1, gamma n^(1/alpha))| with the same ell.
/// Requires n * epsilon <= kEpsilonWarnThreshold (gamma_eff << ell).
double scale_identity_check(const TlfModel& model, double q, std::int64_t n, int j_max);

/// Gamma(1/alpha) / (pi alpha gamma n^(1/alpha)), the undisturbed Levy
/// return density after n steps.
double levy_return_density(const StableParams& stable, double n);

/// Return density of the truncated flight in the Levy regime. Warns when
/// n * epsilon exceeds kEpsilonWarnThreshold. The O(epsilon^2) correction
/// from the truncation is not modelled.
double return_density(const TlfModel& model, std::int64_t n);

struct CumulantEntry {
    int order;
    double mu;
    double kappa;
    double lambda;
};

struct CumulantTable {
    double a_alpha;
    double epsilon;
    double variance;
    std::vector<CumulantEntry> entries;
};

CumulantTable cumulant_table(const TlfModel& model, std::span<const int> orders);

}  // namespace tlf
