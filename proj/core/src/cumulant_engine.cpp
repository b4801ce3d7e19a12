#include "tlf/cumulant_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "tlf/diagnostics.hpp"
#include "tlf/errors.hpp"

namespace tlf {
namespace {

constexpr double kPi = std::numbers::pi;

void check_even_order(int j, int min_order) {
    if (j % 2 != 0 || j < min_order || j > kMaxCumulantOrder) {
        std::ostringstream msg;
        msg << "order must be an even integer in [" << min_order << ", " << kMaxCumulantOrder
            << "], got " << j;
        throw DomainError(msg.str());
    }
}

void check_steps(std::int64_t n) {
    if (n < 1) throw DomainError("step count n must be >= 1");
}

double factorial(int j) { return std::tgamma(j + 1.0); }

double ratio_power(const TlfModel& model) {
    return std::pow(model.ell() / model.gamma(), model.alpha());
}

}  // namespace

double a_coefficient(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        std::ostringstream msg;
        msg << "alpha must lie in the open interval (0, 2), got " << alpha;
        throw DomainError(msg.str());
    }
    return 2.0 / kPi * std::tgamma(alpha + 1.0) * std::sin(0.5 * kPi * alpha);
}

double cumulant(const TlfModel& model, int j) {
    if (j % 2 != 0) return 0.0;
    check_even_order(j, 2);
    const double a = model.alpha();
    const double kappa = std::pow(model.ell(), j - a) * std::pow(model.gamma(), a) * a_coefficient(a) *
                         influence(model.deformation(), j, a);
    if (!std::isfinite(kappa)) {
        throw OverflowError("kappa_" + std::to_string(j) + " overflows double for this (gamma, ell)");
    }
    return kappa;
}

double cumulant_cauchy(const TlfModel& model, int j) {
    if (model.alpha() != 1.0) throw DomainError("the Cauchy cumulant form requires alpha == 1");
    if (j % 2 != 0) return 0.0;
    check_even_order(j, 2);
    const double m = deformation_moment(model.deformation(), j - 2);
    return std::pow(model.ell(), j - 1) * model.gamma() * 2.0 * m / kPi;
}

double cumulant_coefficient(const TlfModel& model, int j) {
    if (j % 2 != 0) return 0.0;
    check_even_order(j, 4);
    const double a = model.alpha();
    const auto& g = model.deformation();
    const double half = 0.5 * j;
    const double lambda = std::pow(model.ell() / model.gamma(), a * (j - 2) / 2.0) * influence(g, j, a) /
                          (std::pow(a_coefficient(a), half - 1.0) * std::pow(influence(g, 2, a), half));
    if (!std::isfinite(lambda)) {
        throw OverflowError("lambda_" + std::to_string(j) + " overflows double for this (gamma, ell)");
    }
    return lambda;
}

double family_variance(const TlfModel& model) {
    const double a = model.alpha();
    const double base = std::pow(model.ell(), 2.0 - a) * std::pow(model.gamma(), a) * a_coefficient(a);
    const auto& g = model.deformation();
    switch (g.family()) {
        case TruncationFamily::MantegnaStanley: return base / (2.0 - a);
        case TruncationFamily::Exponential: return base * std::tgamma(2.0 - a);
        case TruncationFamily::PowerExponential: return base * std::tgamma((2.0 - a) / g.h()) / g.h();
        case TruncationFamily::Custom: break;
    }
    throw UnsupportedFamilyError("family_variance has no closed form for a custom deformation");
}

double family_kurtosis(const TlfModel& model) {
    const double a = model.alpha();
    const double base = ratio_power(model) / a_coefficient(a);
    const auto& g = model.deformation();
    switch (g.family()) {
        case TruncationFamily::MantegnaStanley: return base * (2.0 - a) * (2.0 - a) / (4.0 - a);
        case TruncationFamily::Exponential:
            return base * (2.0 - a) * (3.0 - a) / std::tgamma(2.0 - a);
        case TruncationFamily::PowerExponential: {
            const double h = g.h();
            const double g2 = std::tgamma((2.0 - a) / h);
            return base * h * std::tgamma((4.0 - a) / h) / (g2 * g2);
        }
        case TruncationFamily::Custom: break;
    }
    throw UnsupportedFamilyError("family_kurtosis has no closed form for a custom deformation");
}

double walk_cumulant(const TlfModel& model, int j, std::int64_t n) {
    check_steps(n);
    return static_cast<double>(n) * cumulant(model, j);
}

double walk_cumulant_coefficient(const TlfModel& model, int j, std::int64_t n) {
    check_steps(n);
    return cumulant_coefficient(model, j) / std::pow(static_cast<double>(n), 0.5 * j - 1.0);
}

std::string_view to_string(Regime regime) noexcept {
    switch (regime) {
        case Regime::Levy: return "levy";
        case Regime::Crossover: return "crossover";
        case Regime::Gaussian: return "gaussian";
    }
    return "crossover";
}

Regime RegimeReport::classify(double n) const noexcept {
    if (n <= n_levy_max) return Regime::Levy;
    if (n >= kGaussianMargin * n_gauss) return Regime::Gaussian;
    return Regime::Crossover;
}

RegimeReport regime_report(const TlfModel& model) {
    const double eps = model.epsilon();
    return {cumulant(model, 2), cumulant_coefficient(model, 4), 1.0 / eps, eps};
}

double series_q_max(const TlfModel& model, int j_max) {
    check_even_order(j_max, 2);
    double q_max = 1.0 / model.ell();
    // |term_{j+2} / term_j| = kappa_{j+2} q^2 / (kappa_j (j+1)(j+2)) must not exceed 1.
    for (int j = 2; j + 2 <= j_max; j += 2) {
        const double ratio = cumulant(model, j + 2) / (cumulant(model, j) * (j + 1.0) * (j + 2.0));
        q_max = std::min(q_max, 1.0 / std::sqrt(ratio));
    }
    return q_max;
}

std::complex<double> model_char_fn(const TlfModel& model, double q, std::int64_t n, int j_max) {
    check_steps(n);
    check_even_order(j_max, 2);
    const double q_max = series_q_max(model, j_max);
    if (std::abs(q) > q_max) {
        std::ostringstream msg;
        msg << "|q| = " << std::abs(q) << " exceeds the series bound " << q_max << " (|q| ell = "
            << std::abs(q) * model.ell() << "); the cumulant series is not reliable there";
        throw DomainError(msg.str());
    }
    double exponent = 0.0;
    for (int j = 2; j <= j_max; j += 2) {
        // (iq)^j = (-1)^(j/2) q^j for even j.
        const double sign = (j / 2) % 2 == 0 ? 1.0 : -1.0;
        exponent += sign * static_cast<double>(n) * cumulant(model, j) * std::pow(q, j) / factorial(j);
    }
    return {std::exp(exponent), 0.0};
}

double scale_identity_check(const TlfModel& model, double q, std::int64_t n, int j_max) {
    check_steps(n);
    const double nd = static_cast<double>(n);
    if (nd * model.epsilon() > kEpsilonWarnThreshold) {
        std::ostringstream msg;
        msg << "gamma * n^(1/alpha) must stay well below ell: n * epsilon = "
            << nd * model.epsilon() << " exceeds " << kEpsilonWarnThreshold;
        throw DomainError(msg.str());
    }
    const TlfModel rescaled = model.with_gamma(model.gamma() * std::pow(nd, 1.0 / model.alpha()));
    return std::abs(model_char_fn(model, q, n, j_max) - model_char_fn(rescaled, q, 1, j_max));
}

double levy_return_density(const StableParams& stable, double n) {
    if (!(n >= 1.0)) throw DomainError("step count n must be >= 1");
    return stable_peak_density(stable) / std::pow(n, 1.0 / stable.alpha());
}

double return_density(const TlfModel& model, std::int64_t n) {
    check_steps(n);
    const double nd = static_cast<double>(n);
    if (nd * model.epsilon() > kEpsilonWarnThreshold) {
        std::ostringstream msg;
        msg << "n = " << n << " is outside the Levy regime guard (n * epsilon = "
            << nd * model.epsilon() << "); the undisturbed return density is inaccurate";
        warn(msg.str());
    }
    return levy_return_density(model.stable(), nd);
}

CumulantTable cumulant_table(const TlfModel& model, std::span<const int> orders) {
    CumulantTable table{a_coefficient(model.alpha()), model.epsilon(), cumulant(model, 2), {}};
    for (int j : orders) {
        check_even_order(j, 2);
        const double mu = influence(model.deformation(), j, model.alpha());
        const double kappa = cumulant(model, j);
        const double lambda = j == 2 ? 1.0 : cumulant_coefficient(model, j);
        table.entries.push_back({j, mu, kappa, lambda});
    }
    return table;
}

}  // namespace tlf
