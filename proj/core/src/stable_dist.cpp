#include "tlf/stable_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "tlf/errors.hpp"
#include "tlf/quadrature.hpp"

namespace tlf {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxSeriesTerms = 400;
// A series is accepted when its largest term exceeds the result by at most
// this factor (about two digits lost to cancellation).
constexpr double kMaxCancellation = 1e2;
constexpr double kSeriesTail = 1e-17;
// exp(-u) below 1e-18 beyond this point of the inversion integral.
constexpr double kInversionCutoff = 42.0;

// Large-z expansion in powers of z^-alpha. Convergent for alpha < 1,
// asymptotic otherwise.
std::optional<double> tail_series(double alpha, double z) {
    const bool convergent = alpha < 1.0;
    const double log_z = std::log(z);
    double sum = 0.0;
    double largest = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= kMaxSeriesTerms; ++k) {
        const double log_env =
            std::lgamma(k * alpha + 1.0) - std::lgamma(k + 1.0) - (k * alpha + 1.0) * log_z;
        if (log_env > 600.0) return std::nullopt;
        const double env = std::exp(log_env);
        if (!convergent && env > previous) return std::nullopt;
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        sum += sign * env * std::sin(0.5 * k * kPi * alpha);
        largest = std::max(largest, env);
        if (k > 1 && env <= kSeriesTail * std::abs(sum)) {
            if (largest > kMaxCancellation * std::abs(sum)) return std::nullopt;
            return sum / kPi;
        }
        previous = env;
    }
    return std::nullopt;
}

// Small-z expansion in powers of z^2. Convergent for alpha > 1,
// asymptotic for alpha < 1 and geometric (|z| < 1) at alpha = 1.
std::optional<double> origin_series(double alpha, double z) {
    const bool convergent = alpha > 1.0;
    const double log_z = std::log(z);
    double sum = 0.0;
    double largest = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kMaxSeriesTerms; ++k) {
        const double log_env =
            std::lgamma((2.0 * k + 1.0) / alpha) - std::lgamma(2.0 * k + 1.0) + 2.0 * k * log_z;
        if (log_env > 600.0) return std::nullopt;
        const double env = std::exp(log_env);
        if (!convergent && env > previous) return std::nullopt;
        sum += (k % 2 == 0 ? env : -env);
        largest = std::max(largest, env);
        if (k > 0 && env <= kSeriesTail * std::abs(sum)) {
            if (largest > kMaxCancellation * std::abs(sum)) return std::nullopt;
            return sum / (kPi * alpha);
        }
        previous = env;
    }
    return std::nullopt;
}

// (1/pi) * integral_0^inf cos(q z) exp(-q^alpha) dq, split at the zeros of
// the cosine. For alpha < 1 the substitution u = q^alpha tames the slowly
// decaying factor.
double inversion_integral(double alpha, double z) {
    constexpr std::size_t kMaxBreaks = 2000;
    QuadratureOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-18;
    opt.max_panels = 20000;
    opt.accept_rel_tol = 1e-6;

    std::vector<double> breaks{0.0};
    if (alpha >= 1.0) {
        const double q_max = std::pow(kInversionCutoff, 1.0 / alpha);
        const double step = std::max(kPi / z, q_max / static_cast<double>(kMaxBreaks));
        for (double q = step; q < q_max; q += step) breaks.push_back(q);
        breaks.push_back(q_max);
        auto f = [alpha, z](double q) { return std::cos(q * z) * std::exp(-std::pow(q, alpha)); };
        return integrate(f, breaks, opt).value / kPi;
    }

    const double inv = 1.0 / alpha;
    const double phase_max = z * std::pow(kInversionCutoff, inv);
    const double phase_step = std::max(kPi, phase_max / static_cast<double>(kMaxBreaks));
    for (double ph = phase_step; ph < phase_max; ph += phase_step) {
        breaks.push_back(std::pow(ph / z, alpha));
    }
    breaks.push_back(kInversionCutoff);
    auto f = [inv, z](double u) {
        if (u == 0.0) return 0.0;
        return std::cos(z * std::pow(u, inv)) * std::exp(-u) * std::pow(u, inv - 1.0);
    };
    return integrate(f, breaks, opt).value / (kPi * alpha);
}

}  // namespace

StableParams::StableParams(double alpha, double gamma) : alpha_(alpha), gamma_(gamma) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        std::ostringstream msg;
        msg << "alpha must lie in the open interval (0, 2), got " << alpha;
        throw DomainError(msg.str());
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        std::ostringstream msg;
        msg << "gamma must be positive and finite, got " << gamma;
        throw DomainError(msg.str());
    }
}

double stable_char_fn(const StableParams& params, double q) noexcept {
    return std::exp(-std::pow(params.gamma() * std::abs(q), params.alpha()));
}

double standard_stable_pdf(double alpha, double z) {
    z = std::abs(z);
    if (z < 1e-300) return std::tgamma(1.0 / alpha) / (kPi * alpha);
    if (std::isinf(z)) return 0.0;

    std::optional<double> v;
    if (z >= 1.0) {
        v = tail_series(alpha, z);
        if (!v) v = origin_series(alpha, z);
    } else {
        v = origin_series(alpha, z);
        if (!v) v = tail_series(alpha, z);
    }
    if (v) return *v;
    return inversion_integral(alpha, z);
}

double stable_pdf(const StableParams& params, double x) {
    return standard_stable_pdf(params.alpha(), x / params.gamma()) / params.gamma();
}

double stable_peak_density(const StableParams& params) {
    return std::tgamma(1.0 / params.alpha()) / (kPi * params.alpha() * params.gamma());
}

}  // namespace tlf
