#include "tlf/truncation_model.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "tlf/diagnostics.hpp"
#include "tlf/errors.hpp"
#include "tlf/quadrature.hpp"

namespace tlf {
namespace {

void check_order(int j, double alpha) {
    if (j < 2 || j % 2 != 0) {
        std::ostringstream msg;
        msg << "order j must be an even integer >= 2, got " << j;
        throw DomainError(msg.str());
    }
    if (!(j > alpha)) {
        std::ostringstream msg;
        msg << "order j = " << j << " must exceed alpha = " << alpha;
        throw DomainError(msg.str());
    }
}

// g(Xi) * Xi^16 < 1 at Xi = 1e6.
void probe_custom_tail(const DeformationSpec& spec) {
    if (spec.family() != TruncationFamily::Custom) return;
    constexpr double probe = 1e6;
    if (!(spec(probe) * std::pow(probe, 16.0) < 1.0)) {
        throw DivergentIntegralError(
            "custom deformation decays too slowly: g(1e6) * 1e6^16 >= 1");
    }
}

// integral_0^inf xi^(s-1) g(xi) dxi, s > 0, with xi = e^t.
double mellin(const DeformationSpec& spec, double s) {
    probe_custom_tail(spec);
    // e^(s t) has dropped below 1e-18 at t_min; the remainder is closed-form
    // because g(xi) == 1 to double precision there.
    const double t_min = std::log(1e-18) / s;
    auto integrand = [&spec, s](double t) {
        const double xi = std::exp(t);
        const double g = spec(xi);
        return g == 0.0 ? 0.0 : std::exp(s * t) * g;
    };

    QuadratureOptions opt;
    opt.rel_tol = 1e-13;
    opt.max_panels = 8000;
    opt.accept_rel_tol = 1e-10;

    const double left_tail = std::exp(s * t_min) / s;
    if (spec.family() == TruncationFamily::MantegnaStanley) {
        return left_tail + integrate(integrand, t_min, 0.0, opt).value;
    }

    const double t_max = std::log(tail_extent(spec, s));
    std::vector<double> breaks{t_min, 0.0};
    // Peak of xi^s g(xi) for the named smooth families.
    double peak = 0.0;
    if (spec.family() == TruncationFamily::Exponential) peak = std::log(s);
    if (spec.family() == TruncationFamily::PowerExponential) peak = std::log(s / spec.h()) / spec.h();
    if (peak > 0.0 && peak < t_max) breaks.push_back(peak);
    breaks.push_back(t_max);
    return left_tail + integrate(integrand, breaks, opt).value;
}

}  // namespace

std::string_view to_string(TruncationFamily family) noexcept {
    switch (family) {
        case TruncationFamily::MantegnaStanley: return "ms";
        case TruncationFamily::Exponential: return "exp";
        case TruncationFamily::PowerExponential: return "pexp";
        case TruncationFamily::Custom: return "custom";
    }
    return "custom";
}

std::optional<TruncationFamily> parse_family(std::string_view name) noexcept {
    if (name == "ms") return TruncationFamily::MantegnaStanley;
    if (name == "exp") return TruncationFamily::Exponential;
    if (name == "pexp") return TruncationFamily::PowerExponential;
    return std::nullopt;
}

DeformationSpec::DeformationSpec(TruncationFamily family, double ell, double h, Evaluator g)
    : family_(family), ell_(ell), h_(h), custom_(std::move(g)) {
    if (!(ell > 0.0) || !std::isfinite(ell)) {
        std::ostringstream msg;
        msg << "truncation scale ell must be positive and finite, got " << ell;
        throw DomainError(msg.str());
    }
    if (family == TruncationFamily::PowerExponential && (!(h > 0.0) || !std::isfinite(h))) {
        std::ostringstream msg;
        msg << "power-exponential shape h must be positive, got " << h;
        throw DomainError(msg.str());
    }
    if (family == TruncationFamily::Custom) {
        if (!custom_) throw DomainError("custom deformation requires an evaluator");
        if (custom_(0.0) != 1.0) throw DomainError("custom deformation must satisfy g(0) = 1");
        for (double xi : {0.1, 0.5, 1.0, 2.0, 10.0}) {
            const double g = custom_(xi);
            if (!(g >= 0.0 && g <= 1.0)) {
                throw DomainError("custom deformation must satisfy 0 <= g <= 1");
            }
        }
    }
}

DeformationSpec DeformationSpec::mantegna_stanley(double ell) {
    return {TruncationFamily::MantegnaStanley, ell, 0.0, nullptr};
}

DeformationSpec DeformationSpec::exponential(double ell) {
    return {TruncationFamily::Exponential, ell, 0.0, nullptr};
}

DeformationSpec DeformationSpec::power_exponential(double ell, double h) {
    return {TruncationFamily::PowerExponential, ell, h, nullptr};
}

DeformationSpec DeformationSpec::custom(double ell, Evaluator g) {
    return {TruncationFamily::Custom, ell, 0.0, std::move(g)};
}

double DeformationSpec::operator()(double xi) const {
    xi = std::abs(xi);
    switch (family_) {
        case TruncationFamily::MantegnaStanley: return xi <= 1.0 ? 1.0 : 0.0;
        case TruncationFamily::Exponential: return std::exp(-xi);
        case TruncationFamily::PowerExponential: return std::exp(-std::pow(xi, h_));
        case TruncationFamily::Custom: return custom_(xi);
    }
    return 0.0;
}

DeformationSpec DeformationSpec::with_ell(double ell) const {
    return {family_, ell, h_, custom_};
}

double deformation_eval(const DeformationSpec& spec, double xi) { return spec(xi); }

double influence_closed(const DeformationSpec& spec, int j, double alpha) {
    check_order(j, alpha);
    const double s = j - alpha;
    switch (spec.family()) {
        case TruncationFamily::MantegnaStanley: return 1.0 / s;
        case TruncationFamily::Exponential: return std::tgamma(s);
        case TruncationFamily::PowerExponential: return std::tgamma(s / spec.h()) / spec.h();
        case TruncationFamily::Custom: break;
    }
    throw UnsupportedFamilyError(
        "no closed-form influence function for a custom deformation; use influence_numeric");
}

double influence_numeric(const DeformationSpec& spec, int j, double alpha) {
    check_order(j, alpha);
    return mellin(spec, j - alpha);
}

double influence(const DeformationSpec& spec, int j, double alpha) {
    if (spec.family() == TruncationFamily::Custom) return influence_numeric(spec, j, alpha);
    return influence_closed(spec, j, alpha);
}

double deformation_moment(const DeformationSpec& spec, int k) {
    if (k < 0) throw DomainError("moment order k must be nonnegative");
    return mellin(spec, k + 1.0);
}

double tail_extent(const DeformationSpec& spec, double power, double threshold) {
    if (spec.family() == TruncationFamily::MantegnaStanley) return 1.0;
    double xi = 1.0;
    for (int i = 0; i < 60; ++i, xi *= 2.0) {
        if (spec(xi) * std::pow(xi, power) < threshold) return xi;
    }
    throw DivergentIntegralError("deformation function does not decay within xi < 2^60");
}

TlfModel::TlfModel(StableParams stable, DeformationSpec deformation)
    : stable_(stable), deformation_(std::move(deformation)) {
    const double eps = epsilon();
    if (eps > kEpsilonWarnThreshold) {
        std::ostringstream msg;
        msg << "epsilon = (gamma/ell)^alpha = " << eps << " exceeds " << kEpsilonWarnThreshold
            << "; ell >> gamma is not satisfied and first-order asymptotics are unreliable";
        warn(msg.str());
    }
}

double TlfModel::epsilon() const { return std::pow(gamma() / ell(), alpha()); }

TlfModel TlfModel::with_gamma(double gamma) const {
    return {StableParams(alpha(), gamma), deformation_};
}

}  // namespace tlf
