#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "support.hpp"
#include "tlf/cumulant_engine.hpp"
#include "tlf/errors.hpp"
#include "tlf/oracle.hpp"
#include "tlf/quadrature.hpp"
#include "tlf/stable_dist.hpp"

using namespace tlf;

namespace {

constexpr double kPi = std::numbers::pi;

TlfModel make(double alpha, double gamma, double ell, const DeformationSpec& shape) {
    return TlfModel(StableParams(alpha, gamma), shape.with_ell(ell));
}

const DeformationSpec kMs = DeformationSpec::mantegna_stanley(1);
const DeformationSpec kExp = DeformationSpec::exponential(1);

// Straight GK panels on a log grid, independent of the oracle's own layout.
double independent_mass(const TlfModel& m, double x_max) {
    QuadratureOptions opt;
    opt.rel_tol = 1e-12;
    opt.max_panels = 8000;
    std::vector<double> breaks{0.0};
    for (double x = 1e-2 * m.gamma(); x < x_max; x *= 2.0) breaks.push_back(x);
    breaks.push_back(x_max);
    return 2.0 * integrate([&](double x) { return truncated_pdf(m, x); }, breaks, opt).value;
}

}  // namespace

TEST_CASE("truncated density examples") {
    const TlfModel ms = make(1, 1, 100, kMs);
    CHECK(truncated_pdf(ms, 150.0) == 0.0);
    CHECK(truncated_pdf(ms, -100.5) == 0.0);
    CHECK_REL(truncated_pdf(ms, 0.0), normalize(ms) / kPi, 1e-13);
    CHECK(truncated_pdf(ms, 3.0) == truncated_pdf(ms, -3.0));

    const TlfModel ex = make(1.5, 1, 50, kExp);
    CHECK_REL(truncated_pdf(ex, 10.0), normalize(ex) * stable_pdf(StableParams(1.5, 1), 10.0) * std::exp(-0.2), 1e-13);

    const TruncatedDensity density(ex);
    CHECK(density.normalization() == normalize(ex));
    CHECK_REL(density(4.0), truncated_pdf(ex, 4.0), 1e-15);
}

TEST_CASE("normalization constant") {
    CHECK_REL(normalize(make(1, 1, 1, kMs)), 2.0, 1e-12);
    CHECK_REL(normalize(make(1, 1, 100, kMs)), 1.00640677094091925, 1e-12);
    CHECK(std::abs(normalize(make(1, 1, 1e8, kExp)) - 1.0) <= 1e-6);
    for (double alpha : {0.5, 1.0, 1.5}) {
        for (double eps : {1e-2, 1e-3}) {
            for (const auto& g : {kMs, kExp, DeformationSpec::power_exponential(1, 2.0)}) {
                const TlfModel m = make(alpha, 1, std::pow(eps, -1.0 / alpha), g);
                const double c = normalize(m);
                CAPTURE(alpha);
                CAPTURE(eps);
                CAPTURE(to_string(g.family()));
                CHECK(c > 1.0);
                CHECK(c - 1.0 <= 10.0 * m.epsilon());
            }
        }
    }
}

TEST_CASE("truncated density integrates to one") {
    for (double alpha : {0.5, 1.0, 1.5}) {
        CAPTURE(alpha);
        const TlfModel ms = make(alpha, 1, 100, kMs);
        CHECK(std::abs(independent_mass(ms, 100.0) - 1.0) <= 1e-8);
        const TlfModel ex = make(alpha, 1, 100, kExp);
        CHECK(std::abs(independent_mass(ex, 100.0 * 60.0) - 1.0) <= 1e-8);
    }
}

TEST_CASE("numeric moments") {
    // Cauchy truncated at ell: m_2 = C (2/pi) (ell - gamma atan(ell/gamma)).
    const TlfModel ms = make(1, 1, 100, kMs);
    const double c = normalize(ms);
    CHECK_REL(numeric_moment(ms, 2), c * 2.0 / kPi * (100.0 - std::atan(100.0)), 1e-10);
    CHECK(numeric_moment(ms, 3) == 0.0);
    CHECK_REL(numeric_moment(ms, 4),
              c * 2.0 / kPi * (std::pow(100.0, 3) / 3.0 - 100.0 + std::atan(100.0)), 1e-10);
    CHECK_THROWS_AS(numeric_moment(ms, 0), DomainError);
    CHECK_THROWS_AS(numeric_moment(ms, 10), DomainError);

    const MomentVector mv = moment_vector(ms);
    CHECK(mv.m2 == numeric_moment(ms, 2));
    CHECK(mv.m4 == numeric_moment(ms, 4));
    CHECK(mv.m6 == numeric_moment(ms, 6));
    CHECK(mv.normalization_c == c);
    CHECK(mv.epsilon == ms.epsilon());
}

TEST_CASE("cumulants from moments") {
    const LowerCumulants gauss = cumulants_from_moments({1.0, 3.0, 15.0, 1.0, 0.0});
    CHECK(gauss.kappa2 == 1.0);
    CHECK(gauss.kappa4 == 0.0);
    CHECK(gauss.kappa6 == 0.0);
    const LowerCumulants other = cumulants_from_moments({1.0, 9.0, 225.0, 1.0, 0.0});
    CHECK(other.kappa2 == 1.0);
    CHECK(other.kappa4 == 6.0);
    CHECK(other.kappa6 == 120.0);
}

TEST_CASE("convergence sweep") {
    const std::array<double, 3> eps{0.1, 0.01, 0.001};
    for (double alpha : {0.5, 1.0, 1.5}) {
        for (int order : {2, 4, 6}) {
            CAPTURE(alpha);
            CAPTURE(order);
            const auto rows = convergence_sweep(alpha, kExp, order, eps);
            REQUIRE(rows.size() == 3);
            for (const auto& r : rows) {
                CHECK(r.order == order);
                CHECK(r.kappa_asymptotic > 0.0);
                CHECK_REL(r.rel_error, std::abs(r.kappa_numeric - r.kappa_asymptotic) / r.kappa_asymptotic, 1e-15);
            }
            CHECK(rows[2].rel_error < rows[0].rel_error);
            const TlfModel m = make(alpha, 1, std::pow(1000.0, 1.0 / alpha), kExp);
            CHECK_REL(rows[2].kappa_asymptotic, cumulant(m, order), 1e-12);
        }
    }
    const auto ms = convergence_sweep(1.0, kMs, 2, eps);
    for (const auto& r : ms) CHECK(r.rel_error <= kRemainderConstant * r.epsilon);

    const std::array<double, 1> bad{0.5};
    CHECK_THROWS_AS(convergence_sweep(1.0, kMs, 2, bad), DomainError);
    CHECK_THROWS_AS(convergence_sweep(1.0, kMs, 8, eps), DomainError);
    CHECK_THROWS_AS(convergence_sweep(1.0, kMs, 3, eps), DomainError);
    const std::array<double, 1> zero{0.0};
    CHECK_THROWS_AS(convergence_sweep(1.0, kMs, 2, zero), DomainError);
}

TEST_CASE("tabulated CDF") {
    const TlfModel ms = make(1, 1, 100, kMs);
    const SymmetricCdf cdf = tabulate_cdf(ms);
    CHECK(std::abs(cdf.tabulated_mass() - 1.0) <= 1e-9);
    CHECK(cdf.cdf(0.0) == 0.5);
    CHECK(cdf.cdf(-200.0) == 0.0);
    CHECK(std::abs(cdf.cdf(200.0) - 1.0) <= 1e-9);
    // Cauchy: P(|X| <= 1) = C/2 within the truncation.
    CHECK_REL(cdf.cdf(1.0) - cdf.cdf(-1.0), normalize(ms) / 2.0, 1e-8);
    for (double u : {0.01, 0.2, 0.5, 0.77, 0.999}) CHECK(std::abs(cdf.cdf(cdf.quantile(u)) - u) <= 1e-10);
    CHECK_THROWS_AS(cdf.quantile(1.5), DomainError);
}
