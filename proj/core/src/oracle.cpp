#include "tlf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tlf/cumulant_engine.hpp"
#include "tlf/errors.hpp"
#include "tlf/quadrature.hpp"

namespace tlf {
namespace {

// g(Xi) Xi^(power + 2) below this marks the end of the effective support.
constexpr double kSupportThreshold = 1e-18;

double support_extent(const TlfModel& model, double power) {
    const auto& g = model.deformation();
    if (g.family() == TruncationFamily::MantegnaStanley) return model.ell();
    return model.ell() * tail_extent(g, power + 2.0, kSupportThreshold);
}

QuadratureOptions moment_options() {
    QuadratureOptions opt;
    opt.rel_tol = 1e-12;
    opt.max_panels = 6000;
    opt.accept_rel_tol = 1e-9;
    return opt;
}

void check_moment_order(int j) {
    if (j < 0 || j > 8) {
        std::ostringstream msg;
        msg << "moment order must lie in [0, 8], got " << j;
        throw DomainError(msg.str());
    }
}

}  // namespace

double unnormalized_half_moment(const TlfModel& model, int power) {
    check_moment_order(power);
    const StableParams& stable = model.stable();
    const auto& g = model.deformation();
    const double ell = model.ell();
    const double x_max = support_extent(model, power);
    const double x_core = std::min(model.gamma(), x_max);

    auto linear = [&](double x) {
        return std::pow(x, power) * stable_pdf(stable, x) * g(x / ell);
    };
    double total = integrate(linear, 0.0, x_core, moment_options()).value;
    if (x_core >= x_max) return total;

    // Log-spaced remainder: x = e^t, dx = x dt.
    auto logarithmic = [&](double t) {
        const double x = std::exp(t);
        const double gx = g(x / ell);
        if (gx == 0.0) return 0.0;
        return std::pow(x, power + 1) * stable_pdf(stable, x) * gx;
    };
    const double t0 = std::log(x_core);
    const double t1 = std::log(x_max);
    std::vector<double> breaks;
    for (double t = t0; t < t1; t += 1.0) breaks.push_back(t);
    const double t_ell = std::log(ell);
    if (t_ell > t0 && t_ell < t1) breaks.push_back(t_ell);
    breaks.push_back(t1);
    std::sort(breaks.begin(), breaks.end());
    total += integrate(logarithmic, breaks, moment_options()).value;
    return total;
}

double normalize(const TlfModel& model) { return 0.5 / unnormalized_half_moment(model, 0); }

TruncatedDensity::TruncatedDensity(TlfModel model) : model_(std::move(model)), c_(normalize(model_)) {}

double TruncatedDensity::operator()(double x) const {
    const double g = model_.deformation()(x / model_.ell());
    if (g == 0.0) return 0.0;
    return c_ * stable_pdf(model_.stable(), x) * g;
}

double TruncatedDensity::extent(double power) const { return support_extent(model_, power); }

double truncated_pdf(const TlfModel& model, double x) { return TruncatedDensity(model)(x); }

double numeric_moment(const TlfModel& model, int j) {
    if (j % 2 != 0) {
        check_moment_order(j);
        return 0.0;
    }
    if (j < 2) throw DomainError("numeric_moment expects an even order in [2, 8]");
    return unnormalized_half_moment(model, j) / unnormalized_half_moment(model, 0);
}

MomentVector moment_vector(const TlfModel& model) {
    const double h0 = unnormalized_half_moment(model, 0);
    return {unnormalized_half_moment(model, 2) / h0, unnormalized_half_moment(model, 4) / h0,
            unnormalized_half_moment(model, 6) / h0, 0.5 / h0, model.epsilon()};
}

LowerCumulants cumulants_from_moments(const MomentVector& m) {
    return {m.m2, m.m4 - 3.0 * m.m2 * m.m2, m.m6 - 15.0 * m.m2 * m.m4 + 30.0 * m.m2 * m.m2 * m.m2};
}

std::vector<OracleReport> convergence_sweep(double alpha, const DeformationSpec& shape, int order,
                                            std::span<const double> eps_list, double gamma) {
    if (order != 2 && order != 4 && order != 6) {
        std::ostringstream msg;
        msg << "oracle order must be 2, 4 or 6, got " << order;
        throw DomainError(msg.str());
    }
    for (double eps : eps_list) {
        if (!(eps > 0.0 && eps <= 0.1)) {
            std::ostringstream msg;
            msg << "epsilon must lie in (0, 0.1], got " << eps;
            throw DomainError(msg.str());
        }
    }
    const StableParams stable(alpha, gamma);

    std::vector<OracleReport> reports;
    reports.reserve(eps_list.size());
    for (double eps : eps_list) {
        const double ell = gamma / std::pow(eps, 1.0 / alpha);
        const TlfModel model(stable, shape.with_ell(ell));
        const MomentVector m = moment_vector(model);
        const LowerCumulants k = cumulants_from_moments(m);
        const double m_j = order == 2 ? m.m2 : order == 4 ? m.m4 : m.m6;
        const double k_num = order == 2 ? k.kappa2 : order == 4 ? k.kappa4 : k.kappa6;
        const double k_asym = cumulant(model, order);
        reports.push_back(
            {order, m_j, k_num, k_asym, std::abs(k_num - k_asym) / std::abs(k_asym), model.epsilon()});
    }
    return reports;
}

SymmetricCdf::SymmetricCdf(std::function<double(double)> density, std::vector<double> nodes)
    : x_(std::move(nodes)) {
    if (x_.size() < 2 || x_.front() != 0.0 || !std::is_sorted(x_.begin(), x_.end())) {
        throw DomainError("CDF nodes must start at 0 and be ascending");
    }
    f_.reserve(x_.size());
    for (double x : x_) f_.push_back(density(x));
    half_.assign(x_.size(), 0.0);
    QuadratureOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-16;
    opt.max_panels = 200;
    opt.accept_rel_tol = 1e-6;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
        half_[i + 1] = half_[i] + integrate(density, x_[i], x_[i + 1], opt).value;
    }
}

double SymmetricCdf::half_cdf(std::size_t seg, double x) const {
    const double a = x_[seg];
    const double b = x_[seg + 1];
    const double h = b - a;
    const double t = (x - a) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * half_[seg] + h10 * h * f_[seg] + h01 * half_[seg + 1] + h11 * h * f_[seg + 1];
}

double SymmetricCdf::cdf(double x) const {
    if (x < 0.0) return 1.0 - cdf(-x);
    if (x >= x_.back()) return 1.0;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t seg = static_cast<std::size_t>(it - x_.begin()) - 1;
    return 0.5 + half_cdf(seg, x);
}

double SymmetricCdf::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
    if (u < 0.5) return -quantile(1.0 - u);
    const double target = u - 0.5;
    if (target >= half_.back()) return x_.back();
    const auto it = std::upper_bound(half_.begin(), half_.end(), target);
    const std::size_t seg = static_cast<std::size_t>(it - half_.begin()) - 1;
    double lo = x_[seg];
    double hi = x_[seg + 1];
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 100; ++iter) {
        const double v = half_cdf(seg, x) - target;
        if (v > 0.0) hi = x; else lo = x;
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(x))) break;
        // Newton step using the Hermite derivative approximated by the density
        // interpolated linearly; fall back to bisection when it leaves [lo, hi].
        const double t = (x - x_[seg]) / (x_[seg + 1] - x_[seg]);
        const double slope = (1.0 - t) * f_[seg] + t * f_[seg + 1];
        double next = slope > 0.0 ? x - v / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) break;
        x = next;
    }
    return x;
}

SymmetricCdf tabulate_cdf(const TlfModel& model, std::size_t nodes) {
    if (nodes < 16) throw DomainError("tabulate_cdf needs at least 16 nodes");
    const TruncatedDensity density(model);
    const double x_max = density.extent(0.0);
    const double core = std::min(model.gamma(), x_max);
    const std::size_t n_core = nodes / 4;
    const std::size_t n_tail = nodes - n_core;

    std::vector<double> grid;
    grid.reserve(nodes + 1);
    for (std::size_t i = 0; i < n_core; ++i) grid.push_back(core * static_cast<double>(i) / n_core);
    if (core < x_max) {
        const double ratio = std::log(x_max / core);
        for (std::size_t i = 0; i < n_tail; ++i) {
            grid.push_back(core * std::exp(ratio * static_cast<double>(i) / n_tail));
        }
    }
    grid.push_back(x_max);
    return SymmetricCdf([density](double x) { return density(x); }, std::move(grid));
}

}  // namespace tlf
