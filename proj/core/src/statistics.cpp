#include "tlf/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "tlf/errors.hpp"

namespace tlf {
namespace {

double ks_coefficient(double level) {
    if (level == 0.10) return 1.224;
    if (level == 0.05) return 1.358;
    if (level == 0.01) return 1.628;
    throw DomainError("KS level must be one of 0.10, 0.05, 0.01");
}

}  // namespace

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("KS statistic needs non-empty samples");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_one_sample(std::span<const double> sorted, const std::function<double(double)>& cdf) {
    if (sorted.empty()) throw DomainError("KS statistic needs a non-empty sample");
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

double ks_critical_two_sample(std::size_t n, std::size_t m, double level) {
    if (n == 0 || m == 0) throw DomainError("KS critical value needs non-empty samples");
    const double nd = static_cast<double>(n);
    const double md = static_cast<double>(m);
    return ks_coefficient(level) * std::sqrt((nd + md) / (nd * md));
}

double ks_critical_one_sample(std::size_t n, double level) {
    if (n == 0) throw DomainError("KS critical value needs a non-empty sample");
    return ks_coefficient(level) / std::sqrt(static_cast<double>(n));
}

}  // namespace tlf
