#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace tlf {

/// Two-sample Kolmogorov-Smirnov distance. Inputs must be sorted ascending.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample KS distance of a sorted sample against a continuous CDF.
double ks_one_sample(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// Asymptotic two-sample critical value c(level) sqrt((n + m) / (n m)).
/// Supported levels: 0.10, 0.05, 0.01.
double ks_critical_two_sample(std::size_t n, std::size_t m, double level = 0.01);

/// Asymptotic one-sample critical value c(level) / sqrt(n).
double ks_critical_one_sample(std::size_t n, double level = 0.01);

}  // namespace tlf
