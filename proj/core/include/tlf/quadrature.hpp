#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <tuple>
#include <utility>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tlf/errors.hpp"

namespace tlf {

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    std::size_t max_panels = 4000;
    /// When the panel budget runs out or panels reach rounding level, a
    /// result whose error is still within accept_rel_tol * |I| is returned
    /// instead of throwing.
    double accept_rel_tol = 0.0;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t panels = 0;
};

namespace detail {

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

inline bool panel_less(const Panel& x, const Panel& y) { return x.error < y.error; }

template <class F>
Panel gk21_panel(F& f, double a, double b) {
    double err = 0.0;
    auto g = [&f](double x) -> double { return f(x); };
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 21>::integrate(g, a, b, 0, 0.0, &err);
    return {a, b, v, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (10/21) quadrature over the segments
/// delimited by `breakpoints`. The panel with the largest error estimate is
/// bisected until the summed error meets max(abs_tol, rel_tol * |I|).
/// Throws QuadratureError when the panel budget is exhausted (or a panel
/// shrinks to rounding level) short of accept_rel_tol, or when the
/// integrand produces a non-finite value.
template <class F>
QuadratureResult integrate(F&& f, std::span<const double> breakpoints,
                           const QuadratureOptions& opt = {}) {
    if (breakpoints.size() < 2) return {};
    std::vector<detail::Panel> heap;
    heap.reserve(opt.max_panels + 2);
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (breakpoints[i + 1] == breakpoints[i]) continue;
        heap.push_back(detail::gk21_panel(f, breakpoints[i], breakpoints[i + 1]));
    }
    std::make_heap(heap.begin(), heap.end(), detail::panel_less);

    auto totals = [&heap] {
        double v = 0.0;
        double e = 0.0;
        for (const auto& p : heap) {
            v += p.value;
            e += p.error;
        }
        return std::pair{v, e};
    };

    auto [value, error] = totals();
    std::size_t iterations = 0;
    while (true) {
        if (!std::isfinite(value) || !std::isfinite(error)) {
            throw QuadratureError("quadrature: integrand produced a non-finite value");
        }
        const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
        if (error <= target || heap.empty()) break;
        const bool acceptable = error <= opt.accept_rel_tol * std::abs(value);
        if (heap.size() >= opt.max_panels) {
            if (acceptable) break;
            std::ostringstream msg;
            msg << "quadrature: tolerance not reached after " << heap.size()
                << " panels (estimate " << value << ", error " << error << ", target " << target
                << ")";
            throw QuadratureError(msg.str());
        }
        const detail::Panel& top = heap.front();
        const double mid = 0.5 * (top.a + top.b);
        if (!(mid > top.a && mid < top.b)) {
            if (acceptable) break;
            throw QuadratureError("quadrature: panel cannot be subdivided further");
        }
        std::pop_heap(heap.begin(), heap.end(), detail::panel_less);
        const detail::Panel worst = heap.back();
        heap.pop_back();
        const auto left = detail::gk21_panel(f, worst.a, mid);
        const auto right = detail::gk21_panel(f, mid, worst.b);
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), detail::panel_less);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), detail::panel_less);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        if (++iterations % 64 == 0) std::tie(value, error) = totals();
    }
    std::tie(value, error) = totals();
    return {value, error, heap.size()};
}

template <class F>
QuadratureResult integrate(F&& f, std::initializer_list<double> breakpoints,
                           const QuadratureOptions& opt = {}) {
    return integrate(std::forward<F>(f), std::span<const double>(breakpoints.begin(), breakpoints.size()),
                     opt);
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    const double pts[2] = {a, b};
    return integrate(std::forward<F>(f), std::span<const double>(pts), opt);
}

}  // namespace tlf
