#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace fvheat {

// Settings for the composite-Simpson transforms and the adaptive quadrature
// behind the interpolation-norm constant.  node_count is per axis; Simpson
// needs it odd.
struct QuadratureSpec {
    std::size_t node_count = 513;
    double rel_tol = 1e-12;

    void validate() const {
        if (node_count < 3 || node_count % 2 == 0)
            throw std::invalid_argument("QuadratureSpec: node_count must be odd and >= 3");
        if (!(rel_tol > 0.0))
            throw std::invalid_argument("QuadratureSpec: rel_tol must be positive");
    }
};

// Composite Simpson rule with `nodes` equally spaced nodes (odd, >= 3).
// Works for real- and complex-valued integrands.
template <class F>
auto simpson(F&& f, double a, double b, std::size_t nodes) -> decltype(f(a)) {
    if (nodes < 3 || nodes % 2 == 0)
        throw std::invalid_argument("simpson: node count must be odd and >= 3");
    const double h = (b - a) / static_cast<double>(nodes - 1);
    auto acc = f(a) + f(b);
    for (std::size_t i = 1; i + 1 < nodes; ++i) {
        const double x = a + h * static_cast<double>(i);
        acc += f(x) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * (h / 3.0);
}

namespace detail {

template <class F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double h = b - a;
    const double left = (h / 12.0) * (fa + 4.0 * flm + fm);
    const double right = (h / 12.0) * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson with Richardson correction; `rel_tol` is relative to a
// first coarse estimate of the integral.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol, int max_depth = 40) {
    if (!(b > a))
        throw std::invalid_argument("adaptive_simpson: requires b > a");
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
    // Coarse magnitude estimate to anchor the absolute tolerance.
    double scale = std::abs(whole);
    const std::size_t probe = 65;
    double coarse = std::abs(simpson(f, a, b, probe));
    scale = std::max(scale, coarse);
    if (scale == 0.0)
        scale = 1.0;
    const double tol = rel_tol * scale;
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

} // namespace fvheat
