#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gbrisk {

// Safeguarded Newton on a strictly monotone function. `f` returns (value, derivative).
// The bracket [lo, hi] must straddle the root; falls back to bisection whenever a
// Newton step leaves the bracket or fails to shrink the residual.
template <class F>
double solve_monotone(F&& f, double lo, double hi, double flo, double fhi,
                      double x0, double ftol, int max_iter = 200) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("solve_monotone: bracket does not straddle a root");
    const bool increasing = flo < 0.0;
    double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        auto [fx, dfx] = f(x);
        if (std::abs(fx) <= ftol) return x;
        if ((fx < 0.0) == increasing)
            lo = x;
        else
            hi = x;
        double step = (dfx != 0.0) ? -fx / dfx : std::numeric_limits<double>::infinity();
        double xn = x + step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (xn == x) xn = 0.5 * (lo + hi);
        if (xn == x) return x;  // bracket exhausted at machine precision
        x = xn;
    }
    return x;
}

// Recursive adaptive Simpson quadrature on [a, b].
namespace detail {
template <class F>
double adapt_simpson(F& f, double a, double m, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt_simpson(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt_simpson(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-10, int max_depth = 52) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adapt_simpson(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

// Integrate over a partition: adaptive Simpson per panel. Breakpoints must be sorted.
template <class F>
double integrate_panels(F&& f, const std::vector<double>& breaks, double tol = 1e-10) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        total += integrate(f, breaks[i], breaks[i + 1], tol);
    return total;
}

// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on P_n.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(std::size_t n) : nodes(n), weights(n) {
        const double pi = 3.14159265358979323846;
        for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(n) + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (std::size_t k = 2; k <= n; ++k) {
                    double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

// Riemann zeta on s > 1 by Euler-Maclaurin with a truncated tail expansion.
inline double riemann_zeta(double s) {
    if (!(s > 1.0)) throw std::domain_error("riemann_zeta: requires s > 1");
    constexpr int m = 32;
    double sum = 0.0;
    for (int i = 1; i < m; ++i) sum += std::pow(static_cast<double>(i), -s);
    const double M = static_cast<double>(m);
    const double ms = std::pow(M, -s);
    sum += M * ms / (s - 1.0);
    sum += 0.5 * ms;
    sum += s * ms / M / 12.0;
    sum -= s * (s + 1.0) * (s + 2.0) * ms / (M * M * M) / 720.0;
    sum += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * ms / (M * M * M * M * M) / 30240.0;
    return sum;
}

}  // namespace gbrisk
