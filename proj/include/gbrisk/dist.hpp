#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/owens_t.hpp>

#include "gbrisk/numerics.hpp"
#include "gbrisk/rng.hpp"

namespace gbrisk {

inline constexpr double inv_sqrt_2pi = 0.3989422804014326779399461;
inline constexpr double sqrt_two = 1.4142135623730950488016887;

inline double norm_pdf(double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / sqrt_two); }

inline double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("norm_quantile: p must lie in (0,1)");
    return -sqrt_two * boost::math::erfc_inv(2.0 * p);
}

/// Standardized skew-normal law with density 2*phi(x)*Phi(shape*x).
struct SkewNormalParams {
    double shape = 0.0;

    SkewNormalParams() = default;
    explicit SkewNormalParams(double s) : shape(s) {
        if (!std::isfinite(s))
            throw std::domain_error("SkewNormalParams: shape must be finite");
    }
};

inline double sn_pdf(double x, double shape) {
    return 2.0 * norm_pdf(x) * norm_cdf(shape * x);
}

// cdf via the Owen's T identity F(x) = Phi(x) - 2*T(x, shape).
inline double sn_cdf(double x, double shape) {
    const double v = norm_cdf(x) - 2.0 * boost::math::owens_t(x, shape);
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

inline double sn_quantile(double p, double shape) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("sn_quantile: p must lie in (0,1)");
    if (shape == 0.0) return norm_quantile(p);

    // Bracket around a normal-quantile starting point, then safeguarded Newton.
    double lo = norm_quantile(p) - 1.0, hi = lo + 2.0;
    for (double step = 1.0; sn_cdf(lo, shape) > p; step *= 2.0) lo -= step;
    for (double step = 1.0; sn_cdf(hi, shape) < p; step *= 2.0) hi += step;
    auto fn = [&](double x) { return std::make_pair(sn_cdf(x, shape) - p, sn_pdf(x, shape)); };
    return solve_monotone(fn, lo, hi, sn_cdf(lo, shape) - p, sn_cdf(hi, shape) - p,
                          0.5 * (lo + hi), 1e-13);
}

// Marginal shape of a two-factor return with loading rho and skew mixing delta.
inline double shape_from_loading(double rho, double delta) {
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::domain_error("shape_from_loading: rho must lie in [0,1)");
    if (!(std::abs(delta) < 1.0))
        throw std::domain_error("shape_from_loading: |delta| must be < 1");
    const double b = rho * delta;
    return b / std::sqrt(1.0 - b * b);
}

// delta = gamma / sqrt(1 + gamma^2); maps a factor shape to its mixing weight.
inline double delta_from_shape(double gamma) {
    return gamma / std::sqrt(1.0 + gamma * gamma);
}

// One draw of sqrt(1-delta^2)*X1 + delta*|W|, X1 and W independent standard normal.
// Distributed SN(0, 1, delta/sqrt(1-delta^2)).
inline double sn_sample(RngStream& stream, double delta) {
    if (!(std::abs(delta) < 1.0))
        throw std::domain_error("sn_sample: |delta| must be < 1");
    const double x1 = norm_quantile(stream.next_open01());
    const double w = norm_quantile(stream.next_open01());
    return std::sqrt(1.0 - delta * delta) * x1 + delta * std::abs(w);
}

}  // namespace gbrisk
