#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "gbrisk/copula.hpp"
#include "gbrisk/dist.hpp"
#include "gbrisk/numerics.hpp"

namespace gbrisk {

// Conditional loss of one class given the skew-normal factor realization x:
// N((K - rho x)/sqrt(1 - rho^2)). Strictly decreasing in x for rho > 0.
inline double conditional_loss(const LoanClassParams& cls, double x) {
    if (cls.rho == 0.0) return cls.pd;
    const double k = default_threshold(cls);
    return norm_cdf((k - cls.rho * x) / std::sqrt(1.0 - cls.rho * cls.rho));
}

/// Limiting mixture law of the green-brown portfolio loss under a common
/// skew mixing weight: L = v(X), X ~ SN(0, 1, gamma).
class LimitModel {
  public:
    LimitModel(const LoanClassParams& green, const LoanClassParams& brown)
        : green_(green), brown_(brown) {
        green_.validate();
        brown_.validate();
        if (std::abs(green_.omega + brown_.omega - 1.0) > 1e-12)
            throw std::invalid_argument("LimitModel: budgets must sum to 1");
        if (std::abs(green_.delta - brown_.delta) > 1e-12)
            throw std::invalid_argument("LimitModel: requires a common delta across classes");
        k_green_ = default_threshold(green_);
        k_brown_ = default_threshold(brown_);
        gamma_ = green_.delta / std::sqrt(1.0 - green_.delta * green_.delta);
        sg_ = std::sqrt(1.0 - green_.rho * green_.rho);
        sb_ = std::sqrt(1.0 - brown_.rho * brown_.rho);
    }

    static LimitModel from_spec(const PortfolioSpec& spec) {
        return LimitModel(spec.green, spec.brown);
    }

    const LoanClassParams& green() const { return green_; }
    const LoanClassParams& brown() const { return brown_; }
    double threshold_green() const { return k_green_; }
    double threshold_brown() const { return k_brown_; }
    double gamma() const { return gamma_; }
    bool invertible() const { return green_.rho > 0.0 || brown_.rho > 0.0; }

    double loss_green(double x) const {
        return green_.rho == 0.0 ? green_.pd
                                 : norm_cdf((k_green_ - green_.rho * x) / sg_);
    }
    double loss_brown(double x) const {
        return brown_.rho == 0.0 ? brown_.pd
                                 : norm_cdf((k_brown_ - brown_.rho * x) / sb_);
    }

    // v(x) = omega_b L_b(x) + omega_g L_g(x)
    double mix(double x) const {
        return brown_.omega * loss_brown(x) + green_.omega * loss_green(x);
    }

    // v'(x) < 0 whenever some loading is positive
    double mix_derivative(double x) const {
        double d = 0.0;
        if (brown_.rho > 0.0)
            d -= brown_.omega * brown_.rho / sb_ * norm_pdf((k_brown_ - brown_.rho * x) / sb_);
        if (green_.rho > 0.0)
            d -= green_.omega * green_.rho / sg_ * norm_pdf((k_green_ - green_.rho * x) / sg_);
        return d;
    }

    // range of v: classes with zero loading contribute a constant pd term
    double v_sup() const {
        return brown_.omega * (brown_.rho > 0.0 ? 1.0 : brown_.pd) +
               green_.omega * (green_.rho > 0.0 ? 1.0 : green_.pd);
    }
    double v_inf() const {
        return brown_.omega * (brown_.rho > 0.0 ? 0.0 : brown_.pd) +
               green_.omega * (green_.rho > 0.0 ? 0.0 : green_.pd);
    }

  private:
    LoanClassParams green_;
    LoanClassParams brown_;
    double k_green_ = 0.0, k_brown_ = 0.0, gamma_ = 0.0, sg_ = 1.0, sb_ = 1.0;
};

inline double mix_loss(const LimitModel& model, double x) { return model.mix(x); }

// x*(l): unique root of v(x) = l; bracket grown geometrically from 0, then
// safeguarded Newton to |v - l| <= 1e-13 on the loss scale.
inline double invert_v(const LimitModel& model, double loss_level) {
    if (!(loss_level > 0.0 && loss_level < 1.0))
        throw std::domain_error("invert_v: loss level must lie in (0,1)");
    if (!model.invertible())
        throw std::domain_error("invert_v: v is constant when both loadings are zero");
    if (!(loss_level > model.v_inf() && loss_level < model.v_sup()))
        throw std::domain_error("invert_v: loss level outside the range of v");

    double lo = -1.0, hi = 1.0;
    int guard = 0;
    while (model.mix(lo) < loss_level && guard++ < 300) lo *= 2.0;
    guard = 0;
    while (model.mix(hi) > loss_level && guard++ < 300) hi *= 2.0;
    auto fn = [&](double x) {
        return std::make_pair(model.mix(x) - loss_level, model.mix_derivative(x));
    };
    // v is decreasing: swap ends so the solver sees an increasing bracket
    return solve_monotone(fn, lo, hi, model.mix(lo) - loss_level,
                          model.mix(hi) - loss_level, 0.0, 1e-13);
}

inline double mix_density(const LimitModel& model, double loss_level) {
    if (!(loss_level > model.v_inf() && loss_level < model.v_sup())) return 0.0;
    const double xs = invert_v(model, loss_level);
    const double dv = model.mix_derivative(xs);
    return sn_pdf(xs, model.gamma()) / std::abs(dv);
}

inline double mix_cdf(const LimitModel& model, double loss_level) {
    if (loss_level <= model.v_inf()) return 0.0;
    if (loss_level >= model.v_sup()) return 1.0;
    const double xs = invert_v(model, loss_level);
    return 1.0 - sn_cdf(xs, model.gamma());
}

// VaR_beta(L) = v(q_X(1 - beta)); affine in the class budgets.
inline double mix_var(const LimitModel& model, double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::domain_error("mix_var: beta must lie in (0,1)");
    const double xq = sn_quantile(1.0 - beta, model.gamma());
    return model.mix(xq);
}

// Closed-form density of the one-class limit:
// f(l) = 2 (s/rho) N(gamma x*) exp(-(x*^2 - z^2)/2), x* = (K - s z)/rho, z = N^{-1}(l).
inline double single_class_density(double p, double rho, double gamma, double loss_level) {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::domain_error("single_class_density: rho must lie in (0,1)");
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("single_class_density: p must lie in (0,1)");
    if (!(loss_level > 0.0 && loss_level < 1.0)) return 0.0;
    const double delta = delta_from_shape(gamma);
    const double k = sn_quantile(p, shape_from_loading(rho, delta));
    const double s = std::sqrt(1.0 - rho * rho);
    const double z = norm_quantile(loss_level);
    const double xs = (k - s * z) / rho;
    return 2.0 * (s / rho) * norm_cdf(gamma * xs) * std::exp(-0.5 * (xs * xs - z * z));
}

// P(omega_b L_b(X^b) + omega_g L_g(X^g) <= l) for general per-class deltas.
// Outer Gauss-Legendre over the half-normal factor via the probability
// transform t = N^{-1}((1+u)/2); the X1-event boundary is located by root
// finding per node and the inner integral collapses to N_c(x1*(t)).
inline double general_mix_cdf(const LoanClassParams& green, const LoanClassParams& brown,
                              double loss_level, std::size_t outer_nodes = 200) {
    green.validate();
    brown.validate();
    if (std::abs(green.omega + brown.omega - 1.0) > 1e-12)
        throw std::invalid_argument("general_mix_cdf: budgets must sum to 1");
    if (!(loss_level > 0.0 && loss_level < 1.0))
        throw std::domain_error("general_mix_cdf: loss level must lie in (0,1)");

    const double kg = default_threshold(green);
    const double kb = default_threshold(brown);
    const double sg = std::sqrt(1.0 - green.rho * green.rho);
    const double sb = std::sqrt(1.0 - brown.rho * brown.rho);
    const double cg = std::sqrt(1.0 - green.delta * green.delta);
    const double cb = std::sqrt(1.0 - brown.delta * brown.delta);

    if (green.rho == 0.0 && brown.rho == 0.0) {
        const double fixed = brown.omega * brown.pd + green.omega * green.pd;
        return loss_level >= fixed ? 1.0 : 0.0;
    }

    // range limits of the conditional mixed loss (independent of the t node)
    const double sup_m = brown.omega * (brown.rho > 0.0 ? 1.0 : brown.pd) +
                         green.omega * (green.rho > 0.0 ? 1.0 : green.pd);
    const double inf_m = brown.omega * (brown.rho > 0.0 ? 0.0 : brown.pd) +
                         green.omega * (green.rho > 0.0 ? 0.0 : green.pd);
    if (loss_level >= sup_m) return 1.0;
    if (loss_level <= inf_m) return 0.0;

    auto mixed = [&](double x1, double t) {
        const double lg = green.rho == 0.0
                              ? green.pd
                              : norm_cdf((kg - green.rho * (cg * x1 + green.delta * t)) / sg);
        const double lb = brown.rho == 0.0
                              ? brown.pd
                              : norm_cdf((kb - brown.rho * (cb * x1 + brown.delta * t)) / sb);
        return green.omega * lg + brown.omega * lb;
    };

    const GaussLegendre gl(outer_nodes);
    double total = 0.0;
    for (std::size_t i = 0; i < outer_nodes; ++i) {
        const double u = 0.5 * (gl.nodes[i] + 1.0);
        const double w = 0.5 * gl.weights[i];
        const double t = norm_quantile(0.5 * (1.0 + u));

        double lo = -1.0, hi = 1.0;
        int guard = 0;
        while (mixed(lo, t) < loss_level && guard++ < 300) lo *= 2.0;
        if (mixed(lo, t) < loss_level) continue;  // event unreachable: contributes 0
        guard = 0;
        while (mixed(hi, t) > loss_level && guard++ < 300) hi *= 2.0;
        if (mixed(hi, t) > loss_level) {
            total += w;  // event certain for every x1
            continue;
        }
        auto fn = [&](double x) {
            // derivative unused; pure bisection via zero slope fallback
            return std::make_pair(mixed(x, t) - loss_level, 0.0);
        };
        const double root = solve_monotone(fn, lo, hi, mixed(lo, t) - loss_level,
                                           mixed(hi, t) - loss_level, 0.0, 1e-14, 400);
        total += w * (1.0 - norm_cdf(root));
    }
    return total < 0.0 ? 0.0 : (total > 1.0 ? 1.0 : total);
}

}  // namespace gbrisk
