#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gbrisk/dist.hpp"
#include "gbrisk/exposure.hpp"
#include "gbrisk/rng.hpp"

namespace gbrisk {

/// One homogeneous loan class: long-run default probability, factor loading,
/// skew mixing weight, exposure budget and obligor count.
struct LoanClassParams {
    double pd = 0.01;       // p^(a)
    double rho = 0.1;       // loading in [0, 1)
    double delta = 0.0;     // skew mixing in (-1, 1)
    double omega = 0.5;     // exposure budget
    std::size_t count = 1;  // obligors

    void validate() const {
        if (!(pd > 0.0 && pd < 1.0))
            throw std::invalid_argument("LoanClassParams: pd must lie in (0,1)");
        if (!(rho >= 0.0 && rho < 1.0))
            throw std::invalid_argument("LoanClassParams: rho must lie in [0,1)");
        if (!(std::abs(delta) < 1.0))
            throw std::invalid_argument("LoanClassParams: |delta| must be < 1");
        if (!(omega >= 0.0 && omega <= 1.0))
            throw std::invalid_argument("LoanClassParams: omega must lie in [0,1]");
    }

    double beta() const { return rho * delta; }
    double marginal_shape() const { return shape_from_loading(rho, delta); }
};

/// Green + brown classes plus the exposure law; ordering is brown block first.
struct PortfolioSpec {
    LoanClassParams green;
    LoanClassParams brown;
    ExposureLaw exposure_law;

    void validate() const {
        green.validate();
        brown.validate();
        if (std::abs(green.omega + brown.omega - 1.0) > 1e-12)
            throw std::invalid_argument("PortfolioSpec: class budgets must sum to 1");
    }

    std::size_t total_count() const { return green.count + brown.count; }
};

// K^(a) = F_{Y^a}^{-1}(p^(a)) under the marginal skew-normal law.
inline double default_threshold(const LoanClassParams& cls) {
    cls.validate();
    return sn_quantile(cls.pd, cls.marginal_shape());
}

struct Matrix {
    std::size_t n = 0;
    std::vector<double> data;

    explicit Matrix(std::size_t dim) : n(dim), data(dim * dim, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

// The partitioned correlation matrix of the Gaussian residual vector V:
// unit diagonal, within-class off-diagonal (rho^2 - beta^2)/(1 - beta^2),
// cross-class entries the product of the per-class square roots.
// Materialized only for validation; the sampler never builds it.
inline Matrix build_sigma(const PortfolioSpec& spec) {
    spec.validate();
    const std::size_t nb = spec.brown.count, ng = spec.green.count;
    if (nb == 0 || ng == 0)
        throw std::invalid_argument("build_sigma: degenerate class block (zero count)");

    auto within = [](const LoanClassParams& c) {
        const double b2 = c.beta() * c.beta();
        return (c.rho * c.rho - b2) / (1.0 - b2);
    };
    const double wb = within(spec.brown), wg = within(spec.green);
    const double cross = std::sqrt(wb) * std::sqrt(wg);

    Matrix sigma(nb + ng);
    for (std::size_t i = 0; i < nb + ng; ++i) {
        for (std::size_t j = 0; j < nb + ng; ++j) {
            if (i == j) {
                sigma(i, j) = 1.0;
            } else if (i < nb && j < nb) {
                sigma(i, j) = wb;
            } else if (i >= nb && j >= nb) {
                sigma(i, j) = wg;
            } else {
                sigma(i, j) = cross;
            }
        }
    }
    return sigma;
}

// One joint draw of the return vector, brown block first: common X1 ~ N(0,1)
// and X2 = |W|, independent idiosyncratic shock per obligor.
inline std::vector<double> sample_returns(const PortfolioSpec& spec, RngStream& stream) {
    spec.validate();
    const double x1 = norm_quantile(stream.next_open01());
    const double x2 = std::abs(norm_quantile(stream.next_open01()));

    std::vector<double> y(spec.total_count());
    std::size_t pos = 0;
    for (const LoanClassParams* cls : {&spec.brown, &spec.green}) {
        const double systematic =
            cls->rho * (std::sqrt(1.0 - cls->delta * cls->delta) * x1 + cls->delta * x2);
        const double idio = std::sqrt(1.0 - cls->rho * cls->rho);
        for (std::size_t h = 0; h < cls->count; ++h)
            y[pos++] = systematic + idio * norm_quantile(stream.next_open01());
    }
    return y;
}

}  // namespace gbrisk
