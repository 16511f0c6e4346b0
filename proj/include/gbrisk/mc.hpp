#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gbrisk/copula.hpp"
#include "gbrisk/dist.hpp"
#include "gbrisk/exposure.hpp"
#include "gbrisk/lhp.hpp"

namespace gbrisk {

struct McConfig {
    std::size_t n_samples = 1'000'000;
    std::uint64_t seed = 1;
    std::vector<double> quantile_levels = {0.99, 0.995, 0.999};
    std::size_t chunk_size = 8192;
    unsigned threads = 0;  // 0: hardware concurrency

    void validate() const {
        if (n_samples == 0) throw std::invalid_argument("McConfig: n_samples must be positive");
        if (chunk_size == 0) throw std::invalid_argument("McConfig: chunk_size must be positive");
        double prev = 0.0;
        for (double q : quantile_levels) {
            if (!(q > 0.0 && q < 1.0))
                throw std::invalid_argument("McConfig: quantile levels must lie in (0,1)");
            if (q <= prev)
                throw std::invalid_argument("McConfig: quantile levels must be ascending");
            prev = q;
        }
    }
};

struct LossSampleSummary {
    std::map<double, double> empirical_quantiles;
    double mean = 0.0;
    double variance = 0.0;
    std::size_t n_samples = 0;
    double hhi_green = 0.0;  // within-class weights renormalized to sum 1
    double hhi_brown = 0.0;
};

// Upper order statistic: value at 1-based index ceil(level * n) of the sorted sample.
inline double empirical_quantile(const std::vector<double>& sorted_samples, double level) {
    if (sorted_samples.empty())
        throw std::invalid_argument("empirical_quantile: empty sample");
    if (!(level > 0.0 && level < 1.0))
        throw std::domain_error("empirical_quantile: level must lie in (0,1)");
    const double n = static_cast<double>(sorted_samples.size());
    auto idx = static_cast<std::size_t>(std::ceil(level * n));
    if (idx < 1) idx = 1;
    if (idx > sorted_samples.size()) idx = sorted_samples.size();
    return sorted_samples[idx - 1];
}

// Exact conditional expected loss at a factor realization (x1, x2 >= 0).
inline double conditional_loss_given_factors(const PortfolioSpec& spec, double x1, double x2) {
    if (!(x2 >= 0.0))
        throw std::domain_error("conditional_loss_given_factors: x2 must be nonnegative");
    auto term = [&](const LoanClassParams& c) {
        if (c.rho == 0.0) return c.omega * c.pd;
        const double x = std::sqrt(1.0 - c.delta * c.delta) * x1 + c.delta * x2;
        const double k = default_threshold(c);
        return c.omega * norm_cdf((k - c.rho * x) / std::sqrt(1.0 - c.rho * c.rho));
    };
    return term(spec.brown) + term(spec.green);
}

namespace detail {

struct ClassDraws {
    double threshold = 0.0;
    double rho = 0.0;
    double delta = 0.0;
    double idio = 1.0;
    std::vector<double> weights;  // budget-scaled, class-internal ranking
};

inline ClassDraws prepare_class(const LoanClassParams& cls, const ExposureLaw& law) {
    ClassDraws cd;
    cd.threshold = default_threshold(cls);
    cd.rho = cls.rho;
    cd.delta = cls.delta;
    cd.idio = std::sqrt(1.0 - cls.rho * cls.rho);
    cd.weights = make_weights(cls.count, law, cls.omega).weights;
    return cd;
}

// Weighted default-indicator sum of one class given its conditional PD.
// Each obligor consumes one uniform draw (inverse-cdf Z compare).
inline double class_loss(const ClassDraws& cd, double cond_pd, RngStream& rng) {
    std::uint64_t thr;
    if (cond_pd >= 1.0) {
        thr = UINT64_MAX;
    } else if (cond_pd <= 0.0) {
        for (std::size_t i = 0; i < cd.weights.size(); ++i) rng.next_u64();
        return 0.0;
    } else {
        thr = static_cast<std::uint64_t>(cond_pd * 18446744073709551616.0);
    }
    double loss = 0.0;
    for (double w : cd.weights)
        if (rng.next_u64() < thr) loss += w;
    return loss;
}

inline double renorm_hhi(const std::vector<double>& w) {
    double s = 0.0, q = 0.0;
    for (double x : w) s += x;
    for (double x : w) q += x * x;
    return s > 0.0 ? q / (s * s) : 0.0;
}

template <class PerReplication>
void run_chunks(const McConfig& mc, PerReplication&& body) {
    const std::size_t n_chunks = (mc.n_samples + mc.chunk_size - 1) / mc.chunk_size;
    unsigned hw = mc.threads ? mc.threads : std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            RngStream rng = RngStream::substream(mc.seed, c);
            const std::size_t begin = c * mc.chunk_size;
            const std::size_t end = std::min(begin + mc.chunk_size, mc.n_samples);
            for (std::size_t r = begin; r < end; ++r) body(r, rng);
        }
    };
    if (hw == 1 || n_chunks == 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(hw);
    for (unsigned t = 0; t < hw; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

}  // namespace detail

// Plain Monte Carlo of the finite-portfolio loss. Replication r always consumes
// the substream of its chunk, so summaries are reproducible for a given
// (seed, chunk_size, n_samples) whatever the worker count.
inline LossSampleSummary simulate_losses(const PortfolioSpec& spec, const McConfig& mc,
                                         std::vector<double>* raw_losses = nullptr) {
    spec.validate();
    mc.validate();
    const auto brown = detail::prepare_class(spec.brown, spec.exposure_law);
    const auto green = detail::prepare_class(spec.green, spec.exposure_law);

    std::vector<double> losses(mc.n_samples);
    detail::run_chunks(mc, [&](std::size_t r, RngStream& rng) {
        const double x1 = norm_quantile(rng.next_open01());
        const double x2 = std::abs(norm_quantile(rng.next_open01()));
        double loss = 0.0;
        for (const auto* cd : {&brown, &green}) {
            const double x = std::sqrt(1.0 - cd->delta * cd->delta) * x1 + cd->delta * x2;
            const double cond =
                cd->rho == 0.0 ? norm_cdf(cd->threshold)
                               : norm_cdf((cd->threshold - cd->rho * x) / cd->idio);
            loss += detail::class_loss(*cd, cond, rng);
        }
        losses[r] = loss;
    });

    LossSampleSummary out;
    out.n_samples = mc.n_samples;
    out.hhi_brown = detail::renorm_hhi(brown.weights);
    out.hhi_green = detail::renorm_hhi(green.weights);

    double mean = 0.0;
    for (double x : losses) mean += x;
    mean /= static_cast<double>(mc.n_samples);
    double var = 0.0;
    for (double x : losses) var += (x - mean) * (x - mean);
    out.mean = mean;
    out.variance = mc.n_samples > 1 ? var / static_cast<double>(mc.n_samples - 1) : 0.0;

    if (raw_losses) *raw_losses = losses;
    std::sort(losses.begin(), losses.end());
    for (double q : mc.quantile_levels)
        out.empirical_quantiles[q] = empirical_quantile(losses, q);
    return out;
}

struct VarianceBoundCheck {
    double lhs = 0.0;     // E[(L - E[L|X1,X2])^2], Monte Carlo estimate
    double bound = 0.0;   // (1/4) * sum of squared exposure weights
    double stderr_ = 0.0;
};

inline VarianceBoundCheck variance_decomposition_check(const PortfolioSpec& spec,
                                                       const McConfig& mc) {
    spec.validate();
    mc.validate();
    const auto brown = detail::prepare_class(spec.brown, spec.exposure_law);
    const auto green = detail::prepare_class(spec.green, spec.exposure_law);

    std::vector<double> sq(mc.n_samples);
    detail::run_chunks(mc, [&](std::size_t r, RngStream& rng) {
        const double x1 = norm_quantile(rng.next_open01());
        const double x2 = std::abs(norm_quantile(rng.next_open01()));
        double loss = 0.0, cond_total = 0.0;
        for (const auto* cd : {&brown, &green}) {
            const double x = std::sqrt(1.0 - cd->delta * cd->delta) * x1 + cd->delta * x2;
            const double cond =
                cd->rho == 0.0 ? norm_cdf(cd->threshold)
                               : norm_cdf((cd->threshold - cd->rho * x) / cd->idio);
            double wsum = 0.0;
            for (double w : cd->weights) wsum += w;
            cond_total += wsum * cond;
            loss += detail::class_loss(*cd, cond, rng);
        }
        const double d = loss - cond_total;
        sq[r] = d * d;
    });

    VarianceBoundCheck out;
    double s = 0.0, s2 = 0.0;
    for (double x : sq) {
        s += x;
        s2 += x * x;
    }
    const double n = static_cast<double>(mc.n_samples);
    out.lhs = s / n;
    out.stderr_ = std::sqrt(std::max(0.0, s2 / n - out.lhs * out.lhs) / n);
    double usq = 0.0;
    for (double w : brown.weights) usq += w * w;
    for (double w : green.weights) usq += w * w;
    out.bound = 0.25 * usq;
    return out;
}

struct ConvergenceRow {
    std::size_t n = 0;
    double decay = 0.0;
    double level = 0.0;
    double var_empirical = 0.0;
    double var_analytic = 0.0;
    double error = 0.0;
    double hhi_green = 0.0;
    double hhi_brown = 0.0;
};

// Scales the template's class counts to each portfolio size (keeping the count
// share and budgets), simulates, and tabulates empirical vs analytic VaR.
inline std::vector<ConvergenceRow> convergence_experiment(const PortfolioSpec& tmpl,
                                                          const std::vector<std::size_t>& sizes,
                                                          const McConfig& mc,
                                                          const LimitModel& analytic) {
    tmpl.validate();
    const double green_share = static_cast<double>(tmpl.green.count) /
                               static_cast<double>(tmpl.green.count + tmpl.brown.count);
    std::vector<ConvergenceRow> rows;
    std::size_t prev = 0;
    for (std::size_t n : sizes) {
        if (n < prev) throw std::invalid_argument("convergence_experiment: sizes must ascend");
        prev = n;
        PortfolioSpec spec = tmpl;
        spec.green.count = static_cast<std::size_t>(std::lround(green_share * static_cast<double>(n)));
        if (spec.green.count == 0) spec.green.count = 1;
        if (spec.green.count >= n) spec.green.count = n - 1;
        spec.brown.count = n - spec.green.count;

        const auto summary = simulate_losses(spec, mc);
        for (double level : mc.quantile_levels) {
            ConvergenceRow row;
            row.n = n;
            row.decay = spec.exposure_law.decay;
            row.level = level;
            row.var_empirical = summary.empirical_quantiles.at(level);
            row.var_analytic = mix_var(analytic, level);
            row.error = row.var_empirical - row.var_analytic;
            row.hhi_green = summary.hhi_green;
            row.hhi_brown = summary.hhi_brown;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace gbrisk
