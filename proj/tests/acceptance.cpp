// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "gbrisk/exposure.hpp"
#include "gbrisk/lhp.hpp"
#include "gbrisk/mc.hpp"
#include "gbrisk/rng.hpp"

using namespace gbrisk;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.empty() ? "" : " — ", detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

LoanClassParams cls(double pd, double rho, double delta, double omega,
                    std::size_t count = 100) {
    return LoanClassParams{pd, rho, delta, omega, count};
}

struct ScenarioDef {
    const char* name;
    double p_g, p_b, rho_g, rho_b, omega_g;
};

// sensitivity-study presets
const ScenarioDef kSens[] = {
    {"scenario-1", 0.028, 0.028, 0.10, 0.15, 0.25},
    {"scenario-2", 0.028, 0.028, 0.15, 0.10, 0.25},
    {"scenario-3", 0.020, 0.028, 0.10, 0.10, 0.25},
    {"scenario-4", 0.030, 0.028, 0.10, 0.10, 0.25},
};

LimitModel model_of(const ScenarioDef& s, double gamma) {
    const double d = delta_from_shape(gamma);
    return LimitModel(cls(s.p_g, s.rho_g, d, s.omega_g),
                      cls(s.p_b, s.rho_b, d, 1.0 - s.omega_g));
}

// convergence-study portfolio: 30/70 count split, budgets = count shares
PortfolioSpec conv_portfolio(double pg, double pb, double rho, std::size_t n, double decay) {
    const double d = delta_from_shape(0.5);
    PortfolioSpec s;
    const auto ng = static_cast<std::size_t>(std::lround(0.3 * double(n)));
    s.green = {pg, rho, d, 0.3, ng};
    s.brown = {pb, rho, d, 0.7, n - ng};
    s.exposure_law = decay == 0.0 ? ExposureLaw::uniform() : ExposureLaw::power(decay);
    return s;
}

double vasicek_var(double p, double rho, double beta) {
    return norm_cdf((norm_quantile(p) + rho * norm_quantile(beta)) /
                    std::sqrt(1.0 - rho * rho));
}

double integrate_density(const LimitModel& m) {
    std::vector<double> breaks;
    for (double q : {1e-8, 1e-6, 1e-4, 0.01, 0.05, 0.2, 0.5, 0.8, 0.95, 0.99,
                     1.0 - 1e-4, 1.0 - 1e-6, 1.0 - 1e-8})
        breaks.push_back(mix_var(m, 1.0 - q));
    std::sort(breaks.begin(), breaks.end());
    return integrate_panels([&](double l) { return mix_density(m, l); }, breaks, 1e-10);
}

// ------------------------------------------------------------ criteria

void criterion_1() {
    RngStream rng(1001);
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 20; ++i) {
        const double p = 0.001 + 0.25 * rng.next_open01();
        const double rho = 0.05 + 0.85 * rng.next_open01();
        const double beta = 0.9 + 0.0999 * rng.next_open01();
        LimitModel m(cls(p, rho, 0.0, 0.5), cls(p, rho, 0.0, 0.5));
        const double got = mix_var(m, beta);
        const double want = vasicek_var(p, rho, beta);
        if (std::abs(got - want) > 1e-10) {
            ok = false;
            detail = "p=" + fmt(p) + " rho=" + fmt(rho) + " beta=" + fmt(beta) +
                     " got=" + fmt(got) + " want=" + fmt(want);
            break;
        }
    }
    report(1, "Vasicek reduction exact to 1e-10 on 20 random triples", ok, detail);
}

void criterion_2() {
    bool ok = true;
    std::string detail;
    double worst = 0.0;
    for (const auto& s : kSens) {
        for (double gamma : {-0.8, 0.0, 0.8}) {
            const auto m = model_of(s, gamma);
            const double mass = integrate_density(m);
            worst = std::max(worst, std::abs(mass - 1.0));
            if (std::abs(mass - 1.0) > 1e-6) {
                ok = false;
                detail = std::string(s.name) + " gamma=" + fmt(gamma) +
                         " integral=" + fmt(mass);
            }
        }
    }
    if (ok) detail = "max |integral - 1| = " + fmt(worst);
    report(2, "density normalization, 4 scenarios x 3 shapes", ok, detail);
}

void criterion_3() {
    bool ok = true;
    std::string detail;
    double worst = 0.0;
    auto probe = [&](const LimitModel& m, const std::string& tag) {
        for (double beta : {0.99, 0.995, 0.999}) {
            const double err = std::abs(mix_cdf(m, mix_var(m, beta)) - beta);
            worst = std::max(worst, err);
            if (err > 1e-8) {
                ok = false;
                detail = tag + " beta=" + fmt(beta) + " err=" + fmt(err);
            }
        }
    };
    for (const auto& s : kSens)
        for (double gamma : {-0.8, 0.0, 0.8}) probe(model_of(s, gamma), s.name);
    const double d5 = delta_from_shape(0.5);
    probe(LimitModel(cls(0.005, 0.1, d5, 0.3), cls(0.01, 0.1, d5, 0.7)), "conv-1");
    probe(LimitModel(cls(0.2, 0.15, d5, 0.3), cls(0.15, 0.15, d5, 0.7)), "conv-2");
    if (ok) detail = "max |cdf(var(beta)) - beta| = " + fmt(worst);
    report(3, "quantile/cdf consistency across presets", ok, detail);
}

void criterion_4() {
    // Table 1/2 reproduction as specified: empirical VaR99 at n=5000, a=0,
    // N_samp=1e6 vs the printed value, and the analytic VaR99 window.
    McConfig mc;
    mc.n_samples = 1'000'000;
    mc.seed = 404;
    mc.quantile_levels = {0.99};

    struct Sub {
        const char* tag;
        double pg, pb, rho;
        double table_emp, lo, hi;
    };
    const Sub subs[] = {
        {"table-1 scenario-1", 0.005, 0.01, 0.10, 0.0134, 0.0117, 0.0137},
        {"table-2 scenario-2", 0.200, 0.15, 0.15, 0.0276, 0.0262, 0.0282},
    };

    bool ok = true;
    std::printf("  criterion 4 detail (faithful model: marginal thresholds, factor shape 0.5):\n");
    for (const auto& s : subs) {
        const auto spec = conv_portfolio(s.pg, s.pb, s.rho, 5000, 0.0);
        const LimitModel m(spec.green, spec.brown);
        const auto sum = simulate_losses(spec, mc);
        const double emp = sum.empirical_quantiles.at(0.99);
        const double ana = mix_var(m, 0.99);
        const double grid = 1.0 / 5000.0;
        const double se = std::sqrt(0.99 * 0.01 / double(mc.n_samples)) /
                          std::max(mix_density(m, ana), 1e-12);
        const bool emp_ok = std::abs(emp - s.table_emp) <= grid + 3.0 * se;
        const bool ana_ok = ana >= s.lo && ana <= s.hi;
        std::printf("    %s: empirical=%.4f (table %.4f, tol %.4f)  analytic=%.6f (window [%.4f, %.4f])\n",
                    s.tag, emp, s.table_emp, grid + 3.0 * se, ana, s.lo, s.hi);
        ok = ok && emp_ok && ana_ok;
    }
    if (!ok) {
        std::printf(
            "    note: the tabulated reference values are reproduced exactly by a different\n"
            "    convention (delta=0 Gaussian thresholds, quantile levels 0.95/0.99/0.999 in\n"
            "    the columns labeled 99/99.5/99.9, and table-2 parameters p_G=0.03, p_B=0.01):\n");
        const Sub recon[] = {
            {"table-1 reconstruction", 0.005, 0.01, 0.10, 0.0134, 0.0127, 0.0127},
            {"table-2 reconstruction", 0.030, 0.01, 0.15, 0.0276, 0.0272, 0.0272},
        };
        for (const auto& s : recon) {
            PortfolioSpec spec;
            const std::size_t n = 5000;
            spec.green = {s.pg, s.rho, 0.0, 0.3, 1500};
            spec.brown = {s.pb, s.rho, 0.0, 0.7, 3500};
            spec.exposure_law = ExposureLaw::uniform();
            McConfig m2 = mc;
            m2.quantile_levels = {0.95, 0.99, 0.999};
            const LimitModel lm(spec.green, spec.brown);
            const auto sum = simulate_losses(spec, m2);
            std::printf("    %s: empirical(95/99/99.9)=%.4f/%.4f/%.4f  analytic95=%.6f\n",
                        s.tag, sum.empirical_quantiles.at(0.95),
                        sum.empirical_quantiles.at(0.99),
                        sum.empirical_quantiles.at(0.999), mix_var(lm, 0.95));
            (void)n;
        }
    }
    report(4, "reference-table reproduction at the stated parameters and levels", ok);
}

void criterion_5() {
    McConfig mc;
    mc.n_samples = 1'000'000;
    mc.seed = 505;
    mc.quantile_levels = {0.99};
    const std::vector<std::size_t> sizes = {500, 1000, 2000, 5000};

    struct Case {
        const char* tag;
        double pg, pb, rho;
    };
    const Case cases[] = {{"conv-1", 0.005, 0.01, 0.10}, {"conv-2", 0.2, 0.15, 0.15}};

    bool all_ok = true;
    for (const auto& c : cases) {
        const auto tmpl0 = conv_portfolio(c.pg, c.pb, c.rho, 500, 0.0);
        const LimitModel m(tmpl0.green, tmpl0.brown);
        std::vector<double> err0, err6;
        for (double decay : {0.0, 0.6}) {
            const auto tmpl = conv_portfolio(c.pg, c.pb, c.rho, 500, decay);
            const auto rows = convergence_experiment(tmpl, sizes, mc, m);
            for (const auto& r : rows)
                (decay == 0.0 ? err0 : err6).push_back(std::abs(r.error));
        }
        int violations = 0;
        for (std::size_t i = 0; i + 1 < err0.size(); ++i)
            if (err0[i + 1] >= err0[i]) ++violations;
        bool dominated = true;
        for (std::size_t i = 0; i < err0.size(); ++i)
            if (err6[i] <= err0[i]) dominated = false;
        const bool ok = violations <= 1 && dominated;
        all_ok = all_ok && ok;
        std::printf("  %s |err| a=0:  %s %s %s %s  (non-monotone pairs: %d)\n", c.tag,
                    fmt(err0[0]).c_str(), fmt(err0[1]).c_str(), fmt(err0[2]).c_str(),
                    fmt(err0[3]).c_str(), violations);
        std::printf("  %s |err| a=.6: %s %s %s %s  (dominates a=0: %s)\n", c.tag,
                    fmt(err6[0]).c_str(), fmt(err6[1]).c_str(), fmt(err6[2]).c_str(),
                    fmt(err6[3]).c_str(), dominated ? "yes" : "no");
    }
    report(5, "error shrinks in n at a=0 and grows with concentration", all_ok);
}

void criterion_6() {
    RngStream rng(606);
    McConfig mc;
    mc.n_samples = 200'000;
    mc.seed = 607;
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 10; ++i) {
        PortfolioSpec s;
        const double wg = 0.1 + 0.8 * rng.next_open01();
        const double decay_pick = rng.next_open01();
        s.green = {0.002 + 0.3 * rng.next_open01(), 0.6 * rng.next_open01(),
                   1.8 * rng.next_open01() - 0.9, wg,
                   20 + static_cast<std::size_t>(300 * rng.next_open01())};
        s.brown = {0.002 + 0.3 * rng.next_open01(), 0.6 * rng.next_open01(),
                   1.8 * rng.next_open01() - 0.9, 1.0 - wg,
                   20 + static_cast<std::size_t>(300 * rng.next_open01())};
        s.exposure_law = decay_pick < 0.34 ? ExposureLaw::uniform()
                         : decay_pick < 0.67 ? ExposureLaw::power(0.4)
                                             : ExposureLaw::power(1.2);
        const auto r = variance_decomposition_check(s, mc);
        if (!(r.lhs <= r.bound + 3.0 * r.stderr_)) {
            ok = false;
            detail = "config " + std::to_string(i) + ": lhs=" + fmt(r.lhs) +
                     " bound=" + fmt(r.bound);
            break;
        }
    }
    report(6, "variance bound lhs <= bound + 3*stderr on 10 random configs", ok, detail);
}

void criterion_7() {
    const std::vector<double> Ns = {1e3, 1e4, 1e5, 1e6};
    bool ok = true;
    std::string detail;
    for (auto [a, want] : {std::pair{0.3, -1.0}, std::pair{0.6, -0.8}}) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (double N : Ns) {
            const auto w = make_weights(static_cast<std::size_t>(N), ExposureLaw::power(a), 1.0);
            const double lx = std::log(N), ly = std::log(hhi(w));
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        }
        const double n = static_cast<double>(Ns.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        detail += "a=" + fmt(a) + " slope=" + fmt(slope) + "  ";
        if (std::abs(slope - want) > 0.05) ok = false;
    }
    const double h2 = hhi(make_weights(1'000'000, ExposureLaw::power(2.0), 1.0));
    const auto lim = hhi_powerlaw_limit(2.0);
    detail += "HHI(1e6,a=2)=" + fmt(h2) + " exact=" + fmt(*lim.exact_limit) +
              " approx=" + fmt(lim.limit);
    if (std::abs(h2 - 0.4) > 0.004) ok = false;
    if (std::abs(lim.limit - 1.0 / 3.0) > 1e-12) ok = false;
    if (std::abs(*lim.exact_limit - 0.4) > 1e-9) ok = false;
    report(7, "HHI decay rates and the a=2 limits", ok, detail);
}

void criterion_8() {
    struct Row {
        double a, b, c;
        std::size_t n;
    };
    const Row rows[] = {
        {0.6888, 3.399, 0.0308, 2653},  {0.6359, -0.378, 0.02059, 2908},
        {0.738, 4.859, 0.04838, 1647},  {0.7446, 6.714, 0.05286, 1506},
        {0.626, 0.894, 0.02575, 1565},  {0.7084, 0.1218, 0.03117, 2916},
    };
    bool ok = true;
    std::string detail;
    for (const auto& r : rows) {
        ExposureVector v;
        v.weights.resize(r.n);
        for (std::size_t i = 0; i < r.n; ++i)
            v.weights[i] = r.c / std::pow(r.b + double(i + 1), r.a);
        const auto fit = fit_power_law(v);
        if (std::abs(fit.a - r.a) > 1e-6 || std::abs(fit.b - r.b) > 1e-6 ||
            std::abs(fit.c - r.c) > 1e-6) {
            ok = false;
            detail = "row a=" + fmt(r.a) + ": da=" + fmt(fit.a - r.a) +
                     " db=" + fmt(fit.b - r.b) + " dc=" + fmt(fit.c - r.c);
            break;
        }
    }
    // noise injection at the table's rmse magnitude
    if (ok) {
        ExposureVector v;
        v.weights.resize(2653);
        RngStream rng(808);
        for (std::size_t i = 0; i < v.weights.size(); ++i)
            v.weights[i] = 0.0308 / std::pow(3.399 + double(i + 1), 0.6888) +
                           1e-4 * 2.0 * (rng.next_open01() - 0.5);
        const auto fit = fit_power_law(v);
        detail = "noisy r2=" + fmt(fit.r2);
        if (!(fit.r2 > 0.95)) ok = false;
    }
    report(8, "power-law fit round-trip to 1e-6 and noisy r2 > 0.95", ok, detail);
}

void criterion_9() {
    const std::pair<double, double> configs[] = {
        {0.01, 0.15}, {0.03, 0.20}, {0.04, 0.20}, {0.06, 0.25}};
    bool ok = true;
    for (auto [p, rho] : configs) {
        auto var_at = [&](double gamma) {
            const double d = delta_from_shape(gamma);
            LimitModel m(cls(p, rho, d, 0.5), cls(p, rho, d, 0.5));
            return mix_var(m, 0.99);
        };
        const double v0 = var_at(0.0), vm = var_at(-0.8), vp = var_at(0.8);
        const bool holds = vm <= v0 && vp <= v0;
        if (!holds) {
            ok = false;
            std::printf("  skewness effect violated at (p=%.3g, rho=%.3g): "
                        "VaR(-0.8)=%.6f VaR(0)=%.6f VaR(+0.8)=%.6f\n",
                        p, rho, vm, v0, vp);
        }
    }
    report(9, "VaR99 at shape +-0.8 below the Gaussian VaR99 for all four configs", ok);
}

void criterion_10() {
    const double d = delta_from_shape(0.8);
    auto var_at = [&](double wg) {
        LimitModel m(cls(0.02, 0.10, d, wg), cls(0.028, 0.10, d, 1.0 - wg));
        return mix_var(m, 0.999);
    };
    const double v0 = var_at(0.0), vh = var_at(0.5), v1 = var_at(1.0);
    const double resid = std::abs(vh - 0.5 * (v0 + v1));
    report(10, "VaR collinearity over omega_G in {0, 0.5, 1}", resid <= 1e-12,
           "residual = " + fmt(resid));
}

void criterion_11() {
    const double d8 = delta_from_shape(0.8);
    const auto g = cls(0.028, 0.10, d8, 0.25);
    const auto b = cls(0.028, 0.15, d8, 0.75);
    const LimitModel m(g, b);

    bool ok = true;
    std::string detail;
    double worst = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double q = double(i) / 51.0;
        const double ell = mix_var(m, q);
        const double diff = std::abs(general_mix_cdf(g, b, ell) - mix_cdf(m, ell));
        worst = std::max(worst, diff);
    }
    if (worst > 1e-6) {
        ok = false;
        detail = "common-delta max diff = " + fmt(worst);
    } else {
        detail = "common-delta max diff = " + fmt(worst);
    }

    // unequal deltas vs a Monte Carlo oracle of the limit variable
    const auto g2 = cls(0.028, 0.10, 0.7, 0.25);
    const auto b2 = cls(0.028, 0.15, 0.2, 0.75);
    const double kg = default_threshold(g2), kb = default_threshold(b2);
    constexpr std::size_t n = 1'000'000;
    RngStream rng(1111);
    std::vector<double> limit(n);
    for (auto& v : limit) {
        const double x1 = norm_quantile(rng.next_open01());
        const double x2 = std::abs(norm_quantile(rng.next_open01()));
        const double xg = std::sqrt(1 - 0.49) * x1 + 0.7 * x2;
        const double xb = std::sqrt(1 - 0.04) * x1 + 0.2 * x2;
        v = 0.25 * norm_cdf((kg - 0.10 * xg) / std::sqrt(1 - 0.01)) +
            0.75 * norm_cdf((kb - 0.15 * xb) / std::sqrt(1 - 0.0225));
    }
    std::sort(limit.begin(), limit.end());
    for (double ell : {0.01, 0.02, 0.04, 0.08}) {
        const double f =
            double(std::upper_bound(limit.begin(), limit.end(), ell) - limit.begin()) /
            double(n);
        const double se = std::sqrt(std::max(f * (1.0 - f), 1e-12) / double(n));
        const double diff = std::abs(general_mix_cdf(g2, b2, ell) - f);
        if (diff > 3.0 * se + 1e-9) {
            ok = false;
            detail += "; unequal-delta ell=" + fmt(ell) + " diff=" + fmt(diff) +
                      " 3se=" + fmt(3.0 * se);
        }
    }
    report(11, "general-delta limit vs analytic (1e-6) and MC oracle (3 stderr)", ok,
           detail);
}

}  // namespace

int main() {
    std::printf("gbrisk acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
