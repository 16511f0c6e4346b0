#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbrisk/numerics.hpp"

namespace gbrisk {

// Ranked exposure weights u_i ~ scale / (shift + i)^decay; decay = 0 is uniform.
struct ExposureLaw {
    enum class Kind { uniform, power };

    Kind kind = Kind::uniform;
    double decay = 0.0;   // exponent a >= 0
    double shift = 0.0;   // offset b > -1
    double scale = 1.0;   // c; overwritten by normalization when generating

    static ExposureLaw uniform() { return {}; }
    static ExposureLaw power(double decay, double shift = 0.0) {
        ExposureLaw law;
        law.kind = decay == 0.0 ? Kind::uniform : Kind::power;
        law.decay = decay;
        law.shift = shift;
        return law;
    }
};

struct ExposureVector {
    std::vector<double> weights;

    double sum() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
    std::size_t size() const { return weights.size(); }
};

inline double hhi(const ExposureVector& v) {
    double s = 0.0;
    for (double w : v.weights) s += w * w;
    return s;
}

inline ExposureVector make_weights(std::size_t n, const ExposureLaw& law, double budget) {
    if (n < 1) throw std::invalid_argument("make_weights: n must be >= 1");
    if (!(budget > 0.0)) throw std::invalid_argument("make_weights: budget must be positive");
    if (law.shift <= -1.0) throw std::invalid_argument("make_weights: shift must exceed -1");
    if (law.decay < 0.0) throw std::invalid_argument("make_weights: decay must be >= 0");

    ExposureVector v;
    v.weights.resize(n);
    if (law.kind == ExposureLaw::Kind::uniform || law.decay == 0.0) {
        const double w = budget / static_cast<double>(n);
        for (auto& x : v.weights) x = w;
        return v;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        v.weights[i] = std::pow(law.shift + static_cast<double>(i + 1), -law.decay);
        total += v.weights[i];
    }
    const double f = budget / total;
    for (auto& x : v.weights) x *= f;
    return v;
}

struct HhiLimit {
    double limit = 0.0;                        // the integral-approximation limit
    std::optional<double> rate_exponent;       // decay rate of HHI_N for a < 1
    std::optional<double> exact_limit;         // zeta(2a)/zeta(a)^2 for a > 1
};

// Large-N behaviour of the power-law HHI. The integral approximation excludes
// the boundary exponents a = 1/2 and a = 1.
inline HhiLimit hhi_powerlaw_limit(double a) {
    if (!(a >= 0.0)) throw std::domain_error("hhi_powerlaw_limit: a must be >= 0");
    constexpr double eps = 1e-12;
    if (std::abs(a - 1.0) < eps || std::abs(a - 0.5) < eps)
        throw std::domain_error("hhi_powerlaw_limit: boundary exponent (a = 1/2 or a = 1)");

    HhiLimit out;
    if (a < 1.0) {
        out.limit = 0.0;
        out.rate_exponent = (a < 0.5) ? -1.0 : -2.0 * (1.0 - a);
    } else {
        out.limit = (a - 1.0) * (a - 1.0) / (2.0 * a - 1.0);
        out.exact_limit = riemann_zeta(2.0 * a) / (riemann_zeta(a) * riemann_zeta(a));
    }
    return out;
}

struct PowerLawFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double rmse = 0.0;
    double r2 = 0.0;
    int iterations = 0;
};

class FitError : public std::runtime_error {
  public:
    FitError(const std::string& msg, const PowerLawFit& last)
        : std::runtime_error(msg), last_iterate(last) {}
    PowerLawFit last_iterate;
};

namespace detail {

// Solve the 3x3 system A x = rhs by Gaussian elimination with partial pivoting.
inline std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> A,
                                    std::array<double, 3> rhs) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(rhs[col], rhs[piv]);
        if (A[col][col] == 0.0) throw std::runtime_error("solve3: singular system");
        for (int r = col + 1; r < 3; ++r) {
            const double f = A[r][col] / A[col][col];
            for (int k = col; k < 3; ++k) A[r][k] -= f * A[col][k];
            rhs[r] -= f * rhs[col];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double s = rhs[r];
        for (int k = r + 1; k < 3; ++k) s -= A[r][k] * x[k];
        x[r] = s / A[r][r];
    }
    return x;
}

}  // namespace detail

// Least squares fit of u_i = c / (b + i)^a by Levenberg-Marquardt damped
// Gauss-Newton on (a, b, log c). Deterministic: initialized from a log-log
// slope of the top decile, b0 = 0, c0 = u_1.
inline PowerLawFit fit_power_law(const ExposureVector& observed, int max_iter = 500) {
    const auto& u = observed.weights;
    const std::size_t n = u.size();
    std::size_t positive = 0;
    for (double x : u)
        if (x > 0.0) ++positive;
    if (positive < 4)
        throw std::invalid_argument("fit_power_law: need at least 4 positive observations");

    // log-log slope over the top decile (at least 4 points)
    std::size_t head = std::max<std::size_t>(4, n / 10);
    if (head > n) head = n;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < head; ++i) {
        if (!(u[i] > 0.0)) continue;
        const double lx = std::log(static_cast<double>(i + 1)), ly = std::log(u[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    double a = (denom > 0.0) ? -((static_cast<double>(m) * sxy - sx * sy) / denom) : 0.5;
    if (!std::isfinite(a)) a = 0.5;
    double b = 0.0;
    double lc = std::log(u[0] > 0.0 ? u[0] : 1.0);

    auto sse_of = [&](double aa, double bb, double lcc) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = std::exp(lcc - aa * std::log(bb + static_cast<double>(i + 1))) - u[i];
            s += r * r;
        }
        return s;
    };

    double lambda = 1e-3;
    double sse = sse_of(a, b, lc);
    int it = 0;
    bool converged = false;
    for (; it < max_iter; ++it) {
        // residuals r_i = model - u_i and Jacobian in (a, b, lc)
        std::array<std::array<double, 3>, 3> jtj{};
        std::array<double, 3> jtr{};
        for (std::size_t i = 0; i < n; ++i) {
            const double base = b + static_cast<double>(i + 1);
            const double model = std::exp(lc - a * std::log(base));
            const double r = model - u[i];
            const double ja = -model * std::log(base);
            const double jb = -a * model / base;
            const double jc = model;
            const double J[3] = {ja, jb, jc};
            for (int p = 0; p < 3; ++p) {
                for (int q = 0; q < 3; ++q) jtj[p][q] += J[p] * J[q];
                jtr[p] += J[p] * r;
            }
        }
        bool stepped = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            auto A = jtj;
            for (int p = 0; p < 3; ++p) A[p][p] *= (1.0 + lambda);
            std::array<double, 3> step{};
            try {
                step = detail::solve3(A, {-jtr[0], -jtr[1], -jtr[2]});
            } catch (const std::runtime_error&) {
                lambda *= 10.0;
                continue;
            }
            double an = a + step[0], bn = b + step[1], lcn = lc + step[2];
            if (bn <= -1.0 + 1e-9) bn = -1.0 + 1e-9;
            const double sn = sse_of(an, bn, lcn);
            if (std::isfinite(sn) && sn <= sse) {
                const double rel = (sse - sn) / (sse + 1e-300);
                const double stepnorm =
                    std::abs(step[0]) + std::abs(step[1]) + std::abs(step[2]);
                a = an; b = bn; lc = lcn;
                sse = sn;
                lambda = std::max(lambda / 3.0, 1e-14);
                stepped = true;
                if (rel < 1e-14 || stepnorm < 1e-12) converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped || converged) {
            converged = converged || stepped;
            break;
        }
    }

    PowerLawFit fit;
    fit.a = a;
    fit.b = b;
    fit.c = std::exp(lc);
    fit.iterations = it + 1;
    fit.rmse = std::sqrt(sse / static_cast<double>(n));
    double mean = 0.0;
    for (double x : u) mean += x;
    mean /= static_cast<double>(n);
    double sstot = 0.0;
    for (double x : u) sstot += (x - mean) * (x - mean);
    fit.r2 = sstot > 0.0 ? 1.0 - sse / sstot : 1.0;
    if (!converged)
        throw FitError("fit_power_law: no convergence after max iterations", fit);
    return fit;
}

struct ExposureCsv {
    ExposureVector weights;
    bool renormalized = false;  // input did not sum to 1 +- 1e-6
};

// Reads ranked-exposure CSV: header row, then `rank,weight` records. Lines
// starting with '#' are ignored. Weights must sum to 1 within 1e-6; otherwise
// they are renormalized and the flag is set.
inline ExposureCsv read_exposure_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_exposure_csv: cannot open " + path);
    ExposureCsv out;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // single header row
            continue;
        }
        std::istringstream ss(line);
        std::string rank_s, weight_s;
        if (!std::getline(ss, rank_s, ',') || !std::getline(ss, weight_s)) {
            throw std::runtime_error("read_exposure_csv: malformed record at line " +
                                     std::to_string(lineno));
        }
        try {
            std::size_t pos = 0;
            const double w = std::stod(weight_s, &pos);
            if (!(w >= 0.0) || !std::isfinite(w))
                throw std::invalid_argument("negative or non-finite weight");
            out.weights.weights.push_back(w);
        } catch (const std::exception&) {
            throw std::runtime_error("read_exposure_csv: invalid weight at line " +
                                     std::to_string(lineno));
        }
    }
    if (out.weights.weights.empty())
        throw std::runtime_error("read_exposure_csv: no data rows in " + path);
    const double s = out.weights.sum();
    if (std::abs(s - 1.0) > 1e-6) {
        if (!(s > 0.0))
            throw std::runtime_error("read_exposure_csv: weights sum to zero");
        for (auto& w : out.weights.weights) w /= s;
        out.renormalized = true;
    }
    return out;
}

}  // namespace gbrisk
