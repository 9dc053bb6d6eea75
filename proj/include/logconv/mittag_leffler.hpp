#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "logconv/common.hpp"
#include "logconv/gamma.hpp"
#include "logconv/quadrature.hpp"

namespace logconv {

/// Parameters of E_{alpha,beta}. Only the completely monotone branch is
/// supported: alpha in (0,1], beta > 0, arguments on the nonpositive axis.
struct MLParams {
    double alpha = 1.0;
    double beta = 1.0;
};

inline void validate(const MLParams& p) {
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw std::domain_error("MLParams: alpha must lie in (0,1]");
    if (!(p.beta > 0.0)) throw std::domain_error("MLParams: beta must be positive");
}

namespace ml_detail {

// The Taylor series loses about |x|^(1/alpha)/ln(10) decimal digits to
// cancellation on the negative axis, so it is only used while that exponent
// stays small. 8.5 keeps the loss under four digits.
inline constexpr double kSeriesExponentCap = 8.5;
inline constexpr double kSeriesXMax = 5.0;
inline constexpr double kAsymptoticXMin = 12.0;
inline constexpr double kAsymptoticAlphaMax = 0.70;

inline bool series_applicable(double alpha, double x) {
    const double ax = std::abs(x);
    return ax <= kSeriesXMax && std::pow(ax, 1.0 / alpha) <= kSeriesExponentCap;
}

/// Plain power series sum_k x^k / Gamma(alpha k + beta) with compensated
/// summation. Terms are built by ratio recursion so Gamma never overflows in
/// the admissible range.
inline double series(double alpha, double beta, double x) {
    KahanSum sum;
    double term = reciprocal_gamma(beta);
    sum.add(term);
    double arg = beta;
    for (int k = 0; k < 10000; ++k) {
        const double next_arg = arg + alpha;
        double ratio;
        if (next_arg < 170.0) {
            ratio = gamma_fn(arg) / gamma_fn(next_arg);
        } else {
            ratio = std::exp(log_gamma(arg) - log_gamma(next_arg));
        }
        term *= x * ratio;
        sum.add(term);
        arg = next_arg;
        if (k > 4 && std::abs(term) < 1e-18 * std::abs(sum.value()) && arg > std::abs(x)) break;
    }
    return sum.value();
}

/// Spectral (Gorenflo-Mainardi / Titchmarsh) representation on the negative
/// axis for 0 < alpha < 1, beta <= 1:
///   E_{a,b}(-m) = int_0^inf K(r) dr,
///   K(r) = (1/(pi a)) r^((1-b)/a) e^(-r^(1/a))
///          * [r sin(pi(1-b)) + m sin(pi(1-b+a))] / (r^2 + 2 r m cos(pi a) + m^2).
/// The denominator never vanishes for m > 0; for a > 1/2 it dips near
/// r0 = -m cos(pi a), which we hand to the quadrature as breakpoints.
inline double spectral_integral(double alpha, double beta, double x) {
    const double m = -x;
    const double a = alpha;
    const double cos_pa = std::cos(kPi * a);
    const double s1 = std::sin(kPi * (1.0 - beta));
    const double s2 = std::sin(kPi * (1.0 - beta + a));
    const double power = (1.0 - beta) / a;

    auto integrand = [&](double r) {
        const double den = r * r + 2.0 * r * m * cos_pa + m * m;
        const double num = r * s1 + m * s2;
        const double pre = (power == 0.0) ? 1.0 : std::pow(r, power);
        return pre * std::exp(-std::pow(r, 1.0 / a)) * num / (kPi * a * den);
    };

    // e^{-R^{1/a}} < 1e-19 past this point; everything beyond is dead weight.
    const double r_max = 1.3 * std::pow(43.75, a);
    std::vector<double> brk;
    if (cos_pa < 0.0) {
        const double r0 = -m * cos_pa;
        const double w = m * std::sin(kPi * a);
        for (double c : {r0 - 3.0 * w, r0 - w, r0, r0 + w, r0 + 3.0 * w})
            if (c > 0.0 && c < r_max) brk.push_back(c);
    }
    AdaptiveOptions opt;
    opt.rel_tol = 5e-14;
    opt.abs_tol = 1e-300;
    opt.max_intervals = 6000;
    return integrate_adaptive(integrand, 0.0, r_max, opt, brk);
}

/// Algebraic tail expansion -sum_{k>=1} x^{-k} / Gamma(beta - alpha k) with
/// smallest-term truncation. Optimal truncation error ~ e^{-|x|^{1/alpha}},
/// which is only below tolerance for small alpha; the dispatcher restricts
/// its use accordingly.
inline double asymptotic(double alpha, double beta, double x) {
    KahanSum sum;
    double pw = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 300; ++k) {
        pw /= x;
        const double rg = reciprocal_gamma(beta - alpha * k);
        if (rg == 0.0) continue;  // Gamma pole: the term vanishes identically
        const double term = -pw * rg;
        const double mag = std::abs(term);
        if (mag > prev && k > 2) break;  // smallest-term truncation
        sum.add(term);
        prev = mag;
        if (mag < 1e-18 * std::abs(sum.value()) && k > 2) break;
    }
    return sum.value();
}

/// Raise beta through the recurrence E_{a,b+a}(x) = (E_{a,b}(x) - 1/Gamma(b))/x.
/// Used to pull beta > 1 into the range where the spectral integral applies;
/// safe because it is only invoked for |x| > kSeriesXMax.
inline double integral_with_beta_reduction(double alpha, double beta, double x) {
    if (beta <= 1.0) return spectral_integral(alpha, beta, x);
    const int steps = static_cast<int>(std::ceil((beta - 1.0) / alpha - 1e-12));
    double b0 = beta - steps * alpha;
    double value = spectral_integral(alpha, b0, x);
    for (int j = 0; j < steps; ++j) {
        value = (value - reciprocal_gamma(b0)) / x;
        b0 += alpha;
    }
    return value;
}

}  // namespace ml_detail

/// E_{alpha,beta}(x) for x <= 0, relative accuracy ~1e-11 or better across
/// the admissible range. alpha = 1 with beta = 1 collapses to exp(x), which
/// no series or tail expansion can match in double precision at large |x|.
inline double ml_eval(const MLParams& p, double x) {
    validate(p);
    if (x > 0.0) throw std::domain_error("ml_eval: positive arguments are out of scope");
    if (x == 0.0) return reciprocal_gamma(p.beta);

    if (p.alpha == 1.0) {
        if (p.beta == 1.0) return std::exp(x);
        if (std::abs(x) <= ml_detail::kSeriesXMax) return ml_detail::series(1.0, p.beta, x);
        throw std::domain_error("ml_eval: alpha = 1 with beta != 1 is only supported for |x| <= 5");
    }

    if (ml_detail::series_applicable(p.alpha, x)) return ml_detail::series(p.alpha, p.beta, x);
    if (std::abs(x) >= ml_detail::kAsymptoticXMin && p.alpha <= ml_detail::kAsymptoticAlphaMax)
        return ml_detail::asymptotic(p.alpha, p.beta, x);
    return ml_detail::integral_with_beta_reduction(p.alpha, p.beta, x);
}

inline double ml_eval(double alpha, double beta, double x) {
    return ml_eval(MLParams{alpha, beta}, x);
}

/// Complete-monotonicity diagnostics of x -> E_alpha(-x) along a grid:
/// positivity, nonincrease, and the sign pattern of the first two divided
/// differences. All violations should sit at rounding level.
struct MonotonicityReport {
    double max_positivity_violation = 0.0;
    double max_increase = 0.0;
    double max_first_dd_violation = 0.0;
    double max_second_dd_violation = 0.0;

    double worst() const {
        return std::max({max_positivity_violation, max_increase,
                         max_first_dd_violation, max_second_dd_violation});
    }
    bool pass(double tol = 1e-9) const { return worst() <= tol; }
};

inline MonotonicityReport ml_monotonicity_report(const MLParams& p, std::span<const double> grid) {
    validate(p);
    if (std::abs(p.beta - 1.0) > 1e-12)
        throw std::domain_error("ml_monotonicity_report: requires beta = 1");
    for (double g : grid)
        if (g < 0.0) throw std::domain_error("ml_monotonicity_report: grid must be nonnegative");
    if (!strictly_increasing(grid)) throw std::domain_error("ml_monotonicity_report: grid must be increasing");

    MonotonicityReport rep;
    const std::size_t n = grid.size();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = ml_eval(p, -grid[i]);
    for (std::size_t i = 0; i < n; ++i)
        rep.max_positivity_violation = std::max(rep.max_positivity_violation, -v[i]);
    for (std::size_t i = 0; i + 1 < n; ++i)
        rep.max_increase = std::max(rep.max_increase, v[i + 1] - v[i]);
    std::vector<double> dd1(n > 1 ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        dd1[i] = (v[i + 1] - v[i]) / (grid[i + 1] - grid[i]);
        rep.max_first_dd_violation = std::max(rep.max_first_dd_violation, dd1[i]);
    }
    for (std::size_t i = 0; i + 2 < n; ++i) {
        const double dd2 = (dd1[i + 1] - dd1[i]) / (grid[i + 2] - grid[i]);
        rep.max_second_dd_violation = std::max(rep.max_second_dd_violation, -dd2);
    }
    return rep;
}

/// A scalar function sampled on a time grid starting at 0.
struct SampledFunction {
    std::vector<double> times;
    std::vector<double> values;
};

inline void validate(const SampledFunction& g) {
    if (g.times.size() < 3) throw std::invalid_argument("SampledFunction: at least 3 points required");
    if (g.times.size() != g.values.size())
        throw std::invalid_argument("SampledFunction: times/values size mismatch");
    if (g.times.front() != 0.0) throw std::invalid_argument("SampledFunction: grid must start at 0");
    if (!strictly_increasing(g.times)) throw std::invalid_argument("SampledFunction: grid must be increasing");
}

/// Caputo derivative of sampled data. For alpha < 1 this is the L1 scheme
/// (exact for piecewise-linear data); for alpha = 1 plain finite differences
/// with second-order one-sided stencils at the ends. The first entry of the
/// L1 branch is defined as 0.
inline SampledFunction caputo_apply(const SampledFunction& g, double alpha) {
    validate(g);
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("caputo_apply: alpha must lie in (0,1]");
    const std::size_t n = g.times.size();
    SampledFunction out;
    out.times = g.times;
    out.values.assign(n, 0.0);

    if (alpha == 1.0) {
        const auto& t = g.times;
        const auto& v = g.values;
        // nonuniform 3-point stencils
        auto deriv3 = [&](std::size_t i0, std::size_t i1, std::size_t i2, double at) {
            const double t0 = t[i0], t1 = t[i1], t2 = t[i2];
            const double w0 = (2.0 * at - t1 - t2) / ((t0 - t1) * (t0 - t2));
            const double w1 = (2.0 * at - t0 - t2) / ((t1 - t0) * (t1 - t2));
            const double w2 = (2.0 * at - t0 - t1) / ((t2 - t0) * (t2 - t1));
            return w0 * v[i0] + w1 * v[i1] + w2 * v[i2];
        };
        out.values[0] = deriv3(0, 1, 2, t[0]);
        for (std::size_t i = 1; i + 1 < n; ++i) out.values[i] = deriv3(i - 1, i, i + 1, t[i]);
        out.values[n - 1] = deriv3(n - 3, n - 2, n - 1, t[n - 1]);
        return out;
    }

    const double c = 1.0 / gamma_fn(2.0 - alpha);
    const double e = 1.0 - alpha;
    for (std::size_t i = 1; i < n; ++i) {
        const double ti = g.times[i];
        KahanSum acc;
        for (std::size_t j = 0; j < i; ++j) {
            const double slope = (g.values[j + 1] - g.values[j]) / (g.times[j + 1] - g.times[j]);
            acc.add(slope * (std::pow(ti - g.times[j], e) - std::pow(ti - g.times[j + 1], e)));
        }
        out.values[i] = c * acc.value();
    }
    return out;
}

}  // namespace logconv
