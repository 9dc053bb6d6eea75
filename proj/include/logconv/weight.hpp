#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "logconv/common.hpp"
#include "logconv/gamma.hpp"
#include "logconv/quadrature.hpp"

namespace logconv {

/// Analytic-semigroup bound ||e^{zA}|| <= K e^{kappa Re z} on the closed
/// sector of half-angle psi, together with the time horizon the weight is
/// built for.
struct Sector {
    double psi = kPi / 2.0;
    double K = 1.0;
    double kappa = 0.0;
    double T = 1.0;
};

inline void validate(const Sector& s) {
    if (!(s.psi > 0.0 && s.psi <= kPi / 2.0)) throw std::domain_error("Sector: psi must lie in (0, pi/2]");
    if (!(s.K >= 1.0)) throw std::domain_error("Sector: K >= 1 required");
    if (!(s.kappa >= 0.0)) throw std::domain_error("Sector: kappa >= 0 required");
    if (!(s.T > 0.0)) throw std::domain_error("Sector: T > 0 required");
}

/// g(z) = T sin^2(pi z / 2T), increasing from 0 to T on [0, T].
inline double weight_g(const Sector& s, double z) {
    validate(s);
    if (z < 0.0 || z > s.T) throw std::domain_error("weight_g: z must lie in [0, T]");
    const double si = std::sin(kPi * z / (2.0 * s.T));
    return s.T * si * si;
}

namespace weight_detail {

// int_0^y t^(a-1) (1-t)^(-a) dt  after pulling out the endpoint behaviour.
// Primary route: substitute t = y*tau, which moves the integral onto the
// fixed interval with Jacobi weight tau^(a-1) and the analytic remainder
//     (1 - y tau)^(-a),
// whose nearest singularity sits at tau = 1/y > 1; a 200-node rule then
// converges geometrically for y away from 1. Near y = 1 the singularity
// crowds the interval, so we switch to the reflected tail with a
// desingularizing power substitution and adaptive quadrature.
inline const QuadratureRule& jacobi_rule(double a, int n) {
    static std::map<std::pair<double, int>, QuadratureRule> cache;
    auto key = std::make_pair(a, n);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, gauss_jacobi01(n, 0.0, a - 1.0)).first;
    return it->second;
}

inline double incomplete_by_jacobi(double a, double y, int n) {
    const auto& rule = jacobi_rule(a, n);
    KahanSum s;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        s.add(rule.weights[i] * std::pow(1.0 - y * rule.nodes[i], -a));
    return std::pow(y, a) * s.value();
}

// tail int_y^1 t^(a-1)(1-t)^(-a) dt with s = 1-t and sigma = s^(1-a):
//   = 1/(1-a) * int_0^{(1-y)^(1-a)} (1 - sigma^(1/(1-a)))^(a-1) dsigma.
inline double tail_integral(double a, double y) {
    const double upper = std::pow(1.0 - y, 1.0 - a);
    auto f = [&](double sigma) {
        return std::pow(1.0 - std::pow(sigma, 1.0 / (1.0 - a)), a - 1.0);
    };
    AdaptiveOptions opt;
    opt.rel_tol = 1e-13;
    return integrate_adaptive(f, 0.0, upper, opt) / (1.0 - a);
}

// direct int_0^y with sigma = t^a:  (1/a) int_0^{y^a} (1 - sigma^(1/a))^(-a) dsigma.
inline double head_integral(double a, double y) {
    const double upper = std::pow(y, a);
    auto f = [&](double sigma) {
        return std::pow(1.0 - std::pow(sigma, 1.0 / a), -a);
    };
    AdaptiveOptions opt;
    opt.rel_tol = 1e-13;
    return integrate_adaptive(f, 0.0, upper, opt) / a;
}

inline double incomplete(double a, double y) {
    if (y <= 0.0) return 0.0;
    const double full = kPi / std::sin(kPi * a);  // B(a, 1-a)
    if (y >= 1.0) return full;
    if (y > 0.98) return full - tail_integral(a, y);
    const double primary = incomplete_by_jacobi(a, y, 200);
    const double probe = incomplete_by_jacobi(a, y, 120);
    if (std::abs(primary - probe) <= 1e-12 * std::max(1.0, std::abs(primary))) return primary;
    // fixed rules disagree: fall back to the adaptive desingularized routes
    return (y <= 0.5) ? head_integral(a, y) : full - tail_integral(a, y);
}

}  // namespace weight_detail

/// f(x) = (T sin psi / pi) * int_0^{x/T} t^{psi/pi - 1} (1-t)^{-psi/pi} dt.
/// Increasing from f(0) = 0 to f(T) = T (Beta reflection).
inline double weight_f(const Sector& s, double x) {
    validate(s);
    if (x < 0.0 || x > s.T * (1.0 + 1e-15)) throw std::domain_error("weight_f: x must lie in [0, T]");
    const double a = s.psi / kPi;
    const double y = std::min(1.0, x / s.T);
    return (s.T * std::sin(s.psi) / kPi) * weight_detail::incomplete(a, y);
}

/// Derivative f'(z) = (sin psi / pi) (z/T)^{a-1} (1 - z/T)^{-a}; used for the
/// Newton polish of the inversion.
inline double weight_f_prime(const Sector& s, double z) {
    const double a = s.psi / kPi;
    const double y = z / s.T;
    return (std::sin(s.psi) / kPi) * std::pow(y, a - 1.0) * std::pow(1.0 - y, -a);
}

inline double weight_h(const Sector& s, double z) { return weight_f(s, weight_g(s, z)); }

/// w(t) = h^{-1}(t)/T with h = f o g, inverted by bisection plus two Newton
/// polish steps. h is continuous and strictly increasing with h(0) = 0,
/// h(T) = T, so the bracket never fails.
inline double weight_w(const Sector& s, double t) {
    validate(s);
    if (t < 0.0 || t > s.T * (1.0 + 1e-15)) throw std::domain_error("weight_w: t must lie in [0, T]");
    if (t <= 0.0) return 0.0;
    if (t >= s.T) return 1.0;

    double lo = 0.0, hi = s.T;
    const double width_target = 1e-13 * s.T;
    int guard = 0;
    while (hi - lo > width_target) {
        const double mid = 0.5 * (lo + hi);
        if (weight_h(s, mid) < t)
            lo = mid;
        else
            hi = mid;
        if (++guard > 200) throw std::runtime_error("weight_w: bisection failed to converge");
    }
    double z = 0.5 * (lo + hi);
    for (int it = 0; it < 2; ++it) {
        const double g = weight_g(s, z);
        if (g <= 0.0 || g >= s.T) break;  // derivative singular at the ends
        const double hp = weight_f_prime(s, g) * (kPi / 2.0) * std::sin(kPi * z / s.T);
        if (!(hp > 0.0) || !std::isfinite(hp)) break;
        const double znew = z - (weight_h(s, z) - t) / hp;
        if (znew > lo && znew < hi) z = znew;
    }
    return std::min(1.0, std::max(0.0, z / s.T));
}

/// Lower bound w(t) >= (2/pi) (psi/sin psi)^{pi/2psi} (t/T)^{pi/2psi}.
inline double weight_lower_bound(const Sector& s, double t) {
    validate(s);
    if (!(t > 0.0 && t <= s.T * (1.0 + 1e-15))) throw std::domain_error("weight_lower_bound: t in (0, T]");
    const double e = kPi / (2.0 * s.psi);
    return (2.0 / kPi) * std::pow(s.psi / std::sin(s.psi), e) * std::pow(t / s.T, e);
}

/// Tabulated weight on a uniform grid, with the endpoint invariants checked.
struct WeightTable {
    Sector sector;
    std::vector<double> ts;
    std::vector<double> ws;
};

inline WeightTable make_weight_table(const Sector& s, std::size_t n_points) {
    if (n_points < 2) throw std::invalid_argument("make_weight_table: need at least 2 points");
    WeightTable table;
    table.sector = s;
    table.ts = linspace(0.0, s.T, n_points);
    table.ws.reserve(n_points);
    for (double t : table.ts) table.ws.push_back(weight_w(s, t));
    if (table.ws.front() != 0.0) throw std::runtime_error("WeightTable: w(0) != 0");
    if (std::abs(table.ws.back() - 1.0) > 1e-10) throw std::runtime_error("WeightTable: w(T) != 1");
    for (std::size_t i = 1; i < n_points; ++i)
        if (!(table.ws[i] > table.ws[i - 1])) throw std::runtime_error("WeightTable: w not increasing");
    return table;
}

/// Constants of the stability envelope that the source result leaves
/// existential; they are fitted or assumed by the caller, never derived.
struct EnvelopeConstants {
    double K1 = 1.0;
    double alpha = 0.5;
    double c = 1.0;
};

/// Envelope  K1 * ( 2 psi Gamma(2psi/pi) / (pi |c_psi log d|^{2psi/pi}) )^alpha
/// with c_psi = (c/pi)(psi/sin psi)^{pi/2psi}; strictly increasing in d.
inline double stability_envelope(const Sector& s, double d, const EnvelopeConstants& k = {}) {
    validate(s);
    if (!(d > 0.0 && d < 1.0)) throw std::domain_error("stability_envelope: d must lie in (0,1)");
    if (!(k.alpha > 0.0 && k.K1 > 0.0 && k.c > 0.0))
        throw std::domain_error("stability_envelope: constants must be positive");
    const double c_psi = (k.c / kPi) * std::pow(s.psi / std::sin(s.psi), kPi / (2.0 * s.psi));
    const double expo = 2.0 * s.psi / kPi;
    const double inner = 2.0 * s.psi * gamma_fn(expo) / (kPi * std::pow(std::abs(c_psi * std::log(d)), expo));
    return k.K1 * std::pow(inner, k.alpha);
}

}  // namespace logconv
