#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "logconv/common.hpp"
#include "logconv/gamma.hpp"

namespace logconv {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    template <class F>
    double apply(F&& f) const {
        KahanSum s;
        for (std::size_t i = 0; i < nodes.size(); ++i) s.add(weights[i] * f(nodes[i]));
        return s.value();
    }
};

/// Gauss-Legendre rule on [a, b]. Nodes by Newton iteration on P_n, the
/// textbook construction; deterministic and accurate to ~1 ulp.
inline QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double xl = 0.5 * (b - a);
        const double xm = 0.5 * (a + b);
        rule.nodes[i] = xm - xl * x;
        rule.nodes[n - 1 - i] = xm + xl * x;
        const double w = 2.0 * xl / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

/// Gauss-Jacobi rule for  int_0^1 t^q (1-t)^p f(t) dt  (weight exponents
/// p, q > -1), by Golub-Welsch on the Jacobi recurrence.
inline QuadratureRule gauss_jacobi01(int n, double p, double q) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi01: n >= 1 required");
    if (p <= -1.0 || q <= -1.0) throw std::invalid_argument("gauss_jacobi01: exponents must exceed -1");
    // standard Jacobi weight (1-x)^A (1+x)^B on [-1,1]: A = p (right end), B = q (left end)
    const double A = p, B = q;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    const double s = A + B;
    for (int k = 0; k < n; ++k) {
        double ak;
        if (k == 0) {
            ak = (B - A) / (s + 2.0);
        } else {
            const double den = (2.0 * k + s) * (2.0 * k + s + 2.0);
            ak = (B * B - A * A) / den;
        }
        J(k, k) = ak;
        if (k == 1) {
            // limit form: the generic expression is 0/0 when A + B = -1
            const double bk = std::sqrt(4.0 * (1.0 + A) * (1.0 + B) / (sq(s + 2.0) * (s + 3.0)));
            J(1, 0) = bk;
            J(0, 1) = bk;
        } else if (k >= 2) {
            const double num = 4.0 * k * (k + A) * (k + B) * (k + s);
            const double den = sq(2.0 * k + s) * (2.0 * k + s + 1.0) * (2.0 * k + s - 1.0);
            const double bk = std::sqrt(num / den);
            J(k, k - 1) = bk;
            J(k - 1, k) = bk;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double mu0 = std::pow(2.0, A + B + 1.0) * beta_fn(A + 1.0, B + 1.0);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double xi = es.eigenvalues()(i);
        rule.nodes[i] = 0.5 * (1.0 + xi);                      // map [-1,1] -> [0,1]
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0 / std::pow(2.0, A + B + 1.0);
    }
    return rule;
}

namespace detail {

// Gauss 7 / Kronrod 15 node-weight pairs on [-1,1] (QUADPACK constants).
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

template <class F>
void gk15(F&& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kKronrodNodes[i]);
        fv[14 - i] = f(c + h * kKronrodNodes[i]);
    }
    fv[7] = f(c);
    double kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 7; ++i) kron += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
    kron += kKronrodWeights[7] * fv[7];
    // Gauss points sit at the odd Kronrod indices
    for (int i = 0; i < 3; ++i) gauss += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    gauss += kGaussWeights[3] * fv[7];
    result = kron * h;
    // |K15 - G7| estimates the Gauss error, which dominates the Kronrod error;
    // using it directly keeps the estimate conservative.
    err = std::abs((kron - gauss) * h);
}

}  // namespace detail

struct AdaptiveOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-300;
    int max_intervals = 4000;
};

/// Adaptive Gauss-Kronrod integration over [a, b] with optional interior
/// breakpoints (peaks, kinks). Throws if the subdivision budget is exhausted
/// before the tolerance is met.
template <class F>
double integrate_adaptive(F&& f, double a, double b,
                          const AdaptiveOptions& opt = {},
                          const std::vector<double>& breakpoints = {}) {
    struct Segment {
        double a, b, value, error;
        bool operator<(const Segment& o) const { return error < o.error; }
    };
    std::vector<double> pts{a, b};
    for (double p : breakpoints)
        if (p > a && p < b) pts.push_back(p);
    std::sort(pts.begin(), pts.end());

    std::priority_queue<Segment> heap;
    double total = 0.0, total_err = 0.0;
    auto push = [&](double lo, double hi) {
        Segment s{lo, hi, 0.0, 0.0};
        detail::gk15(f, lo, hi, s.value, s.error);
        total += s.value;
        total_err += s.error;
        heap.push(s);
    };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) push(pts[i], pts[i + 1]);

    int n_intervals = static_cast<int>(pts.size()) - 1;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (n_intervals >= opt.max_intervals)
            throw std::runtime_error("integrate_adaptive: interval budget exhausted");
        Segment worst = heap.top();
        heap.pop();
        total -= worst.value;
        total_err -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            break;  // interval at rounding width; accept what we have
        push(worst.a, mid);
        push(mid, worst.b);
        ++n_intervals;
    }
    return total;
}

}  // namespace logconv
