#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "logconv/common.hpp"
#include "logconv/spectral.hpp"
#include "logconv/weight.hpp"

namespace logconv {

struct SectorEstimateOptions {
    std::size_t n_samples = 100000;
    std::uint64_t seed = 41;
    double T = 1.0;
    std::size_t n_rays = 33;
    std::size_t n_radii = 80;
};

namespace sector_detail {

inline double op_norm(const Eigen::MatrixXcd& M) {
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(M).singularValues()(0);
}

/// max |arg(-(z - kappa))| over sampled points z of the numerical range,
/// with a hill-climb polish around the best sample.
inline double max_arg_numerical_range(const Eigen::MatrixXd& A, double kappa,
                                      const SectorEstimateOptions& opt) {
    const Eigen::Index n = A.rows();
    Rng rng(opt.seed);
    const double scale = A.cwiseAbs().maxCoeff() + kappa + 1.0;

    auto arg_of = [&](const Eigen::VectorXcd& u) {
        const std::complex<double> z = u.dot(A * u) / u.dot(u);  // <Au, u>/<u,u>
        const std::complex<double> zeta = -(z - kappa);
        if (std::abs(zeta) < 1e-10 * scale) return -1.0;  // too close to the vertex
        return std::abs(std::arg(zeta));
    };
    auto random_vec = [&]() {
        Eigen::VectorXcd u(n);
        for (Eigen::Index i = 0; i < n; ++i) u(i) = std::complex<double>(rng.normal(), rng.normal());
        return u;
    };

    double best = 0.0;
    Eigen::VectorXcd best_u = random_vec();
    for (std::size_t k = 0; k < opt.n_samples; ++k) {
        Eigen::VectorXcd u = random_vec();
        const double a = arg_of(u);
        if (a > best) {
            best = a;
            best_u = u;
        }
    }
    // local polish: shrinking random perturbations around the incumbent
    double step = 0.5;
    for (int round = 0; round < 60; ++round) {
        bool improved = false;
        for (int trial = 0; trial < 40; ++trial) {
            Eigen::VectorXcd u = best_u;
            for (Eigen::Index i = 0; i < n; ++i)
                u(i) += step * std::complex<double>(rng.normal(), rng.normal());
            const double a = arg_of(u);
            if (a > best) {
                best = a;
                best_u = u;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
        if (step < 1e-9) break;
    }
    return best;
}

}  // namespace sector_detail

/// Estimate (psi, K, kappa) of the analytic-semigroup bound for a small real
/// matrix: kappa from the symmetric part (exact), psi from sampling the
/// numerical range, K from sampling ||e^{zA}|| e^{-kappa Re z} on rays of the
/// estimated sector. psi carries ~0.02 rad of sampling uncertainty; callers
/// slacken with Sector::psi -= band before relying on it.
inline Sector matrix_sector_estimate(const Eigen::MatrixXd& A, const SectorEstimateOptions& opt = {}) {
    if (A.rows() != A.cols() || A.rows() == 0) throw std::invalid_argument("matrix_sector_estimate: square matrix required");

    const Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    const double kappa = std::max(0.0, es.eigenvalues().maxCoeff());

    const double max_arg = sector_detail::max_arg_numerical_range(A, kappa, opt);
    double psi = kPi / 2.0 - std::max(0.0, max_arg);
    if (psi < 1e-3)
        throw std::runtime_error("matrix_sector_estimate: numerical range not sectorial within tolerance");
    psi = std::min(psi, kPi / 2.0);

    // K: sup over the sector of ||e^{zA}|| e^{-kappa Re z}, sampled on rays
    // z = t e^{i phi} and refined around the incumbent by golden section.
    const double anorm = std::max(A.cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::MatrixXcd Ac = A.cast<std::complex<double>>();
    auto growth = [&](double t, double phi) {
        const std::complex<double> z = t * std::complex<double>(std::cos(phi), std::sin(phi));
        const Eigen::MatrixXcd E = (z * Ac).exp();
        return sector_detail::op_norm(E) * std::exp(-kappa * z.real());
    };
    double best = 1.0, best_t = 0.0, best_phi = 0.0;
    for (std::size_t r = 0; r < opt.n_rays; ++r) {
        const double phi = -psi + 2.0 * psi * static_cast<double>(r) / static_cast<double>(opt.n_rays - 1);
        for (std::size_t j = 0; j < opt.n_radii; ++j) {
            const double t = std::pow(10.0, -3.0 + 4.5 * static_cast<double>(j) / static_cast<double>(opt.n_radii - 1)) / anorm;
            const double g = growth(t, phi);
            if (g > best) {
                best = g;
                best_t = t;
                best_phi = phi;
            }
        }
    }
    if (best_t > 0.0) {
        double lo = best_t / 3.0, hi = best_t * 3.0;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
        double fc = growth(c, best_phi), fd = growth(d, best_phi);
        for (int it = 0; it < 60; ++it) {
            if (fc < fd) {
                lo = c; c = d; fc = fd;
                d = lo + gr * (hi - lo); fd = growth(d, best_phi);
            } else {
                hi = d; d = c; fd = fc;
                c = hi - gr * (hi - lo); fc = growth(c, best_phi);
            }
        }
        best = std::max(best, std::max(fc, fd));
    }

    Sector s;
    s.psi = psi;
    s.K = std::max(1.0, best);
    s.kappa = kappa;
    s.T = opt.T;
    return s;
}

/// Sector with the sampling uncertainty band removed from psi (downstream
/// checks use the smaller, safe angle).
inline Sector slackened(Sector s, double band = 0.02) {
    s.psi = std::max(1e-3, s.psi - band);
    return s;
}

/// e^{t_i A} u0 via the scaling-and-squaring matrix exponential; Euclidean
/// norms per time.
inline Trajectory matrix_semigroup_trajectory(const Eigen::MatrixXd& A, const Eigen::VectorXd& u0,
                                              std::span<const double> times) {
    if (A.rows() != A.cols() || A.rows() != u0.size())
        throw std::invalid_argument("matrix_semigroup_trajectory: dimension mismatch");
    validate_times(times);
    Trajectory traj;
    traj.times.assign(times.begin(), times.end());
    traj.states.reserve(times.size());
    traj.norms.reserve(times.size());
    for (double t : times) {
        const Eigen::MatrixXd E = (t * A).exp();
        if (!E.allFinite()) throw std::runtime_error("matrix_semigroup_trajectory: exponential overflow");
        const Eigen::VectorXd v = E * u0;
        traj.states.emplace_back(v.data(), v.data() + v.size());
        traj.norms.push_back(v.norm());
    }
    return traj;
}

}  // namespace logconv
