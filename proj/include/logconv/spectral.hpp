#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "logconv/common.hpp"
#include "logconv/mittag_leffler.hpp"
#include "logconv/quadrature.hpp"

namespace logconv {

using StateCoeffs = std::vector<double>;

enum class BasisKind { dirichlet_sine, discrete };

/// Eigenpairs of -A plus the dissipativity shift kappa. Two basis flavours:
/// the analytic sine basis on (0, length), and a discrete eigenvector matrix
/// orthonormal under the weighted quadrature inner product.
struct SpectralModel {
    std::vector<double> lambdas;  // eigenvalues of -A, ascending
    double kappa = 0.0;
    BasisKind kind = BasisKind::dirichlet_sine;

    // sine basis
    double length = 0.0;

    // discrete basis
    Eigen::MatrixXd modes;     // grid x n_modes, columns q-orthonormal
    Eigen::VectorXd q_weights; // quadrature weights rho_i * h
    Eigen::VectorXd grid;      // interior nodes
    double symmetry_residual = 0.0;

    std::size_t dim() const { return lambdas.size(); }

    /// Value of basis function n at point x (sine basis only).
    double sine_mode(std::size_t n, double x) const {
        return std::sqrt(2.0 / length) * std::sin((n + 1) * kPi * x / length);
    }

    /// Norm of D((-A)^eps): (sum (1+|lambda_n|)^(2 eps) c_n^2)^(1/2).
    double frac_norm(std::span<const double> coeffs, double eps) const {
        if (coeffs.size() != dim()) throw std::invalid_argument("frac_norm: dimension mismatch");
        double s = 0.0;
        for (std::size_t n = 0; n < coeffs.size(); ++n)
            s += std::pow(1.0 + std::abs(lambdas[n]), 2.0 * eps) * coeffs[n] * coeffs[n];
        return std::sqrt(s);
    }
};

/// Dirichlet Laplacian on (0, length): lambda_n = (n pi / length)^2 with the
/// normalized sine eigenfunctions.
inline SpectralModel dirichlet_laplacian_model(std::size_t n_modes, double length) {
    if (n_modes < 1) throw std::invalid_argument("dirichlet_laplacian_model: n_modes >= 1");
    if (!(length > 0.0)) throw std::invalid_argument("dirichlet_laplacian_model: length > 0");
    SpectralModel m;
    m.kind = BasisKind::dirichlet_sine;
    m.length = length;
    m.kappa = 0.0;
    m.lambdas.resize(n_modes);
    for (std::size_t n = 0; n < n_modes; ++n) m.lambdas[n] = sq((n + 1) * kPi / length);
    return m;
}

/// Drift-diffusion operator  L u = (a u')' + a b' u' + p u  on (0,1) with
/// homogeneous Dirichlet ends, discretized in its rho = e^b weighted
/// divergence form:
///     (L u)_i = [rho a]_{i+1/2}(u_{i+1}-u_i)/(rho_i h^2) - ... + p_i u_i ,
/// which conjugates by diag(sqrt(rho_i)) to an exactly symmetric matrix.
/// Returns the spectral model in the weighted space; kappa = max(0, sup spec L).
inline SpectralModel symmetrized_drift_model(std::size_t m_interior,
                                             const std::function<double(double)>& a,
                                             const std::function<double(double)>& b,
                                             const std::function<double(double)>& p,
                                             std::size_t n_modes) {
    if (m_interior < 3) throw std::invalid_argument("symmetrized_drift_model: grid too coarse");
    if (n_modes > m_interior)
        throw std::invalid_argument("symmetrized_drift_model: more modes than interior points");
    const std::size_t m = m_interior;
    const double h = 1.0 / static_cast<double>(m + 1);

    Eigen::VectorXd rho(m), pv(m), xs(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double x = (i + 1) * h;
        xs(i) = x;
        rho(i) = std::exp(b(x));
        pv(i) = p(x);
    }
    // midpoint samples of rho * a; also validates positivity of a
    Eigen::VectorXd ra(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const double x = (i + 0.5) * h;
        const double ax = a(x);
        if (!(ax > 0.0)) throw std::invalid_argument("symmetrized_drift_model: a must be positive");
        ra(i) = std::exp(b(x)) * ax;
    }

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        M(i, i) = -(ra(i) + ra(i + 1)) / (rho(i) * h * h) + pv(i);
        if (i + 1 < m) {
            const double off = ra(i + 1) / (h * h * std::sqrt(rho(i) * rho(i + 1)));
            M(i, i + 1) = off;
            M(i + 1, i) = off;
        }
    }
    const double sym_res = (M - M.transpose()).cwiseAbs().maxCoeff();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("symmetrized_drift_model: eigensolve failed");

    SpectralModel model;
    model.kind = BasisKind::discrete;
    model.symmetry_residual = sym_res;
    model.grid = xs;
    model.q_weights = rho * h;
    model.kappa = std::max(0.0, es.eigenvalues().maxCoeff());
    model.lambdas.resize(n_modes);
    model.modes.resize(m, n_modes);
    // eigenvalues of M ascending -> eigenvalues of -L descending; take the
    // top end (smallest eigenvalues of -L) in ascending order
    for (std::size_t j = 0; j < n_modes; ++j) {
        const std::size_t src = m - 1 - j;
        model.lambdas[j] = -es.eigenvalues()(src);
        for (std::size_t i = 0; i < m; ++i)
            model.modes(i, j) = es.eigenvectors()(i, src) / std::sqrt(rho(i) * h);
    }
    return model;
}

/// Expansion coefficients <u0, phi_n> in the model basis.
inline StateCoeffs project_initial_data(const SpectralModel& model,
                                        const std::function<double(double)>& u0) {
    StateCoeffs c(model.dim(), 0.0);
    if (model.kind == BasisKind::dirichlet_sine) {
        // composite Gauss-Legendre, enough panels to resolve the highest mode
        const std::size_t panels = 2 * model.dim() + 16;
        const auto rule = gauss_legendre(12, 0.0, 1.0);
        for (std::size_t n = 0; n < model.dim(); ++n) {
            KahanSum s;
            const double w = model.length / static_cast<double>(panels);
            for (std::size_t k = 0; k < panels; ++k) {
                for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                    const double x = (k + rule.nodes[q]) * w;
                    s.add(rule.weights[q] * w * u0(x) * model.sine_mode(n, x));
                }
            }
            c[n] = s.value();
        }
    } else {
        for (std::size_t n = 0; n < model.dim(); ++n) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < model.grid.size(); ++i)
                s += model.q_weights(i) * model.modes(i, n) * u0(model.grid(i));
            c[n] = s;
        }
    }
    return c;
}

/// Same, from samples on the discrete model's own grid.
inline StateCoeffs project_initial_data(const SpectralModel& model, std::span<const double> samples) {
    if (model.kind != BasisKind::discrete)
        throw std::invalid_argument("project_initial_data: sample projection needs a discrete basis");
    if (static_cast<Eigen::Index>(samples.size()) != model.grid.size())
        throw std::invalid_argument("project_initial_data: sample/grid size mismatch");
    StateCoeffs c(model.dim(), 0.0);
    for (std::size_t n = 0; n < model.dim(); ++n) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < model.grid.size(); ++i)
            s += model.q_weights(i) * model.modes(i, n) * samples[i];
        c[n] = s;
    }
    return c;
}

/// Reconstruct the function value at x from coefficients (sine basis).
inline double reconstruct_at(const SpectralModel& model, std::span<const double> coeffs, double x) {
    if (model.kind != BasisKind::dirichlet_sine)
        throw std::invalid_argument("reconstruct_at: sine basis only");
    double s = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) s += coeffs[n] * model.sine_mode(n, x);
    return s;
}

/// Time grid, per-time coefficient states and norms of a computed solution.
/// states may be empty for norm-only traces (transport, grid solvers).
struct Trajectory {
    std::vector<double> times;
    std::vector<StateCoeffs> states;
    std::vector<double> norms;

    double final_time() const { return times.back(); }
};

inline void validate_times(std::span<const double> times) {
    if (times.empty()) throw std::invalid_argument("evolve: empty time grid");
    if (times.front() != 0.0) throw std::invalid_argument("evolve: time grid must start at 0");
    if (!strictly_increasing(times)) throw std::invalid_argument("evolve: time grid must be increasing");
}

/// Per-mode decay factors E_alpha(-lambda_n t^alpha) (exp(-lambda_n t) at
/// alpha = 1), shared across a batch of initial states.
inline Eigen::MatrixXd evolution_factors(const SpectralModel& model, double alpha,
                                         std::span<const double> times) {
    validate_times(times);
    Eigen::MatrixXd d(model.dim(), times.size());
    for (std::size_t n = 0; n < model.dim(); ++n) {
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double t = times[i];
            if (alpha == 1.0) {
                d(n, i) = std::exp(-model.lambdas[n] * t);
            } else if (t == 0.0) {
                d(n, i) = 1.0;
            } else {
                d(n, i) = ml_eval(alpha, 1.0, -model.lambdas[n] * std::pow(t, alpha));
            }
        }
    }
    return d;
}

inline std::vector<Trajectory> evolve_many(const SpectralModel& model,
                                           std::span<const StateCoeffs> initial,
                                           double alpha, std::span<const double> times) {
    const Eigen::MatrixXd decay = evolution_factors(model, alpha, times);
    std::vector<Trajectory> out;
    out.reserve(initial.size());
    for (const auto& u0 : initial) {
        if (u0.size() != model.dim()) throw std::invalid_argument("evolve: coefficient size mismatch");
        Trajectory traj;
        traj.times.assign(times.begin(), times.end());
        traj.states.resize(times.size());
        traj.norms.resize(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) {
            StateCoeffs c(model.dim());
            double s = 0.0;
            for (std::size_t n = 0; n < model.dim(); ++n) {
                c[n] = u0[n] * decay(n, i);
                s += c[n] * c[n];
            }
            traj.norms[i] = std::sqrt(s);
            traj.states[i] = std::move(c);
        }
        out.push_back(std::move(traj));
    }
    return out;
}

inline Trajectory evolve(const SpectralModel& model, const StateCoeffs& u0, double alpha,
                         std::span<const double> times) {
    std::vector<StateCoeffs> batch{u0};
    return std::move(evolve_many(model, batch, alpha, times).front());
}

// --- transport counterexample -----------------------------------------------
//
// u_t + u_x = 0 on (0,1) with inflow condition u(t,0) = 0 is well posed but
// carries every initial state to 0 by t = 1: no convexity estimate can hold.
// Solved exactly by characteristics on a cell-centered sample grid.

/// u(t, x) = u0(x - t) for x > t, else 0, sampled at cell centers.
inline std::vector<double> transport_solve(const std::function<double(double)>& u0,
                                           std::size_t n_cells, double t) {
    if (t < 0.0) throw std::invalid_argument("transport_solve: t >= 0 required");
    std::vector<double> u(n_cells, 0.0);
    for (std::size_t i = 0; i < n_cells; ++i) {
        const double x = (i + 0.5) / static_cast<double>(n_cells);
        if (x > t) u[i] = u0(x - t);
    }
    return u;
}

/// L2(0,1) norm of cell-centered samples by the rectangle rule.
inline double transport_norm(std::span<const double> samples) {
    double s = 0.0;
    for (double v : samples) s += v * v;
    return std::sqrt(s / static_cast<double>(samples.size()));
}

/// Norm-only trajectory of the transport flow (states left empty; the exact
/// characteristics are the whole story here).
inline Trajectory transport_trajectory(const std::function<double(double)>& u0,
                                       std::size_t n_cells, std::span<const double> times) {
    validate_times(times);
    Trajectory traj;
    traj.times.assign(times.begin(), times.end());
    traj.norms.reserve(times.size());
    for (double t : times) traj.norms.push_back(transport_norm(transport_solve(u0, n_cells, t)));
    return traj;
}

}  // namespace logconv
