#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include "logconv/common.hpp"
#include "logconv/quadrature.hpp"

namespace logconv {

/// Drift matrix B, diffusion matrix Q and fractional power s of the
/// evolution  u_t = -(symbol <Q xi, xi>^s) u + (B x) . grad u.
struct FracOUParams {
    Eigen::MatrixXd Q;
    Eigen::MatrixXd B;
    double s = 1.0;

    int dim() const { return static_cast<int>(Q.rows()); }
};

inline void validate(const FracOUParams& p) {
    const int n = p.dim();
    if (n < 1 || n > 2 || p.Q.cols() != n || p.B.rows() != n || p.B.cols() != n)
        throw std::invalid_argument("FracOUParams: Q and B must be square, dimension 1 or 2");
    if ((p.Q - p.Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + p.Q.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("FracOUParams: Q must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.Q);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("FracOUParams: Q must be positive definite");
    if (!(p.s > 0.0)) throw std::invalid_argument("FracOUParams: s must be positive");
}

/// Uniform grid on the box [-L, L]^dim, power-of-two points per axis.
/// Frequency spacing pi / L.
struct FourierGrid {
    int dim = 1;
    double extent = 12.0;
    int points = 128;

    double dx() const { return 2.0 * extent / points; }
    double dxi() const { return kPi / extent; }
    std::size_t size() const { return dim == 1 ? points : static_cast<std::size_t>(points) * points; }
    double coord(int i) const { return -extent + i * dx(); }
    bool operator==(const FourierGrid&) const = default;
};

inline void validate(const FourierGrid& g) {
    if (g.dim != 1 && g.dim != 2) throw std::invalid_argument("FourierGrid: dim must be 1 or 2");
    if (!(g.extent > 0.0)) throw std::invalid_argument("FourierGrid: extent must be positive");
    if (g.points < 32 || (g.points & (g.points - 1)) != 0)
        throw std::invalid_argument("FourierGrid: points must be a power of two, at least 32");
}

/// Real samples on a FourierGrid, row-major (x outer, y inner) for dim 2.
struct GridState {
    FourierGrid grid;
    std::vector<double> values;

    double l2_norm() const {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(s * std::pow(grid.dx(), grid.dim));
    }
};

inline GridState make_grid_state(const FourierGrid& g, const std::function<double(double, double)>& f) {
    validate(g);
    GridState u;
    u.grid = g;
    u.values.resize(g.size());
    const int n = g.points;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) u.values[i] = f(g.coord(i), 0.0);
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) u.values[static_cast<std::size_t>(i) * n + j] = f(g.coord(i), g.coord(j));
    }
    return u;
}

namespace fourier_detail {

using Cplx = std::complex<double>;

// Continuous-transform samples  uhat(xi_m) = dx^dim (-1)^{sum k} DFT[u],
// stored fftshifted so that index m corresponds to xi = (m - n/2) dxi,
// ascending per axis.
inline std::vector<Cplx> forward(const GridState& u) {
    const int n = u.grid.points;
    const int dim = u.grid.dim;
    std::vector<Cplx> buf(u.grid.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = Cplx(u.values[i], 0.0);
    fftw_plan plan = dim == 1
        ? fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf.data()),
                           reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD, FFTW_ESTIMATE)
        : fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(buf.data()),
                           reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    const double scale = std::pow(u.grid.dx(), dim);
    std::vector<Cplx> out(buf.size());
    auto shift_index = [n](int k) { return (k + n / 2) % n; };  // wrap freq -> shifted slot
    if (dim == 1) {
        for (int k = 0; k < n; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            out[shift_index(k)] = scale * sign * buf[k];
        }
    } else {
        for (int kx = 0; kx < n; ++kx)
            for (int ky = 0; ky < n; ++ky) {
                const double sign = ((kx + ky) % 2 == 0) ? 1.0 : -1.0;
                out[static_cast<std::size_t>(shift_index(kx)) * n + shift_index(ky)] =
                    scale * sign * buf[static_cast<std::size_t>(kx) * n + ky];
            }
    }
    return out;
}

inline GridState inverse(const FourierGrid& g, const std::vector<Cplx>& fhat, double* max_imag = nullptr) {
    const int n = g.points;
    const int dim = g.dim;
    std::vector<Cplx> buf(g.size());
    auto shift_index = [n](int k) { return (k + n / 2) % n; };
    if (dim == 1) {
        for (int k = 0; k < n; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            buf[k] = sign * fhat[shift_index(k)];
        }
    } else {
        for (int kx = 0; kx < n; ++kx)
            for (int ky = 0; ky < n; ++ky) {
                const double sign = ((kx + ky) % 2 == 0) ? 1.0 : -1.0;
                buf[static_cast<std::size_t>(kx) * n + ky] =
                    sign * fhat[static_cast<std::size_t>(shift_index(kx)) * n + shift_index(ky)];
            }
    }
    fftw_plan plan = dim == 1
        ? fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf.data()),
                           reinterpret_cast<fftw_complex*>(buf.data()), FFTW_BACKWARD, FFTW_ESTIMATE)
        : fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(buf.data()),
                           reinterpret_cast<fftw_complex*>(buf.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    GridState u;
    u.grid = g;
    u.values.resize(g.size());
    const double scale = 1.0 / std::pow(n * g.dx(), dim);
    double imax = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        u.values[i] = scale * buf[i].real();
        imax = std::max(imax, std::abs(buf[i].imag()) * scale);
    }
    if (max_imag) *max_imag = imax;
    return u;
}

inline void catmull_rom_weights(double frac, double w[4]) {
    const double u = frac, u2 = u * u, u3 = u2 * u;
    w[0] = 0.5 * (-u3 + 2.0 * u2 - u);
    w[1] = 0.5 * (3.0 * u3 - 5.0 * u2 + 2.0);
    w[2] = 0.5 * (-3.0 * u3 + 4.0 * u2 + u);
    w[3] = 0.5 * (u3 - u2);
}

/// Cubic interpolation of the shifted spectrum at an arbitrary frequency;
/// zero outside the resolved band. Reads landing within 1e-9 of a node are
/// passed through exactly, which keeps drift-free evolutions bitwise clean.
class SpectrumInterpolant {
public:
    SpectrumInterpolant(const FourierGrid& g, const std::vector<Cplx>& fhat) : g_(g), f_(fhat) {}

    Cplx operator()(double xi_x, double xi_y = 0.0) const {
        const int n = g_.points;
        if (g_.dim == 1) {
            double w[4];
            int i1;
            if (!prep(xi_x, i1, w)) return exact_or_zero_1d(xi_x);
            Cplx acc(0.0, 0.0);
            for (int a = 0; a < 4; ++a) {
                const int idx = i1 - 1 + a;
                if (idx >= 0 && idx < n) acc += w[a] * f_[idx];
            }
            return acc;
        }
        double wx[4], wy[4];
        int ix, iy;
        const bool ox = prep(xi_x, ix, wx);
        const bool oy = prep(xi_y, iy, wy);
        if (!ox || !oy) return exact_or_zero_2d(xi_x, xi_y, ox, ix, wx, oy, iy, wy);
        Cplx acc(0.0, 0.0);
        for (int a = 0; a < 4; ++a) {
            const int jx = ix - 1 + a;
            if (jx < 0 || jx >= n) continue;
            Cplx row(0.0, 0.0);
            for (int b = 0; b < 4; ++b) {
                const int jy = iy - 1 + b;
                if (jy >= 0 && jy < n) row += wy[b] * f_[static_cast<std::size_t>(jx) * n + jy];
            }
            acc += wx[a] * row;
        }
        return acc;
    }

private:
    // returns false when the read sits on a node (handled exactly)
    bool prep(double xi, int& i1, double w[4]) const {
        const double p = xi / g_.dxi() + g_.points / 2;
        const double r = std::round(p);
        if (std::abs(p - r) < 1e-9) {
            i1 = static_cast<int>(r);
            return false;
        }
        i1 = static_cast<int>(std::floor(p));
        catmull_rom_weights(p - i1, w);
        return true;
    }
    Cplx node_1d(int i) const {
        return (i >= 0 && i < g_.points) ? f_[i] : Cplx(0.0, 0.0);
    }
    Cplx exact_or_zero_1d(double xi) const {
        const int i = static_cast<int>(std::round(xi / g_.dxi() + g_.points / 2));
        return node_1d(i);
    }
    Cplx exact_or_zero_2d(double xi_x, double xi_y, bool ox, int ix, const double wx[4],
                          bool oy, int iy, const double wy[4]) const {
        const int n = g_.points;
        auto node = [&](int jx, int jy) {
            return (jx >= 0 && jx < n && jy >= 0 && jy < n)
                ? f_[static_cast<std::size_t>(jx) * n + jy] : Cplx(0.0, 0.0);
        };
        if (!ox && !oy) return node(ix, iy);
        if (!ox) {  // x on node, interpolate y
            Cplx acc(0.0, 0.0);
            for (int b = 0; b < 4; ++b) acc += wy[b] * node(ix, iy - 1 + b);
            return acc;
        }
        Cplx acc(0.0, 0.0);
        for (int a = 0; a < 4; ++a) acc += wx[a] * node(ix - 1 + a, iy);
        return acc;
    }

    const FourierGrid& g_;
    const std::vector<Cplx>& f_;
};

inline double op_norm(const Eigen::MatrixXd& M) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
}

}  // namespace fourier_detail

struct FourierSolveInfo {
    bool interpolation_warning = false;  // noticeable spectral mass near the transported band edge
    double out_of_band_mass = 0.0;       // relative L2 mass the transport could not reach
    double max_imag = 0.0;               // residual imaginary part after the inverse transform
    double min_exponent = 0.0;           // most negative symbol integral seen (should be >= 0)
};

/// Evolve u_t = -tr^s(-Q grad^2)u + Bx.grad u  by the Fourier characteristic
/// formula
///   uhat(t, eta) = e^{-t tr B} uhat0(e^{-t B^T} eta)
///                  * exp( -int_0^t <Q e^{(r-t)B^T} eta, e^{(r-t)B^T} eta>^s dr ),
/// frequency transport by cubic interpolation, the time integral by 32-node
/// Gauss-Legendre. Validated against fd_solve at s = 1.
inline GridState fourier_solve(const FracOUParams& p, const FourierGrid& grid, const GridState& u0,
                               double t, FourierSolveInfo* info = nullptr) {
    validate(p);
    validate(grid);
    if (u0.grid != grid || u0.values.size() != grid.size())
        throw std::invalid_argument("fourier_solve: state/grid mismatch");
    if (p.dim() != grid.dim) throw std::invalid_argument("fourier_solve: parameter/grid dimension mismatch");
    if (t < 0.0) throw std::invalid_argument("fourier_solve: t >= 0 required");
    if (t == 0.0) return u0;

    const int n = grid.points;
    const int dim = grid.dim;

    // the box must actually contain the state: relative mass in the outer 5%
    // shell has to be negligible or the transform is meaningless
    {
        double shell = 0.0, total = 0.0;
        const double edge = 0.95 * grid.extent;
        for (std::size_t idx = 0; idx < u0.values.size(); ++idx) {
            const int i = dim == 1 ? static_cast<int>(idx) : static_cast<int>(idx) / n;
            const int j = dim == 1 ? 0 : static_cast<int>(idx) % n;
            const double x = grid.coord(i);
            const double y = dim == 1 ? 0.0 : grid.coord(j);
            const double v2 = u0.values[idx] * u0.values[idx];
            total += v2;
            if (std::abs(x) > edge || std::abs(y) > edge) shell += v2;
        }
        if (total == 0.0) return u0;  // zero state stays zero
        if (shell > 1e-8 * total)
            throw std::invalid_argument("fourier_solve: initial state has significant mass near the box edge");
    }

    auto fhat0 = fourier_detail::forward(u0);

    const Eigen::MatrixXd Bt = p.B.transpose();
    const Eigen::MatrixXd Einv = (-t * Bt).exp();
    const double growth = std::max(1.0, fourier_detail::op_norm(Einv));

    // aliasing guard: transported reads reach growth * band; equivalently the
    // spectrum must be concentrated inside band/growth (2-node margin for the
    // cubic stencil)
    {
        const double edge = (n / 2 - 2) * grid.dxi() / growth;
        double out = 0.0, total = 0.0;
        for (std::size_t idx = 0; idx < fhat0.size(); ++idx) {
            const int i = dim == 1 ? static_cast<int>(idx) : static_cast<int>(idx) / n;
            const int j = dim == 1 ? 0 : static_cast<int>(idx) % n;
            const double xx = (i - n / 2) * grid.dxi();
            const double yy = dim == 1 ? 0.0 : (j - n / 2) * grid.dxi();
            const double m = std::norm(fhat0[idx]);
            total += m;
            if (std::abs(xx) > edge || std::abs(yy) > edge) out += m;
        }
        const double ratio = total > 0.0 ? out / total : 0.0;
        if (info) {
            info->out_of_band_mass = ratio;
            info->interpolation_warning = ratio > 1e-12;
        }
        if (ratio > 1e-8)
            throw std::runtime_error("fourier_solve: frequency transport leaves the resolved band");
    }

    // 32-node Gauss-Legendre discretization of the symbol integral
    const auto rule = gauss_legendre(32, 0.0, t);
    std::vector<Eigen::MatrixXd> flow(rule.nodes.size());
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) flow[j] = ((rule.nodes[j] - t) * Bt).exp();

    const double log_jac = -t * p.B.trace();
    fourier_detail::SpectrumInterpolant interp(grid, fhat0);
    std::vector<fourier_detail::Cplx> fhat(fhat0.size());
    double min_expo = 0.0;

    Eigen::VectorXd eta(dim), zeta(dim), v(dim);
    for (std::size_t idx = 0; idx < fhat.size(); ++idx) {
        const int i = dim == 1 ? static_cast<int>(idx) : static_cast<int>(idx) / n;
        const int j = dim == 1 ? 0 : static_cast<int>(idx) % n;
        eta(0) = (i - n / 2) * grid.dxi();
        if (dim == 2) eta(1) = (j - n / 2) * grid.dxi();

        zeta.noalias() = Einv * eta;
        const auto f0 = dim == 1 ? interp(zeta(0)) : interp(zeta(0), zeta(1));

        double expo = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            v.noalias() = flow[q] * eta;
            const double quad = v.dot(p.Q * v);
            expo += rule.weights[q] * std::pow(std::max(0.0, quad), p.s);
        }
        min_expo = std::min(min_expo, expo);
        fhat[idx] = f0 * std::exp(log_jac - expo);
    }
    if (info) info->min_exponent = min_expo;

    double max_imag = 0.0;
    GridState out = fourier_detail::inverse(grid, fhat, &max_imag);
    if (info) info->max_imag = max_imag;
    return out;
}

struct FdSolveInfo {
    int n_steps = 0;
    double dt = 0.0;
};

/// Finite-difference oracle for s = 1: centered second differences for the
/// diffusion (including the Q12 cross term), second-order upwind for the
/// drift, Crank-Nicolson in time on the full linear operator (explicit drift
/// treatments put the upwind spectrum outside the stability region of the
/// usual multistep companions at fine resolution, so the drift is implicit
/// too). Homogeneous Dirichlet just outside the box.
inline GridState fd_solve(const FracOUParams& p, const FourierGrid& grid, const GridState& u0,
                          double t, FdSolveInfo* info = nullptr, int steps_override = 0) {
    validate(p);
    validate(grid);
    if (std::abs(p.s - 1.0) > 1e-12) throw std::invalid_argument("fd_solve: oracle requires s = 1");
    if (p.dim() != grid.dim || u0.grid != grid) throw std::invalid_argument("fd_solve: state/grid mismatch");
    if (t < 0.0) throw std::invalid_argument("fd_solve: t >= 0 required");
    if (t == 0.0) return u0;

    const int n = grid.points;
    const int dim = grid.dim;
    const double dx = grid.dx();
    const std::size_t N = grid.size();

    // unit drift Courant number for temporal accuracy (stability is
    // unconditional)
    double cmax = 0.0;
    {
        const double L = grid.extent;
        for (int d = 0; d < dim; ++d) {
            double row = 0.0;
            for (int e = 0; e < dim; ++e) row += std::abs(p.B(d, e)) * L;
            cmax = std::max(cmax, row);
        }
    }
    const int n_steps = steps_override > 0
        ? steps_override
        : std::max(64, static_cast<int>(std::ceil(t * cmax / dx)));
    const double dt = t / n_steps;
    if (info) {
        info->n_steps = n_steps;
        info->dt = dt;
    }

    auto index = [&](int i, int j) { return static_cast<Eigen::Index>(i) * n + j; };

    // full spatial operator L = diffusion + drift as one sparse matrix
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve((dim == 1 ? 5 : 13) * N);
    const double q11 = p.Q(0, 0);
    const double inv_dx2 = 1.0 / (dx * dx);
    const double inv_2dx = 1.0 / (2.0 * dx);

    auto add = [&](Eigen::Index row, int i, int j, double v) {
        if (i < 0 || i >= n || (dim == 2 && (j < 0 || j >= n))) return;  // Dirichlet ghost
        trip.emplace_back(row, dim == 1 ? i : index(i, j), v);
    };
    // second-order upwind for c * d/dx_d; information comes from the side the
    // profile u(x + c t) arrives from
    auto add_drift = [&](Eigen::Index row, int i, int j, int d, double c) {
        if (c == 0.0) return;
        const int di = (d == 0) ? 1 : 0;
        const int dj = (d == 0) ? 0 : 1;
        if (c > 0.0) {
            add(row, i, j, -3.0 * c * inv_2dx);
            add(row, i + di, j + dj, 4.0 * c * inv_2dx);
            add(row, i + 2 * di, j + 2 * dj, -c * inv_2dx);
        } else {
            add(row, i, j, 3.0 * c * inv_2dx);
            add(row, i - di, j - dj, -4.0 * c * inv_2dx);
            add(row, i - 2 * di, j - 2 * dj, c * inv_2dx);
        }
    };

    for (int i = 0; i < n; ++i) {
        const double x = grid.coord(i);
        const int jmax = dim == 1 ? 1 : n;
        for (int j = 0; j < jmax; ++j) {
            const double y = dim == 1 ? 0.0 : grid.coord(j);
            const Eigen::Index row = dim == 1 ? i : index(i, j);
            add(row, i, j, -2.0 * q11 * inv_dx2);
            add(row, i - 1, j, q11 * inv_dx2);
            add(row, i + 1, j, q11 * inv_dx2);
            if (dim == 2) {
                const double q22 = p.Q(1, 1), q12 = p.Q(0, 1);
                add(row, i, j, -2.0 * q22 * inv_dx2);
                add(row, i, j - 1, q22 * inv_dx2);
                add(row, i, j + 1, q22 * inv_dx2);
                if (q12 != 0.0) {
                    const double c = 2.0 * q12 / (4.0 * dx * dx);
                    add(row, i + 1, j + 1, c);
                    add(row, i - 1, j - 1, c);
                    add(row, i + 1, j - 1, -c);
                    add(row, i - 1, j + 1, -c);
                }
                add_drift(row, i, j, 0, p.B(0, 0) * x + p.B(0, 1) * y);
                add_drift(row, i, j, 1, p.B(1, 0) * x + p.B(1, 1) * y);
            } else {
                add_drift(row, i, j, 0, p.B(0, 0) * x);
            }
        }
    }
    Eigen::SparseMatrix<double> L(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    L.setFromTriplets(trip.begin(), trip.end());

    Eigen::SparseMatrix<double> I(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    I.setIdentity();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    {
        Eigen::SparseMatrix<double> lhs = I - (dt / 2.0) * L;
        lu.compute(lhs);
        if (lu.info() != Eigen::Success) throw std::runtime_error("fd_solve: implicit factorization failed");
    }

    Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(u0.values.data(), static_cast<Eigen::Index>(N));
    Eigen::VectorXd rhs(N);
    for (int step = 0; step < n_steps; ++step) {
        rhs = u + (dt / 2.0) * (L * u);
        u = lu.solve(rhs);
        if (lu.info() != Eigen::Success) throw std::runtime_error("fd_solve: implicit solve failed");
    }

    GridState out;
    out.grid = grid;
    out.values.assign(u.data(), u.data() + u.size());
    return out;
}

/// Stationary covariance of the drift: solves B S + S B^T = -2 I by the
/// Kronecker system. Requires the spectrum of B in the open left half-plane.
inline Eigen::MatrixXd invariant_covariance(const Eigen::MatrixXd& B) {
    const int n = static_cast<int>(B.rows());
    if (B.cols() != n || n < 1) throw std::invalid_argument("invariant_covariance: square matrix required");
    Eigen::EigenSolver<Eigen::MatrixXd> es(B);
    if (es.eigenvalues().real().maxCoeff() >= 0.0)
        throw std::invalid_argument("invariant_covariance: spectrum of B must lie in { Re z < 0 }");

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n * n, n * n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n * n);
    auto flat = [n](int i, int j) { return i * n + j; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                A(flat(i, j), flat(k, j)) += B(i, k);   // (B S)_{ij}
                A(flat(i, j), flat(i, k)) += B(j, k);   // (S B^T)_{ij}
            }
            rhs(flat(i, j)) = (i == j) ? -2.0 : 0.0;
        }
    const Eigen::VectorXd sol = A.fullPivLu().solve(rhs);
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) S(i, j) = sol(flat(i, j));
    S = 0.5 * (S + S.transpose());

    const double residual = (B * S + S * B.transpose() + 2.0 * Eigen::MatrixXd::Identity(n, n))
                                .cwiseAbs().maxCoeff();
    if (residual > 1e-10) throw std::runtime_error("invariant_covariance: Lyapunov residual too large");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> chk(S);
    if (chk.eigenvalues().minCoeff() <= 0.0)
        throw std::runtime_error("invariant_covariance: covariance not positive definite");
    return S;
}

/// L2 norm against the centered Gaussian measure of covariance Sigma,
/// by the rectangle rule on the state's own grid.
inline double weighted_norm(const GridState& u, const Eigen::MatrixXd& Sigma) {
    const int dim = u.grid.dim;
    if (Sigma.rows() != dim || Sigma.cols() != dim)
        throw std::invalid_argument("weighted_norm: covariance dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("weighted_norm: covariance must be SPD");
    const Eigen::MatrixXd Sinv = Sigma.inverse();
    const double det = Sigma.determinant();
    const double norm_const = 1.0 / (std::pow(2.0 * kPi, dim / 2.0) * std::sqrt(det));
    const double cell = std::pow(u.grid.dx(), dim);

    const int n = u.grid.points;
    double mass = 0.0, acc = 0.0;
    Eigen::VectorXd x(dim);
    for (std::size_t idx = 0; idx < u.values.size(); ++idx) {
        const int i = dim == 1 ? static_cast<int>(idx) : static_cast<int>(idx) / n;
        const int j = dim == 1 ? 0 : static_cast<int>(idx) % n;
        x(0) = u.grid.coord(i);
        if (dim == 2) x(1) = u.grid.coord(j);
        const double w = norm_const * std::exp(-0.5 * x.dot(Sinv * x));
        mass += w * cell;
        acc += u.values[idx] * u.values[idx] * w * cell;
    }
    if (mass < 1.0 - 1e-8)
        throw std::runtime_error("weighted_norm: grid does not resolve the Gaussian weight");
    return std::sqrt(acc);
}

/// Union of balls of a fixed radius centered on a rectangular lattice.
struct LatticeBallRegion {
    Eigen::VectorXd spacing;  // per-dimension lattice step
    double radius = 0.5;
    Eigen::VectorXd offset;   // lattice origin

    int dim() const { return static_cast<int>(spacing.size()); }

    bool contains(const Eigen::VectorXd& x) const {
        Eigen::VectorXd d = x - offset;
        for (int k = 0; k < dim(); ++k) d(k) -= std::round(d(k) / spacing(k)) * spacing(k);
        return d.norm() <= radius;
    }
};

inline void validate(const LatticeBallRegion& r) {
    if (r.dim() < 1 || r.dim() > 2) throw std::invalid_argument("LatticeBallRegion: dimension 1 or 2");
    if (!(r.radius > 0.0)) throw std::invalid_argument("LatticeBallRegion: radius must be positive");
    if (r.offset.size() != r.spacing.size())
        throw std::invalid_argument("LatticeBallRegion: offset/spacing size mismatch");
    for (int k = 0; k < r.dim(); ++k)
        if (!(r.spacing(k) > 0.0)) throw std::invalid_argument("LatticeBallRegion: spacing must be positive");
}

struct GeomCheckResult {
    bool pass = false;
    double analytic_worst = 0.0;   // sup over y of the needed witness distance
    double worst_probe = 0.0;      // same quantity over the random probes
};

/// Check the covering condition: every y has a witness y' with
/// B(y', r_wit) inside the region and |y - y'| < delta. For a lattice of
/// balls the condition reduces by periodicity to the deep hole of one cell:
/// a point at distance d from the lattice needs a witness at distance
/// max(0, d - (r - r_wit)), maximized at the cell center.
inline GeomCheckResult geom_check(const LatticeBallRegion& region, double delta, double r_wit,
                                  std::size_t probes, std::uint64_t seed = 12345) {
    validate(region);
    if (!(delta > 0.0) || !(r_wit > 0.0)) throw std::invalid_argument("geom_check: delta, r_wit > 0");
    if (probes < 1) throw std::invalid_argument("geom_check: probes >= 1");

    GeomCheckResult res;
    if (r_wit > region.radius) {
        // no ball of the witness radius fits inside the region at all
        res.pass = false;
        res.analytic_worst = std::numeric_limits<double>::infinity();
        res.worst_probe = std::numeric_limits<double>::infinity();
        return res;
    }
    const double slack = region.radius - r_wit;
    const double deep_hole = 0.5 * region.spacing.norm();
    res.analytic_worst = std::max(0.0, deep_hole - slack);
    res.pass = res.analytic_worst < delta;

    Rng rng(seed);
    for (std::size_t k = 0; k < probes; ++k) {
        Eigen::VectorXd y = region.offset;
        Eigen::VectorXd d(region.dim());
        for (int e = 0; e < region.dim(); ++e) {
            const double frac = rng.uniform();
            y(e) += frac * region.spacing(e);
            d(e) = (frac - std::round(frac)) * region.spacing(e);
        }
        const double witness = std::max(0.0, d.norm() - slack);
        res.worst_probe = std::max(res.worst_probe, witness);
    }
    return res;
}

/// Restriction norm || 1_region u ||_{L2} on the state's grid.
inline double masked_norm(const GridState& u, const LatticeBallRegion& region) {
    validate(region);
    if (region.dim() != u.grid.dim) throw std::invalid_argument("masked_norm: dimension mismatch");
    const int n = u.grid.points;
    const double cell = std::pow(u.grid.dx(), u.grid.dim);
    double acc = 0.0;
    Eigen::VectorXd x(u.grid.dim);
    for (std::size_t idx = 0; idx < u.values.size(); ++idx) {
        const int i = u.grid.dim == 1 ? static_cast<int>(idx) : static_cast<int>(idx) / n;
        const int j = u.grid.dim == 1 ? 0 : static_cast<int>(idx) % n;
        x(0) = u.grid.coord(i);
        if (u.grid.dim == 2) x(1) = u.grid.coord(j);
        if (region.contains(x)) acc += u.values[idx] * u.values[idx] * cell;
    }
    return std::sqrt(acc);
}

}  // namespace logconv
