#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "logconv/common.hpp"
#include "logconv/spectral.hpp"

namespace logconv {

/// Interior observation region: a union of disjoint intervals of positive
/// measure inside the model domain.
struct ObservationMask {
    std::vector<std::pair<double, double>> intervals;
};

inline void validate(const ObservationMask& m, double domain_length) {
    if (m.intervals.empty()) throw std::invalid_argument("ObservationMask: empty mask");
    double measure = 0.0;
    for (auto [a, b] : m.intervals) {
        if (!(b > a) || a < 0.0 || b > domain_length * (1.0 + 1e-12))
            throw std::invalid_argument("ObservationMask: intervals must be increasing and inside the domain");
        measure += b - a;
    }
    if (!(measure > 0.0)) throw std::invalid_argument("ObservationMask: zero measure");
}

/// Gram matrix G_nm = int_mask phi_n phi_m of the restriction operator;
/// closed-form sine integrals for the analytic basis, masked quadrature for
/// the discrete one.
inline Eigen::MatrixXd mask_gram(const SpectralModel& model, const ObservationMask& mask) {
    const auto dim = static_cast<Eigen::Index>(model.dim());
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
    if (model.kind == BasisKind::dirichlet_sine) {
        validate(mask, model.length);
        const double L = model.length;
        auto anti = [&](int n, int m, double x) {
            // antiderivative of sin(n pi x/L) sin(m pi x/L)
            const double pn = (n + 1) * kPi / L, pm = (m + 1) * kPi / L;
            if (n == m) return 0.5 * x - std::sin(2.0 * pn * x) / (4.0 * pn);
            return std::sin((pn - pm) * x) / (2.0 * (pn - pm)) - std::sin((pn + pm) * x) / (2.0 * (pn + pm));
        };
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = i; j < dim; ++j) {
                double s = 0.0;
                for (auto [a, b] : mask.intervals)
                    s += anti(static_cast<int>(i), static_cast<int>(j), b) -
                         anti(static_cast<int>(i), static_cast<int>(j), a);
                G(i, j) = G(j, i) = (2.0 / L) * s;
            }
    } else {
        validate(mask, 1.0);
        auto inside = [&](double x) {
            for (auto [a, b] : mask.intervals)
                if (x >= a && x <= b) return true;
            return false;
        };
        for (Eigen::Index g = 0; g < model.grid.size(); ++g) {
            if (!inside(model.grid(g))) continue;
            for (Eigen::Index i = 0; i < dim; ++i)
                for (Eigen::Index j = 0; j < dim; ++j)
                    G(i, j) += model.q_weights(g) * model.modes(g, i) * model.modes(g, j);
        }
    }
    return G;
}

/// || 1_mask u(t_i) || for each stored state of a trajectory.
inline std::vector<double> observe_norms(const SpectralModel& model, const Trajectory& traj,
                                         const ObservationMask& mask) {
    if (traj.states.empty()) throw std::invalid_argument("observe_norms: trajectory carries no states");
    const Eigen::MatrixXd G = mask_gram(model, mask);
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (const auto& st : traj.states) {
        Eigen::Map<const Eigen::VectorXd> c(st.data(), static_cast<Eigen::Index>(st.size()));
        out.push_back(std::sqrt(std::max(0.0, c.dot(G * c))));
    }
    return out;
}

/// A priori class: fractional-power-domain norm bounded by M.
struct AdmissibleSet {
    double epsilon = 0.5;
    double M = 1.0;
};

inline void validate(const AdmissibleSet& s) {
    if (!(s.epsilon > 0.0 && s.epsilon < 1.0 + 1e-12))
        throw std::domain_error("AdmissibleSet: epsilon must lie in (0,1]");
    if (!(s.M > 0.0)) throw std::domain_error("AdmissibleSet: M must be positive");
}

/// Coefficients drawn with spectral decay (1+lambda_n)^(-eps-0.05) and the
/// fractional norm rescaled uniformly into [M/2, M]: samples concentrate
/// near the boundary of the admissible ball where stability is worst.
inline StateCoeffs sample_admissible(const SpectralModel& model, const AdmissibleSet& set, Rng& rng) {
    validate(set);
    StateCoeffs c(model.dim());
    for (std::size_t n = 0; n < c.size(); ++n)
        c[n] = rng.normal() * std::pow(1.0 + std::abs(model.lambdas[n]), -set.epsilon - 0.05);
    const double norm = model.frac_norm(c, set.epsilon);
    if (norm == 0.0) return sample_admissible(model, set, rng);
    const double target = set.M * rng.uniform(0.5, 1.0);
    for (auto& v : c) v *= target / norm;
    return c;
}

/// Projection onto the admissible ball by spectral rescaling; idempotent and
/// nonexpansive in the fractional norm.
inline StateCoeffs project_admissible(const SpectralModel& model, const AdmissibleSet& set,
                                      StateCoeffs c) {
    const double norm = model.frac_norm(c, set.epsilon);
    if (norm > set.M)
        for (auto& v : c) v *= set.M / norm;
    return c;
}

/// Initial-data observation problem for a spectral evolution: observe the
/// masked state at a grid of times in (0, T], possibly with additive noise.
/// Data at each time is represented by state coefficients; the L2(0,T;Y)
/// structure enters through the mask Gram matrix and trapezoid weights.
class SpectralInverseProblem {
public:
    SpectralInverseProblem(SpectralModel model, double alpha, ObservationMask mask,
                           std::vector<double> obs_times)
        : model_(std::move(model)), alpha_(alpha), mask_(std::move(mask)), times_(std::move(obs_times)) {
        if (times_.empty()) throw std::invalid_argument("SpectralInverseProblem: empty time grid");
        if (times_.front() <= 0.0 || !strictly_increasing(times_))
            throw std::invalid_argument("SpectralInverseProblem: observation times must be increasing, in (0, T]");
        G_ = mask_gram(model_, mask_);
        // symmetric square root; small masks make the Gram nearly singular
        // (that is the ill-posedness itself), so tiny negative rounding
        // eigenvalues are clamped rather than rejected
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G_);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("SpectralInverseProblem: Gram eigendecomposition failed");
        const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
        if (es.eigenvalues().minCoeff() < -1e-10 * scale)
            throw std::runtime_error("SpectralInverseProblem: mask Gram matrix is not positive semidefinite");
        gram_sqrt_ = es.eigenvectors() *
                     es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                     es.eigenvectors().transpose();

        // decay factors per mode and time
        const auto dim = static_cast<Eigen::Index>(model_.dim());
        decay_.resize(dim, static_cast<Eigen::Index>(times_.size()));
        for (Eigen::Index n = 0; n < dim; ++n)
            for (std::size_t i = 0; i < times_.size(); ++i) {
                const double t = times_[i];
                decay_(n, static_cast<Eigen::Index>(i)) =
                    alpha_ == 1.0 ? std::exp(-model_.lambdas[n] * t)
                                  : ml_eval(alpha_, 1.0, -model_.lambdas[n] * std::pow(t, alpha_));
            }

        // trapezoid weights for the time integral over the observation window
        tau_.assign(times_.size(), 1.0);
        if (times_.size() >= 2) {
            for (std::size_t i = 0; i < times_.size(); ++i) {
                const double left = i == 0 ? times_[0] : times_[i - 1];
                const double right = i + 1 == times_.size() ? times_.back() : times_[i + 1];
                tau_[i] = 0.5 * (right - left);
            }
        }
    }

    const SpectralModel& model() const { return model_; }
    double alpha() const { return alpha_; }
    const ObservationMask& mask() const { return mask_; }
    const std::vector<double>& obs_times() const { return times_; }
    double horizon() const { return times_.back(); }
    const Eigen::MatrixXd& gram() const { return G_; }

    /// Data of the exact evolution of u0: column i holds the state
    /// coefficients at observation time t_i. Linear in u0.
    Eigen::MatrixXd forward_map(std::span<const double> u0) const {
        check_dim(u0.size());
        Eigen::Map<const Eigen::VectorXd> c(u0.data(), static_cast<Eigen::Index>(u0.size()));
        Eigen::MatrixXd data(decay_.rows(), decay_.cols());
        for (Eigen::Index i = 0; i < decay_.cols(); ++i)
            data.col(i) = decay_.col(i).cwiseProduct(c);
        return data;
    }

    /// Adjoint of forward_map with respect to the model inner product and the
    /// L2(0,T;Y) data inner product: sum_i tau_i D_i G d_i.
    Eigen::VectorXd adjoint_map(const Eigen::MatrixXd& data) const {
        if (data.rows() != decay_.rows() || data.cols() != decay_.cols())
            throw std::invalid_argument("adjoint_map: data dimension mismatch");
        Eigen::VectorXd out = Eigen::VectorXd::Zero(decay_.rows());
        for (Eigen::Index i = 0; i < decay_.cols(); ++i)
            out += tau_[static_cast<std::size_t>(i)] * decay_.col(i).cwiseProduct(G_ * data.col(i));
        return out;
    }

    double data_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
        double s = 0.0;
        for (Eigen::Index i = 0; i < a.cols(); ++i)
            s += tau_[static_cast<std::size_t>(i)] * a.col(i).dot(G_ * b.col(i));
        return s;
    }
    double data_norm(const Eigen::MatrixXd& d) const { return std::sqrt(std::max(0.0, data_inner(d, d))); }

    /// Per-time observation norms ||C u(t_i)||_Y of the data columns.
    std::vector<double> column_norms(const Eigen::MatrixXd& d) const {
        std::vector<double> out(static_cast<std::size_t>(d.cols()));
        for (Eigen::Index i = 0; i < d.cols(); ++i)
            out[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, d.col(i).dot(G_ * d.col(i))));
        return out;
    }

    /// Whitened stacked representation: plain Euclidean norm equals data_norm.
    Eigen::VectorXd whiten(const Eigen::MatrixXd& d) const {
        Eigen::VectorXd v(d.rows() * d.cols());
        for (Eigen::Index i = 0; i < d.cols(); ++i)
            v.segment(i * d.rows(), d.rows()) =
                std::sqrt(tau_[static_cast<std::size_t>(i)]) * (gram_sqrt_ * d.col(i));
        return v;
    }
    /// Whitened forward operator as an explicit matrix (dim columns); the
    /// normal-equation solvers run on this.
    Eigen::MatrixXd whitened_matrix() const {
        const Eigen::Index dim = decay_.rows();
        const Eigen::Index K = decay_.cols();
        Eigen::MatrixXd F(dim * K, dim);
        for (Eigen::Index i = 0; i < K; ++i) {
            const double sq_tau = std::sqrt(tau_[static_cast<std::size_t>(i)]);
            F.middleRows(i * dim, dim) =
                sq_tau * (gram_sqrt_ * decay_.col(i).asDiagonal().toDenseMatrix());
        }
        return F;
    }

    /// Synthesize observed data from a ground-truth initial state, optionally
    /// adding Gaussian noise scaled to exact L2(0,T;Y) size delta.
    Eigen::MatrixXd synthesize_data(std::span<const double> truth, double delta, Rng& rng) const {
        Eigen::MatrixXd v = forward_map(truth);
        if (delta > 0.0) {
            Eigen::MatrixXd noise(v.rows(), v.cols());
            for (Eigen::Index j = 0; j < v.cols(); ++j)
                for (Eigen::Index i = 0; i < v.rows(); ++i) noise(i, j) = rng.normal();
            const double n = data_norm(noise);
            if (n > 0.0) v += (delta / n) * noise;
        }
        return v;
    }

private:
    void check_dim(std::size_t n) const {
        if (n != model_.dim()) throw std::invalid_argument("SpectralInverseProblem: coefficient size mismatch");
    }

    SpectralModel model_;
    double alpha_;
    ObservationMask mask_;
    std::vector<double> times_;
    Eigen::MatrixXd G_;
    Eigen::MatrixXd gram_sqrt_;  // symmetric square root of G
    Eigen::MatrixXd decay_;
    std::vector<double> tau_;
};

enum class ReconMethod { cgne, landweber };

struct ReconOptions {
    ReconMethod method = ReconMethod::cgne;
    int max_iterations = 500;       // 5000 for landweber
    double morozov_tau = 1.1;       // stop when residual <= tau * delta
    double noise_level = 0.0;       // delta_obs
    double clean_tol = 1e-13;       // relative residual target without noise
    bool project = true;            // rescale onto the admissible ball at exit
};

struct ReconResult {
    StateCoeffs u0;
    double discrepancy = 0.0;
    int iterations = 0;
    std::vector<double> residual_history;
    bool converged = false;
    bool projected = false;
};

namespace recon_detail {

/// CGLS on an explicit (whitened) matrix. Residual norms decrease
/// monotonically; with a positive noise level the iteration stops by the
/// discrepancy rule, backtracking along the last step so the final residual
/// lands inside [delta, tau delta].
inline ReconResult cgls(const Eigen::MatrixXd& F, const Eigen::VectorXd& b, const ReconOptions& opt) {
    ReconResult res;
    const Eigen::Index n = F.cols();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = b;
    Eigen::VectorXd s = F.transpose() * r;
    Eigen::VectorXd p = s;
    double gamma = s.squaredNorm();
    const double b_norm = b.norm();
    const double stop_clean = opt.clean_tol * std::max(b_norm, 1e-300);
    const double stop_noise = opt.morozov_tau * opt.noise_level;
    const double target = opt.noise_level > 0.0 ? 0.5 * (1.0 + opt.morozov_tau) * opt.noise_level : 0.0;

    res.residual_history.push_back(r.norm());
    for (int it = 0; it < opt.max_iterations; ++it) {
        const Eigen::VectorXd q = F * p;
        const double qn = q.squaredNorm();
        if (qn == 0.0) break;
        const double alpha = gamma / qn;

        // discrepancy landing: if the full step would overshoot below delta,
        // shorten it so ||r - theta alpha q|| equals the midpoint target
        if (opt.noise_level > 0.0) {
            const Eigen::VectorXd r_next = r - alpha * q;
            if (r_next.norm() < opt.noise_level) {
                const double a2 = alpha * alpha * qn;
                const double b2 = -2.0 * alpha * r.dot(q);
                const double c2 = r.squaredNorm() - target * target;
                const double disc = b2 * b2 - 4.0 * a2 * c2;
                double theta = 1.0;
                if (disc >= 0.0 && a2 > 0.0) {
                    const double t1 = (-b2 - std::sqrt(disc)) / (2.0 * a2);
                    const double t2 = (-b2 + std::sqrt(disc)) / (2.0 * a2);
                    for (double cand : {t1, t2})
                        if (cand > 0.0 && cand <= 1.0) theta = std::min(theta, cand);
                }
                x += theta * alpha * p;
                r -= theta * alpha * q;
                res.residual_history.push_back(r.norm());
                res.iterations = it + 1;
                res.converged = true;
                res.u0.assign(x.data(), x.data() + x.size());
                res.discrepancy = r.norm();
                return res;
            }
        }

        x += alpha * p;
        r -= alpha * q;
        res.residual_history.push_back(r.norm());
        s = F.transpose() * r;
        const double gamma_new = s.squaredNorm();
        p = s + (gamma_new / gamma) * p;
        gamma = gamma_new;

        const double rn = res.residual_history.back();
        if (opt.noise_level > 0.0 && rn <= stop_noise) {
            res.iterations = it + 1;
            res.converged = true;
            break;
        }
        if (opt.noise_level == 0.0 && rn <= stop_clean) {
            res.iterations = it + 1;
            res.converged = true;
            break;
        }
        res.iterations = it + 1;
    }
    res.u0.assign(x.data(), x.data() + x.size());
    res.discrepancy = res.residual_history.back();
    return res;
}

inline ReconResult landweber(const Eigen::MatrixXd& F, const Eigen::VectorXd& b, const ReconOptions& opt) {
    ReconResult res;
    // relaxation from the largest singular value; the explicit matrix is small
    const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(F).singularValues()(0);
    const double omega = 1.0 / (sigma * sigma);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(F.cols());
    Eigen::VectorXd r = b;
    res.residual_history.push_back(r.norm());
    const double stop_noise = opt.morozov_tau * opt.noise_level;
    const double stop_clean = opt.clean_tol * std::max(b.norm(), 1e-300);
    for (int it = 0; it < opt.max_iterations; ++it) {
        x += omega * (F.transpose() * r);
        r = b - F * x;
        res.residual_history.push_back(r.norm());
        res.iterations = it + 1;
        const double rn = r.norm();
        if (opt.noise_level > 0.0 && rn <= stop_noise) {
            res.converged = true;
            break;
        }
        if (opt.noise_level == 0.0 && rn <= stop_clean) {
            res.converged = true;
            break;
        }
    }
    res.u0.assign(x.data(), x.data() + x.size());
    res.discrepancy = res.residual_history.back();
    return res;
}

}  // namespace recon_detail

/// Least-squares recovery of the initial state from observed data, by
/// conjugate gradients on the normal equations (default) or Landweber, with
/// Morozov stopping at tau * delta and a final rescaling onto the admissible
/// ball if the iterate escaped it.
inline ReconResult reconstruct(const SpectralInverseProblem& problem, const Eigen::MatrixXd& data,
                               const AdmissibleSet& set, const ReconOptions& opt = {}) {
    validate(set);
    const Eigen::MatrixXd F = problem.whitened_matrix();
    const Eigen::VectorXd b = problem.whiten(data);
    ReconResult res = opt.method == ReconMethod::cgne ? recon_detail::cgls(F, b, opt)
                                                      : recon_detail::landweber(F, b, opt);
    if (opt.project) {
        const double norm = problem.model().frac_norm(res.u0, set.epsilon);
        if (norm > set.M) {
            res.u0 = project_admissible(problem.model(), set, std::move(res.u0));
            res.projected = true;
            Eigen::Map<const Eigen::VectorXd> x(res.u0.data(), static_cast<Eigen::Index>(res.u0.size()));
            res.discrepancy = (b - F * x).norm();
        }
    }
    return res;
}

/// Empirical lower bound for the observability constant: the largest
/// ||u(T)||^2 / int_0^T ||C u||^2 dt over a batch of initial states.
/// Zero-data samples are skipped (counted in the second return member).
struct ObservabilityRatio {
    double ratio = 0.0;
    std::size_t skipped = 0;
};

inline ObservabilityRatio observability_ratio(const SpectralInverseProblem& problem,
                                              std::span<const StateCoeffs> batch) {
    if (batch.empty()) throw std::invalid_argument("observability_ratio: empty batch");
    ObservabilityRatio out;
    for (const auto& u0 : batch) {
        const Eigen::MatrixXd data = problem.forward_map(u0);
        const double denom = sq(problem.data_norm(data));
        if (denom == 0.0) {
            ++out.skipped;
            continue;
        }
        const double final_norm = data.col(data.cols() - 1).norm();  // state coeffs at T, full norm
        out.ratio = std::max(out.ratio, sq(final_norm) / denom);
    }
    return out;
}

struct StabilityCurveOptions {
    std::size_t n_samples = 200;
    std::uint64_t seed = 7;
    double d_min = 1e-8;
    double d_max = 1e-1;
    std::size_t n_bins = 10;
};

struct StabilityCurve {
    std::vector<std::pair<double, double>> pairs;  // (data norm d, ||u0||)
    std::vector<double> bin_log_abs_log_d;         // envelope abscissa log|log d|
    std::vector<double> envelope;                  // top-decile ||u0|| per bin
    double K_hat = 0.0;
    double alpha_hat = 0.0;
    bool envelope_nonincreasing = false;
};

/// Sample the admissible set, scale each draw so its data norm lands
/// log-uniformly across [d_min, d_max] (the estimate is 1-homogeneous), and
/// fit K, alpha of  e ~ K / |log d|^alpha  through the upper envelope.
inline StabilityCurve stability_curve(const SpectralInverseProblem& problem, const AdmissibleSet& set,
                                      const StabilityCurveOptions& opt = {}) {
    if (opt.n_samples < 10) throw std::invalid_argument("stability_curve: need at least 10 samples");
    if (!(opt.d_min < opt.d_max) || opt.d_max >= 1.0)
        throw std::invalid_argument("stability_curve: need d_min < d_max < 1");
    if (std::log10(opt.d_max / opt.d_min) < 2.0)
        throw std::invalid_argument("stability_curve: data norms must span at least two decades");

    Rng rng(opt.seed);
    StabilityCurve curve;
    curve.pairs.reserve(opt.n_samples);
    for (std::size_t i = 0; i < opt.n_samples; ++i) {
        StateCoeffs c = sample_admissible(problem.model(), set, rng);
        const double d0 = problem.data_norm(problem.forward_map(c));
        if (d0 == 0.0) continue;
        const double d_target =
            std::exp(std::log(opt.d_min) + rng.uniform() * (std::log(opt.d_max) - std::log(opt.d_min)));
        const double scale = d_target / d0;
        curve.pairs.emplace_back(d_target, scale * l2_norm(c));
    }
    std::sort(curve.pairs.begin(), curve.pairs.end());

    // top-decile envelope per log-d bin
    const double lo = std::log(opt.d_min), hi = std::log(opt.d_max);
    std::vector<std::vector<double>> bins(opt.n_bins);
    for (auto [d, e] : curve.pairs) {
        auto b = static_cast<std::size_t>((std::log(d) - lo) / (hi - lo) * static_cast<double>(opt.n_bins));
        b = std::min(b, opt.n_bins - 1);
        bins[b].push_back(e);
    }
    for (std::size_t b = 0; b < opt.n_bins; ++b) {
        if (bins[b].empty()) continue;
        std::sort(bins[b].begin(), bins[b].end());
        const auto idx = static_cast<std::size_t>(std::ceil(0.9 * (bins[b].size() - 1)));
        const double bin_center_log_d = lo + (static_cast<double>(b) + 0.5) * (hi - lo) / static_cast<double>(opt.n_bins);
        curve.bin_log_abs_log_d.push_back(std::log(std::abs(bin_center_log_d)));
        curve.envelope.push_back(bins[b][idx]);
    }
    if (curve.envelope.size() < 3) throw std::runtime_error("stability_curve: too few populated bins");

    // envelope listed with |log d| decreasing along increasing d; check
    // nonincrease against |log d|
    curve.envelope_nonincreasing = true;
    for (std::size_t i = 1; i < curve.envelope.size(); ++i)
        if (curve.envelope[i] < curve.envelope[i - 1] * (1.0 - 1e-12)) curve.envelope_nonincreasing = false;

    // least squares of log e against log|log d|
    const std::size_t m = curve.envelope.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = curve.bin_log_abs_log_d[i];
        const double y = std::log(curve.envelope[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m;
    curve.alpha_hat = -slope;
    curve.K_hat = std::exp(intercept);
    return curve;
}

// --- transport negative control ---------------------------------------------
//
// Exact-characteristics forward map on a cell-centered grid: observing only
// u(T) cannot identify the part of the initial state that has left the
// domain, so least squares drives the residual to zero while the
// reconstruction error stays bounded away from it.

class TransportInverseProblem {
public:
    TransportInverseProblem(std::size_t n_cells, double T) : n_(n_cells), T_(T) {
        shift_ = static_cast<std::size_t>(std::llround(T * static_cast<double>(n_)));
        if (std::abs(shift_ - T * static_cast<double>(n_)) > 1e-9)
            throw std::invalid_argument("TransportInverseProblem: T must be a whole number of cells");
        if (shift_ > n_) throw std::invalid_argument("TransportInverseProblem: T too large");
    }

    std::size_t cells() const { return n_; }
    double horizon() const { return T_; }

    Eigen::VectorXd forward(const Eigen::VectorXd& u0) const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n_);
        for (std::size_t j = shift_; j < n_; ++j) v(j) = u0(j - shift_);
        return v;
    }
    Eigen::VectorXd adjoint(const Eigen::VectorXd& d) const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n_);
        for (std::size_t j = shift_; j < n_; ++j) v(j - shift_) = d(j);
        return v;
    }

    /// CGLS on the shift operator (it is a partial isometry, so this
    /// converges in one step; kept iterative for uniformity).
    ReconResult reconstruct(const Eigen::VectorXd& data, int max_iter = 50) const {
        ReconResult res;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
        Eigen::VectorXd r = data;
        Eigen::VectorXd s = adjoint(r);
        Eigen::VectorXd p = s;
        double gamma = s.squaredNorm();
        res.residual_history.push_back(r.norm());
        for (int it = 0; it < max_iter && gamma > 0.0; ++it) {
            const Eigen::VectorXd q = forward(p);
            const double qn = q.squaredNorm();
            if (qn == 0.0) break;
            const double alpha = gamma / qn;
            x += alpha * p;
            r -= alpha * q;
            res.residual_history.push_back(r.norm());
            s = adjoint(r);
            const double gn = s.squaredNorm();
            p = s + (gn / gamma) * p;
            gamma = gn;
            res.iterations = it + 1;
            if (r.norm() <= 1e-14 * std::max(1.0, data.norm())) {
                res.converged = true;
                break;
            }
        }
        res.u0.assign(x.data(), x.data() + x.size());
        res.discrepancy = res.residual_history.back();
        return res;
    }

private:
    std::size_t n_;
    double T_;
    std::size_t shift_;
};

}  // namespace logconv
