#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "logconv/inverse.hpp"

using namespace logconv;

namespace {

SpectralInverseProblem heat_problem(std::size_t modes, double mask_end = kPi / 2.0) {
    const auto model = dirichlet_laplacian_model(modes, kPi);
    ObservationMask mask{{{0.0, mask_end}}};
    std::vector<double> times;
    for (int i = 1; i <= 16; ++i) times.push_back(i / 16.0);
    return SpectralInverseProblem(model, 1.0, mask, times);
}

}  // namespace

TEST_CASE("mask Gram matrix of a half interval", "[inverse]") {
    const auto model = dirichlet_laplacian_model(4, kPi);
    ObservationMask half{{{0.0, kPi / 2.0}}};
    const Eigen::MatrixXd G = mask_gram(model, half);
    // ||1_mask sin||^2 = int_0^{pi/2} sin^2 = pi/4, normalized basis scales by 2/pi
    CHECK(G(0, 0) == Catch::Approx((2.0 / kPi) * (kPi / 4.0)).epsilon(1e-13));
    // full mask is the identity
    ObservationMask full{{{0.0, kPi}}};
    const Eigen::MatrixXd Gf = mask_gram(model, full);
    CHECK((Gf - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-13);
    // empty and degenerate masks rejected
    CHECK_THROWS_AS(mask_gram(model, ObservationMask{}), std::invalid_argument);
    CHECK_THROWS_AS(mask_gram(model, ObservationMask{{{0.5, 0.5}}}), std::invalid_argument);
}

TEST_CASE("observed norms through the mask", "[inverse]") {
    const auto model = dirichlet_laplacian_model(4, kPi);
    const auto u0 = project_initial_data(model, [](double x) { return std::sin(x); });
    const auto traj = evolve(model, u0, 1.0, std::vector<double>{0.0, 1.0});
    ObservationMask half{{{0.0, kPi / 2.0}}};
    const auto norms = observe_norms(model, traj, half);
    CHECK(sq(norms[0]) == Catch::Approx(kPi / 4.0).epsilon(1e-12));
    ObservationMask full{{{0.0, kPi}}};
    CHECK(observe_norms(model, traj, full)[0] == Catch::Approx(traj.norms[0]).epsilon(1e-12));
}

TEST_CASE("forward map is linear", "[inverse]") {
    const auto problem = heat_problem(6);
    Rng rng(7);
    StateCoeffs x(6), y(6);
    for (auto& v : x) v = rng.normal();
    for (auto& v : y) v = rng.normal();
    StateCoeffs z(6);
    for (int i = 0; i < 6; ++i) z[i] = 2.5 * x[i] - 1.25 * y[i];
    const Eigen::MatrixXd fx = problem.forward_map(x);
    const Eigen::MatrixXd fy = problem.forward_map(y);
    const Eigen::MatrixXd fz = problem.forward_map(z);
    CHECK((fz - (2.5 * fx - 1.25 * fy)).cwiseAbs().maxCoeff() <= 1e-12);
    StateCoeffs zero(6, 0.0);
    CHECK(problem.forward_map(zero).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("adjoint passes the dot-product test", "[inverse]") {
    const auto problem = heat_problem(8);
    Rng rng(21);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        StateCoeffs x(8);
        for (auto& v : x) v = rng.normal();
        Eigen::MatrixXd d(8, problem.obs_times().size());
        for (Eigen::Index j = 0; j < d.cols(); ++j)
            for (Eigen::Index i = 0; i < d.rows(); ++i) d(i, j) = rng.normal();
        const double lhs = problem.data_inner(problem.forward_map(x), d);
        const Eigen::VectorXd ax = problem.adjoint_map(d);
        double rhs = 0.0;
        for (int i = 0; i < 8; ++i) rhs += x[i] * ax(i);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30}));
    }
    CHECK(worst <= 1e-10);
    // zero data maps to the zero state
    CHECK(problem.adjoint_map(Eigen::MatrixXd::Zero(8, problem.obs_times().size())).norm() == 0.0);
}

TEST_CASE("whitened representation carries the same geometry", "[inverse]") {
    const auto problem = heat_problem(5);
    Rng rng(33);
    StateCoeffs x(5);
    for (auto& v : x) v = rng.normal();
    const Eigen::MatrixXd d = problem.forward_map(x);
    CHECK(problem.whiten(d).norm() == Catch::Approx(problem.data_norm(d)).epsilon(1e-12));
    // whitened matrix equals whiten(forward(.)) columnwise
    const Eigen::MatrixXd F = problem.whitened_matrix();
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), 5);
    CHECK((F * xv - problem.whiten(d)).norm() <= 1e-12 * problem.data_norm(d));
}

TEST_CASE("noise-free recovery on a well-conditioned model", "[inverse]") {
    const auto problem = heat_problem(8);
    const StateCoeffs truth =
        project_initial_data(problem.model(), [](double x) { return x * (kPi - x); });
    const AdmissibleSet set{0.5, 100.0};
    const auto res = reconstruct(problem, problem.forward_map(truth), set);
    StateCoeffs diff = res.u0;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= truth[i];
    CHECK(l2_norm(diff) / l2_norm(truth) <= 1e-6);
    CHECK_FALSE(res.projected);

    // oracle: direct least-squares solve of the whitened system
    const Eigen::MatrixXd F = problem.whitened_matrix();
    const Eigen::VectorXd direct =
        F.colPivHouseholderQr().solve(problem.whiten(problem.forward_map(truth)));
    for (std::size_t i = 0; i < truth.size(); ++i)
        CHECK(res.u0[i] == Catch::Approx(direct(static_cast<Eigen::Index>(i))).margin(1e-7));
}

TEST_CASE("zero data reconstructs the zero state", "[inverse]") {
    const auto problem = heat_problem(6);
    const AdmissibleSet set{0.5, 10.0};
    const auto res = reconstruct(problem, Eigen::MatrixXd::Zero(6, 16), set);
    CHECK(l2_norm(res.u0) == 0.0);
}

TEST_CASE("Morozov stopping lands in the discrepancy window", "[inverse]") {
    const auto problem = heat_problem(8);
    const StateCoeffs truth =
        project_initial_data(problem.model(), [](double x) { return x * (kPi - x); });
    const AdmissibleSet set{0.5, 100.0};
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        ReconOptions opt;
        opt.noise_level = delta;
        Rng rng(55);
        const Eigen::MatrixXd data = problem.synthesize_data(truth, delta, rng);
        const auto res = reconstruct(problem, data, set, opt);
        CHECK(res.discrepancy >= delta);
        CHECK(res.discrepancy <= 1.1 * delta);
        // residual history never increases
        for (std::size_t i = 1; i < res.residual_history.size(); ++i)
            CHECK(res.residual_history[i] <= res.residual_history[i - 1] * (1.0 + 1e-12));
    }
}

TEST_CASE("reconstruction error decreases with the noise level", "[inverse]") {
    const auto problem = heat_problem(8);
    const StateCoeffs truth =
        project_initial_data(problem.model(), [](double x) { return x * (kPi - x); });
    const AdmissibleSet set{0.5, 100.0};
    std::vector<double> errs;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        double mean = 0.0;
        for (int rep = 0; rep < 5; ++rep) {
            ReconOptions opt;
            opt.noise_level = delta;
            Rng rng(100 + rep);
            const auto res = reconstruct(problem, problem.synthesize_data(truth, delta, rng), set, opt);
            StateCoeffs diff = res.u0;
            for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= truth[i];
            mean += l2_norm(diff);
        }
        errs.push_back(mean / 5.0);
    }
    CHECK(errs[1] < errs[0]);
    CHECK(errs[2] < errs[1]);
}

TEST_CASE("Landweber agrees with CGNE on clean data", "[inverse]") {
    // full mask keeps the spectrum of F^T F mild enough that 5000 Landweber
    // sweeps actually converge; the ill-conditioned masked case is CGNE's job
    const auto problem = heat_problem(4, kPi);
    const StateCoeffs truth =
        project_initial_data(problem.model(), [](double x) { return std::sin(2.0 * x) + 0.3 * std::sin(x); });
    const AdmissibleSet set{0.5, 100.0};
    ReconOptions opt;
    opt.method = ReconMethod::landweber;
    opt.max_iterations = 5000;
    const auto res = reconstruct(problem, problem.forward_map(truth), set, opt);
    StateCoeffs diff = res.u0;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= truth[i];
    CHECK(l2_norm(diff) / l2_norm(truth) <= 1e-5);
    for (std::size_t i = 1; i < res.residual_history.size(); ++i)
        CHECK(res.residual_history[i] <= res.residual_history[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("admissible projection is idempotent and nonexpansive", "[inverse]") {
    const auto model = dirichlet_laplacian_model(8, kPi);
    const AdmissibleSet set{0.5, 1.0};
    Rng rng(77);
    for (int k = 0; k < 20; ++k) {
        StateCoeffs c(8);
        for (auto& v : c) v = 3.0 * rng.normal();
        const auto p1 = project_admissible(model, set, c);
        const auto p2 = project_admissible(model, set, p1);
        CHECK(model.frac_norm(p1, set.epsilon) <= set.M * (1.0 + 1e-12));
        CHECK(model.frac_norm(p1, set.epsilon) <= model.frac_norm(c, set.epsilon) * (1.0 + 1e-12));
        for (std::size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == Catch::Approx(p2[i]).margin(1e-15));
    }
}

TEST_CASE("admissible sampler hits the requested norm band", "[inverse]") {
    const auto model = dirichlet_laplacian_model(16, kPi);
    const AdmissibleSet set{0.5, 4.0};
    Rng rng(13);
    for (int k = 0; k < 50; ++k) {
        const auto c = sample_admissible(model, set, rng);
        const double norm = model.frac_norm(c, set.epsilon);
        CHECK(norm >= set.M / 2.0 - 1e-12);
        CHECK(norm <= set.M + 1e-12);
    }
}

TEST_CASE("observability ratio bounds and homogeneity", "[inverse]") {
    // full mask, contractive flow: ratio <= 1/T since ||Cu|| >= ||u(T)||
    const auto model = dirichlet_laplacian_model(6, kPi);
    ObservationMask full{{{0.0, kPi}}};
    std::vector<double> times;
    for (int i = 0; i <= 16; ++i) times.push_back(1.0 / 16.0 + i * (15.0 / 16.0) / 16.0);
    SpectralInverseProblem problem(model, 1.0, full, times);
    Rng rng(3);
    std::vector<StateCoeffs> batch(10);
    for (auto& c : batch) {
        c.resize(6);
        for (auto& v : c) v = rng.normal();
    }
    const auto r = observability_ratio(problem, batch);
    CHECK(r.skipped == 0);
    const double window = times.back() - times.front();
    CHECK(r.ratio <= (1.0 / window) * 1.05);
    // scale invariance: ratios are 0-homogeneous
    std::vector<StateCoeffs> scaled = batch;
    for (auto& c : scaled)
        for (auto& v : c) v *= 37.0;
    CHECK(observability_ratio(problem, scaled).ratio == Catch::Approx(r.ratio).epsilon(1e-12));
}

TEST_CASE("observability ratios grow as the mask shrinks", "[inverse]") {
    const auto model = dirichlet_laplacian_model(6, kPi);
    std::vector<double> times;
    for (int i = 1; i <= 16; ++i) times.push_back(i / 16.0);
    Rng rng(5);
    std::vector<StateCoeffs> batch(20);
    for (auto& c : batch) {
        c.resize(6);
        for (auto& v : c) v = rng.normal();
    }
    double prev = 0.0;
    for (double end : {kPi, kPi / 2.0, kPi / 4.0}) {
        ObservationMask mask{{{0.0, end}}};
        SpectralInverseProblem problem(model, 1.0, mask, times);
        const double ratio = observability_ratio(problem, batch).ratio;
        CHECK(ratio >= prev * (1.0 - 1e-12));
        prev = ratio;
    }
}

TEST_CASE("stability curve produces a usable envelope", "[inverse]") {
    const auto problem = heat_problem(16);
    const AdmissibleSet set{0.5, 10.0};
    StabilityCurveOptions opt;
    opt.n_samples = 120;
    opt.seed = 7;
    const auto curve = stability_curve(problem, set, opt);
    CHECK(curve.envelope_nonincreasing);
    CHECK(curve.alpha_hat > 0.0);
    CHECK(curve.pairs.size() >= 100);
    // deterministic under the seed
    const auto again = stability_curve(problem, set, opt);
    CHECK(again.alpha_hat == curve.alpha_hat);
    CHECK(again.pairs == curve.pairs);
    StabilityCurveOptions bad = opt;
    bad.n_samples = 5;
    CHECK_THROWS_AS(stability_curve(problem, set, bad), std::invalid_argument);
    bad = opt;
    bad.d_min = 0.05;
    CHECK_THROWS_AS(stability_curve(problem, set, bad), std::invalid_argument);
}

TEST_CASE("single-mode stability relation is linear in the data norm", "[inverse]") {
    // e = d / sqrt(int_0^T e^{-2 lambda t} dt) for a single observed mode with
    // the full mask; the problem's quadrature makes this exact up to the
    // trapezoid rule, so compare against the same discrete integral
    const auto model = dirichlet_laplacian_model(1, kPi);
    ObservationMask full{{{0.0, kPi}}};
    std::vector<double> times;
    for (int i = 1; i <= 64; ++i) times.push_back(i / 64.0);
    SpectralInverseProblem problem(model, 1.0, full, times);
    StateCoeffs c{3.7};
    const double d = problem.data_norm(problem.forward_map(c));
    // discrete weights reproduce the same integral
    double integral = 0.0;
    {
        const auto norms = problem.column_norms(problem.forward_map(StateCoeffs{1.0}));
        // trapezoid over the observation window
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double left = i == 0 ? times[0] : times[i - 1];
            const double right = i + 1 == times.size() ? times.back() : times[i + 1];
            integral += 0.5 * (right - left) * sq(norms[i]);
        }
    }
    CHECK(d == Catch::Approx(3.7 * std::sqrt(integral)).epsilon(1e-12));
}

TEST_CASE("transport observation of the final state cannot identify u0", "[inverse]") {
    TransportInverseProblem tp(256, 0.5);
    Eigen::VectorXd u0(256);
    for (int i = 0; i < 256; ++i) u0(i) = 1.0 + std::cos(3.0 * (i + 0.5) / 256.0);
    const auto res = tp.reconstruct(tp.forward(u0));
    CHECK(res.discrepancy <= 1e-12 * u0.norm());
    Eigen::Map<const Eigen::VectorXd> rec(res.u0.data(), 256);
    CHECK((rec - u0).norm() / u0.norm() >= 0.2);
    // adjoint consistency of the shift pair
    Rng rng(9);
    Eigen::VectorXd a(256), b(256);
    for (int i = 0; i < 256; ++i) {
        a(i) = rng.normal();
        b(i) = rng.normal();
    }
    CHECK(tp.forward(a).dot(b) == Catch::Approx(a.dot(tp.adjoint(b))).margin(1e-12));
}
