#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "logconv/convexity.hpp"
#include "logconv/frac_ou.hpp"
#include "logconv/inverse.hpp"
#include "logconv/io.hpp"
#include "logconv/mittag_leffler.hpp"
#include "logconv/sector_estimate.hpp"
#include "logconv/spectral.hpp"
#include "logconv/weight.hpp"

namespace logconv {

struct ExperimentConfig {
    std::string preset;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "out";
    double tol_override = -1.0;  // replaces the preset default when positive
};

struct AssertionRecord {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
};

struct PresetResult {
    std::string preset;
    std::uint64_t seed = 0;
    std::vector<AssertionRecord> assertions;
    std::vector<std::string> artifacts;

    bool all_pass() const {
        for (const auto& a : assertions)
            if (!a.pass) return false;
        return true;
    }

    void check(const std::string& name, double value, double threshold, bool pass) {
        assertions.push_back({name, pass, value, threshold});
    }
    void check_le(const std::string& name, double value, double threshold) {
        check(name, value, threshold, value <= threshold);
    }
    void check_ge(const std::string& name, double value, double threshold) {
        check(name, value, threshold, value >= threshold);
    }
    void check_true(const std::string& name, bool pass) { check(name, pass ? 1.0 : 0.0, 1.0, pass); }
};

inline nlohmann::json summary_json(const PresetResult& r) {
    nlohmann::json as = nlohmann::json::array();
    for (const auto& a : r.assertions)
        as.push_back({{"name", a.name}, {"pass", a.pass}, {"value", a.value}, {"threshold", a.threshold}});
    // artifact names are stored relative to the summary so the bytes do not
    // depend on where the output directory lives
    nlohmann::json arts = nlohmann::json::array();
    for (const auto& a : r.artifacts) arts.push_back(std::filesystem::path(a).filename().string());
    return nlohmann::json{{"schema", "logconv-summary/1"},
                          {"preset", r.preset},
                          {"seed", r.seed},
                          {"all_pass", r.all_pass()},
                          {"assertions", as},
                          {"artifacts", arts}};
}

/// Write the summary (json) or the assertion table (csv) next to the preset
/// artifacts. Idempotent for a fixed result.
inline std::filesystem::path emit_tables(const PresetResult& r, const std::filesystem::path& dir,
                                         const std::string& format = "json") {
    std::filesystem::create_directories(dir);
    if (format == "json") {
        const auto path = dir / (r.preset + "-summary.json");
        std::ofstream out(path, std::ios::binary);
        out << summary_json(r).dump(2) << "\n";
        return path;
    }
    if (format == "csv") {
        const auto path = dir / (r.preset + "-assertions.csv");
        std::ofstream out(path, std::ios::binary);
        out << "name,pass,value,threshold\n";
        for (const auto& a : r.assertions)
            out << a.name << "," << (a.pass ? 1 : 0) << "," << format_double(a.value) << ","
                << format_double(a.threshold) << "\n";
        return path;
    }
    throw std::invalid_argument("emit_tables: unknown format " + format);
}

namespace preset_detail {

inline std::vector<StateCoeffs> random_batch(std::size_t count, std::size_t dim, Rng& rng) {
    std::vector<StateCoeffs> batch(count);
    for (auto& c : batch) {
        c.resize(dim);
        for (auto& v : c) v = rng.normal();
    }
    return batch;
}

inline std::string csv_art(PresetResult& r, const std::filesystem::path& dir, const std::string& name,
                           const std::vector<std::string>& header,
                           const std::vector<std::vector<double>>& rows) {
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    write_csv(path, header, rows);
    r.artifacts.push_back(path.string());
    return path.string();
}

// -- individual presets -------------------------------------------------------

inline void preset_agmon_nirenberg(PresetResult& r, const ExperimentConfig& cfg) {
    const double tol = cfg.tol_override > 0 ? cfg.tol_override : 1e-10;
    const auto model = dirichlet_laplacian_model(64, kPi);
    const auto times = linspace(0.0, 1.0, 33);
    Rng rng(cfg.seed);
    const auto batch = random_batch(100, model.dim(), rng);
    const auto trajs = evolve_many(model, batch, 1.0, times);

    std::vector<double> worst_rho(times.size(), 0.0);
    double worst = 0.0;
    for (const auto& traj : trajs) {
        const auto rep = convexity_report(traj, self_adjoint_form(), tol);
        worst = std::max(worst, rep.max_ratio);
        for (std::size_t i = 0; i < times.size(); ++i)
            worst_rho[i] = std::max(worst_rho[i], rep.ratios[i]);
    }
    r.check_le("max_ratio_over_batch", worst, 1.0 + tol);

    StateCoeffs mode1(model.dim(), 0.0);
    mode1[0] = 1.0;
    const auto rep1 = convexity_report(evolve(model, mode1, 1.0, times), self_adjoint_form(), tol);
    double dev = 0.0;
    for (double rho : rep1.ratios)
        if (rho > 0.0) dev = std::max(dev, std::abs(rho - 1.0));
    r.check_le("single_mode_equality_dev", dev, 1e-12);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < times.size(); ++i) rows.push_back({times[i], worst_rho[i]});
    csv_art(r, cfg.out_dir, "agmon-nirenberg-rho.csv", {"t", "worst_rho"}, rows);
}

inline void preset_transport_counterexample(PresetResult& r, const ExperimentConfig& cfg) {
    const std::size_t cells = 1024;
    const auto times = linspace(0.0, 1.0, 21);
    auto one = [](double) { return 1.0; };
    const auto traj = transport_trajectory(one, cells, times);

    r.check_le("initial_norm_dev", std::abs(traj.norms.front() - 1.0), 1e-15);
    r.check_le("final_norm", traj.norms.back(), 0.0);
    const auto rep = convexity_report(traj, self_adjoint_form());
    r.check_true("verdict_degenerate", rep.verdict == ConvexityVerdict::violation_degenerate);
    r.check_true("probe_violating",
                 backward_uniqueness_probe(traj, 1e-12) == UniquenessVerdict::violating);
    // halfway norm has the exact characteristics value
    const auto half = transport_solve(one, cells, 0.5);
    r.check_le("halfway_mass_dev", std::abs(sq(transport_norm(half)) - 0.5), 1e-12);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < times.size(); ++i) rows.push_back({times[i], traj.norms[i]});
    csv_art(r, cfg.out_dir, "transport-counterexample.csv", {"t", "norm"}, rows);
}

inline void preset_krein_weight(PresetResult& r, const ExperimentConfig& cfg) {
    const std::vector<double> psis{kPi / 6, kPi / 4, kPi / 3, kPi / 2};
    std::vector<std::vector<double>> rows;
    double worst_fT = 0.0, worst_collapse = 0.0, min_margin = 1e300;
    bool monotone = true, in_range = true, monotone_in_psi = true;
    std::vector<double> prev_ws;
    const auto ts = linspace(0.0, 1.0, 201);
    for (double psi : psis) {
        Sector s{psi, 1.0, 0.0, 1.0};
        worst_fT = std::max(worst_fT, std::abs(weight_f(s, s.T) - s.T) / s.T);
        std::vector<double> ws;
        ws.reserve(ts.size());
        double prev = -1.0;
        for (double t : ts) {
            const double w = weight_w(s, t);
            ws.push_back(w);
            if (w < prev) monotone = false;
            prev = w;
            if (w < 0.0 || w > 1.0) in_range = false;
            if (t > 0.0) min_margin = std::min(min_margin, w - weight_lower_bound(s, t));
            if (psi == kPi / 2) worst_collapse = std::max(worst_collapse, std::abs(w - t));
            rows.push_back({psi, t, w, t > 0.0 ? weight_lower_bound(s, t) : 0.0});
        }
        if (!prev_ws.empty())
            for (std::size_t i = 0; i < ts.size(); ++i)
                if (ws[i] < prev_ws[i] - 1e-9) monotone_in_psi = false;
        prev_ws = ws;
    }
    // finer grid for the collapse criterion
    {
        Sector s{kPi / 2, 1.0, 0.0, 1.0};
        for (int i = 0; i <= 1000; ++i) {
            const double t = i / 1000.0;
            worst_collapse = std::max(worst_collapse, std::abs(weight_w(s, t) - t));
        }
    }
    r.check_le("beta_reflection_fT_rel", worst_fT, 1e-10);
    r.check_le("self_adjoint_collapse", worst_collapse, 1e-8);
    r.check_ge("lower_bound_margin", min_margin, -1e-12);
    r.check_true("w_monotone", monotone);
    r.check_true("w_in_unit_interval", in_range);
    r.check_true("w_monotone_in_psi", monotone_in_psi);
    csv_art(r, cfg.out_dir, "krein-weight.csv", {"psi", "t", "w", "lower_bound"}, rows);
}

inline void preset_weight_lower_bound(PresetResult& r, const ExperimentConfig& cfg) {
    std::vector<std::vector<double>> rows;
    double min_margin = 1e300;
    for (double psi : {0.3, 0.6, 0.9, kPi / 4, 1.2, kPi / 2}) {
        Sector s{psi, 1.0, 0.0, 1.0};
        for (int i = 1; i <= 400; ++i) {
            const double t = i / 400.0;
            const double w = weight_w(s, t);
            const double lb = weight_lower_bound(s, t);
            min_margin = std::min(min_margin, w - lb);
            rows.push_back({psi, t, w, lb, w - lb});
        }
    }
    r.check_ge("min_margin", min_margin, -1e-12);
    csv_art(r, cfg.out_dir, "weight-lower-bound.csv", {"psi", "t", "w", "bound", "margin"}, rows);
}

inline void preset_matrix_analytic_convexity(PresetResult& r, const ExperimentConfig& cfg) {
    const double tol = cfg.tol_override > 0 ? cfg.tol_override : 1e-6;
    std::vector<Eigen::MatrixXd> mats;
    {
        Eigen::MatrixXd a1(2, 2), a2(2, 2), a3(2, 2);
        a1 << -1, 0, 0, -2;
        a2 << -1, 1, -1, -1;
        a3 << -2, 1, 0, -1;
        mats = {a1, a2, a3};
    }
    const auto times = linspace(0.0, 1.0, 41);
    std::vector<std::vector<double>> rows;
    Rng rng(cfg.seed);
    int id = 0;
    for (const auto& A : mats) {
        SectorEstimateOptions opt;
        opt.seed = cfg.seed + 100 + static_cast<std::uint64_t>(id);
        const Sector est = matrix_sector_estimate(A, opt);
        const Sector safe = slackened(est);
        const auto form = analytic_form_tabulated(safe, times);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            Eigen::VectorXd u0(2);
            u0 << rng.normal(), rng.normal();
            const auto traj = matrix_semigroup_trajectory(A, u0, times);
            worst = std::max(worst, convexity_report(traj, form, tol).max_ratio);
        }
        r.check_le("matrix" + std::to_string(id) + "_max_ratio", worst, 1.0 + tol);
        r.check_true("matrix" + std::to_string(id) + "_psi_in_range",
                     est.psi > 0.0 && est.psi <= kPi / 2);
        rows.push_back({static_cast<double>(id), est.psi, est.K, est.kappa, worst});
        ++id;
    }
    csv_art(r, cfg.out_dir, "matrix-analytic-convexity.csv",
            {"matrix", "psi", "K", "kappa", "worst_ratio"}, rows);
}

inline void preset_fractional_convexity(PresetResult& r, const ExperimentConfig& cfg) {
    const double tol = cfg.tol_override > 0 ? cfg.tol_override : 1e-8;
    const auto model = dirichlet_laplacian_model(64, kPi);
    const auto times = linspace(0.0, 1.0, 33);
    std::vector<std::vector<double>> rows;
    Rng rng(cfg.seed);
    for (double alpha : {0.3, 0.5, 0.7, 0.9, 1.0}) {
        const auto batch = random_batch(100, model.dim(), rng);
        const auto trajs = evolve_many(model, batch, alpha, times);
        const double m_hat = fit_min_constant_fractional(trajs);
        const double thr = alpha == 1.0 ? 1.0 + 1e-10 : 1.0 + tol;
        r.check_le("M_hat_alpha_" + format_double(alpha), m_hat, thr);
        rows.push_back({alpha, m_hat});
    }
    csv_art(r, cfg.out_dir, "fractional-convexity.csv", {"alpha", "M_hat"}, rows);
}

inline std::vector<GridState> random_bump_states(const FourierGrid& grid, std::size_t count, Rng& rng) {
    std::vector<GridState> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        struct Bump {
            double a, mx, my, s;
        };
        std::vector<Bump> bumps(3);
        for (auto& b : bumps)
            b = {rng.uniform(0.2, 1.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                 rng.uniform(0.7, 1.5)};
        out.push_back(make_grid_state(grid, [&](double x, double y) {
            double v = 0.0;
            for (const auto& b : bumps)
                v += b.a * std::exp(-0.5 * (sq(x - b.mx) + sq(y - b.my)) / sq(b.s));
            return v;
        }));
    }
    return out;
}

inline void preset_frac_ou_convexity(PresetResult& r, const ExperimentConfig& cfg) {
    FracOUParams p;
    p.Q = Eigen::MatrixXd::Identity(1, 1);
    p.B = Eigen::MatrixXd::Constant(1, 1, -1.0);
    FourierGrid grid{1, 12.0, 256};
    const auto times = linspace(0.0, 1.0, 9);
    Rng rng(cfg.seed);
    const auto states = random_bump_states(grid, 50, rng);
    std::vector<std::vector<double>> rows;
    for (double s : {0.6, 1.0, 1.5}) {
        p.s = s;
        std::vector<Trajectory> batch;
        batch.reserve(states.size());
        for (const auto& u0 : states) {
            Trajectory traj;
            traj.times = times;
            for (double t : times) traj.norms.push_back(fourier_solve(p, grid, u0, t).l2_norm());
            batch.push_back(std::move(traj));
        }
        const auto fit = fit_min_constant_frac_ou(batch);
        r.check_true("c_hat_in_(0,1]_s_" + format_double(s), fit.c_hat > 0.0 && fit.c_hat <= 1.0);
        rows.push_back({s, fit.c_hat, fit.K});
    }
    csv_art(r, cfg.out_dir, "frac-ou-convexity.csv", {"s", "c_hat", "K"}, rows);
}

inline void preset_ou_invariant_measure(PresetResult& r, const ExperimentConfig& cfg) {
    std::vector<std::vector<double>> rows;
    // Lyapunov residuals for the shipped drift set
    {
        std::vector<Eigen::MatrixXd> bs;
        bs.push_back(Eigen::MatrixXd::Constant(1, 1, -1.0));
        bs.push_back(-Eigen::MatrixXd::Identity(2, 2));
        Eigen::MatrixXd b3(2, 2);
        b3 << -1, 1, 0, -1;
        bs.push_back(b3);
        int id = 0;
        for (const auto& B : bs) {
            const Eigen::MatrixXd S = invariant_covariance(B);
            const double res = (B * S + S * B.transpose() +
                                2.0 * Eigen::MatrixXd::Identity(B.rows(), B.cols()))
                                   .cwiseAbs()
                                   .maxCoeff();
            r.check_le("lyapunov_residual_" + std::to_string(id), res, 1e-10);
            ++id;
        }
    }
    // probability normalization: ||1||_{L2_mu} = 1
    {
        FourierGrid g1{1, 12.0, 128};
        GridState ones = make_grid_state(g1, [](double, double) { return 1.0; });
        const Eigen::MatrixXd S1 = invariant_covariance(Eigen::MatrixXd::Constant(1, 1, -1.0));
        r.check_le("unit_weighted_norm_dev_1d", std::abs(weighted_norm(ones, S1) - 1.0), 1e-8);
        FourierGrid g2{2, 12.0, 64};
        GridState ones2 = make_grid_state(g2, [](double, double) { return 1.0; });
        Eigen::MatrixXd b3(2, 2);
        b3 << -1, 1, 0, -1;
        r.check_le("unit_weighted_norm_dev_2d",
                   std::abs(weighted_norm(ones2, invariant_covariance(b3)) - 1.0), 1e-8);
    }
    // weighted-norm contraction along classical OU trajectories
    {
        FracOUParams p;
        p.Q = Eigen::MatrixXd::Identity(1, 1);
        p.B = Eigen::MatrixXd::Constant(1, 1, -1.0);
        p.s = 1.0;
        FourierGrid grid{1, 12.0, 256};
        const Eigen::MatrixXd S = invariant_covariance(p.B);
        const auto u0 = make_grid_state(grid, [](double x, double) {
            return std::exp(-0.5 * sq(x - 0.8));
        });
        double prev = 1e300;
        bool nonincreasing = true;
        for (double t : linspace(0.0, 1.0, 9)) {
            const double wn = weighted_norm(fourier_solve(p, grid, u0, t), S);
            if (wn > prev * (1.0 + 1e-10)) nonincreasing = false;
            prev = wn;
            rows.push_back({1.0, t, wn});
        }
        r.check_true("weighted_norm_nonincreasing_1d", nonincreasing);
    }
    {
        FracOUParams p;
        p.Q = Eigen::MatrixXd::Identity(2, 2);
        p.B = Eigen::MatrixXd(2, 2);
        p.B << -1, 1, 0, -1;
        p.s = 1.0;
        FourierGrid grid{2, 12.0, 128};
        const Eigen::MatrixXd S = invariant_covariance(p.B);
        const auto u0 = make_grid_state(grid, [](double x, double y) {
            return std::exp(-0.5 * (sq(x - 0.5) + sq(y + 0.3)));
        });
        double prev = 1e300;
        bool nonincreasing = true;
        for (double t : linspace(0.0, 1.0, 5)) {
            const double wn = weighted_norm(fourier_solve(p, grid, u0, t), S);
            if (wn > prev * (1.0 + 1e-10)) nonincreasing = false;
            prev = wn;
            rows.push_back({2.0, t, wn});
        }
        r.check_true("weighted_norm_nonincreasing_2d", nonincreasing);
    }
    csv_art(r, cfg.out_dir, "ou-invariant-measure.csv", {"case", "t", "weighted_norm"}, rows);
}

inline void preset_geom_lattice(PresetResult& r, const ExperimentConfig& cfg) {
    LatticeBallRegion unit;
    unit.spacing = Eigen::Vector2d(1.0, 1.0);
    unit.offset = Eigen::Vector2d::Zero();
    unit.radius = 0.5;

    const auto ok = geom_check(unit, std::sqrt(2.0), 0.5, 2000, cfg.seed);
    r.check_true("unit_lattice_pass", ok.pass);
    const auto corner = geom_check(unit, 0.5, 0.5, 2000, cfg.seed);
    r.check_true("small_delta_fails", !corner.pass);
    const auto big_ball = geom_check(unit, std::sqrt(2.0), 0.6, 10, cfg.seed);
    r.check_true("oversized_witness_fails", !big_ball.pass);

    LatticeBallRegion shifted = unit;
    shifted.offset = Eigen::Vector2d(0.31, -0.57);
    const auto shifted_ok = geom_check(shifted, std::sqrt(2.0), 0.5, 2000, cfg.seed + 1);
    r.check_true("offset_invariance", shifted_ok.pass == ok.pass &&
                                          std::abs(shifted_ok.analytic_worst - ok.analytic_worst) < 1e-14);

    std::vector<std::vector<double>> rows{
        {1.0, ok.pass ? 1.0 : 0.0, ok.analytic_worst, ok.worst_probe},
        {2.0, corner.pass ? 1.0 : 0.0, corner.analytic_worst, corner.worst_probe},
        {3.0, big_ball.pass ? 1.0 : 0.0, big_ball.analytic_worst, big_ball.worst_probe},
        {4.0, shifted_ok.pass ? 1.0 : 0.0, shifted_ok.analytic_worst, shifted_ok.worst_probe},
    };
    csv_art(r, cfg.out_dir, "geom-lattice.csv", {"case", "pass", "analytic_worst", "worst_probe"}, rows);
}

inline void preset_heat_inversion(PresetResult& r, const ExperimentConfig& cfg) {
    const auto model = dirichlet_laplacian_model(8, kPi);
    ObservationMask half{{{0.0, kPi / 2.0}}};
    std::vector<double> obs_times;
    for (int i = 1; i <= 16; ++i) obs_times.push_back(i / 16.0);
    SpectralInverseProblem problem(model, 1.0, half, obs_times);
    Rng rng(cfg.seed);

    // adjoint consistency
    double worst_dot = 0.0;
    for (int k = 0; k < 100; ++k) {
        StateCoeffs x(model.dim());
        for (auto& v : x) v = rng.normal();
        Eigen::MatrixXd d(model.dim(), obs_times.size());
        for (Eigen::Index j = 0; j < d.cols(); ++j)
            for (Eigen::Index i = 0; i < d.rows(); ++i) d(i, j) = rng.normal();
        const double lhs = problem.data_inner(problem.forward_map(x), d);
        const Eigen::VectorXd ax = problem.adjoint_map(d);
        double rhs = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * ax(static_cast<Eigen::Index>(i));
        worst_dot = std::max(worst_dot, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-30}));
    }
    r.check_le("adjoint_dot_test", worst_dot, 1e-10);

    // noise-free recovery
    const StateCoeffs truth = project_initial_data(model, [](double x) { return x * (kPi - x); });
    const AdmissibleSet set{0.5, 100.0};
    const Eigen::MatrixXd clean = problem.forward_map(truth);
    ReconOptions ropt;
    const auto clean_res = reconstruct(problem, clean, set, ropt);
    StateCoeffs diff = clean_res.u0;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= truth[i];
    r.check_le("clean_recovery_rel_error", l2_norm(diff) / l2_norm(truth), 1e-6);

    // residual history monotone
    bool monotone = true;
    for (std::size_t i = 1; i < clean_res.residual_history.size(); ++i)
        if (clean_res.residual_history[i] > clean_res.residual_history[i - 1] * (1.0 + 1e-12))
            monotone = false;
    r.check_true("residual_history_nonincreasing", monotone);

    // Morozov window
    ropt.noise_level = 1e-3;
    Rng noise_rng(cfg.seed + 17);
    const Eigen::MatrixXd noisy = problem.synthesize_data(truth, ropt.noise_level, noise_rng);
    const auto noisy_res = reconstruct(problem, noisy, set, ropt);
    r.check_true("morozov_window", noisy_res.discrepancy >= ropt.noise_level &&
                                       noisy_res.discrepancy <= ropt.morozov_tau * ropt.noise_level);

    // transport negative control: zero residual, order-one error
    {
        TransportInverseProblem tp(512, 0.5);
        Eigen::VectorXd u0(512);
        for (int i = 0; i < 512; ++i) {
            const double x = (i + 0.5) / 512.0;
            u0(i) = 1.0 + 0.5 * std::sin(2.0 * kPi * x);
        }
        const auto res = tp.reconstruct(tp.forward(u0));
        Eigen::Map<const Eigen::VectorXd> rec(res.u0.data(), static_cast<Eigen::Index>(res.u0.size()));
        r.check_le("transport_residual", res.discrepancy, 1e-12 * u0.norm());
        r.check_ge("transport_error_stays", (rec - u0).norm() / u0.norm(), 0.2);
    }

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < clean_res.residual_history.size(); ++i)
        rows.push_back({static_cast<double>(i), clean_res.residual_history[i]});
    for (std::size_t i = 0; i < noisy_res.residual_history.size(); ++i)
        rows.push_back({static_cast<double>(i) + 1000.0, noisy_res.residual_history[i]});
    csv_art(r, cfg.out_dir, "heat-inversion-residuals.csv", {"iteration", "residual"}, rows);
}

inline void preset_stability_curve(PresetResult& r, const ExperimentConfig& cfg,
                                   std::size_t n_samples = 200) {
    const auto model = dirichlet_laplacian_model(16, kPi);
    ObservationMask half{{{0.0, kPi / 2.0}}};
    std::vector<double> obs_times;
    for (int i = 1; i <= 16; ++i) obs_times.push_back(i / 16.0);
    SpectralInverseProblem problem(model, 1.0, half, obs_times);
    const AdmissibleSet set{0.5, 10.0};
    StabilityCurveOptions opt;
    opt.n_samples = n_samples;
    opt.seed = cfg.seed;
    const auto curve = stability_curve(problem, set, opt);

    r.check_true("envelope_nonincreasing", curve.envelope_nonincreasing);
    r.check_ge("alpha_hat_positive", curve.alpha_hat, 1e-12);

    std::vector<std::vector<double>> rows;
    for (auto [d, e] : curve.pairs) rows.push_back({d, e});
    csv_art(r, cfg.out_dir, "stability-curve-pairs.csv", {"data_norm", "initial_norm"}, rows);
    std::vector<std::vector<double>> env;
    for (std::size_t i = 0; i < curve.envelope.size(); ++i)
        env.push_back({curve.bin_log_abs_log_d[i], curve.envelope[i]});
    csv_art(r, cfg.out_dir, "stability-curve-envelope.csv", {"log_abs_log_d", "envelope"}, env);
    std::vector<std::vector<double>> fit{{curve.K_hat, curve.alpha_hat}};
    csv_art(r, cfg.out_dir, "stability-curve-fit.csv", {"K_hat", "alpha_hat"}, fit);
}

}  // namespace preset_detail

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{
        "agmon-nirenberg",     "transport-counterexample", "krein-weight",
        "weight-lower-bound",  "matrix-analytic-convexity", "fractional-convexity",
        "frac-ou-convexity",   "ou-invariant-measure",      "geom-lattice",
        "heat-inversion",      "stability-curve",
    };
    return names;
}

/// Run one shipped preset: computes, asserts, writes CSV artifacts and the
/// summary JSON. Assertion failures are recorded in the summary, not thrown.
inline PresetResult run_preset(const ExperimentConfig& cfg) {
    using Fn = std::function<void(PresetResult&, const ExperimentConfig&)>;
    static const std::map<std::string, Fn> registry{
        {"agmon-nirenberg", preset_detail::preset_agmon_nirenberg},
        {"transport-counterexample", preset_detail::preset_transport_counterexample},
        {"krein-weight", preset_detail::preset_krein_weight},
        {"weight-lower-bound", preset_detail::preset_weight_lower_bound},
        {"matrix-analytic-convexity", preset_detail::preset_matrix_analytic_convexity},
        {"fractional-convexity", preset_detail::preset_fractional_convexity},
        {"frac-ou-convexity", preset_detail::preset_frac_ou_convexity},
        {"ou-invariant-measure", preset_detail::preset_ou_invariant_measure},
        {"geom-lattice", preset_detail::preset_geom_lattice},
        {"heat-inversion", preset_detail::preset_heat_inversion},
        {"stability-curve", [](PresetResult& r, const ExperimentConfig& c) {
             preset_detail::preset_stability_curve(r, c);
         }},
    };
    const auto it = registry.find(cfg.preset);
    if (it == registry.end()) throw std::invalid_argument("run_preset: unknown preset " + cfg.preset);
    PresetResult result;
    result.preset = cfg.preset;
    result.seed = cfg.seed;
    it->second(result, cfg);
    const auto summary = emit_tables(result, cfg.out_dir, "json");
    result.artifacts.push_back(summary.string());
    return result;
}

}  // namespace logconv
