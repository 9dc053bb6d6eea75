// Command-line front end: special-function evaluation, forward solves,
// harmonic-weight tables, convexity checks, initial-data inversion, and the
// shipped experiment presets. Exit codes: 0 success / all assertions pass,
// 1 assertion or check failure, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "logconv/convexity.hpp"
#include "logconv/frac_ou.hpp"
#include "logconv/inverse.hpp"
#include "logconv/io.hpp"
#include "logconv/mittag_leffler.hpp"
#include "logconv/presets.hpp"
#include "logconv/spectral.hpp"
#include "logconv/weight.hpp"

namespace {

using nlohmann::json;

struct GlobalOpts {
    std::uint64_t seed = 1;
    std::string out = "out";
    double tol = -1.0;
    std::string config;
};

void apply_config_file(GlobalOpts& g) {
    if (g.config.empty()) return;
    std::ifstream in(g.config);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + g.config);
    json cfg = json::parse(in);
    if (cfg.contains("seed")) g.seed = cfg["seed"].get<std::uint64_t>();
    if (cfg.contains("out")) g.out = cfg["out"].get<std::string>();
    if (cfg.contains("tol")) g.tol = cfg["tol"].get<double>();
}

logconv::SpectralModel model_from_json(const json& m) {
    const std::string kind = m.at("kind").get<std::string>();
    if (kind == "dirichlet_laplacian") {
        return logconv::dirichlet_laplacian_model(m.at("modes").get<std::size_t>(),
                                                  m.value("length", logconv::kPi));
    }
    if (kind == "symmetrized_drift") {
        const double b_slope = m.value("b_slope", 0.0);
        const double p_const = m.value("p_const", 0.0);
        const double a_const = m.value("a_const", 1.0);
        return logconv::symmetrized_drift_model(
            m.value("interior_points", std::size_t{200}), [a_const](double) { return a_const; },
            [b_slope](double x) { return b_slope * x; }, [p_const](double) { return p_const; },
            m.at("modes").get<std::size_t>());
    }
    throw std::invalid_argument("unknown model kind: " + kind);
}

int run_invert(const GlobalOpts& g, const std::string& problem_path) {
    std::ifstream in(problem_path);
    if (!in) {
        std::cerr << "invert: cannot open " << problem_path << "\n";
        return 2;
    }
    json cfg = json::parse(in);
    if (cfg.value("schema", "") != "logconv-problem/1") {
        std::cerr << "invert: expected schema logconv-problem/1\n";
        return 2;
    }

    auto model = model_from_json(cfg.at("model"));
    logconv::ObservationMask mask;
    for (const auto& iv : cfg.at("mask")) mask.intervals.emplace_back(iv[0].get<double>(), iv[1].get<double>());
    auto times = cfg.at("obs_times").get<std::vector<double>>();
    logconv::SpectralInverseProblem problem(model, cfg.value("alpha", 1.0), mask, times);

    logconv::AdmissibleSet set{cfg.value("epsilon", 0.5), cfg.value("M", 1.0)};
    logconv::ReconOptions opt;
    opt.noise_level = cfg.value("noise", 0.0);
    const std::string method = cfg.value("method", "cgne");
    opt.method = method == "landweber" ? logconv::ReconMethod::landweber : logconv::ReconMethod::cgne;
    opt.max_iterations = cfg.value("max_iterations", opt.method == logconv::ReconMethod::landweber ? 5000 : 500);

    // ground truth: explicit coefficients or a named profile
    logconv::StateCoeffs truth;
    if (cfg.contains("u0") && cfg["u0"].contains("coeffs")) {
        truth = cfg["u0"]["coeffs"].get<std::vector<double>>();
    } else {
        truth = logconv::project_initial_data(model, [](double x) { return x * (logconv::kPi - x); });
    }
    logconv::Rng rng(cfg.value("seed", g.seed));
    const Eigen::MatrixXd data = problem.synthesize_data(truth, opt.noise_level, rng);
    const auto res = logconv::reconstruct(problem, data, set, opt);

    std::filesystem::create_directories(g.out);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < res.u0.size(); ++i)
        rows.push_back({static_cast<double>(i), res.u0[i], truth[i]});
    logconv::write_csv(std::filesystem::path(g.out) / "invert-coefficients.csv",
                       {"mode", "recovered", "truth"}, rows);
    rows.clear();
    for (std::size_t i = 0; i < res.residual_history.size(); ++i)
        rows.push_back({static_cast<double>(i), res.residual_history[i]});
    logconv::write_csv(std::filesystem::path(g.out) / "invert-residuals.csv", {"iteration", "residual"}, rows);

    logconv::StateCoeffs diff = res.u0;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= truth[i];
    json summary{{"schema", "logconv-invert/1"},
                 {"discrepancy", res.discrepancy},
                 {"iterations", res.iterations},
                 {"converged", res.converged},
                 {"projected", res.projected},
                 {"relative_error", logconv::l2_norm(diff) / logconv::l2_norm(truth)}};
    std::ofstream sum(std::filesystem::path(g.out) / "invert-summary.json", std::ios::binary);
    sum << summary.dump(2) << "\n";
    std::cout << summary.dump(2) << "\n";
    return res.converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for backward evolution problems"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--seed", g.seed, "seed for every randomized routine");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--tol", g.tol, "tolerance override");
    app.add_option("--config", g.config, "JSON config with seed/out/tol defaults");

    // ml eval
    auto* ml = app.add_subcommand("ml", "Mittag-Leffler evaluation");
    auto* ml_eval_cmd = ml->add_subcommand("eval", "evaluate E_{alpha,beta}(x), x <= 0");
    double ml_alpha = 0.5, ml_beta = 1.0, ml_x = -1.0;
    ml_eval_cmd->add_option("--alpha", ml_alpha, "fractional order in (0,1]")->required();
    ml_eval_cmd->add_option("--beta", ml_beta, "second parameter, > 0");
    ml_eval_cmd->add_option("--x", ml_x, "argument, <= 0")->required();

    // solve spectral / frac-ou
    auto* solve = app.add_subcommand("solve", "forward solvers");
    auto* sp = solve->add_subcommand("spectral", "eigenmode evolution of the Dirichlet model");
    std::size_t sp_modes = 16;
    double sp_length = logconv::kPi, sp_alpha = 1.0, sp_T = 1.0;
    std::size_t sp_nt = 33;
    std::string sp_base = "trajectory";
    sp->add_option("--modes", sp_modes, "retained eigenmodes");
    sp->add_option("--length", sp_length, "interval length");
    sp->add_option("--alpha", sp_alpha, "time-fractional order in (0,1]");
    sp->add_option("--t-final", sp_T, "final time");
    sp->add_option("--times", sp_nt, "number of time samples");
    sp->add_option("--base", sp_base, "artifact base name");

    auto* fo = solve->add_subcommand("frac-ou", "fractional Ornstein-Uhlenbeck solve");
    std::vector<double> fo_q{1.0}, fo_b{-1.0};
    double fo_s = 1.0, fo_t = 0.5, fo_extent = 12.0;
    int fo_points = 256;
    std::string fo_base = "frac-ou-state";
    fo->add_option("--q", fo_q, "diffusion matrix, row-major");
    fo->add_option("--b", fo_b, "drift matrix, row-major");
    fo->add_option("--s", fo_s, "fractional power of the symbol");
    fo->add_option("--t", fo_t, "evolution time");
    fo->add_option("--grid", fo_points, "grid points per axis (power of two)");
    fo->add_option("--extent", fo_extent, "half box size");
    fo->add_option("--base", fo_base, "artifact base name");

    // weight table
    auto* wt = app.add_subcommand("weight", "harmonic weight table (t, w, lower_bound)");
    double wt_psi = logconv::kPi / 2.0, wt_T = 1.0;
    std::size_t wt_n = 101;
    std::string wt_out = "weight.csv";
    wt->add_option("--psi", wt_psi, "sector half-angle in (0, pi/2]")->required();
    wt->add_option("--T", wt_T, "time horizon");
    wt->add_option("--grid", wt_n, "number of table points");
    wt->add_option("--csv", wt_out, "output csv path");

    // check convexity
    auto* check = app.add_subcommand("check", "verification");
    auto* cv = check->add_subcommand("convexity", "convexity report for an exported trajectory");
    std::string cv_traj, cv_form = "self_adjoint";
    double cv_M = 1.0, cv_K = 1.0, cv_kappa = 0.0, cv_psi = logconv::kPi / 2.0, cv_c = 1.0;
    cv->add_option("--traj", cv_traj, "trajectory base path (expects .csv/.json/.bin)")->required();
    cv->add_option("--form", cv_form, "self_adjoint | fractional | analytic | frac_ou");
    cv->add_option("--M", cv_M, "fractional prefactor");
    cv->add_option("--K", cv_K, "analytic / frac-ou prefactor");
    cv->add_option("--kappa", cv_kappa, "analytic exponent shift");
    cv->add_option("--psi", cv_psi, "sector half-angle for the analytic weight");
    cv->add_option("--c", cv_c, "frac-ou weight scale");

    // invert
    auto* inv = app.add_subcommand("invert", "initial-data reconstruction from a problem file");
    std::string inv_cfg;
    inv->add_option("--config,--problem", inv_cfg, "problem JSON (schema logconv-problem/1)")->required();

    // stability curve
    auto* sc = app.add_subcommand("stability-curve", "log-stability scatter and envelope fit");
    std::string sc_preset = "heat-half-mask";
    std::size_t sc_n = 200;
    sc->add_option("--preset", sc_preset, "problem preset (heat-half-mask)");
    sc->add_option("--n", sc_n, "number of samples");

    // preset run
    auto* pr = app.add_subcommand("preset", "shipped experiments");
    auto* pr_run = pr->add_subcommand("run", "run one preset end to end");
    std::string pr_name;
    pr_run->add_option("name", pr_name, "preset name")->required();
    auto* pr_list = pr->add_subcommand("list", "list shipped presets");

    CLI11_PARSE(app, argc, argv);

    try {
        apply_config_file(g);

        if (ml_eval_cmd->parsed()) {
            std::printf("%.17g\n", logconv::ml_eval(ml_alpha, ml_beta, ml_x));
            return 0;
        }
        if (sp->parsed()) {
            const auto model = logconv::dirichlet_laplacian_model(sp_modes, sp_length);
            const auto u0 = logconv::project_initial_data(
                model, [&](double x) { return x * (sp_length - x); });
            const auto times = logconv::linspace(0.0, sp_T, sp_nt);
            const auto traj = logconv::evolve(model, u0, sp_alpha, times);
            std::filesystem::create_directories(g.out);
            logconv::write_trajectory(std::filesystem::path(g.out) / sp_base, traj);
            std::cout << "wrote " << (std::filesystem::path(g.out) / sp_base).string()
                      << ".{csv,json,bin}\n";
            return 0;
        }
        if (fo->parsed()) {
            const int dim = fo_q.size() == 4 ? 2 : 1;
            logconv::FracOUParams p;
            p.Q = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                fo_q.data(), dim, dim);
            p.B = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                fo_b.data(), dim, dim);
            p.s = fo_s;
            logconv::FourierGrid grid{dim, fo_extent, fo_points};
            const auto u0 = logconv::make_grid_state(grid, [](double x, double y) {
                return std::exp(-0.5 * (x * x + y * y));
            });
            const auto u = logconv::fourier_solve(p, grid, u0, fo_t);
            std::filesystem::create_directories(g.out);
            logconv::write_grid_state(std::filesystem::path(g.out) / fo_base, u);
            std::printf("l2 norm at t=%.6g: %.17g\n", fo_t, u.l2_norm());
            return 0;
        }
        if (wt->parsed()) {
            logconv::Sector s{wt_psi, 1.0, 0.0, wt_T};
            const auto table = logconv::make_weight_table(s, wt_n);
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < table.ts.size(); ++i)
                rows.push_back({table.ts[i], table.ws[i],
                                table.ts[i] > 0.0 ? logconv::weight_lower_bound(s, table.ts[i]) : 0.0});
            logconv::write_csv(wt_out, {"t", "w", "lower_bound"}, rows);
            std::cout << "wrote " << wt_out << "\n";
            return 0;
        }
        if (cv->parsed()) {
            const auto traj = logconv::read_trajectory(cv_traj);
            logconv::ConvexityForm form;
            if (cv_form == "self_adjoint") {
                form = logconv::self_adjoint_form();
            } else if (cv_form == "fractional") {
                form = logconv::fractional_form(cv_M);
            } else if (cv_form == "analytic") {
                logconv::Sector s{cv_psi, cv_K, cv_kappa, traj.times.back()};
                form = logconv::analytic_form_tabulated(s, traj.times);
            } else if (cv_form == "frac_ou") {
                form = logconv::frac_ou_form(cv_c, cv_K);
            } else {
                std::cerr << "unknown form " << cv_form << "\n";
                return 2;
            }
            const double tol = g.tol > 0 ? g.tol : 1e-9;
            const auto rep = logconv::convexity_report(traj, form, tol);
            json out{{"verdict", logconv::to_string(rep.verdict)},
                     {"max_ratio", rep.max_ratio},
                     {"argmax_time", rep.argmax_time},
                     {"form", cv_form},
                     {"tol", tol}};
            std::cout << out.dump(2) << "\n";
            return rep.verdict == logconv::ConvexityVerdict::holds ? 0 : 1;
        }
        if (inv->parsed()) return run_invert(g, inv_cfg);
        if (sc->parsed()) {
            if (sc_preset != "heat-half-mask") {
                std::cerr << "unknown stability-curve preset " << sc_preset << "\n";
                return 2;
            }
            logconv::ExperimentConfig cfg{"stability-curve", g.seed, g.out, g.tol};
            logconv::PresetResult result;
            result.preset = cfg.preset;
            result.seed = cfg.seed;
            logconv::preset_detail::preset_stability_curve(result, cfg, sc_n);
            logconv::emit_tables(result, cfg.out_dir, "json");
            for (const auto& a : result.assertions)
                std::printf("[%s] %s  value=%.6g threshold=%.6g\n", a.pass ? "PASS" : "FAIL",
                            a.name.c_str(), a.value, a.threshold);
            return result.all_pass() ? 0 : 1;
        }
        if (pr_list->parsed()) {
            for (const auto& n : logconv::preset_names()) std::cout << n << "\n";
            return 0;
        }
        if (pr_run->parsed()) {
            bool known = false;
            for (const auto& n : logconv::preset_names()) known = known || n == pr_name;
            if (!known) {
                std::cerr << "unknown preset '" << pr_name << "'; see `preset list`\n";
                return 2;
            }
            logconv::ExperimentConfig cfg{pr_name, g.seed, g.out, g.tol};
            const auto result = logconv::run_preset(cfg);
            for (const auto& a : result.assertions)
                std::printf("[%s] %s  value=%.6g threshold=%.6g\n", a.pass ? "PASS" : "FAIL",
                            a.name.c_str(), a.value, a.threshold);
            std::printf("summary: %s\n", result.artifacts.back().c_str());
            return result.all_pass() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "no subcommand executed\n";
    return 2;
}
