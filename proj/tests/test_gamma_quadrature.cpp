#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "logconv/gamma.hpp"
#include "logconv/quadrature.hpp"

using namespace logconv;

TEST_CASE("gamma matches reference values to 1e-13", "[gamma]") {
    // references computed with 30-digit arithmetic
    CHECK(gamma_fn(1.5) == Catch::Approx(0.886226925452758013649083741671).epsilon(1e-13));
    CHECK(gamma_fn(2.5) == Catch::Approx(1.32934038817913702047362561251).epsilon(1e-13));
    CHECK(gamma_fn(0.1) == Catch::Approx(9.51350769866873128580797989582).epsilon(1e-13));
    CHECK(gamma_fn(-0.5) == Catch::Approx(-3.54490770181103205459633496668).epsilon(1e-13));
    CHECK(gamma_fn(-2.5) == Catch::Approx(-0.945308720482941881225689324449).epsilon(1e-13));
    CHECK(gamma_fn(1.0) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_fn(5.0) == Catch::Approx(24.0).epsilon(1e-14));
}

TEST_CASE("gamma rejects poles and propagates the recurrence", "[gamma]") {
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-3.0), std::domain_error);
    CHECK(reciprocal_gamma(0.0) == 0.0);
    CHECK(reciprocal_gamma(-7.0) == 0.0);
    // Gamma(x+1) = x Gamma(x) along a scan that crosses negative intervals
    for (double x : {0.3, 1.7, 4.2, -0.7, -1.3, -4.6}) {
        CHECK(gamma_fn(x + 1.0) == Catch::Approx(x * gamma_fn(x)).epsilon(1e-12));
    }
    // reflection check against an independently evaluated identity
    for (double x : {0.25, 0.6, 0.85}) {
        CHECK(gamma_fn(x) * gamma_fn(1.0 - x) ==
              Catch::Approx(kPi / std::sin(kPi * x)).epsilon(1e-13));
    }
}

TEST_CASE("log_gamma agrees with gamma where both are finite", "[gamma]") {
    for (double x : {0.05, 0.4, 1.2, 11.0, 90.0}) {
        CHECK(log_gamma(x) == Catch::Approx(std::log(gamma_fn(x))).margin(1e-12));
    }
    CHECK(log_gamma(600.0) == Catch::Approx(std::lgamma(600.0)).epsilon(1e-13));
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly", "[quadrature]") {
    const auto rule = gauss_legendre(8, -1.0, 2.0);
    // degree 15 is the exactness edge for 8 nodes
    auto poly = [](double x) { return std::pow(x, 15) - 3.0 * std::pow(x, 7) + x; };
    const double exact = (std::pow(2.0, 16) - 1.0) / 16.0 - 3.0 * (std::pow(2.0, 8) - 1.0) / 8.0 +
                         (4.0 - 1.0) / 2.0;
    CHECK(rule.apply(poly) == Catch::Approx(exact).epsilon(1e-13));
    CHECK(gauss_legendre(32, 0.0, kPi).apply([](double x) { return std::sin(x); }) ==
          Catch::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("Gauss-Jacobi handles the singular endpoint weight", "[quadrature]") {
    // int_0^1 t^(a-1) dt = 1/a with f = 1
    for (double a : {1.0 / 6.0, 0.25, 0.5}) {
        const auto rule = gauss_jacobi01(50, 0.0, a - 1.0);
        double s = 0.0;
        for (double w : rule.weights) s += w;
        CHECK(s == Catch::Approx(1.0 / a).epsilon(1e-13));
        // int_0^1 t^(a-1) t dt = 1/(a+1)
        CHECK(rule.apply([](double t) { return t; }) == Catch::Approx(1.0 / (a + 1.0)).epsilon(1e-13));
    }
    // the full Beta integral with both endpoint exponents in the weight
    for (double a : {1.0 / 6.0, 1.0 / 3.0, 0.5}) {
        const auto rule = gauss_jacobi01(80, -a, a - 1.0);
        double s = 0.0;
        for (double w : rule.weights) s += w;
        CHECK(s == Catch::Approx(kPi / std::sin(kPi * a)).epsilon(1e-12));
    }
}

TEST_CASE("adaptive integrator resolves peaks and endpoint steepness", "[quadrature]") {
    AdaptiveOptions opt;
    opt.rel_tol = 1e-13;
    // narrow Lorentzian with known integral
    const double w = 1e-3;
    const double v = integrate_adaptive(
        [w](double x) { return w / (w * w + (x - 0.6) * (x - 0.6)); }, 0.0, 1.0, opt, {0.6});
    CHECK(v == Catch::Approx(std::atan(0.4 / w) + std::atan(0.6 / w)).epsilon(1e-11));
    CHECK(integrate_adaptive([](double x) { return std::exp(-x * x); }, 0.0, 10.0, opt) ==
          Catch::Approx(std::sqrt(kPi) / 2.0).epsilon(1e-12));
}
