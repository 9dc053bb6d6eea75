#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "logconv/weight.hpp"

using namespace logconv;

TEST_CASE("g endpoints and midpoint", "[weight]") {
    Sector s1{kPi / 2.0, 1.0, 0.0, 1.0};
    CHECK(weight_g(s1, 0.0) == 0.0);
    CHECK(weight_g(s1, 1.0) == Catch::Approx(1.0).epsilon(1e-15));
    Sector s2{kPi / 2.0, 1.0, 0.0, 2.0};
    CHECK(weight_g(s2, 1.0) == Catch::Approx(1.0).epsilon(1e-14));  // 2 sin^2(pi/4)
}

TEST_CASE("f endpoints: empty integral and Beta reflection", "[weight]") {
    for (double psi : {kPi / 6, kPi / 4, kPi / 3, kPi / 2}) {
        Sector s{psi, 1.0, 0.0, 1.0};
        CHECK(weight_f(s, 0.0) == 0.0);
        CHECK(weight_f(s, 1.0) == Catch::Approx(1.0).epsilon(1e-10));
        Sector sT{psi, 1.0, 0.0, 3.5};
        CHECK(weight_f(sT, 3.5) == Catch::Approx(3.5).epsilon(1e-10));
    }
}

TEST_CASE("f interior values frozen from the incomplete-Beta oracle", "[weight]") {
    // 40-digit regularized incomplete Beta evaluations
    struct Case {
        double psi, x, ref;
    };
    const Case cases[] = {
        {kPi / 6, 0.80, 0.9457441205448377069820614804},
        {kPi / 6, 0.31, 0.7920643199387445609737609795},
        {kPi / 3, 0.37, 0.6152768664862129985577270092},
        {kPi / 4, 0.62, 0.8319107955923266589725196126},
    };
    for (const auto& c : cases) {
        Sector s{c.psi, 1.0, 0.0, 1.0};
        CHECK(weight_f(s, c.x) == Catch::Approx(c.ref).epsilon(1e-12));
    }
}

TEST_CASE("f collapses to arcsin at psi = pi/2", "[weight]") {
    Sector s{kPi / 2.0, 1.0, 0.0, 1.0};
    for (int i = 1; i < 50; ++i) {
        const double x = i / 50.0;
        CHECK(weight_f(s, x) ==
              Catch::Approx(2.0 / kPi * std::asin(std::sqrt(x))).epsilon(1e-12));
    }
}

TEST_CASE("h = f o g is increasing with fixed endpoints", "[weight]") {
    for (double psi : {kPi / 6, kPi / 4, kPi / 3, kPi / 2}) {
        Sector s{psi, 1.0, 0.0, 1.0};
        CHECK(weight_h(s, 0.0) == 0.0);
        CHECK(weight_h(s, 1.0) == Catch::Approx(1.0).epsilon(1e-10));
        double prev = -1.0;
        for (int i = 0; i <= 200; ++i) {
            const double h = weight_h(s, i / 200.0);
            CHECK(h > prev);
            prev = h;
        }
    }
}

TEST_CASE("w endpoints, range and monotonicity", "[weight]") {
    for (double psi : {kPi / 6, kPi / 3, kPi / 2}) {
        Sector s{psi, 1.0, 0.0, 2.0};
        CHECK(weight_w(s, 0.0) == 0.0);
        CHECK(weight_w(s, 2.0) == 1.0);
        double prev = -1.0;
        for (int i = 0; i <= 100; ++i) {
            const double w = weight_w(s, 2.0 * i / 100.0);
            CHECK(w >= 0.0);
            CHECK(w <= 1.0);
            CHECK(w >= prev);
            prev = w;
        }
    }
}

TEST_CASE("w is the identity in the self-adjoint limit", "[weight]") {
    Sector s{kPi / 2.0, 1.0, 0.0, 1.0};
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = i / 1000.0;
        worst = std::max(worst, std::abs(weight_w(s, t) - t));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("lower bound values and domination", "[weight]") {
    Sector s4{kPi / 4.0, 1.0, 0.0, 1.0};
    CHECK(weight_lower_bound(s4, 1.0) == Catch::Approx(kPi / 4.0).epsilon(1e-14));
    Sector s2{kPi / 2.0, 1.0, 0.0, 1.0};
    for (int i = 1; i <= 20; ++i) {
        const double t = i / 20.0;
        CHECK(weight_lower_bound(s2, t) == Catch::Approx(t).epsilon(1e-14));
    }
    // bound tends to zero with t
    CHECK(weight_lower_bound(s4, 1e-12) < 1e-10);
    // w dominates the bound everywhere tested
    for (double psi : {kPi / 6, kPi / 4, kPi / 3, kPi / 2}) {
        Sector s{psi, 1.0, 0.0, 1.0};
        for (int i = 1; i <= 100; ++i) {
            const double t = i / 100.0;
            CHECK(weight_w(s, t) >= weight_lower_bound(s, t) - 1e-12);
        }
    }
}

TEST_CASE("w is nondecreasing in psi at fixed t (regression check)", "[weight]") {
    const auto ts = linspace(0.05, 0.95, 19);
    std::vector<double> prev;
    for (double psi : {kPi / 6, kPi / 4, kPi / 3, kPi / 2}) {
        Sector s{psi, 1.0, 0.0, 1.0};
        std::vector<double> ws;
        for (double t : ts) ws.push_back(weight_w(s, t));
        if (!prev.empty())
            for (std::size_t i = 0; i < ws.size(); ++i) CHECK(ws[i] >= prev[i] - 1e-9);
        prev = ws;
    }
}

TEST_CASE("weight table invariants", "[weight]") {
    Sector s{kPi / 3.0, 1.0, 0.0, 1.5};
    const auto table = make_weight_table(s, 101);
    CHECK(table.ws.front() == 0.0);
    CHECK(table.ws.back() == Catch::Approx(1.0).margin(1e-10));
    for (std::size_t i = 1; i < table.ws.size(); ++i) CHECK(table.ws[i] > table.ws[i - 1]);
}

TEST_CASE("stability envelope shape", "[weight]") {
    Sector s{kPi / 2.0, 1.0, 0.0, 1.0};
    EnvelopeConstants k{1.0, 0.5, 1.0};
    // monotone increasing in d
    double prev = 0.0;
    for (double d : {1e-8, 1e-6, 1e-4, 1e-2, 0.5}) {
        const double v = stability_envelope(s, d, k);
        CHECK(v > prev);
        prev = v;
    }
    // d -> 0 sends the envelope to 0 (at the |log d|^-alpha rate)
    CHECK(stability_envelope(s, 1e-300, k) < stability_envelope(s, 1e-8, k) / 3.0);
    // psi = pi/2, c = 1: c_psi = 1/2 and the shape reduces to
    // K1 (Gamma(1) / |log(d)/2|)^alpha
    const double d = 1e-3;
    const double expected = std::pow(2.0 * (kPi / 2.0) / kPi / std::abs(0.5 * std::log(d)), 0.5);
    CHECK(stability_envelope(s, d, k) == Catch::Approx(expected).epsilon(1e-13));
    CHECK_THROWS_AS(stability_envelope(s, 1.5, k), std::domain_error);
}

TEST_CASE("weight domain errors", "[weight]") {
    Sector s{kPi / 3.0, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS(weight_g(s, -0.1), std::domain_error);
    CHECK_THROWS_AS(weight_f(s, 1.1), std::domain_error);
    CHECK_THROWS_AS(weight_w(s, 2.0), std::domain_error);
    CHECK_THROWS_AS(weight_lower_bound(s, 0.0), std::domain_error);
    Sector bad{2.0, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS(weight_w(bad, 0.5), std::domain_error);
}
