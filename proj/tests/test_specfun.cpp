#include "bmlab/specfun.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_helpers.hpp"

using namespace bmlab::specfun;

namespace {
constexpr double kPi = 3.14159265358979323846;

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::fabs(want);
}
}  // namespace

TEST_CASE("bessel_k half-integer closed form") {
    // K_{1/2}(y) = sqrt(pi/2y) e^{-y}
    for (double y : {0.1, 0.5, 1.0, 3.0, 10.0, 50.0, 300.0}) {
        const double want = std::sqrt(kPi / (2.0 * y)) * std::exp(-y);
        CHECK(rel_err(bessel_k(0.5, y), want) < 1e-12);
    }
    CHECK(rel_err(bessel_k(0.5, 1.0), 0.46106850444789) < 1e-11);
}

TEST_CASE("bessel_k against quadrature oracle") {
    const double nus[] = {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.5};
    const double ys[] = {1e-6, 1e-3, 0.1, 0.7, 1.0, 1.9,
                         2.0,  2.1,  5.0, 30.0, 120.0, 700.0};
    for (double nu : nus) {
        for (double y : ys) {
            const double want = testlab::bessel_k_scaled_oracle(nu, y);
            const double got = bessel_k_scaled(nu, y);
            INFO("nu=", nu, " y=", y, " got=", got, " want=", want);
            CHECK(rel_err(got, want) < 1e-10);
        }
    }
    CHECK(rel_err(bessel_k(0.0, 1.0), 0.42102443824071) < 1e-11);
}

TEST_CASE("bessel_k large-argument asymptotics") {
    // Leading term sqrt(pi/2y) e^{-y}; the first correction is
    // (4 nu^2 - 1)/(8y) = 3.75e-3 at nu = 1, y = 100.
    const double want = std::sqrt(kPi / 200.0) * std::exp(-100.0);
    CHECK(rel_err(bessel_k(1.0, 100.0), want) < 4e-3);
    CHECK(rel_err(bessel_k(1.0, 100.0), testlab::bessel_k_asymptotic(1.0, 100.0)) <
          1e-8);
}

TEST_CASE("bessel_k recurrence K_{nu+1} = K_{nu-1} + 2 nu K_nu / y") {
    for (double nu : {1.0, 1.3, 1.7, 2.5, 4.0}) {
        for (double y : {0.05, 0.4, 1.0, 3.0, 20.0, 200.0}) {
            const double lhs = bessel_k_scaled(nu + 1.0, y);
            const double rhs = bessel_k_scaled(nu - 1.0, y) +
                               (2.0 * nu / y) * bessel_k_scaled(nu, y);
            CHECK(rel_err(lhs, rhs) < 1e-9);
        }
    }
}

TEST_CASE("bessel_k domain and underflow behavior") {
    CHECK_THROWS_AS(bessel_k(0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k(0.5, -1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k(-0.5, 1.0), std::domain_error);
    CHECK(bessel_k(0.5, 800.0) == 0.0);         // underflow-to-zero signal
    CHECK(bessel_k_scaled(0.5, 800.0) > 0.0);   // scaled value still finite
    CHECK(std::isfinite(bessel_k_scaled(0.5, 800.0)));
}

TEST_CASE("bessel_k_ratios match direct ratios and stay bounded") {
    for (double nu0 : {0.0, 0.5, 1.0}) {
        for (double y : {0.3, 1.0, 5.0}) {
            const auto r = bessel_k_ratios(nu0, y, 12);
            CHECK(r[0] == 1.0);
            for (int n = 1; n <= 12; ++n) {
                const double direct =
                    bessel_k_scaled(nu0, y) / bessel_k_scaled(nu0 + n, y);
                CHECK(rel_err(r[n], direct) < 1e-11);
                CHECK(r[n] < r[n - 1]);  // K increasing in order
            }
        }
    }
}

TEST_CASE("lambda_nu closed forms") {
    const Order half = Order::from_dim(3);  // nu = 1/2
    for (double y : {0.0, 0.5, 1.0, 5.0, 50.0}) {
        const double want = 2.0 * kPi * std::exp(y);
        CHECK(rel_err(lambda_nu(half, y), want) < 1e-10);
    }
    const Order one = Order::from_dim(4);  // nu = 1
    CHECK(rel_err(lambda_nu(one, 0.0), 2.0 * kPi * kPi) < 1e-13);

    // nu = 0: Lambda_0(y) ~ pi / (-lg(e^gamma y / 2)) as y -> 0.
    const Order zero = Order::from_dim(2);
    const double gamma = 0.5772156649015329;
    for (double y : {1e-4, 1e-6}) {
        const double approx = kPi / (-std::log(std::exp(gamma) * y / 2.0));
        CHECK(rel_err(lambda_nu(zero, y), approx) < 1e-6);
    }
    CHECK_THROWS_AS(lambda_nu(zero, 0.0), std::domain_error);
}

TEST_CASE("gauss_kernel values and scaling") {
    CHECK(rel_err(gauss_kernel(1, 1.0, 0.0), 0.3989422804014327) < 1e-14);
    for (double t : {0.3, 2.0, 11.0}) {
        CHECK(rel_err(gauss_kernel(3, t, 0.0),
                      std::pow(2.0 * kPi * t, -1.5)) < 1e-14);
    }
    const double R = 2.0;
    for (int d : {1, 2, 3, 4}) {
        for (double x : {0.0, 0.7, 3.0}) {
            const double lhs = gauss_kernel(d, R * R * 2.5, R * x);
            const double rhs = std::pow(R, -d) * gauss_kernel(d, 2.5, x);
            CHECK(rel_err(lhs, rhs) < 1e-13);
        }
    }
    CHECK_THROWS_AS(gauss_kernel(3, 0.0, 1.0), std::domain_error);
}

TEST_CASE("green_kernel closed forms") {
    CHECK(rel_err(green_kernel(3, 1.0), 1.0 / (2.0 * kPi)) < 1e-13);
    CHECK(rel_err(green_kernel(3, 2.0), 1.0 / (4.0 * kPi)) < 1e-13);
    CHECK(rel_err(green_kernel(4, 1.0), 1.0 / (2.0 * kPi * kPi)) < 1e-13);
    CHECK_THROWS_AS(green_kernel(2, 1.0), std::domain_error);
    CHECK_THROWS_AS(green_kernel(3, 0.0), std::domain_error);
}

TEST_CASE("surface_harmonic: d=2 cosines, H_0 == 1, d=3 Legendre reduction") {
    const Order d2 = Order::from_dim(2);
    const Order d3 = Order::from_dim(3);
    const Order d5 = Order::from_dim(5);
    for (double th : {0.0, 0.3, 1.0, 2.2, kPi}) {
        CHECK(rel_err(surface_harmonic(d2, 2, th) + 2.0,
                      std::cos(2.0 * th) + 2.0) < 1e-13);
        CHECK(surface_harmonic(d2, 0, th) == 1.0);
        CHECK(std::fabs(surface_harmonic(d3, 0, th) - 1.0) < 1e-13);
        CHECK(std::fabs(surface_harmonic(d5, 0, th) - 1.0) < 1e-13);
        // d = 3 reduction: ((n+nu)/nu) C_n^{1/2} = (2n+1) P_n, the unique
        // multiple of P_n with H_0 == 1 and zero mean against m_1 for n >= 1.
        for (int n : {1, 2, 3, 4}) {
            const double want =
                (2.0 * n + 1.0) * testlab::legendre(n, std::cos(th));
            CHECK(std::fabs(surface_harmonic(d3, n, th) - want) < 1e-12);
        }
    }
}

TEST_CASE("g_density: alpha=0, two-depth agreement, positivity, normalization") {
    const Order d2 = Order::from_dim(2);
    const Order d3 = Order::from_dim(3);

    CHECK(g_density(d2, 0.0, 1.3) == 1.0);
    CHECK(g_density(d3, 0.0, 0.2) == 1.0);

    SeriesControl c64{1e-12, 64};
    SeriesControl c128{1e-12, 128};
    const double v64 = g_density(d2, 1.0, 0.0, c64);
    const double v128 = g_density(d2, 1.0, 0.0, c128);
    CHECK(std::fabs(v64 - v128) < 1e-9);

    for (const Order& ord : {d2, d3}) {
        for (double alpha : {0.1, 1.0, 5.0, 20.0}) {
            double min_val = 1e300;
            for (int i = 0; i < 512; ++i) {
                const double th = kPi * i / 511.0;
                min_val = std::min(min_val, g_density(ord, alpha, th));
            }
            INFO("d=", ord.d, " alpha=", alpha, " min=", min_val);
            // positive up to series round-off (true values on the far side
            // are exponentially small for large alpha)
            CHECK(min_val > -1e-10);

            // integral against the uniform sphere measure == 1
            auto f = [&](double th) {
                return g_density(ord, alpha, th) * colatitude_weight(ord.d, th);
            };
            const double total = testlab::integrate(f, 0.0, kPi, 1e-12);
            CHECK(std::fabs(total - 1.0) < 1e-7);
        }
    }
}

TEST_CASE("upper_gamma closed forms and quadrature oracle") {
    for (double z : {0.2, 1.0, 4.0}) {
        CHECK(rel_err(upper_gamma(1.0, z), std::exp(-z)) < 1e-12);
    }
    CHECK(rel_err(upper_gamma(0.5, 0.0), std::sqrt(kPi)) < 1e-13);
    CHECK(rel_err(upper_gamma(0.0, 1.0), 0.21938393439552) < 1e-11);

    // adaptive quadrature oracle for E_1 and Gamma(nu, z)
    for (double nu : {0.0, 0.5, 1.5, 2.0}) {
        for (double z : {0.3, 1.0, 2.5, 8.0}) {
            auto f = [&](double y) {
                return std::exp(-y + (nu - 1.0) * std::log(y));
            };
            const double want = testlab::integrate(f, z, z + 60.0, 1e-14);
            CHECK(rel_err(upper_gamma(nu, z), want) < 1e-9);
        }
    }

    for (double nu : {0.5, 1.0, 1.5, 2.0}) {
        CHECK(rel_err(upper_gamma(nu, 0.0), std::exp(std::lgamma(nu))) < 1e-10);
        // lower + upper == Gamma
        for (double z : {0.4, 2.0, 9.0}) {
            const double total = lower_gamma(nu, z) + upper_gamma(nu, z);
            CHECK(rel_err(total, std::exp(std::lgamma(nu))) < 1e-12);
        }
    }
    CHECK_THROWS_AS(upper_gamma(0.0, 0.0), std::domain_error);
}

TEST_CASE("n_of_lambda: refinement, monotonicity, asymptotic expansion") {
    const double n1a = n_of_lambda_at_depth(1.0, 6);
    const double n1b = n_of_lambda_at_depth(1.0, 9);
    CHECK(std::fabs(n1a - n1b) / n1b < 1e-8);

    CHECK(n_of_lambda(1.0) > n_of_lambda(2.0));
    CHECK_THROWS_AS(n_of_lambda(0.0), std::domain_error);

    // N(kappa t) = 1/lg t - (gamma + lg kappa)/(lg t)^2 + O(1/(lg t)^3)
    const double gamma = 0.5772156649015329;
    const double kappa = 2.0 * std::exp(-2.0 * gamma);
    const double t = 1e6;
    const double lg = std::log(t);
    const double want = 1.0 / lg - (gamma + std::log(kappa)) / (lg * lg);
    CHECK(std::fabs(n_of_lambda(kappa * t) - want) < 3.0 / (lg * lg * lg));
}

TEST_CASE("sphere_area and colatitude_weight normalization") {
    CHECK(rel_err(sphere_area(1), 2.0 * kPi) < 1e-13);
    CHECK(rel_err(sphere_area(2), 4.0 * kPi) < 1e-13);
    for (int d : {2, 3, 4, 5}) {
        auto f = [&](double th) { return colatitude_weight(d, th); };
        CHECK(std::fabs(testlab::integrate(f, 0.0, kPi, 1e-13) - 1.0) < 1e-10);
    }
}

TEST_CASE("series control validation") {
    CHECK_THROWS_AS(g_density(Order::from_dim(2), 1.0, 0.0,
                              SeriesControl{1e-2, 64}),
                    std::domain_error);
    CHECK_THROWS_AS(g_density(Order::from_dim(2), 1.0, 0.0,
                              SeriesControl{1e-12, 4}),
                    std::domain_error);
}
