#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fermigas/special.hpp"
#include "fermigas/quadrature.hpp"
#include "oracles.hpp"

using namespace fermigas;
using Catch::Approx;

TEST_CASE("gamma_fn exact ladder", "[special]") {
    CHECK(special::gamma_fn(1.0) == Approx(1.0).epsilon(1e-15));
    CHECK(special::gamma_fn(2.0) == Approx(1.0).epsilon(1e-15));
    CHECK(special::gamma_fn(3.0) == Approx(2.0).epsilon(1e-15));
    CHECK(special::gamma_fn(0.5) == Approx(std::sqrt(kPi)).epsilon(1e-15));
    CHECK(special::gamma_fn(2.5) == Approx(0.75 * std::sqrt(kPi)).epsilon(1e-15));
    CHECK(special::gamma_fn(2.5) == Approx(1.3293403881791370).epsilon(1e-12));
    CHECK_THROWS_AS(special::gamma_fn(7.0), ArgumentUnsupported);
    CHECK_THROWS_AS(special::gamma_fn(1.25), ArgumentUnsupported);
}

TEST_CASE("bessel closed-form spot values", "[special]") {
    // J_{3/2}(pi) = sqrt(2/pi)/pi^{1/2} ... = sqrt(2)/pi
    CHECK(special::bessel_j(1.5, kPi) == Approx(std::sqrt(2.0) / kPi).epsilon(1e-13));
    CHECK(std::abs(special::bessel_j(0.5, kPi)) < 1e-14);
    // leading series behavior of J_1
    for (double r : {1e-3, 1e-5})
        CHECK(special::bessel_j(1.0, r) == Approx(0.5 * r).epsilon(1e-6));
    CHECK_THROWS_AS(special::bessel_j(3.0, 1.0), OrderUnsupported);
    CHECK_THROWS_AS(special::bessel_j(1.0, -1.0), ArgumentUnsupported);
}

TEST_CASE("bessel matches the extended-precision series", "[special]") {
    for (double nu : {0.5, 1.0, 1.5, 2.0})
        for (double r : {0.05, 0.3, 0.49, 0.51, 1.0, 2.0, 5.0, 8.0, 11.9}) {
            const double ref = static_cast<double>(
                oracles::bessel_series(static_cast<long double>(nu), r));
            CHECK(special::bessel_j(nu, r) ==
                  Approx(ref).epsilon(1e-12).margin(1e-15));
        }
}

TEST_CASE("bessel matches the standard library across (0,200]", "[special]") {
    for (double nu : {0.5, 1.0, 1.5, 2.0})
        for (double r = 0.25; r <= 200.0; r += 3.1415) {
            const double ref = std::cyl_bessel_j(nu, r);
            CHECK(special::bessel_j(nu, r) == Approx(ref).epsilon(5e-12).margin(1e-13));
        }
}

TEST_CASE("bessel recurrence residual", "[special]") {
    for (double r = 0.1; r <= 100.0; r *= 1.37) {
        for (double nu : {1.0, 1.5}) {
            const double res = special::bessel_j(nu - 1.0, r) + special::bessel_j(nu + 1.0, r) -
                               (2.0 * nu / r) * special::bessel_j(nu, r);
            CHECK(std::abs(res) < 1e-10);
        }
    }
}

TEST_CASE("limit profile small-argument normalization", "[special]") {
    for (int n : {2, 3})
        for (double r : {1e-3, 1e-5})
            CHECK(special::limit_profile(n, r) == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("ball indicator transform", "[special]") {
    // value at y = 0 is the ball volume
    CHECK(special::ball_indicator_hat(3, 1.0, 0.0) ==
          Approx(4.0 * kPi / 3.0).epsilon(1e-14));
    // first zero of J_1 kills the 2-d transform
    const double j11 = 3.8317059702075123;
    CHECK(std::abs(special::ball_indicator_hat(2, 1.0, j11)) < 1e-8);

    // radial quadrature oracle in 3-d: int_{B_2} e^{-i y.x} dx with |y| = 1
    const double gamma = 2.0, s = 1.0;
    const double ref = 4.0 * kPi *
                       adaptive_simpson(
                           [&](double r) {
                               return r * std::sin(r * s) / s;
                           },
                           0.0, gamma, 1e-12);
    CHECK(special::ball_indicator_hat(3, gamma, s) == Approx(ref).epsilon(1e-10));

    // and in 2-d through J_0
    const double ref2 = 2.0 * kPi *
                        adaptive_simpson(
                            [&](double r) {
                                return r * special::bessel_j(0.0, 1.7 * r);
                            },
                            0.0, 1.3, 1e-12);
    CHECK(special::ball_indicator_hat(2, 1.3, 1.7) == Approx(ref2).epsilon(1e-10));
}

TEST_CASE("ball indicator Plancherel mass", "[special]") {
    for (int n : {2, 3}) {
        const double gamma = n == 2 ? 1.3 : 1.0;
        const double surface = n == 2 ? 2.0 * kPi : 4.0 * kPi;
        auto f = [&](double r) {
            const double v = special::ball_indicator_hat(n, gamma, r);
            return v * v * std::pow(r, n - 1);
        };
        const double R = 5000.0;
        double integral = adaptive_simpson(f, 0.0, 50.0, 1e-9);
        integral += simpson(f, 50.0, R, 400000);
        // oscillation-averaged envelope tail: mean J_nu(x)^2 ~ 1/(pi x)
        const double vol = special::ball_volume(n, gamma);
        const double gam = special::gamma_fn(0.5 * n + 1.0);
        integral += vol * vol * std::pow(2.0, n) * gam * gam /
                    (kPi * std::pow(gamma, n + 1) * R);
        const double mass = surface * integral / std::pow(2.0 * kPi, n);
        CHECK(mass == Approx(special::ball_volume(n, gamma)).epsilon(1e-4));
    }
}

TEST_CASE("schafheitlin closed form and quadrature", "[special]") {
    const auto s3 = special::schafheitlin(3);
    CHECK(s3.closed == Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));
    CHECK(s3.closed == Approx(0.15915494309189535).epsilon(1e-12));
    CHECK(std::abs(s3.quadrature - s3.closed) < 1e-6);

    const auto s2 = special::schafheitlin(2);
    CHECK(s2.closed == Approx(4.0 / (3.0 * kPi)).epsilon(1e-15));
    CHECK(s2.closed == Approx(0.42441318157838756).epsilon(1e-12));
    CHECK(std::abs(s2.quadrature - s2.closed) < 1e-6);
}
