#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fermigas/weyl.hpp"
#include "oracles.hpp"

using namespace fermigas;
using Catch::Approx;

TEST_CASE("gamma closed forms", "[weyl]") {
    const auto square = DomainSpec::rectangle({1.0, 1.0});
    CHECK(gamma_omega(square) == Approx(2.0 * std::sqrt(kPi)).epsilon(1e-14));
    CHECK(gamma_omega(square) == Approx(3.5449077).epsilon(1e-6));

    const auto cube = DomainSpec::rectangle({1.0, 1.0, 1.0});
    CHECK(gamma_omega(cube) == Approx(std::cbrt(6.0 * kPi * kPi)).epsilon(1e-13));
    CHECK(gamma_omega(cube) == Approx(3.8977771).epsilon(1e-6));

    const auto rect4 = DomainSpec::rectangle({2.0, 2.0});
    CHECK(gamma_omega(rect4) == Approx(0.5 * gamma_omega(square)).epsilon(1e-14));
}

TEST_CASE("phase-space mass is one on the whole catalog", "[weyl]") {
    std::vector<DomainSpec> catalog;
    catalog.push_back(DomainSpec::rectangle({1.0, 1.0}));
    catalog.push_back(DomainSpec::rectangle({1.0, 2.0}));
    catalog.push_back(DomainSpec::rectangle({1.0, 1.0, 1.0}));
    catalog.push_back(DomainSpec::disk(1.0));
    catalog.push_back(DomainSpec::l_shape({1.0, 1.0}, {0.5, 0.5}));
    catalog.push_back(DomainSpec::polygon({{0, 0}, {1, 0}, {0.5, 1}}));
    for (const auto& d : catalog)
        CHECK(weyl_constants(d).phase_space_mass() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("counting function", "[weyl]") {
    const auto basis = analytic_basis_box({1.0, 1.0}, BC::dirichlet, 8);
    CHECK(counting(basis, 2.0 * kPi * kPi) == 1);
    CHECK(counting(basis, 5.0 * kPi * kPi) == 3);
    CHECK(counting(basis, 1.0) == 0);
    CHECK_THROWS_AS(counting(basis, 1e9), LambdaBeyondComputed);

    // nondecreasing right-continuous step behavior
    int prev = 0;
    for (double lam = 10.0; lam < basis.eigenvalues.back(); lam += 3.7) {
        const int c = counting(basis, lam);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("weyl ratio approaches one", "[weyl]") {
    const auto square = analytic_basis_box({1.0, 1.0}, BC::dirichlet, 4096);
    CHECK(weyl_ratio(square, 1) ==
          Approx(2.0 * std::sqrt(kPi) / std::sqrt(2.0 * kPi * kPi)).epsilon(1e-13));
    CHECK(weyl_ratio(square, 1) == Approx(0.798).margin(5e-4));
    CHECK(std::abs(weyl_ratio(square, 4096) - 1.0) <= 0.03);

    const auto cube = analytic_basis_box({1.0, 1.0, 1.0}, BC::dirichlet, 4096);
    CHECK(std::abs(weyl_ratio(cube, 4096) - 1.0) <= 0.05);

    CHECK_THROWS_AS(weyl_ratio(square, 0), IndexOutOfRange);
    CHECK_THROWS_AS(weyl_ratio(square, 4097), IndexOutOfRange);
}

TEST_CASE("weyl ratio is scale invariant", "[weyl]") {
    const auto unit = analytic_basis_box({1.0, 1.0}, BC::dirichlet, 64);
    const auto doubled = analytic_basis_box({2.0, 2.0}, BC::dirichlet, 64);
    for (int k = 1; k <= 64; ++k)
        CHECK(weyl_ratio(unit, k) == Approx(weyl_ratio(doubled, k)).epsilon(1e-12));
}

TEST_CASE("counting slope over the top decade", "[weyl]") {
    const auto square = analytic_basis_box({1.0, 1.0}, BC::dirichlet, 4096);
    const double slope = counting_slope_top_decade(square);
    CHECK(slope >= 0.95);
    CHECK(slope <= 1.05);
}

TEST_CASE("fermi momentum", "[weyl]") {
    const auto cube = DomainSpec::rectangle({1.0, 1.0, 1.0});
    CHECK(fermi_momentum(cube, 1) == Approx(gamma_omega(cube)).epsilon(1e-15));
    CHECK(fermi_momentum(cube, 1) == Approx(3.8977771).epsilon(1e-6));
    CHECK(fermi_momentum(cube, 2) == Approx(std::cbrt(3.0 * kPi * kPi)).epsilon(1e-13));
    CHECK(fermi_momentum(cube, 2) == Approx(3.09367).epsilon(1e-5));
    CHECK_THROWS_AS(fermi_momentum(cube, 0), ConfigError);
}
