#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "owcsim/lambertw.hpp"

using namespace owcsim;
using Catch::Approx;

TEST_CASE("principal branch values at landmarks", "[lambertw]") {
    REQUIRE(lambert_w0(0.0) == 0.0);
    // Omega constant: W(1).
    REQUIRE(lambert_w0(1.0) == Approx(0.5671432904097838).epsilon(1e-14));
    REQUIRE(lambert_w0(std::exp(1.0)) == Approx(1.0).epsilon(1e-13));
    // Branch point.
    double inv_e = std::exp(-1.0);
    REQUIRE(lambert_w0(-inv_e) == Approx(-1.0).margin(1e-7));
    REQUIRE(lambert_w0(2.0 * std::exp(2.0)) == Approx(2.0).epsilon(1e-13));
}

TEST_CASE("defining identity holds to 1e-12 across the domain", "[lambertw]") {
    auto check = [](double x) {
        double w = lambert_w0(x);
        double resid = std::abs(w * std::exp(w) - x);
        REQUIRE(resid <= 1e-12 * std::max(1.0, std::abs(x)));
    };

    // Dense linear sweep through the negative lobe and the origin.
    double inv_e = std::exp(-1.0);
    for (int i = 0; i <= 4000; ++i) {
        double x = -inv_e + (2.0 + inv_e) * i / 4000.0;
        check(x);
    }
    // Log sweep out to large arguments.
    for (int i = 0; i <= 6000; ++i) {
        double x = std::pow(10.0, -3.0 + 9.0 * i / 6000.0);
        check(x);
    }
}

TEST_CASE("monotone increasing on the principal branch", "[lambertw]") {
    double prev = lambert_w0(-std::exp(-1.0) + 1e-9);
    for (int i = 1; i <= 500; ++i) {
        double x = -std::exp(-1.0) + 1e-9 + i * 0.2;
        double w = lambert_w0(x);
        REQUIRE(w > prev);
        prev = w;
    }
}

TEST_CASE("arguments below the branch point are rejected", "[lambertw]") {
    REQUIRE_THROWS_AS(lambert_w0(-0.4), std::domain_error);
    REQUIRE_THROWS_AS(lambert_w0(-1.0), std::domain_error);
    // Rounding fuzz just below -1/e is tolerated instead.
    REQUIRE(lambert_w0(-std::exp(-1.0) - 5e-16) == -1.0);
}

TEST_CASE("log-argument form agrees with the direct branch and scales up", "[lambertw]") {
    // Below the overflow threshold both paths must agree to round-off.
    for (double l : {-2.0, 0.0, 1.0, 10.0, 100.0, 650.0}) {
        REQUIRE(lambert_w0_exp(l) == Approx(lambert_w0(std::exp(l))).epsilon(1e-14));
    }
    // Far beyond it, verify the defining identity w + log(w) = l.
    for (double l : {705.0, 1000.0, 1137.7, 1e4, 1e6}) {
        double w = lambert_w0_exp(l);
        REQUIRE(w + std::log(w) == Approx(l).epsilon(1e-13));
        REQUIRE(w > 0.0);
        REQUIRE(w < l);
    }
}
