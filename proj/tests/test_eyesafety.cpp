#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "owcsim/eyesafety.hpp"
#include "owcsim/geometry.hpp"

using namespace owcsim;
using Catch::Approx;

TEST_CASE("irradiance limits and apertures for the 1550 nm band", "[eyesafety]") {
    MpeResult long_exp = mpe_lookup(1550e-9, 100.0);
    REQUIRE(long_exp.e_mpe == Approx(1000.0).epsilon(1e-12));
    REQUIRE(long_exp.aperture == Approx(3.5e-3).epsilon(1e-12));

    MpeResult short_exp = mpe_lookup(1550e-9, 5.0);
    REQUIRE(short_exp.e_mpe == Approx(2000.0).epsilon(1e-12));
    REQUIRE(short_exp.aperture == Approx(2.7428686e-3).epsilon(1e-6));

    REQUIRE_THROWS_AS(mpe_lookup(1550e-9, 0.2), std::out_of_range);
    REQUIRE_THROWS_AS(mpe_lookup(1550e-9, 2000.0), std::out_of_range);
}

TEST_CASE("irradiance limits and apertures for the 850 nm band", "[eyesafety]") {
    MpeResult long_exp = mpe_lookup(850e-9, 100.0);
    REQUIRE(long_exp.e_mpe == Approx(19.952623).epsilon(1e-6));
    REQUIRE(long_exp.aperture == Approx(7e-3).epsilon(1e-12));

    MpeResult short_exp = mpe_lookup(850e-9, 5.0);
    REQUIRE(short_exp.e_mpe == Approx(24.017618).epsilon(1e-5));
    REQUIRE(short_exp.aperture == Approx(7e-3).epsilon(1e-12));

    REQUIRE_THROWS_AS(mpe_lookup(850e-9, 5e-4), std::out_of_range);
    REQUIRE_THROWS_AS(mpe_lookup(1000e-9, 100.0), std::out_of_range);
}

TEST_CASE("pupil exposure of the diverging beam", "[eyesafety]") {
    BeamParams b4 = BeamParams::from_fwhm(1550e-9, deg2rad(4.0), 0.060);
    REQUIRE(exposure_level(b4, 0.060, 0.1, 3.5e-3) == Approx(997.07997).epsilon(1e-6));

    // Farther away the beam is wider and the pupil-averaged exposure drops.
    double prev = exposure_level(b4, 0.060, 0.05, 3.5e-3);
    for (double z = 0.1; z <= 2.0; z += 0.1) {
        double e = exposure_level(b4, 0.060, z, 3.5e-3);
        REQUIRE(e < prev);
        prev = e;
    }

    REQUIRE_THROWS_AS(exposure_level(b4, -0.01, 0.1, 3.5e-3), std::invalid_argument);
    REQUIRE_THROWS_AS(exposure_level(b4, 0.060, -0.1, 3.5e-3), std::invalid_argument);
    REQUIRE_THROWS_AS(exposure_level(b4, 0.060, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("power ceilings for the three array divergences", "[eyesafety]") {
    double p2 = max_transmit_power(1550e-9, deg2rad(2.0), 100.0);
    double p4 = max_transmit_power(1550e-9, deg2rad(4.0), 100.0);
    double p6 = max_transmit_power(1550e-9, deg2rad(6.0), 100.0);
    REQUIRE(p2 == Approx(0.0191716).epsilon(1e-4));
    REQUIRE(p4 == Approx(0.0601757).epsilon(1e-4));
    REQUIRE(p6 == Approx(0.12913).epsilon(1e-4));

    // Wider beams spread the power over more area, so the ceiling rises.
    REQUIRE(p2 < p4);
    REQUIRE(p4 < p6);

    // The enforced exposure at the hazard point equals the limit exactly.
    MpeResult mpe = mpe_lookup(1550e-9, 100.0);
    BeamParams b4 = BeamParams::from_fwhm(1550e-9, deg2rad(4.0), p4);
    REQUIRE(exposure_level(b4, p4, kMostHazardousPosition, mpe.aperture) ==
            Approx(mpe.e_mpe).epsilon(1e-12));

    // Same geometry at 850 nm allows far less power.
    REQUIRE(max_transmit_power(850e-9, deg2rad(4.0), 100.0) < p4);
}

TEST_CASE("deployment powers floor the ceiling to whole milliwatts", "[eyesafety]") {
    REQUIRE(default_transmit_power(1550e-9, deg2rad(2.0)) == Approx(0.019).margin(1e-12));
    REQUIRE(default_transmit_power(1550e-9, deg2rad(4.0)) == Approx(0.060).margin(1e-12));
    REQUIRE(default_transmit_power(1550e-9, deg2rad(6.0)) == Approx(0.129).margin(1e-12));
}
