#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "owcsim/vec3.hpp"

using namespace owcsim;
using Catch::Approx;

TEST_CASE("vector arithmetic behaves componentwise", "[vec3]") {
    Vec3 a{1.0, -2.0, 3.0};
    Vec3 b{0.5, 4.0, -1.0};

    Vec3 s = a + b;
    REQUIRE(s.x == 1.5);
    REQUIRE(s.y == 2.0);
    REQUIRE(s.z == 2.0);

    Vec3 d = a - b;
    REQUIRE(d.x == 0.5);
    REQUIRE(d.y == -6.0);
    REQUIRE(d.z == 4.0);

    Vec3 m = 2.0 * a;
    Vec3 m2 = a * 2.0;
    REQUIRE(m.x == m2.x);
    REQUIRE(m.y == -4.0);
    REQUIRE(m2.z == 6.0);
}

TEST_CASE("dot, norm and normalize", "[vec3]") {
    Vec3 a{3.0, 4.0, 0.0};
    REQUIRE(dot(a, a) == Approx(25.0));
    REQUIRE(norm(a) == Approx(5.0));

    Vec3 u = normalize(a);
    REQUIRE(norm(u) == Approx(1.0).epsilon(1e-15));
    REQUIRE(u.x == Approx(0.6));
    REQUIRE(u.y == Approx(0.8));

    REQUIRE(dot(Vec3{1, 0, 0}, Vec3{0, 1, 0}) == 0.0);
    REQUIRE_THROWS_AS(normalize(Vec3{0, 0, 0}), std::invalid_argument);
}

TEST_CASE("angle_between clamps rounding and covers the full range", "[vec3]") {
    Vec3 x{1, 0, 0}, y{0, 1, 0};
    REQUIRE(angle_between(x, y) == Approx(std::acos(0.0)));
    REQUIRE(angle_between(x, x) == 0.0);
    REQUIRE(angle_between(x, Vec3{-1, 0, 0}) == Approx(std::acos(-1.0)));

    // A dot product that rounds just past 1 must not yield NaN.
    Vec3 u = normalize(Vec3{1.0, 1.0, 1.0});
    double ang = angle_between(u, u);
    REQUIRE(std::isfinite(ang));
    REQUIRE(ang == Approx(0.0).margin(1e-7));

    // 45 degrees in the xz plane.
    Vec3 v = normalize(Vec3{1.0, 0.0, 1.0});
    REQUIRE(angle_between(v, Vec3{0, 0, 1}) == Approx(std::acos(1.0 / std::sqrt(2.0))));
}
