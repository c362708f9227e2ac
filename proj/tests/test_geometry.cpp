#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>

#include "owcsim/geometry.hpp"

using namespace owcsim;
using Catch::Approx;

TEST_CASE("degree and radian conversions invert each other", "[geometry]") {
    REQUIRE(deg2rad(180.0) == Approx(kPi).epsilon(1e-15));
    REQUIRE(rad2deg(kPi / 2.0) == Approx(90.0).epsilon(1e-15));
    REQUIRE(rad2deg(deg2rad(37.25)) == Approx(37.25).epsilon(1e-14));
}

TEST_CASE("link angles for a straight-down transmitter", "[geometry]") {
    Vec3 p_tx{0.0, 0.0, 3.5};
    Vec3 n_tx{0.0, 0.0, -1.0};

    // Receiver on the axis: all angles vanish.
    AnglesResult on = angles(p_tx, n_tx, {0.0, 0.0, 1.5}, {0.0, 0.0, 1.0});
    REQUIRE(on.distance == Approx(2.0).epsilon(1e-15));
    REQUIRE(on.radiance == Approx(0.0).margin(1e-12));
    REQUIRE(on.incidence == Approx(0.0).margin(1e-12));

    // Receiver offset 10 cm sideways at 2 m drop.
    AnglesResult off = angles(p_tx, n_tx, {0.1, 0.0, 1.5}, {0.0, 0.0, 1.0});
    REQUIRE(off.distance == Approx(2.002498439450079).epsilon(1e-12));
    REQUIRE(rad2deg(off.radiance) == Approx(2.862405226111749).epsilon(1e-10));
    REQUIRE(off.incidence == Approx(off.radiance).epsilon(1e-12));

    // Flipping the receiver face supplements the incidence angle.
    AnglesResult flip = angles(p_tx, n_tx, {0.1, 0.0, 1.5}, {0.0, 0.0, -1.0});
    REQUIRE(rad2deg(flip.incidence) == Approx(180.0 - 2.862405226111749).epsilon(1e-10));
    REQUIRE(flip.radiance == Approx(off.radiance).epsilon(1e-15));

    REQUIRE_THROWS_AS(angles(p_tx, n_tx, p_tx, {0.0, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("grid array construction invariants", "[geometry]") {
    BeamArrayLayout g = build_grid_array(10, 0.1, 3.0, 1.0, 0.02);
    REQUIRE(g.n_beams() == 100);
    REQUIRE(g.ue_height == 1.0);

    Rect fp = g.footprint();
    REQUIRE(fp.xmin == Approx(-0.5));
    REQUIRE(fp.xmax == Approx(0.5));
    REQUIRE(fp.ymin == Approx(-0.5));
    REQUIRE(fp.ymax == Approx(0.5));

    // First site sits at the low corner of both grids.
    REQUIRE(g.beams[0].p_tx.x == Approx(-0.09));
    REQUIRE(g.beams[0].p_tx.y == Approx(-0.09));
    REQUIRE(g.beams[0].p_tx.z == 3.0);
    REQUIRE(g.beams[0].p_cell.x == Approx(-0.45));
    REQUIRE(g.beams[0].p_cell.y == Approx(-0.45));
    REQUIRE(g.beams[0].p_cell.z == 1.0);

    for (const BeamSite& s : g.beams) {
        REQUIRE(norm(s.n_tx) == Approx(1.0).epsilon(1e-12));
        // Aiming direction actually points from the launch point to the cell.
        Vec3 expect = normalize(s.p_cell - s.p_tx);
        REQUIRE(s.n_tx.x == Approx(expect.x).margin(1e-15));
        REQUIRE(s.n_tx.y == Approx(expect.y).margin(1e-15));
        REQUIRE(s.n_tx.z == Approx(expect.z).margin(1e-15));
        REQUIRE(s.n_tx.z < 0.0);
    }

    // Row-major indexing: row 3, col 7.
    const BeamSite& s37 = g.beams[3 * 10 + 7];
    REQUIRE(s37.p_cell.x == Approx((7 - 4.5) * 0.1));
    REQUIRE(s37.p_cell.y == Approx((3 - 4.5) * 0.1));
}

TEST_CASE("cell lookup round-trips beam indices and clamps edges", "[geometry]") {
    BeamArrayLayout g = build_grid_array(10, 0.1, 3.0, 1.0, 0.02);
    for (std::size_t i = 0; i < g.n_beams(); ++i) {
        auto idx = g.cell_index_of(g.beams[i].p_cell.x, g.beams[i].p_cell.y);
        REQUIRE(idx.has_value());
        REQUIRE(*idx == i);
    }
    // Upper edges belong to the last row/column instead of falling out.
    auto top = g.cell_index_of(0.5, 0.5);
    REQUIRE(top.has_value());
    REQUIRE(*top == 99);
    auto low = g.cell_index_of(-0.5, -0.5);
    REQUIRE(low.has_value());
    REQUIRE(*low == 0);
    REQUIRE_FALSE(g.cell_index_of(0.51, 0.0).has_value());
    REQUIRE_FALSE(g.cell_index_of(0.0, -0.6).has_value());
}

TEST_CASE("grid array rejects degenerate parameters", "[geometry]") {
    REQUIRE_THROWS_AS(build_grid_array(0, 0.1, 3.0, 1.0, 0.02), std::invalid_argument);
    REQUIRE_THROWS_AS(build_grid_array(10, -0.1, 3.0, 1.0, 0.02), std::invalid_argument);
    REQUIRE_THROWS_AS(build_grid_array(10, 0.1, 1.0, 1.0, 0.02), std::invalid_argument);
    REQUIRE_THROWS_AS(build_grid_array(10, 0.1, 3.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("orientation sampling per model", "[geometry]") {
    OrientationModel fixed;
    fixed.kind = OrientationKind::fixed_up;
    RngStream rng = derive_stream(11, 100);
    Vec3 up = sample_orientation(fixed, rng);
    REQUIRE(up.x == 0.0);
    REQUIRE(up.y == 0.0);
    REQUIRE(up.z == 1.0);

    OrientationModel gauss;
    gauss.kind = OrientationKind::gaussian_elevation;
    const int n = 200000;
    double sum_elev = 0.0;
    for (int i = 0; i < n; ++i) {
        Vec3 v = sample_orientation(gauss, rng);
        REQUIRE(norm(v) == Approx(1.0).epsilon(1e-12));
        double elev = std::acos(std::min(1.0, v.z));
        REQUIRE(elev >= 0.0);
        REQUIRE(elev < kPi / 2.0);
        sum_elev += elev;
    }
    REQUIRE(rad2deg(sum_elev / n) == Approx(41.0).margin(0.15));

    OrientationModel unif;
    unif.kind = OrientationKind::uniform_elevation;
    double mx = 0.0, sum_u = 0.0;
    for (int i = 0; i < n; ++i) {
        Vec3 v = sample_orientation(unif, rng);
        double elev = std::acos(std::min(1.0, v.z));
        REQUIRE(elev >= 0.0);
        REQUIRE(elev <= deg2rad(45.0) + 1e-12);
        mx = std::max(mx, elev);
        sum_u += elev;
    }
    REQUIRE(rad2deg(mx) > 44.5);
    REQUIRE(rad2deg(sum_u / n) == Approx(22.5).margin(0.2));
}

TEST_CASE("azimuth of sampled orientations is symmetric", "[geometry]") {
    OrientationModel gauss;
    gauss.kind = OrientationKind::gaussian_elevation;
    RngStream rng = derive_stream(13, 101);
    double sx = 0.0, sy = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        Vec3 v = sample_orientation(gauss, rng);
        sx += v.x;
        sy += v.y;
    }
    REQUIRE(sx / n == Approx(0.0).margin(0.01));
    REQUIRE(sy / n == Approx(0.0).margin(0.01));
}

TEST_CASE("random waypoint walker stays in bounds and respects the speed", "[geometry]") {
    MobilityParams mob{1.0, {0.0, 1.0, 0.0, 1.0}, 0.0};
    UeState st;
    st.position = {0.5, 0.5, 1.0};
    RngStream rng = derive_stream(21, 200);
    const double dt = 0.01;
    double var_acc = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        Vec3 before = st.position;
        st = random_waypoint_step(st, mob, dt, rng);
        REQUIRE(st.position.x >= -1e-12);
        REQUIRE(st.position.x <= 1.0 + 1e-12);
        REQUIRE(st.position.y >= -1e-12);
        REQUIRE(st.position.y <= 1.0 + 1e-12);
        REQUIRE(st.position.z == 1.0);
        double moved = norm(st.position - before);
        REQUIRE(moved <= mob.speed * dt + 1e-9);
        double cx = st.position.x - 0.5, cy = st.position.y - 0.5;
        var_acc += 0.5 * (cx * cx + cy * cy);
    }
    // Waypoint traversal concentrates the walker toward the center: the
    // per-axis spread must sit clearly below the uniform value 1/12.
    REQUIRE(var_acc / n < 0.075);
    REQUIRE(var_acc / n > 0.01);
}

TEST_CASE("random waypoint pauses and degenerate inputs", "[geometry]") {
    MobilityParams mob{2.0, {0.0, 1.0, 0.0, 1.0}, 0.5};
    UeState st;
    st.position = {0.2, 0.2, 1.0};
    RngStream rng = derive_stream(22, 201);
    int still = 0;
    for (int i = 0; i < 5000; ++i) {
        Vec3 before = st.position;
        st = random_waypoint_step(st, mob, 0.01, rng);
        if (norm(st.position - before) == 0.0) still++;
    }
    REQUIRE(still > 0);  // pause periods freeze the walker

    MobilityParams frozen{0.0, {0.0, 1.0, 0.0, 1.0}, 0.0};
    UeState s2;
    s2.position = {0.3, 0.7, 1.0};
    UeState s3 = random_waypoint_step(s2, frozen, 0.01, rng);
    REQUIRE(s3.position.x == s2.position.x);
    REQUIRE(s3.position.y == s2.position.y);

    REQUIRE_THROWS_AS(random_waypoint_step(s2, mob, -0.01, rng), std::invalid_argument);
    MobilityParams bad{-1.0, {0.0, 1.0, 0.0, 1.0}, 0.0};
    REQUIRE_THROWS_AS(random_waypoint_step(s2, bad, 0.01, rng), std::invalid_argument);
}

TEST_CASE("rect containment", "[geometry]") {
    Rect r{-1.0, 2.0, 0.5, 1.5};
    REQUIRE(r.contains(0.0, 1.0));
    REQUIRE(r.contains(-1.0, 0.5));
    REQUIRE(r.contains(2.0, 1.5));
    REQUIRE_FALSE(r.contains(-1.01, 1.0));
    REQUIRE_FALSE(r.contains(0.0, 1.51));
}
