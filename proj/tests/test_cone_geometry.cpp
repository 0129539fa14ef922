#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "jmlab/cone_geometry.hpp"
#include "jmlab/rng.hpp"

#include "helpers.hpp"

using namespace jmlab;
using namespace jmlab::testhelp;
using doctest::Approx;

TEST_CASE("flattening map") {
    ConeSpec cone(0.5);
    FlattenedPoint f = flatten({2.0, kPi}, cone);
    CHECK(f.rho == 2.0);
    CHECK(f.phi == Approx(kPi / 2.0));
    CHECK_THROWS_AS(ConeSpec(0.0), std::invalid_argument);
    CHECK_THROWS_AS(ConeSpec(-1.0), std::invalid_argument);
}

TEST_CASE("cone distance basic identities") {
    ConeSpec cone(0.5);
    CHECK(cone_distance({1.0, 0.3}, {1.0, 0.3}, cone) == Approx(0.0));
    // same ray: radial difference
    CHECK(cone_distance({2.0, 1.0}, {0.5, 1.0}, cone) == Approx(1.5));
    // through the cone point when the developed gap reaches pi:
    // gap pi (flattened pi/2 < pi) stays a chord
    double chord = std::sqrt(2.0);  // rho 1, developed angle pi/2
    CHECK(cone_distance({1.0, 0.0}, {1.0, kPi}, cone) == Approx(chord));
    // antipodal-ish on a sharp cone: c * gap >= pi forces the vertex route
    ConeSpec sharp(0.2);
    CHECK(cone_distance({1.0, 0.0}, {2.0, kPi}, sharp) ==
          Approx(std::sqrt(1.0 + 4.0 - 2.0 * 2.0 * std::cos(0.2 * kPi))));
    // blunt cone, developed gap c * pi >= pi: the vertex route is optimal
    ConeSpec blunt(1.2);
    CHECK(cone_distance({1.0, 0.0}, {1.0, kPi}, blunt) == Approx(2.0));
}

TEST_CASE("vertex route only wins on sharp cones") {
    Rng rng(11);
    ConeSpec cone(0.5);
    for (int i = 0; i < 2000; ++i) {
        CirclePoint a{0.05 + 2.0 * rng.uniform(), 2.0 * kPi * rng.uniform()};
        CirclePoint b{0.05 + 2.0 * rng.uniform(), 2.0 * kPi * rng.uniform()};
        double d = cone_distance(a, b, cone);
        CHECK(d <= a.rho + b.rho + 1e-12);
        CHECK(d >= std::abs(a.rho - b.rho) - 1e-12);
        // strict inequality: geodesics never pass through the cone point
        CHECK(a.rho + b.rho - d > 1e-9);
    }
}

TEST_CASE("distance is symmetric and satisfies the triangle inequality") {
    Rng rng(5);
    ConeSpec cone(0.5);
    for (int i = 0; i < 500; ++i) {
        CirclePoint a{0.1 + rng.uniform(), 2.0 * kPi * rng.uniform()};
        CirclePoint b{0.1 + rng.uniform(), 2.0 * kPi * rng.uniform()};
        CirclePoint c{0.1 + rng.uniform(), 2.0 * kPi * rng.uniform()};
        double ab = cone_distance(a, b, cone);
        double ba = cone_distance(b, a, cone);
        CHECK(ab == Approx(ba).epsilon(1e-14));
        CHECK(ab <= cone_distance(a, c, cone) + cone_distance(c, b, cone) + 1e-12);
    }
}

TEST_CASE("apex verdicts on the half-angle cone") {
    ConeSpec cone(0.5);
    // every concatenation through the apex can be shortcut: the developed
    // circle has total angle pi, so some side is always < pi
    for (int i = 0; i < 72; ++i) {
        for (int j = 0; j < 72; ++j) {
            ApexVerdict v =
                apex_extendibility(cone, 2.0 * kPi * i / 72.0, 2.0 * kPi * j / 72.0);
            CHECK(v.classification == ApexClass::Inextendible);
            CHECK(v.margin > 0.0);
            CHECK(v.min_flattened_angle < kPi);
        }
    }
}

TEST_CASE("apex verdicts on a blunt cone") {
    // c > 1: rays developed more than pi apart on both sides do extend
    ConeSpec cone(1.2);
    ApexVerdict opposite = apex_extendibility(cone, 0.0, kPi);
    CHECK(opposite.classification == ApexClass::Geodesic);
    CHECK(opposite.min_flattened_angle >= kPi);
    // nearly parallel rays still get cut
    ApexVerdict close = apex_extendibility(cone, 0.0, 0.1);
    CHECK(close.classification == ApexClass::Inextendible);
    CHECK(close.margin > 0.0);
}

TEST_CASE("corner cut saving equals the margin at unit radius") {
    ConeSpec cone(0.5);
    ApexVerdict v = apex_extendibility(cone, 0.0, kPi);
    CornerCutResult cut = corner_cut(cone, 0.0, kPi, 1.0);
    CHECK(cut.apex_length == 2.0);
    CHECK(cut.saving == Approx(v.margin).epsilon(1e-14));
    CHECK(cut.length == Approx(2.0 * std::sin(kPi / 4.0)).epsilon(1e-14));

    // scaling: the cut at radius t saves t * (full margin), and the shortcut
    // length shrinks accordingly
    CornerCutResult half = corner_cut(cone, 0.0, kPi, 0.5);
    CHECK(half.saving == Approx(0.5 * v.margin).epsilon(1e-12));
    CHECK(half.points.size() >= 2);
    CHECK_THROWS_AS(corner_cut(cone, 0.0, kPi, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(corner_cut(cone, 0.0, kPi, 1.5), std::invalid_argument);
}

TEST_CASE("corner cut polyline starts and ends on the rays") {
    ConeSpec cone(0.5);
    CornerCutResult cut = corner_cut(cone, 0.3, 2.0, 0.8);
    REQUIRE(cut.points.size() == 4);
    // developed picture: unit incoming ray along the positive x-axis, the
    // shortcut leaves it at the cut radius and rejoins the outgoing ray
    CHECK(cut.points.front()[0] == Approx(1.0));
    CHECK(cut.points.front()[1] == Approx(0.0).epsilon(1e-14));
    CHECK(cut.points[1][0] == Approx(0.8));
    CHECK(cut.points[1][1] == Approx(0.0).epsilon(1e-14));
    CHECK(std::hypot(cut.points[2][0], cut.points[2][1]) == Approx(0.8));
    CHECK(std::hypot(cut.points.back()[0], cut.points.back()[1]) == Approx(1.0));
}
