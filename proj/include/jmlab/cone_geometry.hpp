#pragma once

#include <array>
#include <vector>

#include "jmlab/types.hpp"

namespace jmlab {

// Point on the cone over a circle of radius c: metric drho^2 + c^2 rho^2
// dtheta^2, theta taken mod 2 pi. rho = 0 is the cone point regardless of
// theta.
struct CirclePoint {
    double rho;
    double theta;
};

struct ConeSpec {
    double c;  // > 0; c < 1 is the singular (sharper than flat) case

    explicit ConeSpec(double c_);
};

// Developing map onto the flat plane: (rho, theta) -> (rho, c * theta).
struct FlattenedPoint {
    double rho;
    double phi;
};

FlattenedPoint flatten(const CirclePoint& p, const ConeSpec& cone);

// Exact geodesic distance on the cone. With the angular gap reduced to
// [0, pi], the chord of the developed picture wins while c * gap < pi;
// otherwise the geodesic passes through the cone point and the distance is
// rho1 + rho2.
double cone_distance(const CirclePoint& a, const CirclePoint& b, const ConeSpec& cone);

enum class ApexClass { Inextendible, Geodesic };

// Verdict for the concatenation of two unit-speed rays meeting at the cone
// point. min_flattened_angle is the smaller of the two developed angles
// between the rays (going either way around); the concatenation is a
// geodesic iff that angle is >= pi. margin is the length saved by the
// radius-1 corner cut when it is not.
struct ApexVerdict {
    ApexClass classification;
    double margin;
    double min_flattened_angle;
};

ApexVerdict apex_extendibility(const ConeSpec& cone, double incoming_theta,
                               double outgoing_theta);

// Shortcut path that leaves the incoming unit ray at cut_radius, crosses to
// the outgoing ray along the developed chord, and rejoins it. Points are in
// the developed plane with the incoming ray on the positive x-axis.
struct CornerCutResult {
    std::vector<std::array<double, 2>> points;
    double length;       // of the shortcut
    double apex_length;  // 2, the through-apex comparison path
    double saving;       // apex_length - length, > 0 iff the corner was cuttable
};

// Requires 0 < cut_radius <= 1 (the rays have unit length).
CornerCutResult corner_cut(const ConeSpec& cone, double incoming_theta,
                           double outgoing_theta, double cut_radius);

} // namespace jmlab
