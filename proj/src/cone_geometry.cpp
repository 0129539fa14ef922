#include "jmlab/cone_geometry.hpp"

#include <cmath>

namespace jmlab {

namespace {

constexpr double kPi = 3.141592653589793238462643;
constexpr double kTwoPi = 2.0 * kPi;

// Angular gap reduced to [0, pi].
double reduced_gap(double t1, double t2) {
    double d = std::fmod(std::abs(t1 - t2), kTwoPi);
    return std::min(d, kTwoPi - d);
}

void check_point(const CirclePoint& p) {
    if (!(p.rho >= 0.0)) throw std::invalid_argument("rho must be nonnegative");
    if (!std::isfinite(p.theta)) throw std::invalid_argument("theta must be finite");
}

} // namespace

ConeSpec::ConeSpec(double c_) : c(c_) {
    if (!(c > 0.0)) throw std::invalid_argument("cone ratio c must be positive");
}

FlattenedPoint flatten(const CirclePoint& p, const ConeSpec& cone) {
    check_point(p);
    return FlattenedPoint{p.rho, cone.c * p.theta};
}

double cone_distance(const CirclePoint& a, const CirclePoint& b, const ConeSpec& cone) {
    check_point(a);
    check_point(b);
    if (a.rho == 0.0 || b.rho == 0.0) return a.rho + b.rho;
    double beta = cone.c * reduced_gap(a.theta, b.theta);
    if (beta < kPi) {
        double d2 = a.rho * a.rho + b.rho * b.rho - 2.0 * a.rho * b.rho * std::cos(beta);
        return std::sqrt(std::max(d2, 0.0));
    }
    return a.rho + b.rho;
}

ApexVerdict apex_extendibility(const ConeSpec& cone, double incoming_theta,
                               double outgoing_theta) {
    if (!std::isfinite(incoming_theta) || !std::isfinite(outgoing_theta))
        throw std::invalid_argument("angles must be finite");
    double gap = reduced_gap(incoming_theta, outgoing_theta);
    // The two developed angles between the rays, going either way around the
    // cone point; the concatenation is locally minimizing iff both are >= pi.
    double beta_min = cone.c * gap;  // = min(c * gap, c * (2 pi - gap))
    if (beta_min < kPi) {
        double margin = 2.0 - 2.0 * std::sin(beta_min / 2.0);
        return ApexVerdict{ApexClass::Inextendible, margin, beta_min};
    }
    return ApexVerdict{ApexClass::Geodesic, 0.0, beta_min};
}

CornerCutResult corner_cut(const ConeSpec& cone, double incoming_theta,
                           double outgoing_theta, double cut_radius) {
    if (!(cut_radius > 0.0) || !(cut_radius <= 1.0))
        throw std::invalid_argument("cut_radius must lie in (0, 1]");
    ApexVerdict verdict = apex_extendibility(cone, incoming_theta, outgoing_theta);
    double beta = verdict.min_flattened_angle;
    double t = cut_radius;

    CornerCutResult out;
    out.points.push_back({1.0, 0.0});
    if (t < 1.0) out.points.push_back({t, 0.0});
    out.points.push_back({t * std::cos(beta), t * std::sin(beta)});
    if (t < 1.0) out.points.push_back({std::cos(beta), std::sin(beta)});
    out.apex_length = 2.0;
    out.length = 2.0 * (1.0 - t) + 2.0 * t * std::sin(std::min(beta, kPi) / 2.0);
    out.saving = out.apex_length - out.length;
    return out;
}

} // namespace jmlab
