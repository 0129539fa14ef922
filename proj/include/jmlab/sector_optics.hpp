#pragma once

#include <array>
#include <optional>
#include <vector>

#include "jmlab/potentials.hpp"
#include "jmlab/types.hpp"

namespace jmlab {

// One angular sector [begin, end] of the developed half-plane with a
// constant index of refraction: lengths inside it are index * (Euclidean
// length).
struct Sector {
    double begin;
    double end;
    double index;
};

// Piecewise-constant refraction metric on the developed wedge
// { (rho, psi) : rho >= 0, 0 <= psi <= opening }, opening = c * pi < pi.
// The wedge is convex, so straight segments between points of the wedge
// stay inside it.
class SectorMetric {
public:
    // Sectors must tile [0, opening] contiguously with positive indices.
    SectorMetric(std::vector<Sector> sectors, double cone_ratio, Convention conv,
                 std::optional<StepShapeParams> step = std::nullopt);

    const std::vector<Sector>& sectors() const { return sectors_; }
    double opening() const { return opening_; }
    double cone_ratio() const { return cone_ratio_; }
    Convention convention() const { return convention_; }
    const std::optional<StepShapeParams>& step_params() const { return step_; }

    int sector_of(double psi) const;   // clamps psi into [0, opening]
    double index_at(double psi) const;

    // Weighted length of the straight segment between two points of the
    // wedge (developed coordinates), split exactly at sector boundaries.
    double segment_weight(double x1, double y1, double x2, double y2) const;

private:
    std::vector<Sector> sectors_;
    double opening_;
    double cone_ratio_;
    Convention convention_;
    std::optional<StepShapeParams> step_;
};

// The three-sector metric of the equatorial-band construction: outer
// sectors of width c (pi - phi*) / 2 around both bounding rays and a middle
// band of width c phi*, phi* = 2 asin(delta). Indices are the step values
// (Literal) or their square roots (JmConsistent).
SectorMetric build_counterexample_sector(const StepShapeParams& params, double alpha,
                                         Convention conv);

// Length of the symmetric pole-to-pole candidate path that enters the band
// at radius x: two outer legs of length sqrt(1 + x^2 - 2 x cos psi1) and a
// band chord of length 2 x sin(psi2 / 2),
//   S(x) = 2 n1 sqrt(1 + x^2 - 2 x cos psi1) + 2 n2 x sin(psi2 / 2).
// Requires a symmetric three-sector metric and x >= 0.
double test_curve_length(const SectorMetric& metric, double x);

// dS/dx = 2 n1 (x - cos psi1) / sqrt(1 + x^2 - 2 x cos psi1)
//         + 2 n2 sin(psi2 / 2).
double test_curve_derivative(const SectorMetric& metric, double x);

enum class TestCurveClass { CollisionPath, InteriorMinimizer };

// Minimum of S over x >= 0. S is strictly convex, so either the one-sided
// slope at 0 is >= 0 and the vertex path wins (x = 0, ties included), or
// the unique interior root of dS/dx is the minimizer (closed form).
struct TestCurveMinimum {
    double x_star;
    double length;
    TestCurveClass classification;
};

TestCurveMinimum minimize_test_curve(const SectorMetric& metric);

// Band index at which the slope at x = 0 changes sign:
//   n2* = n1 cos(psi1) / sin(psi2 / 2).
// Below it the minimizer is interior; at or above it the vertex path wins.
double critical_index(double psi1, double psi2, double n1);

// Sufficient condition for the vertex path to win, stated on the raw step
// parameters: band * c * delta >= outer under the Literal convention, and
// sqrt(band) * c * delta >= sqrt(outer) under JmConsistent. Sufficient but
// not necessary (the true threshold is critical_index).
bool marchal_condition(const StepShapeParams& params, double alpha, Convention conv);

// Refraction across an interface: theta measured from the normal in
// [0, pi/2]. Returns the refracted angle, or nullopt on total internal
// reflection (n_in sin theta_in > n_out).
std::optional<double> snell_refract(double theta_in, double n_in, double n_out);

enum class TraceEnd { MaxLength, Boundary, Collision };

struct TraceCrossing {
    std::array<double, 2> point;
    double n_in, n_out;
    double sin_in, sin_out;  // tangential components; n_in sin_in = n_out sin_out
    bool total_internal_reflection;
};

struct TraceResult {
    std::vector<std::array<double, 2>> points;  // developed coordinates
    std::vector<TraceCrossing> crossings;
    TraceEnd termination;
    double euclidean_length;
    double weighted_length;
};

// Piecewise-straight geodesic of the sector metric: straight inside each
// sector, refracted by Snell's law at sector interfaces (reflected on total
// internal reflection). Terminates at max_length, at a bounding ray of the
// wedge, or at the vertex (a collision, where geodesics stop).
TraceResult trace_sector_geodesic(const SectorMetric& metric, std::array<double, 2> start,
                                  double direction, double max_length);

// Pole-to-pole trace found by shooting from (radius, psi = 0) and bisecting
// the launch angle until the trace lands on the far bounding ray at the
// same radius. Only exists in the interior-minimizer regime.
struct PoleTraceResult {
    TraceResult trace;
    double launch_angle;
    bool found;
};

PoleTraceResult trace_between_poles(const SectorMetric& metric, double radius = 1.0,
                                    double angle_tol = 1e-13);

// Path in the (rho, phi) half-plane, phi in [0, pi] the polar angle from
// the north pole of the shape sphere (not yet developed by phi -> c phi).
struct PolarPath {
    std::vector<double> rho;
    std::vector<double> phi;
    std::vector<double> params;
};

// Rotationally symmetric projection of a cone path onto the half-plane:
// points of `path` are read as rho * s with s on the shape sphere, and map
// to (rho, phi) with cos phi = z(s) (z = last coordinate). Never increases
// the band-metric length; preserves it iff the path already lies in a
// half-plane of constant axial direction.
PolarPath project_to_halfplane(const SampledPath& path);

// Band-metric length of a cone path (points rho * s in R^dim), integrand
// n(s) sqrt(drho^2 + c^2 rho^2 dsigma^2) with dsigma the great-circle angle
// and n the convention-baked index of the band the point lies in. Requires
// a metric built from step parameters.
double step_length_cone(const SectorMetric& metric, const SampledPath& path);

// Same length for a half-plane path: n(phi) sqrt(drho^2 + c^2 rho^2 dphi^2).
double step_length_halfplane(const SectorMetric& metric, const PolarPath& path);

} // namespace jmlab
