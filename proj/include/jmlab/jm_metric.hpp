#pragma once

#include <functional>

#include "jmlab/potentials.hpp"
#include "jmlab/types.hpp"

namespace jmlab {

// The kinetic metric reweighted at energy h0: ds^2 = 2 (h0 + U(q)) |dq|^2,
// defined on the region where h0 + U >= 0. |dq|^2 is the kinetic-energy
// inner product of the potential (mass-weighted for power laws).
struct JmMetric {
    double h0;
    HomogeneousPotential pot;
};

// 2 (h0 + U(q)): a pole at collisions, zero on the boundary of the allowed
// region, a domain error outside it.
PotentialValue conformal_factor(const JmMetric& metric, const Vec& q);

// h0 + U(q) >= 0. Collision points are always contained (U = +inf there).
bool hill_region_contains(const JmMetric& metric, const Vec& q);

// Length of the piecewise-linear interpolant in the reweighted metric,
// by trapezoid quadrature on the samples. A sample exactly at a pole is
// handled by the closed-form power rule for the integrable r^(-alpha/2)
// endpoint singularity (exact for radial power-law segments); a segment
// joining two distinct poles has no regular end to calibrate against and
// is an error. Samples outside the allowed region are a domain error.
double jm_length(const JmMetric& metric, const SampledPath& path);

// Opening ratio c(alpha) = (2 - alpha) / 2 of the radial normal form;
// alpha = 1 gives 1/2.
double cone_radius(double alpha);

// Radial change of variables rho = r^(1 - alpha/2) / c(alpha) and its
// inverse r = (c rho)^(2 / (2 - alpha)). Both require a nonnegative input.
double to_cone_coordinate(double r, double alpha);
double from_cone_coordinate(double rho, double alpha);

// Shape factor of the cone normal form U(s) on the unit sphere (same as
// HomogeneousPotential::shape, kept as a named operation).
PotentialValue normal_form_factor(const HomogeneousPotential& pot, const Vec& s);

// Whether cone-coordinate lengths carry the overall factor 2 of the
// reweighted metric. The normal form drops it (PaperUnit); multiply by
// sqrt(2) (JmFactorTwo) to compare against jm_length at h0 = 0.
enum class LengthScale { PaperUnit, JmFactorTwo };

// Zero-energy length computed in cone coordinates (rho, s): the integrand
// is sqrt(U(s) (drho^2 + c^2 rho^2 dsigma^2)) with dsigma the great-circle
// angle on the shape sphere. Regular at the cone point; agrees with
// jm_length(h0 = 0) when scaled by sqrt(2).
double normal_form_length(const HomogeneousPotential& pot, const SampledPath& path,
                          LengthScale scale = LengthScale::PaperUnit);

// Gauss curvature of the energy-h0 planar Kepler metric 2(h0 + 1/r)|dq|^2:
//   K = -(h0/4) [r (h0 + 1/r)]^(-3).
// Zero energy is exactly flat. Requires r > 0 and h0 + 1/r > 0.
double kepler_gauss_curvature(double r, double h0);

// Finite-difference Gauss curvature of a 2-D conformal metric
// lambda(x,y) (dx^2 + dy^2):  K = -Laplace(log lambda) / (2 lambda),
// with a 5-point Laplacian of step h.
double gauss_curvature_fd(const std::function<double(double, double)>& lambda,
                          double x, double y, double h);

// Same estimator driven by a 2-D metric's conformal factor.
double gauss_curvature_fd(const JmMetric& metric, const Vec& q, double h);

} // namespace jmlab
