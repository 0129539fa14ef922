#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "jmlab/jm_metric.hpp"
#include "jmlab/potentials.hpp"
#include "jmlab/types.hpp"

namespace jmlab {

// Fixed-endpoint action data for a time-parameterized path. The action is
// broken-geodesic: kinetic term |dq|^2 / (2 dt) per segment, potential by
// trapezoid; their sum is exactly `action`. This discretization satisfies
// length <= action segmentwise, so the bridge inequality below holds with
// no quadrature slack.
struct ActionReport {
    double kinetic_integral;
    double potential_integral;
    double action;
    // Centered-difference energy K - U per sample (one-sided at the ends);
    // NaN at collision samples, where H is not a number.
    std::vector<double> energy_profile;
    std::vector<std::size_t> pole_samples;
};

// Requires a Time-parameterized path. A sample exactly at a pole is
// integrated in closed form on its two segments under the local zero-energy
// power law r ~ (dt)^(2/(2+alpha)) (the only passage law with finite action
// for alpha < 2): the segment contributes
//   kinetic   2 d^2 / ((2+alpha)(2-alpha) dt),
//   potential U(regular end) dt (2+alpha)/(2-alpha),
// d the weighted distance to the pole. Both reduce to the regular rules as
// alpha -> 0.
ActionReport discrete_action(const SampledPath& path, const HomogeneousPotential& pot);

// Centered-difference velocities of a Time path (one-sided at the ends).
std::vector<Vec> path_velocities(const SampledPath& path);

// Per-sample energy K - U (NaN at poles).
std::vector<double> energy_profile(const SampledPath& path, const HomogeneousPotential& pot);

// Max norm of q'' - grad U (kinetic-metric gradient) over interior samples,
// by centered second differences. Collision samples are skipped.
double el_residual(const SampledPath& path, const HomogeneousPotential& pot);

struct MinimizeOptions {
    int sample_count = 65;   // >= 3, endpoints included
    int max_iterations = 5000;
    double tolerance = 1e-6;  // on the l2 norm of the action gradient
    int starts = 5;           // chord + (starts - 1) seeded perturbations
    double perturbation = 0.05;
    std::uint64_t seed = 0;
    std::optional<SampledPath> init;  // replaces the chord as the base start
};

struct MinimizeResult {
    SampledPath path;  // Time kind, uniform grid on [0, T]
    ActionReport report;
    double gradient_norm;
    double el_residual_max;
    int iterations;     // of the winning start
    int start_index;
    bool collision_touch;  // some sample within 1e-6 of a collision
    bool converged;
};

// Thrown when no start reaches the gradient tolerance; carries the best
// iterate found so that callers can inspect or resume it.
class MinimizeNotConverged : public std::runtime_error {
public:
    MinimizeNotConverged(std::string msg, MinimizeResult best);
    const MinimizeResult& best() const { return best_; }

private:
    MinimizeResult best_;
};

// Gradient descent (Barzilai-Borwein steps with Armijo backtracking) on the
// discrete action over interior samples, endpoints fixed, uniform time grid
// on [0, T]. Multi-start keeps the best converged run.
MinimizeResult minimize_fixed_time(const Vec& q0, const Vec& q1, double T,
                                   const HomogeneousPotential& pot,
                                   const MinimizeOptions& opts = {});

struct ReparamResult {
    SampledPath path;  // same points, Time params
    double total_time;
    // K - U evaluated through the arclength parameterization
    // (H = U (2 U |dq/ds|^2 - 1)). NaN at pole samples and at samples so
    // close to a collision that U amplifies sample roundoff past any
    // estimate (the same resolution window the speed check exempts).
    std::vector<double> energy_profile;
};

// Converts a unit-speed path of the zero-energy metric (sqrt(2U) |dq/ds| = 1)
// to its time parameterization via dt = ds / (2U). The unit-speed property
// is checked segmentwise (pole-adjacent segments exempt, where the discrete
// ratio legitimately degrades); violations are errors.
ReparamResult zero_energy_reparameterize(const SampledPath& path,
                                         const HomogeneousPotential& pot,
                                         double speed_tol = 1e-3);

struct BridgeReport {
    double length;  // zero-energy metric length of the points
    double action;  // fixed-time action of the timed path
    double slack;   // action - length, >= 0 up to roundoff
};

// The pointwise inequality sqrt(2U) |v| <= |v|^2/2 + U integrates to
// length <= action, with equality exactly on zero-energy parameterizations.
// The shared discretizations keep the inequality exact segmentwise.
BridgeReport action_length_bridge(const SampledPath& path, const HomogeneousPotential& pot);

// q(t) -> lambda q(lambda^-nu t), nu = 1 + alpha/2: times scale by
// lambda^nu, points by lambda. Solutions map to solutions and energies
// scale by lambda^-alpha.
SampledPath blowup_rescale(const SampledPath& path, double lambda, double alpha);

// Max relative deviation, over the sample paths, of
//   length(lambda * path; h) vs lambda^(1-alpha/2) length(path; lambda^alpha h),
// the dilation identity of the reweighted metric family. Exact up to
// roundoff for any sampling since the quadratures coincide nodewise.
double metric_dilation_check(const HomogeneousPotential& pot, double h, double lambda,
                             const std::vector<SampledPath>& sample_paths);

// lambda * kinetic + (1/lambda) * potential: the action of the
// time-rescaled path. Always <= max(lambda, 1/lambda) * action.
double time_rescale_action(const ActionReport& report, double lambda);

// Fixed-step classical Runge-Kutta (RK4) for Newton's equations.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> positions;
    std::vector<Vec> velocities;

    SampledPath as_path() const;
};

Trajectory integrate_newton(const HomogeneousPotential& pot, const Vec& q0, const Vec& v0,
                            double dt, int steps);

struct BrakeReport {
    double max_retrace_deviation;
    double max_energy_drift;
};

// A solution starting at rest on the zero-velocity surface h0 + U = 0
// retraces itself: q(t0 + t) = q(t0 - t). Checked by integrating away from
// rest, then reversing the far endpoint's velocity and integrating back
// through the rest point; the deviation measures integrator error and
// shrinks at the integrator's order. Requires |h0 + U(q_start)| small.
BrakeReport brake_retrace_check(const HomogeneousPotential& pot, double h0,
                                const Vec& q_start, double duration, int steps);

} // namespace jmlab
