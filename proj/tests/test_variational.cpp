#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "jmlab/jm_metric.hpp"
#include "jmlab/rng.hpp"
#include "jmlab/variational.hpp"

#include "helpers.hpp"

using namespace jmlab;
using namespace jmlab::testhelp;
using doctest::Approx;

namespace {
const HomogeneousPotential kKepler = HomogeneousPotential::central(2, 1.0);
}

TEST_CASE("discrete action splits into kinetic and potential parts") {
    SampledPath orbit = circular_orbit(1.0, 101, 2.0);
    ActionReport rep = discrete_action(orbit, kKepler);
    CHECK(rep.action == Approx(rep.kinetic_integral + rep.potential_integral));
    // circular orbit at radius 1: K = 1/2, U = 1, action over T = 2 is 3
    CHECK(rep.action == Approx(3.0).epsilon(1e-3));
    CHECK(rep.pole_samples.empty());
    // energy profile is the constant K - U = -1/2
    for (double h : rep.energy_profile) CHECK(h == Approx(-0.5).epsilon(1e-3));
}

TEST_CASE("action requires a time parameterization") {
    SampledPath abstract = radial_path(1.0, 0.5, 10);
    CHECK_THROWS_AS(discrete_action(abstract, kKepler), std::invalid_argument);
}

TEST_CASE("action through a collision sample is finite and dominates length") {
    // straight fall to the origin and out again, collision mid-path
    int n = 81;
    std::vector<Vec> pts;
    std::vector<double> prm;
    for (int i = 0; i < n; ++i) {
        double u = static_cast<double>(i) / (n - 1);
        double x = std::abs(2.0 * u - 1.0);
        pts.push_back({x, 0.0});
        prm.push_back(u);
    }
    SampledPath bounce(std::move(pts), std::move(prm), ParamKind::Time);
    ActionReport rep = discrete_action(bounce, kKepler);
    REQUIRE(rep.pole_samples.size() == 1);
    CHECK(rep.pole_samples[0] == static_cast<std::size_t>(n / 2));
    CHECK(std::isfinite(rep.action));
    CHECK(std::isnan(rep.energy_profile[static_cast<std::size_t>(n / 2)]));

    double len = jm_length(JmMetric{0.0, kKepler}, bounce);
    CHECK(rep.action >= len - 1e-12);
}

TEST_CASE("a segment joining two distinct collisions is rejected") {
    auto pot = HomogeneousPotential::power_law(MassSystem(1, {1.0, 1.0, 1.0}), 1.0);
    SampledPath bad({{0.0, 0.0, 1.0}, {0.0, 1.0, 1.0}}, {0.0, 1.0}, ParamKind::Time);
    CHECK_THROWS_AS(discrete_action(bad, pot), std::invalid_argument);
}

TEST_CASE("length never exceeds action on random collision-free paths") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        SampledPath path = random_annulus_arc(rng, 40);
        BridgeReport br = action_length_bridge(path, kKepler);
        CHECK(br.slack >= -1e-9);
        CHECK(br.length == Approx(jm_length(JmMetric{0.0, kKepler}, path)));
        CHECK(br.action == Approx(discrete_action(path, kKepler).action));
    }
}

TEST_CASE("zero-energy reparameterization closes the bridge gap") {
    Rng rng(7);
    JmMetric zero{0.0, kKepler};
    for (int trial = 0; trial < 10; ++trial) {
        SampledPath path = random_annulus_arc(rng, 300);
        // arclength parameters from the shared segment quadrature
        std::vector<double> s(path.size(), 0.0);
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            SampledPath seg({path.points[k], path.points[k + 1]}, {0.0, 1.0},
                            ParamKind::Abstract);
            s[k + 1] = s[k] + jm_length(zero, seg);
        }
        SampledPath by_arc(path.points, s, ParamKind::Arclength);
        ReparamResult rp = zero_energy_reparameterize(by_arc, kKepler);
        BridgeReport br = action_length_bridge(rp.path, kKepler);
        CHECK(std::abs(br.slack) < 1e-5);
    }
}

TEST_CASE("kepler radial fall: total time and flat energy profile") {
    // unit-speed fall from r = 1 into the collision; the time change of
    // variables gives T = sqrt(2)/3 and H identically zero
    SampledPath fall = kepler_fall_unit_speed(1.0, 10001);
    ReparamResult rp = zero_energy_reparameterize(fall, kKepler);
    CHECK(rp.total_time == Approx(std::sqrt(2.0) / 3.0).epsilon(1e-7));
    double worst = 0.0;
    for (double h : rp.energy_profile)
        if (!std::isnan(h)) worst = std::max(worst, std::abs(h));
    CHECK(worst < 1e-6);
    // the final sample is the collision
    CHECK(std::isnan(rp.energy_profile.back()));
}

TEST_CASE("reparameterization rejects non unit speed inputs") {
    SampledPath fall = kepler_fall_unit_speed(1.0, 101);
    std::vector<double> stretched = fall.params;
    for (auto& s : stretched) s *= 2.0;
    SampledPath bad(fall.points, stretched, ParamKind::Arclength);
    CHECK_THROWS_AS(zero_energy_reparameterize(bad, kKepler), std::invalid_argument);
}

TEST_CASE("el residual vanishes on integrated trajectories") {
    // half period of the unit circular orbit integrated numerically
    Trajectory orbit = integrate_newton(kKepler, {1.0, 0.0}, {0.0, 1.0}, 1e-3, 3000);
    double res = el_residual(orbit.as_path(), kKepler);
    CHECK(res < 2e-3);  // second differences on a dt = 1e-3 grid
    // a straight line through the potential is far from a solution
    SampledPath line({{1.0, 0.0}, {0.75, 0.25}, {0.5, 0.5}, {0.25, 0.75}, {0.0, 1.0}},
                     {0.0, 0.25, 0.5, 0.75, 1.0}, ParamKind::Time);
    CHECK(el_residual(line, kKepler) > 0.5);
}

TEST_CASE("fixed-time minimization reaches a discrete solution") {
    MinimizeOptions opts;
    opts.sample_count = 49;
    opts.tolerance = 1e-6;
    opts.max_iterations = 20000;
    opts.starts = 3;
    MinimizeResult res = minimize_fixed_time({1.0, 0.0}, {0.0, 1.0}, 1.2, kKepler, opts);
    CHECK(res.converged);
    CHECK(res.gradient_norm <= 1e-6);
    CHECK_FALSE(res.collision_touch);
    CHECK(res.path.points.front()[0] == 1.0);
    CHECK(res.path.points.back()[1] == 1.0);
    // the discrete minimizer stays near the true arc: spot-check the energy
    // profile is nearly constant away from the endpoints
    double mid = res.report.energy_profile[24];
    for (std::size_t i = 8; i < 41; ++i)
        CHECK(res.report.energy_profile[i] == Approx(mid).epsilon(0.05));
    CHECK(res.el_residual_max < 0.05);
}

TEST_CASE("minimization throws with the best iterate when starved") {
    MinimizeOptions opts;
    opts.sample_count = 33;
    opts.tolerance = 1e-14;
    opts.max_iterations = 1;
    opts.starts = 1;
    try {
        minimize_fixed_time({1.0, 0.0}, {0.0, 1.0}, 1.0, kKepler, opts);
        FAIL("expected MinimizeNotConverged");
    } catch (const MinimizeNotConverged& e) {
        CHECK_FALSE(e.best().converged);
        CHECK(e.best().path.size() == 33);
        CHECK(std::isfinite(e.best().report.action));
    }
}

TEST_CASE("minimization validates its inputs") {
    CHECK_THROWS_AS(minimize_fixed_time({1.0, 0.0}, {0.0}, 1.0, kKepler, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(minimize_fixed_time({1.0, 0.0}, {0.0, 1.0}, -1.0, kKepler, {}),
                    std::invalid_argument);
    MinimizeOptions bad;
    bad.sample_count = 2;
    CHECK_THROWS_AS(minimize_fixed_time({1.0, 0.0}, {0.0, 1.0}, 1.0, kKepler, bad),
                    std::invalid_argument);
}

TEST_CASE("blowup rescale maps paths and scales energies") {
    SampledPath orbit = circular_orbit(1.0, 64, 1.5);
    double lambda = 4.0;
    SampledPath big = blowup_rescale(orbit, lambda, 1.0);
    CHECK(big.points.front()[0] == Approx(4.0));
    CHECK(big.params.back() == Approx(1.5 * std::pow(4.0, 1.5)));

    std::vector<double> h0 = energy_profile(orbit, kKepler);
    std::vector<double> h1 = energy_profile(big, kKepler);
    for (std::size_t i = 0; i < h0.size(); ++i)
        CHECK(h1[i] == Approx(h0[i] / 4.0).epsilon(1e-9));
}

TEST_CASE("dilation identity holds for every sampling") {
    Rng rng(3);
    std::vector<SampledPath> paths;
    for (int i = 0; i < 20; ++i) paths.push_back(random_annulus_arc(rng, 48));
    for (double h : {-0.2, 0.0, 0.3}) {
        for (double lambda : {0.5, 2.0, 4.0}) {
            double dev = metric_dilation_check(kKepler, h, lambda, paths);
            CHECK(dev < 1e-12);
        }
    }
}

TEST_CASE("time rescaling bound") {
    SampledPath orbit = circular_orbit(1.0, 64, 1.5);
    ActionReport rep = discrete_action(orbit, kKepler);
    CHECK(time_rescale_action(rep, 1.0) == Approx(rep.action).epsilon(1e-14));
    for (double lambda : {0.25, 0.7, 1.3, 4.0}) {
        double rescaled = time_rescale_action(rep, lambda);
        CHECK(rescaled == Approx(lambda * rep.kinetic_integral +
                                 rep.potential_integral / lambda)
                              .epsilon(1e-14));
        CHECK(rescaled <= std::max(lambda, 1.0 / lambda) * rep.action + 1e-12);
    }
}

TEST_CASE("rk4 conserves energy on a circular orbit") {
    Trajectory orbit = integrate_newton(kKepler, {1.0, 0.0}, {0.0, 1.0}, 1e-3, 6284);
    // one full period 2 pi: back to the start
    CHECK(orbit.positions.back()[0] == Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(orbit.positions.back()[1]) < 1e-3);
    double h_first = 0.5 - 1.0;
    for (std::size_t i = 0; i < orbit.positions.size(); i += 500) {
        double k = 0.5 * dot(orbit.velocities[i], orbit.velocities[i]);
        double u = 1.0 / norm(orbit.positions[i]);
        CHECK(k - u == Approx(h_first).epsilon(1e-10));
    }
}

TEST_CASE("brake solutions retrace themselves") {
    auto pot1d = HomogeneousPotential::central(1, 1.0);
    BrakeReport rep = brake_retrace_check(pot1d, -1.0, {1.0}, 0.4, 10000);
    CHECK(rep.max_retrace_deviation < 1e-8);
    CHECK(rep.max_energy_drift < 1e-10);
    // the deviation shrinks with the step at the integrator's order
    BrakeReport coarse = brake_retrace_check(pot1d, -1.0, {1.0}, 0.4, 100);
    CHECK(rep.max_retrace_deviation < coarse.max_retrace_deviation);
    // starting off the zero-velocity surface is rejected
    CHECK_THROWS_AS(brake_retrace_check(pot1d, -1.0, {2.0}, 0.4, 100),
                    std::invalid_argument);
}
