#pragma once

#include <cmath>
#include <vector>

#include "jmlab/rng.hpp"
#include "jmlab/types.hpp"

namespace jmlab::testhelp {

inline constexpr double kPi = 3.141592653589793238462643;

// Straight radial path on the x-axis from r0 to r1, abstract parameter.
inline SampledPath radial_path(double r0, double r1, int n, int dim = 2) {
    std::vector<Vec> pts;
    std::vector<double> prm;
    for (int i = 0; i < n; ++i) {
        double u = static_cast<double>(i) / (n - 1);
        Vec q(static_cast<std::size_t>(dim), 0.0);
        q[0] = r0 + (r1 - r0) * u;
        pts.push_back(q);
        prm.push_back(u);
    }
    return SampledPath(std::move(pts), std::move(prm), ParamKind::Abstract);
}

// Unit-speed sampling of the zero-energy radial Kepler fall from r0 to 0:
// ds = sqrt(2/r) dr integrates to s(r) = 2 sqrt(2) (sqrt(r0) - sqrt(r)), so
// r(s) = (sqrt(r0) - s / (2 sqrt(2)))^2. The last sample is the collision.
inline SampledPath kepler_fall_unit_speed(double r0, int n) {
    double s_max = 2.0 * std::sqrt(2.0) * std::sqrt(r0);
    std::vector<Vec> pts;
    std::vector<double> prm;
    for (int i = 0; i < n; ++i) {
        double s = s_max * static_cast<double>(i) / (n - 1);
        double root = std::sqrt(r0) - s / (2.0 * std::sqrt(2.0));
        pts.push_back({root * root, 0.0});
        prm.push_back(s);
    }
    return SampledPath(std::move(pts), std::move(prm), ParamKind::Arclength);
}

// Smooth random loop-free arc in an annulus bounded away from the origin,
// time parameter on [0, 1]. Mirrors the arcs the scenario runner samples.
inline SampledPath random_annulus_arc(Rng& rng, int samples, int dim = 2) {
    std::vector<double> center(static_cast<std::size_t>(dim));
    double cnorm = 0.0;
    for (auto& c : center) {
        c = 2.0 * rng.uniform() - 1.0;
        cnorm += c * c;
    }
    cnorm = std::sqrt(cnorm);
    double target = 0.55 + 0.25 * rng.uniform();
    for (auto& c : center) c *= target / (cnorm > 0.0 ? cnorm : 1.0);

    std::vector<std::vector<double>> amp(static_cast<std::size_t>(dim)),
        phase(static_cast<std::size_t>(dim));
    for (int c = 0; c < dim; ++c)
        for (int k = 0; k < 3; ++k) {
            amp[static_cast<std::size_t>(c)].push_back(0.055 *
                                                       (2.0 * rng.uniform() - 1.0));
            phase[static_cast<std::size_t>(c)].push_back(2.0 * kPi * rng.uniform());
        }
    std::vector<Vec> pts;
    std::vector<double> prm;
    for (int i = 0; i < samples; ++i) {
        double u = static_cast<double>(i) / (samples - 1);
        Vec q(static_cast<std::size_t>(dim));
        for (int c = 0; c < dim; ++c) {
            double x = center[static_cast<std::size_t>(c)];
            for (int k = 0; k < 3; ++k)
                x += amp[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] *
                     std::cos(2.0 * kPi * (k + 1) * u +
                              phase[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)]);
            q[static_cast<std::size_t>(c)] = x;
        }
        pts.push_back(q);
        prm.push_back(u);
    }
    return SampledPath(std::move(pts), std::move(prm), ParamKind::Time);
}

// Circular orbit of the planar central potential r^-alpha at radius 1:
// speed w = sqrt(alpha) balances gravity, q(t) = (cos wt, sin wt).
inline SampledPath circular_orbit(double alpha, int n, double t_end) {
    double w = std::sqrt(alpha);
    std::vector<Vec> pts;
    std::vector<double> prm;
    for (int i = 0; i < n; ++i) {
        double t = t_end * static_cast<double>(i) / (n - 1);
        pts.push_back({std::cos(w * t), std::sin(w * t)});
        prm.push_back(t);
    }
    return SampledPath(std::move(pts), std::move(prm), ParamKind::Time);
}

} // namespace jmlab::testhelp
