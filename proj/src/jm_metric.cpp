#include "jmlab/jm_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace jmlab {

PotentialValue conformal_factor(const JmMetric& metric, const Vec& q) {
    PotentialValue u = metric.pot.evaluate(q);
    if (u.is_pole()) return PotentialValue::pole();
    double v = metric.h0 + u.value();
    if (v < 0.0)
        throw std::domain_error("point lies outside the allowed region (h0 + U < 0)");
    return PotentialValue::of(2.0 * v);
}

bool hill_region_contains(const JmMetric& metric, const Vec& q) {
    PotentialValue u = metric.pot.evaluate(q);
    if (u.is_pole()) return true;
    return metric.h0 + u.value() >= 0.0;
}

double cone_radius(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("alpha must lie strictly in (0, 2)");
    return (2.0 - alpha) / 2.0;
}

double to_cone_coordinate(double r, double alpha) {
    double c = cone_radius(alpha);
    if (!(r >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
    return std::pow(r, c) / c;  // r^(1 - alpha/2) / c, and 1 - alpha/2 = c
}

double from_cone_coordinate(double rho, double alpha) {
    double c = cone_radius(alpha);
    if (!(rho >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
    return std::pow(c * rho, 1.0 / c);
}

PotentialValue normal_form_factor(const HomogeneousPotential& pot, const Vec& s) {
    return pot.shape(s);
}

namespace {

// sqrt of the conformal factor at each sample; poles flagged.
struct SampleSpeeds {
    std::vector<double> f;
    std::vector<bool> pole;
};

SampleSpeeds conformal_speeds(const JmMetric& metric, const SampledPath& path) {
    SampleSpeeds out;
    out.f.resize(path.size());
    out.pole.resize(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        PotentialValue cf = conformal_factor(metric, path.points[i]);
        if (cf.is_pole()) {
            out.pole[i] = true;
            out.f[i] = 0.0;
        } else {
            out.pole[i] = false;
            out.f[i] = std::sqrt(cf.value());
        }
    }
    return out;
}

} // namespace

double jm_length(const JmMetric& metric, const SampledPath& path) {
    path.validate();
    if (path.dim() != static_cast<std::size_t>(metric.pot.dim()))
        throw std::invalid_argument("path dimension does not match the potential");
    const Vec& w = metric.pot.metric_weights();
    SampleSpeeds sp = conformal_speeds(metric, path);
    const double crule = cone_radius(metric.pot.alpha());  // 1 - alpha/2
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        double len = distance(path.points[i], path.points[i + 1], w);
        if (len == 0.0) continue;
        bool pa = sp.pole[i], pb = sp.pole[i + 1];
        if (!pa && !pb) {
            total += 0.5 * (sp.f[i] + sp.f[i + 1]) * len;
        } else if (pa && pb) {
            throw std::invalid_argument(
                "segment joins two distinct collision points; no regular end to "
                "calibrate the endpoint rule");
        } else {
            // Integrable endpoint singularity: the integrand grows like
            // K d^(-alpha/2) towards the pole. Matching K at the regular end
            // gives the exact closed form f_reg * len / (1 - alpha/2), exact
            // for radial power-law segments.
            double freg = pa ? sp.f[i + 1] : sp.f[i];
            total += freg * len / crule;
        }
    }
    return total;
}

double normal_form_length(const HomogeneousPotential& pot, const SampledPath& path,
                          LengthScale scale_mode) {
    path.validate();
    if (path.dim() != static_cast<std::size_t>(pot.dim()))
        throw std::invalid_argument("path dimension does not match the potential");
    const Vec& w = pot.metric_weights();
    const double alpha = pot.alpha();
    const double c = cone_radius(alpha);
    const std::size_t n = path.size();

    std::vector<double> r(n), rho(n), shape(n);
    std::vector<Vec> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = norm(path.points[i], w);
        rho[i] = to_cone_coordinate(r[i], alpha);
        if (r[i] > 0.0) {
            s[i] = scale(path.points[i], 1.0 / r[i]);
            shape[i] = pot.evaluate(s[i]).value();
        }
    }
    // At the cone point the shape is taken from the segment's regular end;
    // the integrand there is sqrt(shape) * |drho| and stays regular.
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t a = i, b = i + 1;
        if (r[a] == 0.0 && r[b] == 0.0) continue;
        double drho = rho[b] - rho[a];
        double theta = 0.0;
        if (r[a] > 0.0 && r[b] > 0.0) {
            double cosang = dot(s[a], s[b], w);
            theta = std::acos(std::clamp(cosang, -1.0, 1.0));
        }
        double sa = r[a] > 0.0 ? shape[a] : shape[b];
        double sb = r[b] > 0.0 ? shape[b] : shape[a];
        double ga = std::sqrt(sa * (drho * drho + c * c * rho[a] * rho[a] * theta * theta));
        double gb = std::sqrt(sb * (drho * drho + c * c * rho[b] * rho[b] * theta * theta));
        total += 0.5 * (ga + gb);
    }
    if (scale_mode == LengthScale::JmFactorTwo) total *= std::sqrt(2.0);
    return total;
}

double kepler_gauss_curvature(double r, double h0) {
    if (!(r > 0.0)) throw std::domain_error("radius must be positive");
    double w = h0 + 1.0 / r;
    if (!(w > 0.0))
        throw std::domain_error("point lies outside the allowed region (h0 + 1/r <= 0)");
    double base = r * w;  // = h0 r + 1
    return -(h0 / 4.0) * std::pow(base, -3.0);
}

double gauss_curvature_fd(const std::function<double(double, double)>& lambda,
                          double x, double y, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
    auto u = [&lambda](double px, double py) {
        double v = lambda(px, py);
        if (!(v > 0.0)) throw std::domain_error("conformal factor must be positive");
        return 0.5 * std::log(v);
    };
    double u0 = u(x, y);
    double lap = (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4.0 * u0) / (h * h);
    return -std::exp(-2.0 * u0) * lap;
}

double gauss_curvature_fd(const JmMetric& metric, const Vec& q, double h) {
    if (q.size() != 2 || metric.pot.dim() != 2)
        throw std::invalid_argument("finite-difference curvature needs a 2-D metric");
    auto lambda = [&metric](double x, double y) {
        return conformal_factor(metric, Vec{x, y}).value();
    };
    return gauss_curvature_fd(lambda, q[0], q[1], h);
}

} // namespace jmlab
