#include "jmlab/sector_optics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jmlab/jm_metric.hpp"

namespace jmlab {

namespace {

constexpr double kPi = 3.141592653589793238462643;

double sq(double x) { return x * x; }

} // namespace

SectorMetric::SectorMetric(std::vector<Sector> sectors, double cone_ratio, Convention conv,
                           std::optional<StepShapeParams> step)
    : sectors_(std::move(sectors)), cone_ratio_(cone_ratio), convention_(conv),
      step_(std::move(step)) {
    if (sectors_.empty()) throw std::invalid_argument("sector list must be nonempty");
    if (!(cone_ratio_ > 0.0) || !(cone_ratio_ < 1.0))
        throw std::invalid_argument("cone ratio must lie in (0, 1)");
    if (sectors_.front().begin != 0.0)
        throw std::invalid_argument("sectors must start at 0");
    for (std::size_t i = 0; i < sectors_.size(); ++i) {
        const Sector& s = sectors_[i];
        if (!(s.end > s.begin)) throw std::invalid_argument("sector has nonpositive width");
        if (!(s.index > 0.0)) throw std::invalid_argument("sector index must be positive");
        if (i + 1 < sectors_.size() && sectors_[i + 1].begin != s.end)
            throw std::invalid_argument("sectors must tile the wedge contiguously");
    }
    opening_ = sectors_.back().end;
    if (!(opening_ > 0.0) || !(opening_ < kPi))
        throw std::invalid_argument("wedge opening must lie in (0, pi)");
}

int SectorMetric::sector_of(double psi) const {
    psi = std::clamp(psi, 0.0, opening_);
    for (std::size_t i = 0; i + 1 < sectors_.size(); ++i)
        if (psi < sectors_[i].end) return static_cast<int>(i);
    return static_cast<int>(sectors_.size()) - 1;
}

double SectorMetric::index_at(double psi) const {
    return sectors_[static_cast<std::size_t>(sector_of(psi))].index;
}

double SectorMetric::segment_weight(double x1, double y1, double x2, double y2) const {
    double r1 = std::hypot(x1, y1), r2 = std::hypot(x2, y2);
    double len = std::hypot(x2 - x1, y2 - y1);
    if (len == 0.0) return 0.0;
    // Radial pieces through the vertex are weighted by the ray they run on.
    if (r1 == 0.0 && r2 == 0.0) return 0.0;
    if (r1 == 0.0) return index_at(std::atan2(y2, x2)) * len;
    if (r2 == 0.0) return index_at(std::atan2(y1, x1)) * len;

    int s1 = sector_of(std::atan2(y1, x1));
    int s2 = sector_of(std::atan2(y2, x2));
    if (s1 == s2) return sectors_[static_cast<std::size_t>(s1)].index * len;
    if (s1 > s2) {
        std::swap(x1, x2);
        std::swap(y1, y2);
        std::swap(s1, s2);
    }
    // The polar angle is monotone along a straight segment inside the wedge,
    // so the segment crosses each interface between s1 and s2 exactly once.
    double total = 0.0;
    double t_prev = 0.0;
    for (int k = s1; k < s2; ++k) {
        double b = sectors_[static_cast<std::size_t>(k)].end;
        double ux = std::cos(b), uy = std::sin(b);
        double c1 = ux * y1 - uy * x1;
        double c2 = ux * y2 - uy * x2;
        double t = (c1 - c2 != 0.0) ? c1 / (c1 - c2) : t_prev;
        t = std::clamp(t, t_prev, 1.0);
        total += sectors_[static_cast<std::size_t>(k)].index * len * (t - t_prev);
        t_prev = t;
    }
    total += sectors_[static_cast<std::size_t>(s2)].index * len * (1.0 - t_prev);
    return total;
}

SectorMetric build_counterexample_sector(const StepShapeParams& params, double alpha,
                                         Convention conv) {
    double c = cone_radius(alpha);
    double phi_star = 2.0 * std::asin(params.delta);
    double psi1 = c * (kPi - phi_star) / 2.0;
    double psi2 = c * phi_star;
    double n1 = params.outer_value;
    double n2 = params.band_value;
    if (conv == Convention::JmConsistent) {
        n1 = std::sqrt(n1);
        n2 = std::sqrt(n2);
    }
    std::vector<Sector> sectors{
        {0.0, psi1, n1},
        {psi1, psi1 + psi2, n2},
        {psi1 + psi2, 2.0 * psi1 + psi2, n1},
    };
    return SectorMetric(std::move(sectors), c, conv, params);
}

namespace {

// The closed-form band lengths assume the symmetric three-sector layout.
struct SymmetricSectors {
    double psi1, psi2, n1, n2;
};

SymmetricSectors symmetric_of(const SectorMetric& metric) {
    const auto& s = metric.sectors();
    if (s.size() != 3)
        throw std::invalid_argument("operation requires a three-sector metric");
    double w1 = s[0].end - s[0].begin;
    double w3 = s[2].end - s[2].begin;
    if (std::abs(w1 - w3) > 1e-12 || std::abs(s[0].index - s[2].index) > 1e-12)
        throw std::invalid_argument("operation requires a symmetric three-sector metric");
    return {w1, s[1].end - s[1].begin, s[0].index, s[1].index};
}

} // namespace

double test_curve_length(const SectorMetric& metric, double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("entry radius x must be nonnegative");
    SymmetricSectors g = symmetric_of(metric);
    double leg = std::sqrt(1.0 + x * x - 2.0 * x * std::cos(g.psi1));
    double band = 2.0 * x * std::sin(g.psi2 / 2.0);
    return 2.0 * g.n1 * leg + g.n2 * band;
}

double test_curve_derivative(const SectorMetric& metric, double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("entry radius x must be nonnegative");
    SymmetricSectors g = symmetric_of(metric);
    double leg = std::sqrt(1.0 + x * x - 2.0 * x * std::cos(g.psi1));
    return 2.0 * g.n1 * (x - std::cos(g.psi1)) / leg + 2.0 * g.n2 * std::sin(g.psi2 / 2.0);
}

TestCurveMinimum minimize_test_curve(const SectorMetric& metric) {
    SymmetricSectors g = symmetric_of(metric);
    double beta = g.n2 * std::sin(g.psi2 / 2.0);
    double slope0 = beta - g.n1 * std::cos(g.psi1);  // dS/dx(0+) up to the factor 2
    if (slope0 >= 0.0) {
        return TestCurveMinimum{0.0, 2.0 * g.n1, TestCurveClass::CollisionPath};
    }
    // dS/dx is strictly increasing, so the unique root is the minimizer:
    // x* = cos psi1 - beta sin psi1 / sqrt(n1^2 - beta^2).
    double x_star = std::cos(g.psi1) -
                    beta * std::sin(g.psi1) / std::sqrt(g.n1 * g.n1 - beta * beta);
    return TestCurveMinimum{x_star, test_curve_length(metric, x_star),
                            TestCurveClass::InteriorMinimizer};
}

double critical_index(double psi1, double psi2, double n1) {
    if (!(psi1 > 0.0) || !(psi1 < kPi) || !(psi2 > 0.0) || !(psi2 < kPi))
        throw std::invalid_argument("sector angles must lie in (0, pi)");
    if (!(n1 > 0.0)) throw std::invalid_argument("outer index must be positive");
    return n1 * std::cos(psi1) / std::sin(psi2 / 2.0);
}

bool marchal_condition(const StepShapeParams& params, double alpha, Convention conv) {
    double c = cone_radius(alpha);
    if (conv == Convention::PaperLiteral)
        return params.band_value * c * params.delta >= params.outer_value;
    return std::sqrt(params.band_value) * c * params.delta >= std::sqrt(params.outer_value);
}

std::optional<double> snell_refract(double theta_in, double n_in, double n_out) {
    if (!(theta_in >= 0.0) || !(theta_in <= kPi / 2.0))
        throw std::invalid_argument("incidence angle must lie in [0, pi/2]");
    if (!(n_in > 0.0) || !(n_out > 0.0))
        throw std::invalid_argument("refraction indices must be positive");
    double s = n_in * std::sin(theta_in) / n_out;
    if (s > 1.0) return std::nullopt;  // total internal reflection
    return std::asin(s);
}

TraceResult trace_sector_geodesic(const SectorMetric& metric, std::array<double, 2> start,
                                  double direction, double max_length) {
    if (!(max_length > 0.0)) throw std::invalid_argument("max_length must be positive");
    double px = start[0], py = start[1];
    {
        double r0 = std::hypot(px, py);
        if (r0 == 0.0) throw std::invalid_argument("trace cannot start at the vertex");
        double ang = std::atan2(py, px);
        if (ang < -1e-12 || ang > metric.opening() + 1e-12)
            throw std::invalid_argument("trace start lies outside the wedge");
    }
    double dx = std::cos(direction), dy = std::sin(direction);
    const double eps = 1e-12;

    TraceResult out;
    out.points.push_back({px, py});
    out.euclidean_length = 0.0;
    out.weighted_length = 0.0;
    out.termination = TraceEnd::MaxLength;

    // All rays the line can stop at: sector interfaces plus the two bounding
    // rays of the wedge.
    std::vector<double> rays;
    rays.push_back(0.0);
    for (const auto& s : metric.sectors()) rays.push_back(s.end);

    int guard = 0;
    while (out.euclidean_length < max_length && guard++ < 10000) {
        double remaining = max_length - out.euclidean_length;
        // Collision with the vertex: the ray passes through the origin when
        // its perpendicular miss distance vanishes.
        double t_origin = -(px * dx + py * dy);
        double miss = std::abs(px * dy - py * dx);
        double t_stop = remaining;
        int stop_kind = 0;  // 0 = max length, 1 = boundary ray, 2 = vertex
        double stop_ray = 0.0;
        if (miss <= eps && t_origin > eps && t_origin < t_stop) {
            t_stop = t_origin;
            stop_kind = 2;
        }
        for (double b : rays) {
            double ux = std::cos(b), uy = std::sin(b);
            double cp = ux * py - uy * px;   // cross(u, P)
            double cd = ux * dy - uy * dx;   // cross(u, d)
            if (cd == 0.0) continue;
            double t = -cp / cd;
            if (t <= eps || t >= t_stop) continue;
            // Must hit the ray itself a positive distance from the vertex;
            // hits at the vertex belong to the collision rule above, which
            // would otherwise lose the tie by one rounding step.
            if ((px + t * dx) * ux + (py + t * dy) * uy <= eps) continue;
            t_stop = t;
            stop_kind = 1;
            stop_ray = b;
        }

        double mid_psi = std::atan2(py + 0.5 * t_stop * dy, px + 0.5 * t_stop * dx);
        double n_here = metric.index_at(mid_psi);
        px += t_stop * dx;
        py += t_stop * dy;
        out.points.push_back({px, py});
        out.euclidean_length += t_stop;
        out.weighted_length += n_here * t_stop;

        if (stop_kind == 0) {
            out.termination = TraceEnd::MaxLength;
            break;
        }
        if (stop_kind == 2) {
            out.termination = TraceEnd::Collision;
            break;
        }
        if (stop_ray <= 0.0 || stop_ray >= metric.opening()) {
            out.termination = TraceEnd::Boundary;
            break;
        }

        // Refract (or reflect) across the interface ray.
        double ux = std::cos(stop_ray), uy = std::sin(stop_ray);
        double tang = dx * ux + dy * uy;        // sin of incidence, signed
        double normal = -dx * uy + dy * ux;     // cos of incidence, signed
        double n_out_side = metric.index_at(stop_ray + (normal > 0.0 ? 1.0 : -1.0) * 1e-9);
        TraceCrossing crossing;
        crossing.point = {px, py};
        crossing.n_in = n_here;
        crossing.n_out = n_out_side;
        crossing.sin_in = tang;
        double s_out = n_here * tang / n_out_side;
        if (std::abs(s_out) > 1.0) {
            crossing.total_internal_reflection = true;
            crossing.sin_out = tang;
            // reflect: flip the normal component
            dx = dx - 2.0 * normal * (-uy);
            dy = dy - 2.0 * normal * (ux);
        } else {
            crossing.total_internal_reflection = false;
            crossing.sin_out = s_out;
            double c_out = std::sqrt(1.0 - s_out * s_out) * (normal > 0.0 ? 1.0 : -1.0);
            dx = s_out * ux + c_out * (-uy);
            dy = s_out * uy + c_out * (ux);
        }
        out.crossings.push_back(crossing);
    }
    return out;
}

PoleTraceResult trace_between_poles(const SectorMetric& metric, double radius,
                                    double angle_tol) {
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    const double opening = metric.opening();
    std::array<double, 2> start{radius, 0.0};
    const double max_len = 20.0 * radius;

    // Landing radius on the far bounding ray, minus the target radius;
    // traces that die at the vertex or come back count as falling short.
    auto miss = [&](double chi) {
        TraceResult tr = trace_sector_geodesic(metric, start, chi, max_len);
        if (tr.termination != TraceEnd::Boundary) return -radius;
        auto& last = tr.points.back();
        double psi = std::atan2(last[1], last[0]);
        if (psi < opening - 1e-9) return -radius;  // exited through psi = 0
        return std::hypot(last[0], last[1]) - radius;
    };

    // The launch angle sweeps from the chord direction towards the vertex
    // direction (pi); landing radius decreases along the way.
    double chi_lo = kPi / 2.0 + opening / 2.0 + 1e-9;  // chord to the far pole
    double chi_hi = kPi - 1e-9;
    PoleTraceResult out;
    out.found = false;

    double prev_chi = chi_lo;
    double prev_f = miss(prev_chi);
    const int scan = 400;
    for (int i = 1; i <= scan; ++i) {
        double chi = chi_lo + (chi_hi - chi_lo) * i / scan;
        double f = miss(chi);
        if ((prev_f > 0.0) != (f > 0.0)) {
            double lo = prev_chi, hi = chi, flo = prev_f;
            while (hi - lo > angle_tol) {
                double mid = 0.5 * (lo + hi);
                double fm = miss(mid);
                if ((flo > 0.0) == (fm > 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.launch_angle = 0.5 * (lo + hi);
            out.trace = trace_sector_geodesic(metric, start, out.launch_angle, max_len);
            out.found = true;
            return out;
        }
        prev_chi = chi;
        prev_f = f;
    }
    return out;
}

PolarPath project_to_halfplane(const SampledPath& path) {
    path.validate();
    if (path.dim() < 2)
        throw std::invalid_argument("cone paths need at least 2 coordinates");
    PolarPath out;
    out.params = path.params;
    out.rho.resize(path.size());
    out.phi.resize(path.size());
    double last_phi = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        double rho = norm(path.points[i]);
        out.rho[i] = rho;
        if (rho == 0.0) {
            out.phi[i] = last_phi;  // the cone point carries no direction
        } else {
            double z = path.points[i].back() / rho;
            out.phi[i] = std::acos(std::clamp(z, -1.0, 1.0));
            last_phi = out.phi[i];
        }
    }
    return out;
}

namespace {

double band_index(const SectorMetric& metric, double phi_polar) {
    // phi is the polar angle on the shape sphere; the developed wedge angle
    // is c * phi.
    return metric.index_at(metric.cone_ratio() * phi_polar);
}

} // namespace

double step_length_cone(const SectorMetric& metric, const SampledPath& path) {
    path.validate();
    if (!metric.step_params())
        throw std::invalid_argument("cone length requires a step-shape sector metric");
    const double c = metric.cone_ratio();
    const std::size_t n = path.size();
    std::vector<double> rho(n), phi(n), nidx(n);
    std::vector<Vec> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        rho[i] = norm(path.points[i]);
        if (rho[i] > 0.0) s[i] = scale(path.points[i], 1.0 / rho[i]);
        phi[i] = rho[i] > 0.0
                     ? std::acos(std::clamp(path.points[i].back() / rho[i], -1.0, 1.0))
                     : 0.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (rho[i] == 0.0 && rho[i + 1] == 0.0) continue;
        double drho = rho[i + 1] - rho[i];
        double theta = 0.0;
        if (rho[i] > 0.0 && rho[i + 1] > 0.0) {
            theta = std::acos(std::clamp(dot(s[i], s[i + 1]), -1.0, 1.0));
        }
        double na = band_index(metric, rho[i] > 0.0 ? phi[i] : phi[i + 1]);
        double nb = band_index(metric, rho[i + 1] > 0.0 ? phi[i + 1] : phi[i]);
        double ga = na * std::sqrt(sq(drho) + sq(c * rho[i] * theta));
        double gb = nb * std::sqrt(sq(drho) + sq(c * rho[i + 1] * theta));
        total += 0.5 * (ga + gb);
    }
    return total;
}

double step_length_halfplane(const SectorMetric& metric, const PolarPath& path) {
    const std::size_t n = path.rho.size();
    if (n < 2 || path.phi.size() != n)
        throw std::invalid_argument("half-plane path needs matching rho/phi with >= 2 samples");
    const double c = metric.cone_ratio();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double drho = path.rho[i + 1] - path.rho[i];
        double dphi = path.phi[i + 1] - path.phi[i];
        double na = band_index(metric, path.rho[i] > 0.0 ? path.phi[i] : path.phi[i + 1]);
        double nb = band_index(metric, path.rho[i + 1] > 0.0 ? path.phi[i + 1] : path.phi[i]);
        double ga = na * std::sqrt(sq(drho) + sq(c * path.rho[i] * dphi));
        double gb = nb * std::sqrt(sq(drho) + sq(c * path.rho[i + 1] * dphi));
        total += 0.5 * (ga + gb);
    }
    return total;
}

} // namespace jmlab
