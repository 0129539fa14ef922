#include "jmlab/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jmlab/rng.hpp"

namespace jmlab {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kInf = std::numeric_limits<double>::infinity();

// Derivative at `at` of the quadratic through (xa,qa), (xb,qb), (xc,qc).
// Exact for polynomials of degree <= 2, which keeps finite differences
// stable through the parabolic collision law r(s) ~ quadratic.
Vec three_point_derivative(double xa, const Vec& qa, double xb, const Vec& qb, double xc,
                           const Vec& qc, double at) {
    double ca = (2.0 * at - xb - xc) / ((xa - xb) * (xa - xc));
    double cb = (2.0 * at - xa - xc) / ((xb - xa) * (xb - xc));
    double cc = (2.0 * at - xa - xb) / ((xc - xa) * (xc - xb));
    Vec out(qa.size());
    for (std::size_t k = 0; k < qa.size(); ++k)
        out[k] = ca * qa[k] + cb * qb[k] + cc * qc[k];
    return out;
}

Vec sample_derivative(const SampledPath& path, std::size_t i) {
    const std::size_t n = path.size();
    if (n == 2) {
        Vec d = sub(path.points[1], path.points[0]);
        return scale(d, 1.0 / (path.params[1] - path.params[0]));
    }
    std::size_t a = (i == 0) ? 0 : i - 1;
    if (a + 2 >= n) a = n - 3;
    return three_point_derivative(path.params[a], path.points[a], path.params[a + 1],
                                  path.points[a + 1], path.params[a + 2], path.points[a + 2],
                                  path.params[i]);
}

} // namespace

std::vector<Vec> path_velocities(const SampledPath& path) {
    path.validate();
    if (path.kind != ParamKind::Time)
        throw std::invalid_argument("velocities require a Time-parameterized path");
    std::vector<Vec> out(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) out[i] = sample_derivative(path, i);
    return out;
}

std::vector<double> energy_profile(const SampledPath& path, const HomogeneousPotential& pot) {
    path.validate();
    if (static_cast<int>(path.dim()) != pot.dim())
        throw std::invalid_argument("path dimension does not match the potential");
    const Vec& w = pot.metric_weights();
    std::vector<double> out(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        PotentialValue u = pot.evaluate(path.points[i]);
        if (u.is_pole()) {
            out[i] = kNaN;
            continue;
        }
        Vec v = sample_derivative(path, i);
        out[i] = 0.5 * dot(v, v, w) - u.value();
    }
    return out;
}

ActionReport discrete_action(const SampledPath& path, const HomogeneousPotential& pot) {
    path.validate();
    if (path.kind != ParamKind::Time)
        throw std::invalid_argument("discrete_action requires a Time-parameterized path");
    if (static_cast<int>(path.dim()) != pot.dim())
        throw std::invalid_argument("path dimension does not match the potential");
    const Vec& w = pot.metric_weights();
    const std::size_t n = path.size();

    std::vector<PotentialValue> u;
    u.reserve(n);
    for (const Vec& q : path.points) u.push_back(pot.evaluate(q));

    ActionReport rep;
    rep.kinetic_integral = 0.0;
    rep.potential_integral = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double dt = path.params[i + 1] - path.params[i];
        double d = distance(path.points[i], path.points[i + 1], w);
        bool pi = u[i].is_pole(), pj = u[i + 1].is_pole();
        if (pi && pj)
            throw std::invalid_argument("segment joins two collision poles; refine the path");
        if (!pi && !pj) {
            rep.kinetic_integral += d * d / (2.0 * dt);
            rep.potential_integral += 0.5 * (u[i].value() + u[i + 1].value()) * dt;
        } else {
            double a = pot.alpha();
            double ureg = (pi ? u[i + 1] : u[i]).value();
            rep.kinetic_integral += 2.0 * d * d / ((2.0 + a) * (2.0 - a) * dt);
            rep.potential_integral += ureg * dt * (2.0 + a) / (2.0 - a);
        }
    }
    rep.action = rep.kinetic_integral + rep.potential_integral;
    rep.energy_profile = energy_profile(path, pot);
    for (std::size_t i = 0; i < n; ++i)
        if (u[i].is_pole()) rep.pole_samples.push_back(i);
    return rep;
}

double el_residual(const SampledPath& path, const HomogeneousPotential& pot) {
    path.validate();
    if (path.kind != ParamKind::Time)
        throw std::invalid_argument("residual requires a Time-parameterized path");
    if (static_cast<int>(path.dim()) != pot.dim())
        throw std::invalid_argument("path dimension does not match the potential");
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        if (pot.evaluate(path.points[i]).is_pole()) continue;
        double dtm = path.params[i] - path.params[i - 1];
        double dtp = path.params[i + 1] - path.params[i];
        Vec acc(path.dim());
        for (std::size_t k = 0; k < path.dim(); ++k) {
            double fwd = (path.points[i + 1][k] - path.points[i][k]) / dtp;
            double bwd = (path.points[i][k] - path.points[i - 1][k]) / dtm;
            acc[k] = 2.0 * (fwd - bwd) / (dtm + dtp);
        }
        Vec rhs = pot.newton_acceleration(path.points[i]);
        worst = std::max(worst, distance(acc, rhs));
    }
    return worst;
}

MinimizeNotConverged::MinimizeNotConverged(std::string msg, MinimizeResult best)
    : std::runtime_error(std::move(msg)), best_(std::move(best)) {}

namespace {

struct ActionEval {
    double f = kInf;
    std::vector<double> grad;  // empty when f is infinite
    bool finite = false;
};

// Flattened interior coordinates <-> sample list, endpoints fixed.
class ActionProblem {
public:
    ActionProblem(const Vec& q0, const Vec& q1, double T, int n,
                  const HomogeneousPotential& pot)
        : q0_(q0), q1_(q1), pot_(pot), n_(n), dim_(static_cast<int>(q0.size())),
          dt_(T / (n - 1)) {}

    int interior() const { return n_ - 2; }
    int dofs() const { return interior() * dim_; }
    double dt() const { return dt_; }

    std::vector<Vec> samples(const std::vector<double>& x) const {
        std::vector<Vec> pts(static_cast<std::size_t>(n_));
        pts.front() = q0_;
        pts.back() = q1_;
        for (int i = 1; i + 1 < n_; ++i) {
            Vec q(static_cast<std::size_t>(dim_));
            for (int k = 0; k < dim_; ++k)
                q[static_cast<std::size_t>(k)] =
                    x[static_cast<std::size_t>((i - 1) * dim_ + k)];
            pts[static_cast<std::size_t>(i)] = std::move(q);
        }
        return pts;
    }

    SampledPath path(const std::vector<double>& x) const {
        std::vector<double> t(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) t[static_cast<std::size_t>(i)] = i * dt_;
        return SampledPath(samples(x), std::move(t), ParamKind::Time);
    }

    ActionEval evaluate(const std::vector<double>& x, bool want_grad) const {
        std::vector<Vec> pts = samples(x);
        const Vec& w = pot_.metric_weights();
        std::vector<double> uval(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            PotentialValue u = pot_.evaluate(pts[i]);
            if (u.is_pole()) return ActionEval{};  // infinite action, reject
            uval[i] = u.value();
        }
        ActionEval out;
        out.finite = true;
        out.f = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            double d = distance(pts[i], pts[i + 1], w);
            out.f += d * d / (2.0 * dt_) + 0.5 * (uval[i] + uval[i + 1]) * dt_;
        }
        if (!want_grad) return out;
        out.grad.assign(static_cast<std::size_t>(dofs()), 0.0);
        for (int i = 1; i + 1 < n_; ++i) {
            const Vec& qm = pts[static_cast<std::size_t>(i - 1)];
            const Vec& qi = pts[static_cast<std::size_t>(i)];
            const Vec& qp = pts[static_cast<std::size_t>(i + 1)];
            Vec gu = pot_.gradient(qi);
            for (int k = 0; k < dim_; ++k) {
                auto ku = static_cast<std::size_t>(k);
                double kin = w[ku] * (2.0 * qi[ku] - qm[ku] - qp[ku]) / dt_;
                out.grad[static_cast<std::size_t>((i - 1) * dim_ + k)] =
                    kin + dt_ * gu[ku];
            }
        }
        return out;
    }

private:
    Vec q0_, q1_;
    const HomogeneousPotential& pot_;
    int n_;
    int dim_;
    double dt_;
};

double l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

} // namespace

MinimizeResult minimize_fixed_time(const Vec& q0, const Vec& q1, double T,
                                   const HomogeneousPotential& pot,
                                   const MinimizeOptions& opts) {
    if (q0.size() != q1.size())
        throw std::invalid_argument("endpoint dimensions differ");
    if (static_cast<int>(q0.size()) != pot.dim())
        throw std::invalid_argument("endpoint dimension does not match the potential");
    if (!(T > 0.0)) throw std::invalid_argument("total time must be positive");
    if (opts.sample_count < 3) throw std::invalid_argument("need at least 3 samples");
    if (opts.max_iterations < 1) throw std::invalid_argument("need at least 1 iteration");
    if (opts.starts < 1) throw std::invalid_argument("need at least 1 start");

    const int n = opts.sample_count;
    const int dim = static_cast<int>(q0.size());
    ActionProblem prob(q0, q1, T, n, pot);

    // Base interior samples: the chord, or a resampling of the caller's path.
    std::vector<double> base(static_cast<std::size_t>(prob.dofs()));
    if (opts.init) {
        const SampledPath& ip = *opts.init;
        ip.validate();
        if (static_cast<int>(ip.dim()) != dim)
            throw std::invalid_argument("init path dimension mismatch");
        double p0 = ip.params.front(), p1 = ip.params.back();
        for (int i = 1; i + 1 < n; ++i) {
            double u = p0 + (p1 - p0) * i / (n - 1);
            std::size_t k = 0;
            while (k + 2 < ip.size() && ip.params[k + 1] < u) ++k;
            double s = (u - ip.params[k]) / (ip.params[k + 1] - ip.params[k]);
            for (int c = 0; c < dim; ++c) {
                auto cu = static_cast<std::size_t>(c);
                base[static_cast<std::size_t>((i - 1) * dim + c)] =
                    (1.0 - s) * ip.points[k][cu] + s * ip.points[k + 1][cu];
            }
        }
    } else {
        for (int i = 1; i + 1 < n; ++i) {
            double s = static_cast<double>(i) / (n - 1);
            for (int c = 0; c < dim; ++c) {
                auto cu = static_cast<std::size_t>(c);
                base[static_cast<std::size_t>((i - 1) * dim + c)] =
                    (1.0 - s) * q0[cu] + s * q1[cu];
            }
        }
    }

    struct Candidate {
        std::vector<double> x;
        ActionEval eval;
        int iterations = 0;
        int start_index = -1;
        bool converged = false;
    };
    std::optional<Candidate> best_converged;
    std::optional<Candidate> best_any;
    const double amp = opts.perturbation * std::max(1.0, distance(q0, q1));

    for (int s = 0; s < opts.starts; ++s) {
        std::vector<double> x = base;
        if (s > 0) {
            Rng rng(opts.seed + static_cast<std::uint64_t>(s));
            for (int i = 1; i + 1 < n; ++i) {
                double env = std::sin(3.141592653589793 * i / (n - 1));
                for (int c = 0; c < dim; ++c)
                    x[static_cast<std::size_t>((i - 1) * dim + c)] +=
                        amp * env * rng.normal();
            }
        }
        ActionEval e = prob.evaluate(x, true);
        if (!e.finite) continue;  // start sits on a collision, useless

        double gnorm = l2(e.grad);
        double t_step = 0.01 / (1.0 + gnorm);
        int iter = 0;
        bool conv = gnorm <= opts.tolerance;
        std::vector<double> x_new(x.size());
        while (!conv && iter < opts.max_iterations) {
            double g2 = gnorm * gnorm;
            double t = t_step;
            bool accepted = false;
            for (int bt = 0; bt < 60; ++bt) {
                for (std::size_t k = 0; k < x.size(); ++k) x_new[k] = x[k] - t * e.grad[k];
                ActionEval trial = prob.evaluate(x_new, false);
                if (trial.finite && trial.f <= e.f - 1e-4 * t * g2) {
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) break;  // stagnated below step resolution
            ActionEval e_new = prob.evaluate(x_new, true);
            // Barzilai-Borwein step for the next iteration.
            double sxx = 0.0, sxg = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) {
                double dx = x_new[k] - x[k];
                double dg = e_new.grad[k] - e.grad[k];
                sxx += dx * dx;
                sxg += dx * dg;
            }
            t_step = (sxg > 1e-300 && std::isfinite(sxg)) ? sxx / sxg : t * 2.0;
            t_step = std::clamp(t_step, 1e-12, 1e6);
            x.swap(x_new);
            e = std::move(e_new);
            gnorm = l2(e.grad);
            ++iter;
            conv = gnorm <= opts.tolerance;
        }

        Candidate cand{x, e, iter, s, conv};
        if (conv && (!best_converged || e.f < best_converged->eval.f))
            best_converged = cand;
        if (!best_any || e.f < best_any->eval.f) best_any = std::move(cand);
    }

    if (!best_any)
        throw std::invalid_argument("every start began on a collision configuration");

    const Candidate& win = best_converged ? *best_converged : *best_any;
    MinimizeResult res;
    res.path = prob.path(win.x);
    res.report = discrete_action(res.path, pot);
    res.gradient_norm = l2(win.eval.grad);
    res.el_residual_max = el_residual(res.path, pot);
    res.iterations = win.iterations;
    res.start_index = win.start_index;
    res.converged = win.converged;
    res.collision_touch = false;
    for (const Vec& q : res.path.points)
        if (pot.collision_distance(q) <= 1e-6) res.collision_touch = true;

    if (!best_converged)
        throw MinimizeNotConverged("action minimization did not reach the gradient tolerance",
                                   std::move(res));
    return res;
}

ReparamResult zero_energy_reparameterize(const SampledPath& path,
                                         const HomogeneousPotential& pot, double speed_tol) {
    path.validate();
    if (static_cast<int>(path.dim()) != pot.dim())
        throw std::invalid_argument("path dimension does not match the potential");
    const Vec& w = pot.metric_weights();
    const std::size_t n = path.size();

    std::vector<PotentialValue> u;
    u.reserve(n);
    for (const Vec& q : path.points) u.push_back(pot.evaluate(q));

    for (std::size_t i = 0; i + 1 < n; ++i) {
        bool pi = u[i].is_pole(), pj = u[i + 1].is_pole();
        if (pi && pj)
            throw std::invalid_argument("segment joins two collision poles; refine the path");
        if (pi || pj) continue;  // discrete speed degrades legitimately here
        double ds = path.params[i + 1] - path.params[i];
        // The trapezoid speed of a straight segment carries a quadrature
        // error of order (step / (4 reach))^2, reach the distance to the
        // nearest collision; once that reaches the tolerance the check has
        // no verdict at this resolution and is skipped.
        double step = distance(path.points[i], path.points[i + 1]);
        double reach = std::min(pot.collision_distance(path.points[i]),
                                pot.collision_distance(path.points[i + 1]));
        if (step * step >= 8.0 * speed_tol * reach * reach) continue;
        double d = distance(path.points[i], path.points[i + 1], w);
        double seglen =
            0.5 * (std::sqrt(2.0 * u[i].value()) + std::sqrt(2.0 * u[i + 1].value())) * d;
        if (std::abs(seglen / ds - 1.0) > speed_tol)
            throw std::invalid_argument(
                "path is not unit speed for the zero-energy metric (segment " +
                std::to_string(i) + ")");
    }

    std::vector<double> t(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double ds = path.params[i + 1] - path.params[i];
        double inv_i = u[i].is_pole() ? 0.0 : 1.0 / (2.0 * u[i].value());
        double inv_j = u[i + 1].is_pole() ? 0.0 : 1.0 / (2.0 * u[i + 1].value());
        t[i + 1] = t[i] + ds * 0.5 * (inv_i + inv_j);
    }

    ReparamResult out;
    out.path = SampledPath(path.points, t, ParamKind::Time);
    out.total_time = t.back();
    out.energy_profile.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (u[i].is_pole()) {
            out.energy_profile[i] = kNaN;
            continue;
        }
        // Within the stencil's resolution window of a collision, U amplifies
        // the last digits of the sample coordinates past any estimate of H;
        // same resolution limit as the speed check, same verdict: no number.
        double reach = pot.collision_distance(path.points[i]);
        double step = 0.0;
        if (i > 0) step = std::max(step, distance(path.points[i - 1], path.points[i]));
        if (i + 1 < n) step = std::max(step, distance(path.points[i], path.points[i + 1]));
        if (step * step >= 8.0 * speed_tol * reach * reach) {
            out.energy_profile[i] = kNaN;
            continue;
        }
        Vec dq = sample_derivative(path, i);  // derivative in arclength s
        double uu = u[i].value();
        out.energy_profile[i] = uu * (2.0 * uu * dot(dq, dq, w) - 1.0);
    }
    return out;
}

BridgeReport action_length_bridge(const SampledPath& path, const HomogeneousPotential& pot) {
    BridgeReport out;
    out.length = jm_length(JmMetric{0.0, pot}, path);
    out.action = discrete_action(path, pot).action;
    out.slack = out.action - out.length;
    return out;
}

SampledPath blowup_rescale(const SampledPath& path, double lambda, double alpha) {
    path.validate();
    if (path.kind != ParamKind::Time)
        throw std::invalid_argument("blow-up rescaling acts on Time-parameterized paths");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("alpha must lie in (0, 2)");
    double nu = 1.0 + alpha / 2.0;
    double tscale = std::pow(lambda, nu);
    std::vector<Vec> pts;
    pts.reserve(path.size());
    for (const Vec& q : path.points) pts.push_back(scale(q, lambda));
    std::vector<double> t;
    t.reserve(path.size());
    for (double x : path.params) t.push_back(tscale * x);
    return SampledPath(std::move(pts), std::move(t), ParamKind::Time);
}

double metric_dilation_check(const HomogeneousPotential& pot, double h, double lambda,
                             const std::vector<SampledPath>& sample_paths) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (sample_paths.empty()) throw std::invalid_argument("need at least one sample path");
    double alpha = pot.alpha();
    double worst = 0.0;
    for (const SampledPath& p : sample_paths) {
        p.validate();
        std::vector<Vec> pts;
        pts.reserve(p.size());
        for (const Vec& q : p.points) pts.push_back(scale(q, lambda));
        SampledPath scaled(std::move(pts), p.params, p.kind);
        double left = jm_length(JmMetric{h, pot}, scaled);
        double right = std::pow(lambda, 1.0 - alpha / 2.0) *
                       jm_length(JmMetric{std::pow(lambda, alpha) * h, pot}, p);
        worst = std::max(worst, std::abs(left - right) / std::max(std::abs(right), 1e-300));
    }
    return worst;
}

double time_rescale_action(const ActionReport& report, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    return lambda * report.kinetic_integral + report.potential_integral / lambda;
}

SampledPath Trajectory::as_path() const {
    return SampledPath(positions, times, ParamKind::Time);
}

Trajectory integrate_newton(const HomogeneousPotential& pot, const Vec& q0, const Vec& v0,
                            double dt, int steps) {
    if (static_cast<int>(q0.size()) != pot.dim() || q0.size() != v0.size())
        throw std::invalid_argument("state dimension does not match the potential");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (steps < 1) throw std::invalid_argument("need at least one step");

    Trajectory tr;
    tr.times.reserve(static_cast<std::size_t>(steps) + 1);
    tr.positions.reserve(static_cast<std::size_t>(steps) + 1);
    tr.velocities.reserve(static_cast<std::size_t>(steps) + 1);
    Vec q = q0, v = v0;
    tr.times.push_back(0.0);
    tr.positions.push_back(q);
    tr.velocities.push_back(v);
    for (int s = 1; s <= steps; ++s) {
        Vec k1v = pot.newton_acceleration(q);
        const Vec& k1q = v;
        Vec k2q = add(v, scale(k1v, dt / 2.0));
        Vec k2v = pot.newton_acceleration(add(q, scale(k1q, dt / 2.0)));
        Vec k3q = add(v, scale(k2v, dt / 2.0));
        Vec k3v = pot.newton_acceleration(add(q, scale(k2q, dt / 2.0)));
        Vec k4q = add(v, scale(k3v, dt));
        Vec k4v = pot.newton_acceleration(add(q, scale(k3q, dt)));
        for (std::size_t k = 0; k < q.size(); ++k) {
            q[k] += dt / 6.0 * (k1q[k] + 2.0 * k2q[k] + 2.0 * k3q[k] + k4q[k]);
            v[k] += dt / 6.0 * (k1v[k] + 2.0 * k2v[k] + 2.0 * k3v[k] + k4v[k]);
        }
        tr.times.push_back(s * dt);
        tr.positions.push_back(q);
        tr.velocities.push_back(v);
    }
    return tr;
}

BrakeReport brake_retrace_check(const HomogeneousPotential& pot, double h0,
                                const Vec& q_start, double duration, int steps) {
    PotentialValue u0 = pot.evaluate(q_start);
    if (u0.is_pole()) throw std::invalid_argument("brake start is a collision");
    double mismatch = std::abs(h0 + u0.value());
    if (mismatch > 1e-8 * std::max({1.0, std::abs(h0), u0.value()}))
        throw std::invalid_argument("brake start is not on the zero-velocity surface");
    if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
    if (steps < 2) throw std::invalid_argument("need at least two steps");

    const Vec& w = pot.metric_weights();
    auto hamiltonian = [&](const Vec& q, const Vec& v) {
        return 0.5 * dot(v, v, w) - pot.evaluate(q).value();
    };

    double dt = duration / steps;
    Vec zero(q_start.size(), 0.0);
    Trajectory leg1 = integrate_newton(pot, q_start, zero, dt, steps);
    Vec v_back = scale(leg1.velocities.back(), -1.0);
    Trajectory leg2 = integrate_newton(pot, leg1.positions.back(), v_back, dt, 2 * steps);

    BrakeReport rep{0.0, 0.0};
    const std::size_t nsz = static_cast<std::size_t>(steps);
    for (std::size_t j = 0; j < leg2.positions.size(); ++j) {
        std::size_t mirror = (j <= nsz) ? nsz - j : j - nsz;
        rep.max_retrace_deviation = std::max(
            rep.max_retrace_deviation, distance(leg2.positions[j], leg1.positions[mirror]));
    }
    double href = hamiltonian(leg1.positions.front(), leg1.velocities.front());
    for (std::size_t j = 0; j < leg1.positions.size(); ++j)
        rep.max_energy_drift = std::max(
            rep.max_energy_drift,
            std::abs(hamiltonian(leg1.positions[j], leg1.velocities[j]) - href));
    for (std::size_t j = 0; j < leg2.positions.size(); ++j)
        rep.max_energy_drift = std::max(
            rep.max_energy_drift,
            std::abs(hamiltonian(leg2.positions[j], leg2.velocities[j]) - href));
    return rep;
}

} // namespace jmlab
