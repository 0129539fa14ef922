#include "jmlab/potentials.hpp"

#include <cmath>
#include <utility>

#include "jmlab/rng.hpp"

namespace jmlab {

MassSystem::MassSystem(int d, std::vector<double> m, double kappa_)
    : ambient_dim(d), masses(std::move(m)), kappa(kappa_) {
    if (ambient_dim < 1) throw std::invalid_argument("ambient dimension must be >= 1");
    if (masses.size() < 2) throw std::invalid_argument("a mass system needs N >= 2 bodies");
    for (double mass : masses)
        if (!(mass > 0.0)) throw std::invalid_argument("masses must be positive");
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
}

double mass_inner_product(const Vec& q, const Vec& p, const MassSystem& sys) {
    const std::size_t M = static_cast<std::size_t>(sys.config_dim());
    if (q.size() != M || p.size() != M)
        throw std::invalid_argument("configuration length must be d * N");
    double s = 0.0;
    const int d = sys.ambient_dim;
    for (int a = 0; a < sys.body_count(); ++a) {
        double block = 0.0;
        for (int k = 0; k < d; ++k) block += q[a * d + k] * p[a * d + k];
        s += sys.masses[a] * block;
    }
    return s;
}

StepShapeParams::StepShapeParams(double outer, double band, double d)
    : outer_value(outer), band_value(band), delta(d) {
    if (!(outer_value > 0.0) || !(band_value > outer_value))
        throw std::invalid_argument("step shape requires 0 < outer_value < band_value");
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument("step shape requires 0 < delta < 1");
}

const char* to_string(Convention c) {
    return c == Convention::JmConsistent ? "JmConsistent" : "PaperLiteral";
}

Convention convention_from_string(const std::string& s) {
    if (s == "JmConsistent") return Convention::JmConsistent;
    if (s == "PaperLiteral") return Convention::PaperLiteral;
    throw std::invalid_argument("unknown convention '" + s +
                                "' (expected JmConsistent or PaperLiteral)");
}

struct HomogeneousPotential::Impl {
    PotentialKind kind;
    double alpha;
    int dim;
    Convention conv;
    std::optional<MassSystem> system;
    std::optional<StepShapeParams> step;
    ShapeFn shape;   // AnalyticShape only
    GradFn grad;     // optional analytic gradient of U
    Vec weights;     // kinetic inner product diagonal
};

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("alpha must lie strictly in (0, 2)");
}

Vec ones(int n) { return Vec(static_cast<std::size_t>(n), 1.0); }

} // namespace

HomogeneousPotential::HomogeneousPotential(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

HomogeneousPotential HomogeneousPotential::power_law(MassSystem sys, double alpha,
                                                     Convention conv) {
    check_alpha(alpha);
    auto impl = std::make_shared<Impl>();
    impl->kind = PotentialKind::PowerLaw;
    impl->alpha = alpha;
    impl->dim = sys.config_dim();
    impl->conv = conv;
    impl->weights.reserve(static_cast<std::size_t>(impl->dim));
    for (double m : sys.masses)
        for (int k = 0; k < sys.ambient_dim; ++k) impl->weights.push_back(m);
    impl->system = std::move(sys);
    return HomogeneousPotential(std::move(impl));
}

HomogeneousPotential HomogeneousPotential::analytic_shape(int dim, double alpha, ShapeFn shape,
                                                          Convention conv, GradFn grad) {
    check_alpha(alpha);
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!shape) throw std::invalid_argument("shape callable must be set");
    auto impl = std::make_shared<Impl>();
    impl->kind = PotentialKind::AnalyticShape;
    impl->alpha = alpha;
    impl->dim = dim;
    impl->conv = conv;
    impl->shape = std::move(shape);
    impl->grad = std::move(grad);
    impl->weights = ones(dim);
    return HomogeneousPotential(std::move(impl));
}

HomogeneousPotential HomogeneousPotential::central(int dim, double alpha, double strength,
                                                   Convention conv) {
    if (!(strength > 0.0)) throw std::invalid_argument("strength must be positive");
    GradFn grad = [alpha, strength](const Vec& q) {
        double r2 = dot(q, q);
        double f = -alpha * strength * std::pow(r2, -(alpha + 2.0) / 2.0);
        return scale(q, f);
    };
    return analytic_shape(
        dim, alpha, [strength](const Vec&) { return strength; }, conv, std::move(grad));
}

HomogeneousPotential HomogeneousPotential::step_shape(int dim, double alpha,
                                                      StepShapeParams params, Convention conv) {
    check_alpha(alpha);
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    auto impl = std::make_shared<Impl>();
    impl->kind = PotentialKind::StepShape;
    impl->alpha = alpha;
    impl->dim = dim;
    impl->conv = conv;
    impl->step = params;
    impl->weights = ones(dim);
    return HomogeneousPotential(std::move(impl));
}

PotentialKind HomogeneousPotential::potential_kind() const { return impl_->kind; }
double HomogeneousPotential::alpha() const { return impl_->alpha; }
int HomogeneousPotential::dim() const { return impl_->dim; }
Convention HomogeneousPotential::convention() const { return impl_->conv; }
const std::optional<MassSystem>& HomogeneousPotential::mass_system() const {
    return impl_->system;
}
const std::optional<StepShapeParams>& HomogeneousPotential::step_params() const {
    return impl_->step;
}
const Vec& HomogeneousPotential::metric_weights() const { return impl_->weights; }

namespace {

void check_dim(const HomogeneousPotential& pot, const Vec& q) {
    if (q.size() != static_cast<std::size_t>(pot.dim()))
        throw std::invalid_argument("configuration has the wrong dimension");
}

} // namespace

PotentialValue HomogeneousPotential::evaluate(const Vec& q) const {
    check_dim(*this, q);
    const Impl& im = *impl_;
    if (im.kind == PotentialKind::PowerLaw) {
        const MassSystem& sys = *im.system;
        const int d = sys.ambient_dim;
        double u = 0.0;
        for (int a = 0; a < sys.body_count(); ++a) {
            for (int b = a + 1; b < sys.body_count(); ++b) {
                double r2 = 0.0;
                for (int k = 0; k < d; ++k) {
                    double diff = q[a * d + k] - q[b * d + k];
                    r2 += diff * diff;
                }
                if (r2 == 0.0) return PotentialValue::pole();
                u += sys.masses[a] * sys.masses[b] * std::pow(r2, -im.alpha / 2.0);
            }
        }
        return PotentialValue::of(sys.kappa * u);
    }
    double r = norm(q);
    if (r == 0.0) return PotentialValue::pole();
    Vec s = scale(q, 1.0 / r);
    double shape_value;
    if (im.kind == PotentialKind::StepShape) {
        double z = s.back();
        shape_value = std::abs(z) <= im.step->delta ? im.step->band_value
                                                    : im.step->outer_value;
    } else {
        shape_value = im.shape(s);
    }
    return PotentialValue::of(std::pow(r, -im.alpha) * shape_value);
}

PotentialValue HomogeneousPotential::shape(const Vec& s) const {
    check_dim(*this, s);
    double r = norm(s);
    if (r == 0.0) throw std::invalid_argument("shape at the zero vector is undefined");
    if (std::abs(r - 1.0) > 1e-9)
        throw std::invalid_argument("shape input is not a unit vector (|norm - 1| > 1e-9)");
    return evaluate(scale(s, 1.0 / r));
}

Vec HomogeneousPotential::gradient(const Vec& q) const {
    check_dim(*this, q);
    const Impl& im = *impl_;
    if (im.kind == PotentialKind::StepShape)
        throw std::domain_error("step shapes are not differentiable");
    if (evaluate(q).is_pole()) throw std::domain_error("gradient at a collision pole");
    if (im.kind == PotentialKind::PowerLaw) {
        const MassSystem& sys = *im.system;
        const int d = sys.ambient_dim;
        Vec g(q.size(), 0.0);
        for (int a = 0; a < sys.body_count(); ++a) {
            for (int b = a + 1; b < sys.body_count(); ++b) {
                double r2 = 0.0;
                for (int k = 0; k < d; ++k) {
                    double diff = q[a * d + k] - q[b * d + k];
                    r2 += diff * diff;
                }
                double f = -im.alpha * sys.kappa * sys.masses[a] * sys.masses[b] *
                           std::pow(r2, -(im.alpha + 2.0) / 2.0);
                for (int k = 0; k < d; ++k) {
                    double diff = q[a * d + k] - q[b * d + k];
                    g[a * d + k] += f * diff;
                    g[b * d + k] -= f * diff;
                }
            }
        }
        return g;
    }
    if (im.grad) return im.grad(q);
    // Central differences; adequate for the smooth analytic shapes used in
    // optimization tests.
    Vec g(q.size());
    Vec probe = q;
    const double h = 1e-6 * std::max(1.0, norm(q));
    for (std::size_t i = 0; i < q.size(); ++i) {
        probe[i] = q[i] + h;
        double up = evaluate(probe).value();
        probe[i] = q[i] - h;
        double um = evaluate(probe).value();
        probe[i] = q[i];
        g[i] = (up - um) / (2.0 * h);
    }
    return g;
}

Vec HomogeneousPotential::newton_acceleration(const Vec& q) const {
    Vec g = gradient(q);
    const Vec& w = impl_->weights;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] /= w[i];
    return g;
}

double HomogeneousPotential::collision_distance(const Vec& q) const {
    check_dim(*this, q);
    const Impl& im = *impl_;
    if (im.kind != PotentialKind::PowerLaw) return norm(q);
    const MassSystem& sys = *im.system;
    const int d = sys.ambient_dim;
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < sys.body_count(); ++a) {
        for (int b = a + 1; b < sys.body_count(); ++b) {
            double r2 = 0.0;
            for (int k = 0; k < d; ++k) {
                double diff = q[a * d + k] - q[b * d + k];
                r2 += diff * diff;
            }
            best = std::min(best, std::sqrt(r2));
        }
    }
    return best;
}

double homogeneity_deviation(const std::function<double(const Vec&)>& u, double alpha,
                             int dim, int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        Vec s = rng.unit_vector(static_cast<std::size_t>(dim));
        double r = rng.uniform(0.2, 5.0);
        double expected = std::pow(r, -alpha) * u(s);
        double got = u(scale(s, r));
        double denom = std::max(std::abs(expected), 1e-300);
        worst = std::max(worst, std::abs(got - expected) / denom);
    }
    return worst;
}

double homogeneity_check(const HomogeneousPotential& pot, int samples, std::uint64_t seed) {
    auto u = [&pot](const Vec& q) { return pot.evaluate(q).value_or_infinity(); };
    return homogeneity_deviation(u, pot.alpha(), pot.dim(), samples, seed);
}

} // namespace jmlab
