#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "jmlab/types.hpp"

namespace jmlab {

// N point masses in d-dimensional ambient space, with coupling constant
// kappa. Configurations are flat vectors of length d * N.
struct MassSystem {
    int ambient_dim;
    std::vector<double> masses;
    double kappa;

    MassSystem(int d, std::vector<double> m, double kappa_ = 1.0);

    int body_count() const { return static_cast<int>(masses.size()); }
    int config_dim() const { return ambient_dim * body_count(); }
};

// Kinetic-energy inner product <q, p> = sum_a m_a q_a . p_a.
double mass_inner_product(const Vec& q, const Vec& p, const MassSystem& sys);

// Piecewise-constant shape on the sphere: `outer_value` away from the
// equatorial band, `band_value` on |z| <= delta, where z is the last
// coordinate of the unit vector. Requires 0 < outer_value < band_value and
// 0 < delta < 1.
struct StepShapeParams {
    double outer_value;
    double band_value;
    double delta;

    StepShapeParams(double outer, double band, double d);
};

// How the piecewise-constant shape is turned into a refraction index for
// flat-sector computations: Literal uses the raw shape values as indices of
// refraction (optical-analogy reading); JmConsistent uses their square
// roots, which is the weight the conformal length element actually carries.
enum class Convention { JmConsistent, PaperLiteral };

const char* to_string(Convention c);
Convention convention_from_string(const std::string& s);

enum class PotentialKind { PowerLaw, AnalyticShape, StepShape };

// A potential U > 0, homogeneous of degree -alpha with 0 < alpha < 2
// (strictly; alpha >= 2 makes collision poles non-integrable and is
// rejected at construction). Immutable and cheap to copy.
class HomogeneousPotential {
public:
    using ShapeFn = std::function<double(const Vec&)>;
    using GradFn = std::function<Vec(const Vec&)>;

    // Sum over pairs of kappa m_a m_b / r_ab^alpha.
    static HomogeneousPotential power_law(MassSystem sys, double alpha,
                                          Convention conv = Convention::PaperLiteral);

    // U(r s) = r^-alpha * shape(s) for a smooth positive shape on the unit
    // sphere of R^dim. Gradients fall back to central differences unless an
    // analytic gradient of the full U is supplied.
    static HomogeneousPotential analytic_shape(int dim, double alpha, ShapeFn shape,
                                               Convention conv = Convention::PaperLiteral,
                                               GradFn grad = nullptr);

    // Single-center power law U = strength * r^-alpha (constant shape) with
    // an analytic gradient. alpha = 1 is the Kepler potential.
    static HomogeneousPotential central(int dim, double alpha, double strength = 1.0,
                                        Convention conv = Convention::PaperLiteral);

    // U(r s) = r^-alpha * step(s) with the equatorial-band step shape.
    static HomogeneousPotential step_shape(int dim, double alpha, StepShapeParams params,
                                           Convention conv = Convention::PaperLiteral);

    PotentialKind potential_kind() const;
    double alpha() const;
    int dim() const;
    Convention convention() const;
    const std::optional<MassSystem>& mass_system() const;
    const std::optional<StepShapeParams>& step_params() const;

    // U(q); a pole exactly at collisions (some r_ab = 0, or q = 0 for
    // single-center shapes).
    PotentialValue evaluate(const Vec& q) const;

    // U restricted to the unit sphere. Inputs with | |s| - 1 | <= 1e-9 are
    // renormalized silently; anything farther from the sphere is an error.
    PotentialValue shape(const Vec& s) const;

    // Euclidean partial derivatives of U. Throws for step shapes (not
    // differentiable) and at poles.
    Vec gradient(const Vec& q) const;

    // Acceleration in Newton's equations q_a'' = (1/m_a) dU/dq_a, i.e. the
    // gradient taken in the kinetic-energy inner product.
    Vec newton_acceleration(const Vec& q) const;

    // Diagonal weights of the kinetic-energy inner product (masses repeated
    // per ambient coordinate for power laws, all ones otherwise).
    const Vec& metric_weights() const;

    // Euclidean distance to the nearest collision set: min r_ab for power
    // laws, |q| for single-center shapes. Used for collision-touch flags.
    double collision_distance(const Vec& q) const;

private:
    struct Impl;
    explicit HomogeneousPotential(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

// Max relative deviation of U(r s) from r^-alpha U(s) over seeded random
// radii and directions. A generic callable version backs the member one so
// that deliberately broken test functions can be measured too.
double homogeneity_deviation(const std::function<double(const Vec&)>& u, double alpha,
                             int dim, int samples, std::uint64_t seed);
double homogeneity_check(const HomogeneousPotential& pot, int samples = 256,
                         std::uint64_t seed = 0);

} // namespace jmlab
