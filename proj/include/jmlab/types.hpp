#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace jmlab {

using Vec = std::vector<double>;

// A configuration is a flat coordinate vector of length d * N (bodies side
// by side) for many-body potentials, or just the ambient coordinates for
// single-center potentials.
using Configuration = Vec;

// Value of a potential-like quantity: a finite real or a collision pole.
// Poles are tracked exactly; they are never encoded as a floating overflow.
class PotentialValue {
public:
    static PotentialValue of(double v) { return PotentialValue(v, false); }
    static PotentialValue pole() { return PotentialValue(0.0, true); }

    bool is_pole() const { return pole_; }

    // Finite value; throws if this is a pole.
    double value() const {
        if (pole_) throw std::domain_error("value() called on a collision pole");
        return value_;
    }

    // Finite value, or +infinity at a pole. Convenient in comparisons.
    double value_or_infinity() const;

private:
    PotentialValue(double v, bool p) : value_(v), pole_(p) {}
    double value_;
    bool pole_;
};

enum class ParamKind { Time, Arclength, Abstract };

// Ordered samples of a curve. The curve is always understood as the
// piecewise-linear interpolant of the points; params must be strictly
// increasing and there must be at least two samples.
struct SampledPath {
    std::vector<Vec> points;
    std::vector<double> params;
    ParamKind kind = ParamKind::Abstract;

    SampledPath() = default;
    SampledPath(std::vector<Vec> pts, std::vector<double> prm, ParamKind k);

    std::size_t size() const { return points.size(); }
    std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }

    // Throws std::invalid_argument on malformed data.
    void validate() const;
};

// Dense vector helpers. `weights` versions use a diagonal inner product
// (kinetic-energy masses); sizes must agree.
double dot(const Vec& a, const Vec& b);
double dot(const Vec& a, const Vec& b, const Vec& weights);
double norm(const Vec& a);
double norm(const Vec& a, const Vec& weights);
double distance(const Vec& a, const Vec& b);
double distance(const Vec& a, const Vec& b, const Vec& weights);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& a, double s);

} // namespace jmlab
