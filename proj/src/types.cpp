#include "jmlab/types.hpp"

#include <cmath>
#include <limits>

namespace jmlab {

double PotentialValue::value_or_infinity() const {
    return pole_ ? std::numeric_limits<double>::infinity() : value_;
}

SampledPath::SampledPath(std::vector<Vec> pts, std::vector<double> prm, ParamKind k)
    : points(std::move(pts)), params(std::move(prm)), kind(k) {
    validate();
}

void SampledPath::validate() const {
    if (points.size() < 2) throw std::invalid_argument("path needs at least 2 samples");
    if (params.size() != points.size())
        throw std::invalid_argument("path params/points size mismatch");
    const std::size_t d = points.front().size();
    if (d == 0) throw std::invalid_argument("path points must be nonempty vectors");
    for (const auto& p : points)
        if (p.size() != d) throw std::invalid_argument("path points have mixed dimensions");
    for (std::size_t i = 0; i + 1 < params.size(); ++i) {
        if (!(params[i] < params[i + 1]))
            throw std::invalid_argument("path params must be strictly increasing");
    }
    for (double t : params)
        if (!std::isfinite(t)) throw std::invalid_argument("path params must be finite");
}

static void check_same_size(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector size mismatch");
}

double dot(const Vec& a, const Vec& b) {
    check_same_size(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double dot(const Vec& a, const Vec& b, const Vec& weights) {
    check_same_size(a, b);
    check_same_size(a, weights);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += weights[i] * a[i] * b[i];
    return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
double norm(const Vec& a, const Vec& weights) { return std::sqrt(dot(a, a, weights)); }

double distance(const Vec& a, const Vec& b) { return norm(sub(a, b)); }
double distance(const Vec& a, const Vec& b, const Vec& weights) {
    return norm(sub(a, b), weights);
}

Vec add(const Vec& a, const Vec& b) {
    check_same_size(a, b);
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Vec sub(const Vec& a, const Vec& b) {
    check_same_size(a, b);
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vec scale(const Vec& a, double s) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

} // namespace jmlab
