#pragma once

#include <cmath>
#include <cstdint>

#include "jmlab/types.hpp"

namespace jmlab {

// Deterministic splitmix64 generator. Unlike the standard <random>
// distributions, the stream is identical on every platform and compiler,
// which is what keeps scenario outputs byte-stable for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Standard normal via Box-Muller (one value per call; no cached spare,
    // so the stream stays position-independent).
    double normal() {
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // Uniform direction on the unit sphere of the given dimension.
    Vec unit_vector(std::size_t dim) {
        Vec v(dim);
        double n2 = 0.0;
        do {
            n2 = 0.0;
            for (auto& x : v) {
                x = normal();
                n2 += x * x;
            }
        } while (n2 == 0.0);
        double inv = 1.0 / std::sqrt(n2);
        for (auto& x : v) x *= inv;
        return v;
    }

private:
    std::uint64_t state_;
};

} // namespace jmlab
