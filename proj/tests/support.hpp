#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "squeezebell/squeezed_state.hpp"

namespace testsupport {

using Complex = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

/// 20-point Gauss–Legendre on [a, b] split into `pieces` equal parts.
template <class F>
auto gl(F&& f, double a, double b, int pieces = 1) {
    using R = decltype(f(a));
    R acc{};
    const double h = (b - a) / pieces;
    for (int p = 0; p < pieces; ++p) {
        const double lo = a + p * h;
        acc += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, lo + h);
    }
    return acc;
}

/// Random physical parameters: r ∈ [r_lo, r_hi], angles ∈ [−π, π].
class Draws {
public:
    explicit Draws(std::uint64_t seed, double r_lo = 0.0, double r_hi = 6.0)
        : rng_(seed), r_(r_lo, r_hi), angle_(-pi, pi) {}

    squeezebell::SqueezeParams params() { return {r_(rng_), angle_(rng_), angle_(rng_)}; }
    squeezebell::TransitionSpec transition() { return {params(), params()}; }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double angle() { return angle_(rng_); }

private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> r_;
    std::uniform_real_distribution<double> angle_;
};

/// Orthonormal Hermite functions h_0..h_{n-1} at q.
inline std::vector<double> hermite_functions(int n, double q) {
    std::vector<double> h(static_cast<std::size_t>(n));
    h[0] = std::pow(pi, -0.25) * std::exp(-0.5 * q * q);
    if (n > 1) h[1] = std::sqrt(2.0) * q * h[0];
    for (int k = 2; k < n; ++k) {
        h[k] = std::sqrt(2.0 / k) * q * h[k - 1] - std::sqrt((k - 1.0) / k) * h[k - 2];
    }
    return h;
}

inline squeezebell::TransitionSpec spec(double ra, double pa, double rb, double pb, double dtheta) {
    return {{ra, pa, dtheta}, {rb, pb, 0.0}};
}

}  // namespace testsupport
