#include "squeezebell/squeezed_state.hpp"

#include <cmath>
#include <numbers>

#include "squeezebell/errors.hpp"

namespace squeezebell {

namespace {

const Complex kI{0.0, 1.0};

void check_r(double r) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
        throw DomainError("squeezing amplitude r must be finite and >= 0 (got " + std::to_string(r) +
                          ")");
    }
}

}  // namespace

Complex squeeze_denominator(double r, double varphi) {
    check_r(r);
    const double t = std::tanh(r);
    const double sech = 1.0 / std::cosh(r);
    // 1 − e^{−4iφ} = 2i e^{−2iφ} sin 2φ
    const Complex one_minus_w = 2.0 * kI * std::polar(1.0, -2.0 * varphi) * std::sin(2.0 * varphi);
    const Complex den = sech * sech + t * t * one_minus_w;
    if (std::abs(den) < 1e-300) {
        throw SingularityError("squeezing coefficients: 1 - exp(-4i*varphi)*tanh(r)^2 vanishes (r = " +
                               std::to_string(r) + ", varphi = " + std::to_string(varphi) + ")");
    }
    return den;
}

Complex coeff_A(double r, double varphi) {
    const Complex den = squeeze_denominator(r, varphi);
    const double t = std::tanh(r);
    const double sech = 1.0 / std::cosh(r);
    // 1 + e^{−4iφ}tanh²r = sech²r + tanh²r · 2cos2φ e^{−2iφ}
    const Complex num = sech * sech + t * t * 2.0 * std::cos(2.0 * varphi) * std::polar(1.0, -2.0 * varphi);
    return -num / den;
}

Complex coeff_B(double r, double varphi) {
    const Complex den = squeeze_denominator(r, varphi);
    return 2.0 * std::polar(1.0, -2.0 * varphi) * std::tanh(r) / den;
}

Complex wavefunction(double q1, double q2, const SqueezeParams& p) {
    const Complex A = coeff_A(p.r, p.varphi);
    const Complex B = coeff_B(p.r, p.varphi);
    const Complex den = squeeze_denominator(p.r, p.varphi);
    const Complex expo = 0.5 * A * (q1 * q1 + q2 * q2) + B * q1 * q2;
    return std::exp(expo) / (std::cosh(p.r) * std::sqrt(std::numbers::pi) * principal_sqrt(den));
}

Complex fock_amplitude(int n, const SqueezeParams& p) {
    if (n < 0) throw DomainError("fock_amplitude: n must be >= 0");
    check_r(p.r);
    return std::polar(std::pow(std::tanh(p.r), n) / std::cosh(p.r), -2.0 * n * p.varphi);
}

int fock_truncation(double r, double tol) {
    check_r(r);
    const double t = std::tanh(r);
    if (t == 0.0) return 1;
    if (t >= 1.0) throw DomainError("fock_truncation: tanh(r) rounds to 1");
    const double n = std::log(tol) / (2.0 * std::log(t));
    return std::max(1, static_cast<int>(std::ceil(n)));
}

PositionCovariance position_covariance(double r, double varphi) {
    check_r(r);
    const double c = std::cosh(2.0 * r);
    const double s = std::sinh(2.0 * r);
    const double sp = std::sin(2.0 * varphi);
    return {0.5 * c, 0.5 * s * std::cos(2.0 * varphi), (1.0 + s * s * sp * sp) / (2.0 * c)};
}

}  // namespace squeezebell
