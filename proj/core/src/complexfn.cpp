#include "squeezebell/complexfn.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "squeezebell/errors.hpp"

namespace squeezebell {

namespace {

constexpr double kInvSqrtPi = 0.56418958354775628694807945156077259;

// Weideman's rational series for w(z) in the closed upper half-plane:
//   w(z) ≈ 2 Σ a_n Z^{n-1} / (L - iz)² + 1/(√π (L - iz)),  Z = (L + iz)/(L - iz).
// Coefficients are the cosine transform of e^{-t²}(L² + t²) sampled at
// t = L tan(θ/2), computed once in long double.
constexpr int kSeriesTerms = 40;

struct WeidemanSeries {
    long double L;
    std::array<double, kSeriesTerms> a;

    WeidemanSeries() {
        constexpr int N = kSeriesTerms;
        constexpr int M = 2 * N;
        L = std::sqrt(static_cast<long double>(N) / std::sqrt(2.0L));
        const long double pi = std::numbers::pi_v<long double>;
        std::array<long double, 2 * M> f{};
        for (int k = -M + 1; k <= M - 1; ++k) {
            const long double t = L * std::tan(k * pi / (2.0L * M));
            f[static_cast<std::size_t>(k + M)] = std::exp(-t * t) * (L * L + t * t);
        }
        for (int n = 1; n <= N; ++n) {
            long double acc = 0;
            for (int k = -M + 1; k <= M - 1; ++k) {
                acc += f[static_cast<std::size_t>(k + M)] * std::cos(pi * k * n / M);
            }
            a[static_cast<std::size_t>(n - 1)] = static_cast<double>(acc / (2.0L * M));
        }
    }
};

const WeidemanSeries& weideman() {
    static const WeidemanSeries series;
    return series;
}

Complex w_series(Complex z) {
    const auto& s = weideman();
    const double L = static_cast<double>(s.L);
    const Complex iz{-z.imag(), z.real()};
    const Complex den = L - iz;
    const Complex Z = (L + iz) / den;
    Complex p = 0.0;
    for (int n = kSeriesTerms - 1; n >= 0; --n) {
        p = p * Z + s.a[static_cast<std::size_t>(n)];
    }
    return 2.0 * p / (den * den) + kInvSqrtPi / den;
}

// Laplace continued fraction, w(z) = (i/√π) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...)))),
// evaluated bottom-up with a depth that shrinks as |z| grows.
Complex w_continued_fraction(Complex z) {
    const double r = std::abs(z);
    const int depth = r > 40 ? 8 : r > 15 ? 20 : 60;
    Complex tail = z;
    for (int k = depth; k >= 1; --k) {
        tail = z - (0.5 * k) / tail;
    }
    return Complex{0.0, kInvSqrtPi} / tail;
}

constexpr double kSeriesRadius = 6.0;

// w(z) for Im z >= 0.
Complex w_upper(Complex z) {
    if (std::abs(z) < kSeriesRadius) {
        return w_series(z);
    }
    return w_continued_fraction(z);
}

Complex checked_exp(Complex x) {
    if (x.real() > 709.0) {
        throw OverflowError("erfc: exponential scaling factor exceeds double range (Re = " +
                            std::to_string(x.real()) + ")");
    }
    return std::exp(x);
}

}  // namespace

Complex principal_sqrt(Complex z) {
    if (z.imag() == 0.0 && z.real() < 0.0) {
        return {0.0, std::sqrt(-z.real())};
    }
    return std::sqrt(z);
}

Complex principal_arctan(Complex z) {
    if (z.real() == 0.0 && std::abs(z.imag()) == 1.0) {
        throw PoleError("arctan: pole at z = " + std::string(z.imag() > 0 ? "+i" : "-i"));
    }
    return std::atan(z);
}

Complex faddeeva_w(Complex z) {
    if (z.imag() >= 0.0) {
        return w_upper(z);
    }
    // w(z) = 2 e^{-z²} - w(-z)
    return 2.0 * checked_exp(-z * z) - w_upper(-z);
}

Complex erfc_complex(Complex z) {
    return erfc_scaled(z, 0.0);
}

Complex erfc_scaled(Complex z, Complex shift) {
    // erfc(z) = e^{-z²} w(iz); iz lies in the upper half-plane when Re z >= 0.
    if (z.real() >= 0.0) {
        const Complex iz{-z.imag(), z.real()};
        const Complex w = w_upper(iz);
        return w * checked_exp(shift - z * z);
    }
    const Complex miz{z.imag(), -z.real()};
    const Complex w = w_upper(miz);
    return 2.0 * checked_exp(shift) - w * checked_exp(shift - z * z);
}

std::vector<std::string> GaussianConditions::failed() const {
    std::vector<std::string> out;
    if (!(re_a > 0)) out.push_back("Re(a) <= 0");
    if (!(re_c > 0)) out.push_back("Re(c) <= 0");
    if (!(re_a_schur > 0)) out.push_back("Re(a - b^2/c) <= 0");
    if (!(re_c_schur > 0)) out.push_back("Re(c - b^2/a) <= 0");
    return out;
}

GaussianConditions gaussian_conditions(Complex a, Complex b, Complex c) {
    GaussianConditions g;
    g.re_a = a.real();
    g.re_c = c.real();
    g.re_a_schur = (a - b * b / c).real();
    g.re_c_schur = (c - b * b / a).real();
    g.abs_margin = a.real() * c.real() - b.real() * b.real();
    return g;
}

Complex quadrant_gaussian(Complex a, Complex b, Complex c, Quadrant quadrant) {
    const auto cond = gaussian_conditions(a, b, c);
    if (!cond.quadrant_ok()) {
        const auto failed = cond.failed();
        std::string msg = "quadrant Gaussian: ";
        for (std::size_t i = 0; i < failed.size(); ++i) msg += (i ? ", " : "") + failed[i];
        throw ConvergenceError(msg + ": convergence condition violated", failed);
    }
    // √c·√(a − b²/c) equals the principal √(ac − b²) under the conditions
    // above and avoids picking the wrong sheet when ac − b² is near the cut.
    const Complex s = principal_sqrt(c) * principal_sqrt(a - b * b / c);
    const double half_pi = std::numbers::pi / 2;
    const Complex at = principal_arctan(b / s);
    switch (quadrant) {
        case Quadrant::PP:
        case Quadrant::MM:
            return (half_pi - at) / (2.0 * s);
        case Quadrant::MP:
        case Quadrant::PM:
            return (half_pi + at) / (2.0 * s);
    }
    return {};
}

}  // namespace squeezebell
