#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "reference_values.hpp"
#include "squeezebell/complexfn.hpp"
#include "squeezebell/errors.hpp"
#include "support.hpp"

using namespace squeezebell;
using testsupport::gl;
using testsupport::pi;

TEST(PrincipalSqrt, NegativeRealAxisMapsToPlusI) {
    const Complex s = principal_sqrt(Complex(-4.0, 0.0));
    EXPECT_DOUBLE_EQ(s.real(), 0.0);
    EXPECT_DOUBLE_EQ(s.imag(), 2.0);
    const Complex m = principal_sqrt(Complex(-4.0, -0.0));
    EXPECT_DOUBLE_EQ(m.imag(), 2.0);
}

TEST(PrincipalSqrt, ArgumentIsHalved) {
    for (double gamma : {-3.0, -1.5, -0.2, 0.0, 0.7, 2.9, pi}) {
        const Complex z = std::polar(2.5, gamma);
        const Complex s = principal_sqrt(z);
        EXPECT_NEAR(std::abs(s), std::sqrt(2.5), 1e-14);
        EXPECT_NEAR(std::arg(s), gamma / 2, 1e-14) << gamma;
    }
}

TEST(PrincipalArctan, RealPartInPrincipalStrip) {
    for (double x : {-50.0, -1.0, 0.3, 7.0}) {
        for (double y : {-3.0, -0.5, 0.0, 0.5, 3.0}) {
            const Complex a = principal_arctan({x, y});
            EXPECT_LE(std::abs(a.real()), pi / 2 + 1e-15);
            EXPECT_NEAR(std::abs(std::tan(a) - Complex(x, y)), 0.0, 1e-12 * std::max(1.0, std::abs(Complex(x, y))));
        }
    }
}

TEST(PrincipalArctan, PolesThrow) {
    EXPECT_THROW(principal_arctan({0.0, 1.0}), PoleError);
    EXPECT_THROW(principal_arctan({0.0, -1.0}), PoleError);
    EXPECT_NO_THROW(principal_arctan({1e-300, 1.0}));
}

TEST(Erfc, MatchesMpmathTable) {
    for (const auto& ref : refdata::kErfc) {
        const Complex got = erfc_complex(ref.z);
        const double err = std::abs(got - ref.erfc);
        if (std::abs(ref.z) <= 6.0) {
            EXPECT_LE(err / std::max(1.0, std::abs(ref.erfc)), 1e-11) << ref.z;
        } else {
            EXPECT_LE(err / std::abs(ref.erfc), 1e-10) << ref.z;
        }
    }
}

TEST(Erfc, RealAxisAgreesWithStd) {
    for (double x = -6.0; x <= 26.0; x += 0.173) {
        const Complex got = erfc_complex({x, 0.0});
        EXPECT_NEAR(got.real() / std::erfc(x), 1.0, 2e-13) << x;
        EXPECT_EQ(got.imag(), 0.0);
    }
}

TEST(Erfc, ReflectionAndConjugation) {
    for (double x = -5.5; x <= 5.5; x += 0.61) {
        for (double y = -5.5; y <= 5.5; y += 0.73) {
            const Complex z{x, y};
            const Complex e = erfc_complex(z);
            const double scale = std::max(1.0, std::abs(e));
            EXPECT_LE(std::abs(erfc_complex(-z) - (2.0 - e)) / scale, 1e-12) << z;
            EXPECT_LE(std::abs(erfc_complex(std::conj(z)) - std::conj(e)) / scale, 1e-12) << z;
        }
    }
}

TEST(Erfc, ContinuousAcrossSeriesRadius) {
    // Both sides of the switch between the rational series and the continued fraction.
    for (double t = -pi; t < pi; t += 0.05) {
        const Complex in = std::polar(6.0 - 1e-14, t), out = std::polar(6.0 + 1e-14, t);
        const Complex a = faddeeva_w(in), b = faddeeva_w(out);
        EXPECT_LE(std::abs(a - b) / std::abs(a), 1e-12) << t;
    }
}

TEST(Erfc, ScaledFormAvoidsOverflow) {
    // erfc(−28 + i) ~ 2 with e^{−z²} ~ e^{−783}: the shifted form keeps a tiny product finite.
    const Complex z{-30.0, 0.5};
    EXPECT_THROW(erfc_complex({0.0, 27.0}), OverflowError);
    const Complex scaled = erfc_scaled({0.0, 27.0}, -800.0);
    EXPECT_TRUE(std::isfinite(scaled.real()));
    EXPECT_GT(std::abs(scaled), 0.0);
    // e^{−729}·|erfc(27i)| with |erfc(27i)| = e^{729}/(27√π) approximately.
    EXPECT_NEAR(std::log(std::abs(scaled)), -800.0 + 729.0 - std::log(27.0 * std::sqrt(pi)), 1e-3);
    EXPECT_NEAR(std::abs(erfc_complex(z) - 2.0), 0.0, 1e-15);
}

TEST(QuadrantGaussian, FourQuadrantsSumToFullPlane) {
    const Complex a{1.3, 0.4}, b{0.2, -0.5}, c{0.9, -0.3};
    Complex sum = 0;
    for (auto q : {Quadrant::PP, Quadrant::MP, Quadrant::PM, Quadrant::MM}) sum += quadrant_gaussian(a, b, c, q);
    EXPECT_LE(std::abs(sum - pi / principal_sqrt(a * c - b * b)), 1e-14);
}

TEST(QuadrantGaussian, MatchesDirectQuadrature) {
    const Complex a{1.1, 0.7}, b{-0.4, 0.3}, c{0.8, -0.9};
    auto quadrant = [&](double sx, double sy) {
        return gl([&](double x) { return gl([&](double y) { return std::exp(-a * x * x - 2.0 * b * x * y - c * y * y); }, 0.0, sy * 14.0, 14); },
                  0.0, sx * 14.0, 14) *
               (sx * sy);
    };
    EXPECT_LE(std::abs(quadrant_gaussian(a, b, c, Quadrant::PP) - quadrant(1, 1)), 1e-12);
    EXPECT_LE(std::abs(quadrant_gaussian(a, b, c, Quadrant::MP) - quadrant(-1, 1)), 1e-12);
    EXPECT_LE(std::abs(quadrant_gaussian(a, b, c, Quadrant::PM) - quadrant(1, -1)), 1e-12);
    EXPECT_LE(std::abs(quadrant_gaussian(a, b, c, Quadrant::MM) - quadrant(-1, -1)), 1e-12);
}

TEST(QuadrantGaussian, ReportsEveryFailedCondition) {
    try {
        quadrant_gaussian({-1.0, 0.0}, {0.0, 0.0}, {-2.0, 0.0}, Quadrant::PP);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        const auto& f = e.failed();
        EXPECT_EQ(f.size(), 4u);
        EXPECT_NE(std::string(e.what()).find("Re(a) <= 0"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("convergence condition violated"), std::string::npos);
    }
}

TEST(QuadrantGaussian, WeakConditionsWithoutAbsoluteConvergence) {
    // Re a, Re c > 0 and both Schur-complement conditions hold while Re(a)Re(c) < Re(b)².
    const Complex a{1.0, 0.0}, b{1.2, 1.0}, c{1.0, 0.0};
    const auto g = gaussian_conditions(a, b, c);
    ASSERT_TRUE(g.quadrant_ok());
    EXPECT_FALSE(g.absolutely_convergent());
    Complex sum = 0;
    for (auto q : {Quadrant::PP, Quadrant::MP, Quadrant::PM, Quadrant::MM}) sum += quadrant_gaussian(a, b, c, q);
    EXPECT_LE(std::abs(sum - pi / principal_sqrt(a * c - b * b)), 1e-13);
}
