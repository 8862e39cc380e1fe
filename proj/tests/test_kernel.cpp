#include <gtest/gtest.h>

#include <cmath>

#include "reference_values.hpp"
#include "squeezebell/errors.hpp"
#include "squeezebell/evaluators.hpp"
#include "squeezebell/kernel.hpp"
#include "squeezebell/oracle.hpp"
#include "support.hpp"

using namespace squeezebell;
using testsupport::pi;
using testsupport::spec;

namespace {

double rel(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST(Kernel, XiMatchesHighPrecisionChain) {
    for (const auto& ref : refdata::kXi) {
        const auto t = spec(ref.ra, ref.pa, ref.rb, ref.pb, ref.dtheta);
        const XiMatrix xi = xi_matrix(t);
        EXPECT_LE(rel(det_M(t), ref.fM), 1e-12) << ref.ra << ' ' << ref.dtheta;
        EXPECT_LE(rel(xi.xi11, ref.xi11), 1e-12) << ref.ra << ' ' << ref.dtheta;
        EXPECT_LE(rel(xi.xi22, ref.xi22), 1e-12) << ref.ra << ' ' << ref.dtheta;
        EXPECT_LE(rel(xi.xi12, ref.xi12), 1e-12) << ref.ra << ' ' << ref.dtheta;
    }
}

TEST(Kernel, FAngle) {
    EXPECT_EQ(f_angle(0.0), Complex(0.0, 0.0));
    const double th = 0.37;
    EXPECT_LE(std::abs(f_angle(th) - Complex(1 - std::cos(2 * th), 2 * std::sin(2 * th))), 1e-16);
}

TEST(Kernel, VacuumIsDegenerateAtZeroRotation) {
    const auto t = spec(0.0, 0.0, 0.0, 0.0, 0.0);
    EXPECT_TRUE(is_degenerate(t));
    EXPECT_THROW(xi_matrix(t), DegenerateKernelError);
    EXPECT_FALSE(is_degenerate(spec(0.0, 0.0, 0.0, 0.0, 0.4)));
}

TEST(Kernel, CoincidentPointsAreDegenerate) {
    for (double r : {0.5, 3.0, 6.0}) {
        for (double phi : {-1.0, 0.0, 0.8}) {
            EXPECT_TRUE(is_degenerate(spec(r, phi, r, phi, 0.0))) << r << ' ' << phi;
            EXPECT_EQ(coincidence_parity(spec(r, phi, r, phi, 0.0)), 0) << r << ' ' << phi;
            // π is not representable, so the half turn is caught by the coincidence test instead.
            EXPECT_EQ(coincidence_parity(spec(r, phi, r, phi, pi)), 1) << r << ' ' << phi;
        }
    }
}

TEST(Kernel, NudgeStepsOffDegenerateLocus) {
    // φ_a = φ_b = 0, Δθ = 0 with unequal r: degenerate but not coincident.
    const auto t = spec(1.0, 0.0, 2.0, 0.0, 0.0);
    ASSERT_TRUE(is_degenerate(t));
    const XiMatrix xi = xi_matrix_nudged(t);
    EXPECT_EQ(std::abs(xi.dtheta_nudge), kDegeneracyNudge);
    auto moved = t;
    moved.a.theta += xi.dtheta_nudge;
    const XiMatrix direct = xi_matrix(moved);
    EXPECT_EQ(direct.xi11, xi.xi11);
    EXPECT_EQ(xi_matrix_nudged(spec(1.0, 0.2, 2.0, -0.1, 0.5)).dtheta_nudge, 0.0);
}

TEST(Kernel, DependsOnlyOnRotationDifference) {
    testsupport::Draws draws(11);
    for (int i = 0; i < 50; ++i) {
        auto t = draws.transition();
        const XiMatrix x0 = xi_matrix(t);
        const double c = draws.angle();
        t.a.theta += c;
        t.b.theta += c;
        const XiMatrix x1 = xi_matrix(t);
        EXPECT_LE(rel(x1.xi11, x0.xi11), 1e-9);
        EXPECT_LE(rel(x1.xi22, x0.xi22), 1e-9);
        EXPECT_LE(rel(x1.xi12, x0.xi12), 1e-9);
    }
}

TEST(Kernel, ExchangeSwapsDiagonal) {
    // Swapping the two measurement times sends Ξ to its conjugate with Ξ11 ↔ Ξ22.
    testsupport::Draws draws(12, 0.2, 4.0);
    for (int i = 0; i < 30; ++i) {
        const auto t = draws.transition();
        const XiMatrix x = xi_matrix(t), y = xi_matrix(t.swapped());
        EXPECT_LE(rel(y.xi11, std::conj(x.xi22)), 1e-10);
        EXPECT_LE(rel(y.xi22, std::conj(x.xi11)), 1e-10);
        EXPECT_LE(rel(y.xi12, std::conj(x.xi12)), 1e-10);
    }
}

TEST(Kernel, ConvergenceConditionsOnPhysicalDraws) {
    testsupport::Draws draws(13);
    for (int i = 0; i < 2000; ++i) {
        const auto t = draws.transition();
        const XiMatrix xi = xi_matrix(t);
        EXPECT_TRUE(xi.converged) << t.a.r << ' ' << t.b.r << ' ' << t.delta_theta();
        for (double c : xi.conditions) EXPECT_LT(c, 0.0);
        EXPECT_TRUE(xi.failed_conditions().empty());
    }
}

TEST(Kernel, FailedConditionsAreNamed) {
    XiMatrix xi;
    xi.xi11 = {-1.0, 0.0};
    xi.xi22 = {0.5, 0.0};
    xi.xi12 = {0.0, 0.0};
    xi.conditions = {-1.0, 0.5, -1.0, 0.5};
    xi.converged = false;
    const auto f = xi.failed_conditions();
    ASSERT_EQ(f.size(), 2u);
    EXPECT_EQ(f[0], "Re(Xi22) >= 0");
    EXPECT_EQ(f[1], "Re(Xi22 - Xi12^2/Xi11) >= 0");
    try {
        prefactor(xi);
        FAIL();
    } catch (const ConvergenceError& e) {
        EXPECT_EQ(std::string(e.what()),
                  "prefactor: Re(Xi22) >= 0, Re(Xi22 - Xi12^2/Xi11) >= 0: convergence condition violated");
    }
}

TEST(Kernel, SquaredPrefactorIdentity) {
    testsupport::Draws draws(14);
    const double target = 16 * std::pow(pi, 4);
    for (int i = 0; i < 40; ++i) {
        const auto t = draws.transition();
        const Complex lhs = squared_prefactor_lhs(t, det_big_M(t));
        EXPECT_LE(std::abs(lhs - target) / target, 1e-8) << t.a.r << ' ' << t.b.r;
    }
}

TEST(Kernel, LargeSqueezeFormApproachesFullXi) {
    const auto t = spec(12.0, 0.3, 12.0, -0.1, 0.4);
    const XiMatrix full = xi_matrix(t), lim = large_squeeze_xi(t);
    EXPECT_LE(rel(lim.xi11, full.xi11), 1e-6);
    EXPECT_LE(rel(lim.xi22, full.xi22), 1e-6);
    EXPECT_LE(rel(lim.xi12, full.xi12), 1e-6);
}

TEST(Kernel, LargeSqueezeSingularOnMaximalCorrelationLocus) {
    EXPECT_LT(std::abs(large_squeeze_chi(0.0, 0.0, 0.0)), 1e-15);
    EXPECT_THROW(large_squeeze_xi(spec(5.0, 0.0, 5.0, 0.0, 0.0)), SingularityError);
    EXPECT_LT(std::abs(large_squeeze_chi(0.35, -0.35, -0.7 + pi)), 1e-15);
}
