#include "squeezebell/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>

#include "squeezebell/detail/quad_complex.hpp"
#include "squeezebell/errors.hpp"

namespace squeezebell {

namespace {

using R = boost::multiprecision::float128;
using C = detail::Cx<R>;
using detail::expi;

const C kIq{R(0), R(1)};

struct Side {
    R r, phi, t, sech;
};

Side side(double r, double phi) {
    using boost::multiprecision::cosh;
    using boost::multiprecision::tanh;
    const R rq(r);
    return {rq, R(phi), tanh(rq), R(1) / cosh(rq)};
}

R sq(const R& x) { return x * x; }

C f_q(const R& theta) {
    using boost::multiprecision::cos;
    using boost::multiprecision::sin;
    return {R(1) - cos(2 * theta), 2 * sin(2 * theta)};
}

C fm_q(const Side& a, const Side& b, const R& d) {
    using boost::multiprecision::sin;
    const R bracket = -sq(sin(d)) + sq(sin(2 * a.phi + d)) * sq(a.t) + sq(sin(2 * b.phi - d)) * sq(b.t) -
                      2 * sin(2 * a.phi) * sin(2 * b.phi) * a.t * b.t -
                      sq(sin(2 * a.phi - 2 * b.phi + d)) * sq(a.t) * sq(b.t);
    return R(4) * expi(2 * d) * C(bracket);
}

std::array<C, 4> d_q(const Side& a, const Side& b, const R& d) {
    using boost::multiprecision::sin;
    const C e2 = expi(2 * d);
    const R ta = a.t, tb = b.t;
    const C d1 = e2 * (R(sq(ta)) * f_q(2 * a.phi + d) + R(sq(tb)) * f_q(2 * b.phi - d) - f_q(d) -
                       R(2 * ta * tb) * (f_q(a.phi + b.phi) - f_q(b.phi - a.phi)) -
                       R(sq(ta) * sq(tb)) * f_q(2 * b.phi - 2 * a.phi - d));
    const R b2 = sin(2 * a.phi) * ta - sin(2 * b.phi - 2 * d) * tb -
                 sin(4 * a.phi - 2 * b.phi + 2 * d) * sq(ta) * tb + sin(2 * a.phi) * ta * sq(tb);
    const C d2 = R(4) * kIq * e2 * C(b2);
    const R b3 = (sin(d) + sin(2 * a.phi - 2 * b.phi + d) * ta * tb) * a.sech * b.sech;
    const C d3 = R(-4) * kIq * e2 * C(b3);
    const R b4 = (sin(2 * a.phi + d) * ta - sin(2 * b.phi - d) * tb) * a.sech * b.sech;
    const C d4 = R(4) * kIq * e2 * C(b4);
    return {d1, d2, d3, d4};
}

// A and B written so that no O(1) cancellation occurs as tanh r → 1.
void coeff_AB_q(const Side& s, C& A, C& B) {
    using boost::multiprecision::cos;
    using boost::multiprecision::sin;
    const C em2 = expi(-2 * s.phi);
    const C den = C(sq(s.sech)) + R(sq(s.t) * 2 * sin(2 * s.phi)) * (kIq * em2);
    const C num = C(sq(s.sech)) + R(sq(s.t) * 2 * cos(2 * s.phi)) * em2;
    A = -(num / den);
    B = R(2 * s.t) * (em2 / den);
}

struct Chain {
    C fM;
    std::array<C, 4> d;
    std::array<C, 4> D;
    C Dbar1, Dbar2;
    C scrD1, scrD2, scrDbar1, scrDbar2;
    C x11, x22, x12, det, schur1, schur2;
    R re_det;
    bool degenerate;
    R abs_fM;
};

R degeneracy_scale(const Side& a, const Side& b, const std::array<C, 4>& d) {
    R m(0);
    for (const auto& x : d) m = std::max(m, x.abs());
    return m * a.sech * b.sech;
}

Chain chain(const TransitionSpec& t, double dtheta, bool build_xi) {
    const Side a = side(t.a.r, t.a.varphi);
    const Side b = side(t.b.r, t.b.varphi);
    const R d(dtheta);
    Chain c{};
    c.fM = fm_q(a, b, d);
    c.d = d_q(a, b, d);
    c.abs_fM = c.fM.abs();
    c.degenerate = c.abs_fM <= R(kDegeneracyFloor) ||
                   c.abs_fM <= R(kDegeneracyThreshold) * degeneracy_scale(a, b, c.d);
    if (c.degenerate || !build_xi) return c;

    for (int i = 0; i < 4; ++i) c.D[static_cast<std::size_t>(i)] = c.d[static_cast<std::size_t>(i)] / c.fM;
    // Barred coefficients: swap a ↔ b (so Δθ → −Δθ) and conjugate.
    const C fMba = fm_q(b, a, -d);
    const auto dba = d_q(b, a, -d);
    c.Dbar1 = (dba[0] / fMba).conj();
    c.Dbar2 = (dba[1] / fMba).conj();

    C Aa, Ba, Ab, Bb;
    coeff_AB_q(a, Aa, Ba);
    coeff_AB_q(b, Ab, Bb);
    const C half(R(1) / 2);
    c.scrD1 = half + Ab - c.D[0];
    c.scrDbar1 = half + Aa.conj() - c.Dbar1;
    c.scrD2 = Bb - c.D[1];
    c.scrDbar2 = Ba.conj() - c.Dbar2;

    const C& D3 = c.D[2];
    const C& D4 = c.D[3];
    const C den = c.scrD1 * c.scrDbar1 - D4 * D4;
    c.x11 = c.scrD1 - (c.scrDbar1 * c.scrD2 * c.scrD2 + c.scrD1 * D3 * D3 - R(2) * c.scrD2 * D3 * D4) / den;
    c.x22 = c.scrDbar1 -
            (c.scrD1 * c.scrDbar2 * c.scrDbar2 + c.scrDbar1 * D3 * D3 - R(2) * c.scrDbar2 * D3 * D4) / den;
    c.x12 = D4 - (c.scrDbar1 * c.scrD2 * D3 + c.scrD1 * c.scrDbar2 * D3 - c.scrD2 * c.scrDbar2 * D4 -
                  D3 * D3 * D4) /
                     den;
    c.det = c.x11 * c.x22 - c.x12 * c.x12;
    c.schur1 = c.det / c.x22;
    c.schur2 = c.det / c.x11;
    c.re_det = c.x11.re * c.x22.re - c.x12.re * c.x12.re;
    return c;
}

XiMatrix to_xi(const Chain& c, double nudge) {
    XiMatrix x;
    x.xi11 = c.x11.to_double();
    x.xi22 = c.x22.to_double();
    x.xi12 = c.x12.to_double();
    x.det = c.det.to_double();
    x.schur1 = c.schur1.to_double();
    x.schur2 = c.schur2.to_double();
    x.re_det = static_cast<double>(c.re_det);
    x.conditions = {x.xi11.real(), x.xi22.real(), x.schur1.real(), x.schur2.real()};
    x.converged = std::all_of(x.conditions.begin(), x.conditions.end(), [](double v) { return v < 0; });
    x.absolutely_convergent = x.converged && c.re_det > 0;
    x.dtheta_nudge = nudge;
    return x;
}

[[noreturn]] void throw_degenerate(const TransitionSpec& t, const Chain& c) {
    throw DegenerateKernelError(
        "degenerate kernel: |det M| = " + std::to_string(static_cast<double>(c.abs_fM)) +
            " is below the degeneracy threshold (dtheta = " + std::to_string(t.delta_theta()) + ")",
        static_cast<double>(c.abs_fM));
}

}  // namespace

std::vector<std::string> XiMatrix::failed_conditions() const {
    static const char* names[4] = {"Re(Xi11) >= 0", "Re(Xi22) >= 0", "Re(Xi11 - Xi12^2/Xi22) >= 0",
                                   "Re(Xi22 - Xi12^2/Xi11) >= 0"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < 4; ++i) {
        if (!(conditions[i] < 0)) out.emplace_back(names[i]);
    }
    return out;
}

Complex f_angle(double theta) {
    return {1.0 - std::cos(2.0 * theta), 2.0 * std::sin(2.0 * theta)};
}

Complex det_M(const TransitionSpec& t) {
    return fm_q(side(t.a.r, t.a.varphi), side(t.b.r, t.b.varphi), R(t.delta_theta())).to_double();
}

DCoefficients d_coefficients(const TransitionSpec& t) {
    const auto d = d_q(side(t.a.r, t.a.varphi), side(t.b.r, t.b.varphi), R(t.delta_theta()));
    return {d[0].to_double(), d[1].to_double(), d[2].to_double(), d[3].to_double()};
}

bool is_degenerate(const TransitionSpec& t) {
    return chain(t, t.delta_theta(), false).degenerate;
}

KernelCoefficients kernel_coefficients(const TransitionSpec& t) {
    const Chain c = chain(t, t.delta_theta(), true);
    if (c.degenerate) throw_degenerate(t, c);
    KernelCoefficients k;
    k.f_M = c.fM.to_double();
    k.d1 = c.d[0].to_double();
    k.d2 = c.d[1].to_double();
    k.d3 = c.d[2].to_double();
    k.d4 = c.d[3].to_double();
    k.D1 = c.D[0].to_double();
    k.D2 = c.D[1].to_double();
    k.D3 = c.D[2].to_double();
    k.D4 = c.D[3].to_double();
    k.Dbar1 = c.Dbar1.to_double();
    k.Dbar2 = c.Dbar2.to_double();
    k.scrD1 = c.scrD1.to_double();
    k.scrD2 = c.scrD2.to_double();
    k.scrDbar1 = c.scrDbar1.to_double();
    k.scrDbar2 = c.scrDbar2.to_double();
    return k;
}

XiMatrix xi_matrix(const TransitionSpec& t) {
    const Chain c = chain(t, t.delta_theta(), true);
    if (c.degenerate) throw_degenerate(t, c);
    return to_xi(c, 0.0);
}

XiMatrix xi_matrix_nudged(const TransitionSpec& t) {
    const double d = t.delta_theta();
    Chain c = chain(t, d, true);
    if (!c.degenerate) return to_xi(c, 0.0);
    for (double nudge : {kDegeneracyNudge, -kDegeneracyNudge}) {
        c = chain(t, d + nudge, true);
        if (!c.degenerate) return to_xi(c, nudge);
    }
    throw_degenerate(t, c);
}

Complex large_squeeze_chi(double phi_a, double phi_b, double dtheta) {
    const Complex s = std::polar(1.0, 2.0 * phi_a) + std::polar(1.0, -2.0 * phi_b);
    return (4.0 - std::polar(1.0, 2.0 * dtheta) * s * s) / 8.0;
}

XiMatrix large_squeeze_xi(const TransitionSpec& t) {
    const double dth = t.delta_theta();
    const Complex chi = large_squeeze_chi(t.a.varphi, t.b.varphi, dth);
    if (std::abs(chi) < 1e-14) {
        throw SingularityError("large-squeezing limit: |X| = " + std::to_string(std::abs(chi)) +
                               " vanishes (maximal-correlation locus)");
    }
    const double ua = std::exp(-t.a.r);
    const double ub = std::exp(-t.b.r);
    const Complex s = std::polar(1.0, 2.0 * t.a.varphi) + std::polar(1.0, -2.0 * t.b.varphi);
    XiMatrix x;
    x.xi11 = -2.0 * ub * ub / chi;
    x.xi22 = -2.0 * ua * ua / chi;
    x.xi12 = std::polar(1.0, dth) * s * ua * ub / chi;
    x.det = 8.0 * ua * ua * ub * ub / chi;
    x.schur1 = -4.0 * ub * ub;
    x.schur2 = -4.0 * ua * ua;
    x.re_det = x.xi11.real() * x.xi22.real() - x.xi12.real() * x.xi12.real();
    x.conditions = {x.xi11.real(), x.xi22.real(), x.schur1.real(), x.schur2.real()};
    x.converged = std::all_of(x.conditions.begin(), x.conditions.end(), [](double v) { return v < 0; });
    x.absolutely_convergent = x.converged && x.re_det > 0;
    return x;
}

Complex prefactor(const XiMatrix& xi) {
    if (!xi.converged) {
        const auto failed = xi.failed_conditions();
        std::string msg = "prefactor: ";
        for (std::size_t i = 0; i < failed.size(); ++i) msg += (i ? ", " : "") + failed[i];
        throw ConvergenceError(msg + ": convergence condition violated", failed);
    }
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return principal_sqrt(xi.det) / (4.0 * pi2);
}

Complex squared_prefactor_lhs(const TransitionSpec& t, Complex det_m) {
    const Chain c = chain(t, t.delta_theta(), true);
    if (c.degenerate) throw_degenerate(t, c);
    using boost::multiprecision::cosh;
    const Side a = side(t.a.r, t.a.varphi);
    const Side b = side(t.b.r, t.b.varphi);
    const C den = c.scrD1 * c.scrDbar1 - c.D[3] * c.D[3];
    const R pi = boost::math::constants::pi<R>();
    const R pi4 = sq(sq(pi));
    const R ch = sq(sq(cosh(a.r))) * sq(sq(cosh(b.r)));
    // 1 − e^{4iφa}tanh²ra and 1 − e^{−4iφb}tanh²rb in the cancellation-free form
    using boost::multiprecision::sin;
    const C one_a = C(sq(a.sech)) + R(sq(a.t) * (-2) * sin(2 * a.phi)) * (kIq * expi(2 * a.phi));
    const C one_b = C(sq(b.sech)) + R(sq(b.t) * 2 * sin(2 * b.phi)) * (kIq * expi(-2 * b.phi));
    const C dm(R(det_m.real()), R(det_m.imag()));
    return (c.det * den * C(pi4 * ch) * one_a * one_b * dm).to_double();
}

}  // namespace squeezebell
