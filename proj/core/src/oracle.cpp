#include "squeezebell/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "squeezebell/detail/quad_complex.hpp"
#include "squeezebell/errors.hpp"

namespace squeezebell {

namespace {

using R50 = boost::multiprecision::cpp_bin_float_50;
using C50 = detail::Cx<R50>;

template <class R>
using Matrix12 = std::array<std::array<detail::Cx<R>, 12>, 12>;

template <class R>
Matrix12<R> assemble(const TransitionSpec& t) {
    using std::cosh;
    using std::tanh;
    using C = detail::Cx<R>;
    const R ra(t.a.r), rb(t.b.r), pa(t.a.varphi), pb(t.b.varphi), tha(t.a.theta), thb(t.b.theta);
    const C I{R(0), R(1)};
    const C Ca = R(1) / (R(2) * cosh(ra)) * detail::expi(tha);
    const C Cb = R(1) / (R(2) * cosh(rb)) * detail::expi(thb);
    const C Ta = tanh(ra) / R(2) * detail::expi(R(2) * pa);
    const C Tb = tanh(rb) / R(2) * detail::expi(R(2) * pb);
    const C Tha = detail::expi(R(2) * tha) * Ta;
    const C Thb = detail::expi(R(2) * thb) * Tb;
    const C cCb = Cb.conj(), cTa = Ta.conj();
    const C P = Tha + Thb.conj();
    const C Q = I * Tha - I * Thb.conj();
    const C Rr = -Tha - Thb.conj();
    const C h = R(3) / R(2), half = R(1) / R(2), i2 = R(1) / R(2) * I, z{};
    const C one = R(1);
    return {{
        {one, z, P, Q, -cCb, -I * cCb, z, z, -Ca, I * Ca, z, z},
        {z, one, Q, Rr, I * cCb, -cCb, z, z, -I * Ca, -Ca, z, z},
        {P, Q, one, z, z, z, -cCb, -I * cCb, z, z, -Ca, I * Ca},
        {Q, Rr, z, one, z, z, I * cCb, -cCb, z, z, -I * Ca, -Ca},
        {-cCb, I * cCb, z, z, h, -i2, -Tb, -I * Tb, z, z, z, z},
        {-I * cCb, -cCb, z, z, -i2, half, -I * Tb, Tb, z, z, z, z},
        {z, z, -cCb, I * cCb, -Tb, -I * Tb, h, -i2, z, z, z, z},
        {z, z, -I * cCb, -cCb, -I * Tb, Tb, -i2, half, z, z, z, z},
        {-Ca, -I * Ca, z, z, z, z, z, z, h, i2, -cTa, I * cTa},
        {I * Ca, -Ca, z, z, z, z, z, z, i2, half, I * cTa, cTa},
        {z, z, -Ca, -I * Ca, z, z, z, z, -cTa, I * cTa, h, i2},
        {z, z, I * Ca, -Ca, z, z, z, z, I * cTa, cTa, i2, half},
    }};
}

C50 eliminate(Matrix12<R50> a) {
    C50 det = R50(1);
    for (int k = 0; k < 12; ++k) {
        int piv = k;
        for (int i = k + 1; i < 12; ++i) {
            if (a[i][k].norm() > a[piv][k].norm()) piv = i;
        }
        if (a[piv][k].norm() == 0) return C50{};
        if (piv != k) {
            std::swap(a[piv], a[k]);
            det = -det;
        }
        det *= a[k][k];
        for (int i = k + 1; i < 12; ++i) {
            const C50 f = a[i][k] / a[k][k];
            for (int j = k; j < 12; ++j) a[i][j] -= f * a[k][j];
        }
    }
    return det;
}

Complex to_complex(const C50& c) { return {static_cast<double>(c.re), static_cast<double>(c.im)}; }

constexpr double kPi = std::numbers::pi;
constexpr int kNodes = 10;
constexpr double kCellTol = 1e-10;
constexpr double kAbsFloor = 1e-15;
constexpr int kMaxDepth = 24;

struct GLRule {
    std::array<double, kNodes> x{};
    std::array<double, kNodes> w{};

    GLRule() {
        using G = boost::math::quadrature::gauss<double, kNodes>;
        const auto& ab = G::abscissa();
        const auto& wt = G::weights();
        for (std::size_t i = 0; i < ab.size(); ++i) {
            x[i] = -ab[i];
            w[i] = wt[i];
            x[kNodes - 1 - i] = ab[i];
            w[kNodes - 1 - i] = wt[i];
        }
    }
};

const GLRule& gl() {
    static const GLRule rule;
    return rule;
}

struct CellIntegrator {
    Complex x11, x12, x22;
    double abs_tol;  // in units of the raw cell integral

    Complex f(double y1, double y2) const {
        return std::exp(0.5 * (x11 * (y1 * y1) + 2.0 * x12 * (y1 * y2) + x22 * (y2 * y2)));
    }

    Complex tensor(double a1, double b1, double a2, double b2, double* l1) const {
        const auto& g = gl();
        const double h1 = 0.5 * (b1 - a1), c1 = 0.5 * (b1 + a1);
        const double h2 = 0.5 * (b2 - a2), c2 = 0.5 * (b2 + a2);
        Complex acc = 0.0;
        double mag = 0.0;
        for (int i = 0; i < kNodes; ++i) {
            const double y1 = c1 + h1 * g.x[i];
            for (int j = 0; j < kNodes; ++j) {
                const Complex v = g.w[i] * g.w[j] * f(y1, c2 + h2 * g.x[j]);
                acc += v;
                mag += std::abs(v);
            }
        }
        if (l1) *l1 = mag * h1 * h2;
        return acc * (h1 * h2);
    }

    Complex adapt(double a1, double b1, double a2, double b2, Complex whole, double l1, int depth) const {
        const double m1 = 0.5 * (a1 + b1), m2 = 0.5 * (a2 + b2);
        double l[4];
        const Complex q[4] = {tensor(a1, m1, a2, m2, &l[0]), tensor(m1, b1, a2, m2, &l[1]),
                              tensor(a1, m1, m2, b2, &l[2]), tensor(m1, b1, m2, b2, &l[3])};
        const Complex split = q[0] + q[1] + q[2] + q[3];
        const double l1_split = l[0] + l[1] + l[2] + l[3];
        if (std::abs(split - whole) <= std::max(kCellTol * std::max(l1, l1_split), abs_tol) ||
            depth >= kMaxDepth) {
            return split;
        }
        // Quarter the tolerance budget between the children.
        CellIntegrator child = *this;
        child.abs_tol = 0.25 * abs_tol;
        return child.adapt(a1, m1, a2, m2, q[0], l[0], depth + 1) +
               child.adapt(m1, b1, a2, m2, q[1], l[1], depth + 1) +
               child.adapt(a1, m1, m2, b2, q[2], l[2], depth + 1) +
               child.adapt(m1, b1, m2, b2, q[3], l[3], depth + 1);
    }

    Complex integrate(double a1, double b1, double a2, double b2) const {
        double l1 = 0.0;
        const Complex whole = tensor(a1, b1, a2, b2, &l1);
        return adapt(a1, b1, a2, b2, whole, l1, 0);
    }
};

double sign_of(long long n) { return (n % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

BigKernelMatrix build_M(const TransitionSpec& t) {
    const auto hi = assemble<R50>(t);
    BigKernelMatrix m;
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) m.entries[i][j] = to_complex(hi[i][j]);
    }
    return m;
}

Complex det_big_M(const TransitionSpec& t) { return to_complex(eliminate(assemble<R50>(t))); }

Complex determinant(const BigKernelMatrix& m) {
    Matrix12<R50> a;
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) a[i][j] = C50(R50(m.entries[i][j].real()), R50(m.entries[i][j].imag()));
    }
    return to_complex(eliminate(a));
}

double symmetry_residual(const BigKernelMatrix& m) {
    double res = 0.0;
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) res = std::max(res, std::abs(m(i, j) - m(j, i)));
    }
    return res;
}

double normality_residual(const BigKernelMatrix& m) {
    double res = 0.0;
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            Complex mmh = 0.0, mhm = 0.0;
            for (int k = 0; k < 12; ++k) {
                mmh += m(i, k) * std::conj(m(j, k));
                mhm += std::conj(m(k, i)) * m(k, j);
            }
            res = std::max(res, std::abs(mmh - mhm));
        }
    }
    return res;
}

int min_cell_index(const TransitionSpec& t, double ell) {
    if (!(ell > 0)) throw DomainError("ell must be > 0");
    return static_cast<int>(std::ceil(12.0 * std::exp(std::max(t.a.r, t.b.r)) / ell));
}

double correlator_quadrature(const TransitionSpec& t, double ell, int n_max) {
    const int need = min_cell_index(t, ell);
    if (n_max < need) {
        throw DomainError("oracle: n_max = " + std::to_string(n_max) + " is below ceil(12 e^r / ell) = " +
                          std::to_string(need));
    }
    return correlator_quadrature(xi_matrix(t), ell, n_max);
}

double correlator_quadrature(const XiMatrix& xi, double ell, int n_max) {
    if (!(ell > 0)) throw DomainError("ell must be > 0");
    if (!xi.converged) {
        const auto failed = xi.failed_conditions();
        std::string msg = "oracle: ";
        for (std::size_t i = 0; i < failed.size(); ++i) msg += (i ? ", " : "") + failed[i];
        throw ConvergenceError(msg + ": convergence condition violated", failed);
    }
    // Envelope |exp(½YᵀΞY)| = exp(−½YᵀPY) with P = −Re Ξ.
    const double p11 = -xi.xi11.real(), p22 = -xi.xi22.real(), p12 = -xi.xi12.real();
    const double pdet = p11 * p22 - p12 * p12;
    if (!(p11 > 0 && pdet > 0)) {
        throw ConvergenceError("oracle: det(-Re Xi) <= 0: cell sum is not absolutely convergent",
                               {"det(-Re Xi) <= 0"});
    }
    const Complex pref = principal_sqrt(xi.det) / (2.0 * kPi);
    const double gauss_mass = 2.0 * kPi / std::sqrt(pdet);
    const double amp = std::abs(pref) * gauss_mass;
    const double K = std::sqrt(2.0 * std::log(std::max(1.0, amp) / 1e-13));
    const double y1_max = K * std::sqrt(p22 / pdet);
    const double slope = -p12 / p22;
    const double schur = pdet / p22;  // P11 − P12²/P22

    CellIntegrator cell{xi.xi11, xi.xi12, xi.xi22, kAbsFloor / std::abs(pref)};
    const long long n_lo0 = static_cast<long long>(std::floor(-y1_max / ell));
    const long long n_hi0 = static_cast<long long>(std::floor(y1_max / ell));
    const long long n_lo = n_max > 0 ? std::max<long long>(n_lo0, -n_max) : n_lo0;
    const long long n_hi = n_max > 0 ? std::min<long long>(n_hi0, n_max) : n_hi0;

    long long cells = 0;
    Complex total = 0.0;
    for (long long n = n_lo; n <= n_hi; ++n) {
        const double a1 = std::max(static_cast<double>(n) * ell, -y1_max);
        const double b1 = std::min(static_cast<double>(n + 1) * ell, y1_max);
        if (!(b1 > a1)) continue;
        // Y2 extent of the ellipse YᵀPY <= K² over the band.
        const double y1_near = (a1 <= 0.0 && b1 >= 0.0) ? 0.0 : std::min(std::abs(a1), std::abs(b1));
        const double rest = K * K - schur * y1_near * y1_near;
        if (rest <= 0.0) continue;
        const double hw = std::sqrt(rest / p22);
        const double c_lo = std::min(slope * a1, slope * b1), c_hi = std::max(slope * a1, slope * b1);
        const double y2_lo = c_lo - hw, y2_hi = c_hi + hw;
        long long m_lo = static_cast<long long>(std::floor(y2_lo / ell));
        long long m_hi = static_cast<long long>(std::floor(y2_hi / ell));
        if (n_max > 0) {
            m_lo = std::max<long long>(m_lo, -n_max);
            m_hi = std::min<long long>(m_hi, n_max);
        }
        Complex band = 0.0;
        for (long long m = m_lo; m <= m_hi; ++m) {
            const double a2 = std::max(static_cast<double>(m) * ell, y2_lo);
            const double b2 = std::min(static_cast<double>(m + 1) * ell, y2_hi);
            if (!(b2 > a2)) continue;
            if (++cells > kMaxOracleCells) {
                throw BudgetError("oracle: more than " + std::to_string(kMaxOracleCells) + " cells");
            }
            band += sign_of(m) * cell.integrate(a1, b1, a2, b2);
        }
        total += sign_of(n) * band;
    }
    return (pref * total).real();
}

Complex theta_partial(ThetaKind kind, Complex z, Complex q, int n_terms) {
    if (!(std::abs(q) < 1.0)) {
        throw ConvergenceError("theta series diverges: |q| = " + std::to_string(std::abs(q)) + " >= 1",
                               {"|q| >= 1"});
    }
    if (n_terms < 0) throw DomainError("n_terms must be >= 0");
    if (q == Complex(0.0)) {
        // Only the q^0 term survives, which θ2 never has.
        return kind == ThetaKind::theta4 ? Complex(1.0) : Complex(0.0);
    }
    const Complex lq = std::log(q);
    const Complex I{0.0, 1.0};
    Complex acc = 0.0;
    if (kind == ThetaKind::theta4) {
        for (int n = -n_terms; n <= n_terms; ++n) {
            const double nn = n;
            acc += sign_of(n) * std::exp(nn * nn * lq + 2.0 * nn * I * z);
        }
    } else {
        for (int n = -n_terms; n <= n_terms - 1; ++n) {
            const double h = n + 0.5;
            acc += std::exp(h * h * lq + 2.0 * h * I * z);
        }
    }
    return acc;
}

}  // namespace squeezebell
