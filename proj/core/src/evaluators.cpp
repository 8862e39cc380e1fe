#include "squeezebell/evaluators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "squeezebell/errors.hpp"
#include "squeezebell/oracle.hpp"

namespace squeezebell {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kPi = std::numbers::pi;
constexpr int kMaxDepth = 30;
constexpr double kCoincidenceTol = 1e-12;

void check_settings(const EvaluationSettings& s) {
    if (!(s.ell > 0) || !std::isfinite(s.ell)) {
        throw DomainError("ell must be finite and > 0 (got " + std::to_string(s.ell) + ")");
    }
    if (!(s.trunc_rel_tol > 0 && s.trunc_rel_tol < 1)) {
        throw DomainError("trunc_rel_tol must lie in (0, 1)");
    }
    if (!(s.quad_rel_tol > 0 && s.quad_rel_tol < 1)) {
        throw DomainError("quad_rel_tol must lie in (0, 1)");
    }
    if (s.max_bands < 1) throw DomainError("max_bands must be >= 1");
}

void require_converged(const XiMatrix& xi, const char* who) {
    if (xi.converged) return;
    const auto failed = xi.failed_conditions();
    std::string msg = std::string(who) + ": ";
    for (std::size_t i = 0; i < failed.size(); ++i) msg += (i ? ", " : "") + failed[i];
    throw ConvergenceError(msg + ": convergence condition violated", failed);
}

// Distance of x from the nearest multiple of `period`, and that multiple.
double wrap_distance(double x, double period, long long* k = nullptr) {
    const double q = std::nearbyint(x / period);
    if (k) *k = static_cast<long long>(q);
    return std::abs(x - q * period);
}

// Half-width, in standard deviations, of the window outside of which a
// Gaussian tail weighted by `amplification` stays below `tol`.
double window_sigmas(double amplification, double tol) {
    return std::sqrt(2.0 * std::log(std::max(1.0, amplification) / tol)) + 1.0;
}

struct BandRange {
    long long first;
    long long last;
};

BandRange band_range(double half_width, double ell, int max_bands, const char* who) {
    const double lo = std::floor(-half_width / ell);
    const double hi = std::floor(half_width / ell);
    if (hi - lo + 1 > max_bands) {
        throw BudgetError(std::string(who) + ": " + std::to_string(static_cast<long long>(hi - lo + 1)) +
                          " bands needed, max_bands = " + std::to_string(max_bands));
    }
    return {static_cast<long long>(lo), static_cast<long long>(hi)};
}

double sign_of(long long n) { return (n % 2 == 0) ? 1.0 : -1.0; }

constexpr double kAbsFloor = 1e-14;

// Adaptive bisection over single 15-point Gauss–Kronrod applications. A
// piece is accepted when its error is below rel·L1 or below its share
// (by length) of `abs_tol_per_length`.
template <class F>
auto adaptive_gk(F&& f, double a, double b, double rel, double abs_tol_per_length, double* err_out) {
    using T = decltype(f(a));
    struct Piece {
        double a, b;
        int depth;
    };
    T acc{};
    double err_acc = 0.0;
    std::vector<Piece> stack{{a, b, 0}};
    while (!stack.empty()) {
        const Piece p = stack.back();
        stack.pop_back();
        double err = 0.0, l1 = 0.0;
        const T v = gauss_kronrod<double, 15>::integrate(f, p.a, p.b, 0, 0.0, &err, &l1);
        // Boost reports the error on the reference interval [−1, 1].
        err *= 0.5 * (p.b - p.a);
        const double allowed = std::max(rel * l1, abs_tol_per_length * (p.b - p.a));
        if (err <= allowed || p.depth >= kMaxDepth) {
            acc += v;
            err_acc += err;
            continue;
        }
        const double m = 0.5 * (p.a + p.b);
        stack.push_back({m, p.b, p.depth + 1});
        stack.push_back({p.a, m, p.depth + 1});
    }
    *err_out = err_acc;
    return acc;
}

CorrelatorResult equal_time_with_parity(const SqueezeParams& p, const EvaluationSettings& s, int parity,
                                        Method requested) {
    CorrelatorResult res;
    if (requested == Method::large_ell) {
        // ℓ → ∞ of the equal-time correlator: sign correlation of a bivariate normal.
        const auto cov = position_covariance(p.r, p.varphi);
        res.value = (2.0 / kPi) * std::asin(std::clamp(cov.covariance / cov.variance, -1.0, 1.0));
    } else {
        res = correlator_equal_time(p, s);
    }
    if (parity == 1) res.value = -res.value;
    res.method = Method::equal_time;
    res.degenerate_path = true;
    return res;
}

CorrelatorResult finish_xi_result(CorrelatorResult r, const XiMatrix& xi) {
    r.dtheta_nudge = xi.dtheta_nudge;
    r.degenerate_path = xi.dtheta_nudge != 0;
    r.weak_convergence_only = xi.converged && !xi.absolutely_convergent;
    return r;
}

}  // namespace

std::string_view method_name(Method m) {
    switch (m) {
        case Method::automatic: return "auto";
        case Method::numeric: return "numeric";
        case Method::small_ell: return "small-ell";
        case Method::large_ell: return "large-ell";
        case Method::large_squeeze: return "large-squeeze";
        case Method::equal_time: return "equal-time";
        case Method::oracle: return "oracle";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (Method m : {Method::automatic, Method::numeric, Method::small_ell, Method::large_ell,
                     Method::large_squeeze, Method::equal_time, Method::oracle}) {
        if (method_name(m) == name) return m;
    }
    throw std::invalid_argument("unknown method '" + std::string(name) +
                                "' (expected auto|numeric|small-ell|large-ell|large-squeeze|equal-time|oracle)");
}

int coincidence_parity(const TransitionSpec& t) {
    const double rtol = kCoincidenceTol * std::max(1.0, std::max(t.a.r, t.b.r));
    if (std::abs(t.a.r - t.b.r) > rtol) return -1;
    if (wrap_distance(t.a.varphi - t.b.varphi, kPi) > kCoincidenceTol) return -1;
    long long k = 0;
    if (wrap_distance(t.delta_theta(), kPi, &k) > kCoincidenceTol) return -1;
    return static_cast<int>(((k % 2) + 2) % 2);
}

CorrelatorResult correlator_numeric(const XiMatrix& xi, const EvaluationSettings& s) {
    check_settings(s);
    require_converged(xi, "numeric correlator");
    if (xi.xi22 == Complex(0.0)) throw DomainError("numeric correlator: Xi22 = 0");

    const double ell = s.ell;
    const Complex kappa = principal_sqrt(-xi.xi22 / 2.0);
    const Complex rho = xi.xi12 / xi.xi22;
    const Complex half_schur = 0.5 * xi.schur1;
    const Complex pref = principal_sqrt(xi.det) / (std::sqrt(2.0 * kPi) * principal_sqrt(-xi.xi22));

    // Magnitude envelope |exp(½YᵀΞY)| = exp(−½Yᵀ(−Re Ξ)Y).
    const double re22 = xi.xi22.real(), re12 = xi.xi12.real();
    const double sigma2 = 1.0 / std::sqrt(-re22);
    double sigma1;
    double amplification;
    if (xi.absolutely_convergent) {
        sigma1 = std::sqrt(-re22 / xi.re_det);
        amplification = std::abs(principal_sqrt(xi.det)) / std::sqrt(xi.re_det);
    } else {
        sigma1 = 1.0 / std::sqrt(-xi.schur1.real());
        amplification = 1.0 / s.trunc_rel_tol;
    }
    const double K = window_sigmas(amplification, s.trunc_rel_tol);
    const double half_width = K * sigma1;
    // Cells (n, m) and (−n−1, −m−1) contribute equally, so the Y integral
    // runs over n >= 0 only while the inner sum covers every m.
    const long long last_band = static_cast<long long>(std::floor(half_width / ell));
    if (last_band + 1 > s.max_bands) {
        throw BudgetError("numeric correlator: " + std::to_string(last_band + 1) +
                          " bands needed, max_bands = " + std::to_string(s.max_bands));
    }
    const double slope = -re12 / re22;
    const double abs_per_length = kAbsFloor / (std::abs(pref) * half_width);

    // Fourier route: with the square wave Σ_m (−1)^m 1[mℓ, (m+1)ℓ) expanded
    // in sin(kπy/ℓ), k odd, the inner sum becomes
    //   −(8/π) Σ_k (1/k) e^{½SY² + ω²/(2Ξ22)} sin(ωρY),  ω = kπ/ℓ,
    // which converges fastest exactly where the erfc window is longest.
    const double decay = -(1.0 / (2.0 * xi.xi22)).real();  // > 0 since Re Ξ22 < 0
    const double log_tol = std::log(std::max(1.0, amplification) / s.trunc_rel_tol) + std::log(100.0);
    const Complex inv_2xi22 = 1.0 / (2.0 * xi.xi22);
    const double n_erfc = 2.0 * K * sigma2 / ell + 2.0;
    constexpr double kErfcCost = 10.0;
    // Log-magnitude of the envelope at Y, per Y²: ½(Re Ξ11 − Re Ξ12²/Re Ξ22).
    const double half_env = xi.absolutely_convergent ? -0.5 * xi.re_det / (-re22) : 0.5 * xi.schur1.real();

    int max_terms = 0;
    auto g = [&](double y) -> Complex {
        const Complex shift = half_schur * (y * y);
        const Complex ry = rho * y;
        // Term k is bounded by exp(Re shift − decay·ω² + |Im ρY|·ω); keep
        // ω until that drops below the tolerance relative to the envelope.
        // Every term is an integral of the Gaussian against e^{±iωy}, so
        // none exceeds the envelope integral and no cancellation is lost.
        const double lin = std::abs(ry.imag());
        const double c0 = shift.real() - half_env * y * y + log_tol;
        const double disc = lin * lin + 4.0 * decay * c0;
        const double omega_max = disc > 0 ? (lin + std::sqrt(disc)) / (2.0 * decay) : 0.0;
        const double n_dual = omega_max * ell / (2.0 * kPi) + 1.0;
        if (n_dual < kErfcCost * n_erfc) {
            Complex acc = 0.0;
            int used = 0;
            for (long long k = 1; static_cast<double>(k) * kPi / ell <= omega_max; k += 2, ++used) {
                const double w = static_cast<double>(k) * kPi / ell;
                const Complex base = shift + (w * w) * inv_2xi22;
                const Complex iwr{-w * ry.imag(), w * ry.real()};
                acc += (std::exp(base + iwr) - std::exp(base - iwr)) / static_cast<double>(k);
            }
            max_terms = std::max(max_terms, used);
            return acc * Complex(0.0, 4.0 / kPi);  // −(8/π)·1/(2i)
        }
        const double mu = slope * y;
        const long long m0 = static_cast<long long>(std::floor((mu - K * sigma2) / ell));
        const long long m1 = static_cast<long long>(std::floor((mu + K * sigma2) / ell));
        auto term = [&](long long m) { return erfc_scaled(kappa * (static_cast<double>(m) * ell + ry), shift); };
        // Σ_m (−1)^m (E_m − E_{m+1}) telescoped over the window [m0, m1].
        Complex acc = sign_of(m0) * term(m0);
        Complex inner = 0.0;
        for (long long m = m0 + 1; m <= m1; ++m) inner += sign_of(m) * term(m);
        acc += 2.0 * inner - sign_of(m1) * term(m1 + 1);
        max_terms = std::max(max_terms, static_cast<int>(m1 - m0 + 2));
        return acc;
    };

    Complex total = 0.0;
    double err_total = 0.0;
    for (long long n = 0; n <= last_band; ++n) {
        const double a = static_cast<double>(n) * ell;
        const double b = std::min(static_cast<double>(n + 1) * ell, half_width);
        if (!(b > a)) continue;
        double err = 0.0;
        const Complex part = adaptive_gk(g, a, b, s.quad_rel_tol, abs_per_length, &err);
        total += sign_of(n) * part;
        err_total += err;
    }

    CorrelatorResult res;
    res.value = (pref * total).real();
    res.method = Method::numeric;
    res.n_bands_used = static_cast<int>(last_band + 1);
    res.series_terms_used = max_terms;
    res.quadrature_error_estimate = std::abs(pref) * err_total;
    return finish_xi_result(res, xi);
}

CorrelatorResult correlator_numeric(const TransitionSpec& t, const EvaluationSettings& s) {
    check_settings(s);
    const int parity = coincidence_parity(t);
    if (parity >= 0) return equal_time_with_parity(t.a, s, parity, Method::numeric);
    return correlator_numeric(xi_matrix_nudged(t), s);
}

CorrelatorResult correlator_small_ell(const XiMatrix& xi, double ell) {
    if (!(ell > 0)) throw DomainError("ell must be > 0");
    require_converged(xi, "small-ell correlator");
    const double c = kPi * kPi / (2.0 * ell * ell);
    const Complex p_plus = c * (xi.xi11 + xi.xi22 + 2.0 * xi.xi12) / xi.det;
    const Complex p_minus = c * (xi.xi11 + xi.xi22 - 2.0 * xi.xi12) / xi.det;
    if (p_plus.real() > 700 || p_minus.real() > 700) {
        throw OverflowError("small-ell correlator: exponent p+- has Re > 700");
    }
    CorrelatorResult res;
    res.value = (8.0 / (kPi * kPi)) * (std::exp(p_plus) - std::exp(p_minus)).real();
    res.method = Method::small_ell;
    return finish_xi_result(res, xi);
}

CorrelatorResult correlator_small_ell(const TransitionSpec& t, double ell) {
    const int parity = coincidence_parity(t);
    if (parity >= 0) {
        EvaluationSettings s;
        s.ell = ell;
        return equal_time_with_parity(t.a, s, parity, Method::small_ell);
    }
    return correlator_small_ell(xi_matrix_nudged(t), ell);
}

CorrelatorResult correlator_large_ell(const XiMatrix& xi) {
    require_converged(xi, "large-ell correlator");
    CorrelatorResult res;
    res.value = (2.0 / kPi) * principal_arctan(xi.xi12 / principal_sqrt(xi.det)).real();
    res.method = Method::large_ell;
    return finish_xi_result(res, xi);
}

CorrelatorResult correlator_large_ell(const TransitionSpec& t) {
    const int parity = coincidence_parity(t);
    if (parity >= 0) return equal_time_with_parity(t.a, EvaluationSettings{}, parity, Method::large_ell);
    return correlator_large_ell(xi_matrix_nudged(t));
}

CorrelatorResult correlator_large_ell_large_squeeze(double phi_a, double phi_b, double dtheta) {
    CorrelatorResult res;
    res.method = Method::large_squeeze;
    const Complex z = std::polar(1.0, dtheta) * (std::polar(1.0, 2.0 * phi_a) + std::polar(1.0, -2.0 * phi_b));
    const Complex chi = (4.0 - z * z) / 8.0;
    if (std::abs(chi) < 1e-14) {
        // z = ±2: both phases 2φa + Δθ and Δθ − 2φb sit on the same multiple of π.
        res.value = z.real() > 0 ? 1.0 : -1.0;
        res.degenerate_path = true;
        return res;
    }
    res.value = (2.0 / kPi) * principal_arctan(z / principal_sqrt(4.0 - z * z)).real();
    return res;
}

CorrelatorResult correlator_equal_time(const SqueezeParams& p, const EvaluationSettings& s) {
    check_settings(s);
    const double ell = s.ell;
    const auto cov = position_covariance(p.r, p.varphi);
    const double sigma1 = std::sqrt(cov.variance);
    const double beta = cov.covariance / cov.variance;
    const double sigc = std::sqrt(cov.conditional_variance);
    const double K = window_sigmas(1.0, s.trunc_rel_tol);
    const double half_width = K * sigma1;
    const BandRange bands = band_range(half_width, ell, s.max_bands, "equal-time correlator");
    const double inv = 1.0 / (std::sqrt(2.0) * sigc);
    const double norm = 1.0 / std::sqrt(2.0 * kPi * cov.variance);

    const double abs_per_length = kAbsFloor / (2.0 * half_width);

    int max_terms = 0;
    auto f = [&](double q) -> double {
        const double mu = beta * q;
        const long long m0 = static_cast<long long>(std::floor((mu - K * sigc) / ell));
        const long long m1 = static_cast<long long>(std::floor((mu + K * sigc) / ell));
        // F(m) = P(q2 >= mℓ | q1 = q); the inner sum telescopes like the numeric path.
        auto F = [&](long long m) { return 0.5 * std::erfc((static_cast<double>(m) * ell - mu) * inv); };
        double acc = sign_of(m0) * F(m0);
        double inner = 0.0;
        for (long long m = m0 + 1; m <= m1; ++m) inner += sign_of(m) * F(m);
        acc += 2.0 * inner - sign_of(m1) * F(m1 + 1);
        max_terms = std::max(max_terms, static_cast<int>(m1 - m0 + 2));
        return acc * norm * std::exp(-q * q / (2.0 * cov.variance));
    };

    double total = 0.0;
    double err_total = 0.0;
    std::vector<double> cuts;
    for (long long n = bands.first; n <= bands.last; ++n) {
        const double a = std::max(static_cast<double>(n) * ell, -half_width);
        const double b = std::min(static_cast<double>(n + 1) * ell, half_width);
        if (!(b > a)) continue;
        // The inner sum switches sign over a width ~σc/|β| wherever βq crosses
        // a bin edge, often right at a band edge; bracket each crossing so the
        // adaptive rule cannot step over it.
        cuts.assign({a});
        if (beta != 0.0) {
            const double halo = 10.0 * sigc / std::abs(beta);
            const double e0 = std::min(beta * a, beta * b) - K * sigc;
            const double e1 = std::max(beta * a, beta * b) + K * sigc;
            const double k0 = std::ceil(e0 / ell), k1 = std::floor(e1 / ell);
            if (k1 - k0 < 256) {
                for (double k = k0; k <= k1; k += 1.0) {
                    const double q = k * ell / beta;
                    for (double c : {q - halo, q, q + halo}) {
                        if (c > a && c < b) cuts.push_back(c);
                    }
                }
            }
        }
        std::sort(cuts.begin() + 1, cuts.end());
        cuts.push_back(b);
        double band = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            double err = 0.0;
            band += adaptive_gk(f, cuts[i], cuts[i + 1], s.quad_rel_tol, abs_per_length, &err);
            err_total += err;
        }
        total += sign_of(n) * band;
    }

    CorrelatorResult res;
    res.value = total;
    res.method = Method::equal_time;
    res.n_bands_used = static_cast<int>(bands.last - bands.first + 1);
    res.series_terms_used = max_terms;
    res.quadrature_error_estimate = err_total;
    return res;
}

CorrelatorResult correlator_auto(const TransitionSpec& t, const EvaluationSettings& s) {
    check_settings(s);
    const int parity = coincidence_parity(t);
    if (parity >= 0) return equal_time_with_parity(t.a, s, parity, Method::equal_time);
    const double lo = std::exp(std::min(t.a.r, t.b.r));
    const double hi = std::exp(std::max(t.a.r, t.b.r));
    const XiMatrix xi = xi_matrix_nudged(t);
    if (s.ell < kSmallEllFactor * lo) return correlator_small_ell(xi, s.ell);
    if (s.ell > kLargeEllFactor * hi) return correlator_large_ell(xi);
    return correlator_numeric(xi, s);
}

CorrelatorResult correlator(const TransitionSpec& t, const EvaluationSettings& s, Method m) {
    switch (m) {
        case Method::automatic: return correlator_auto(t, s);
        case Method::numeric: return correlator_numeric(t, s);
        case Method::small_ell: return correlator_small_ell(t, s.ell);
        case Method::large_ell: return correlator_large_ell(t);
        case Method::large_squeeze:
            return correlator_large_ell_large_squeeze(t.a.varphi, t.b.varphi, t.delta_theta());
        case Method::equal_time: {
            const int parity = coincidence_parity(t);
            if (parity < 0) {
                throw DomainError(
                    "equal-time method requires coincident parameters (r_a = r_b, phi_a = phi_b mod pi, "
                    "dtheta = 0 mod pi)");
            }
            return equal_time_with_parity(t.a, s, parity, Method::equal_time);
        }
        case Method::oracle: {
            check_settings(s);
            const int parity = coincidence_parity(t);
            if (parity >= 0) return equal_time_with_parity(t.a, s, parity, Method::equal_time);
            const XiMatrix xi = xi_matrix_nudged(t);
            CorrelatorResult res;
            res.value = correlator_quadrature(xi, s.ell);
            res.method = Method::oracle;
            return finish_xi_result(res, xi);
        }
    }
    throw std::logic_error("unhandled method");
}

}  // namespace squeezebell
