#pragma once

// Two-time Gaussian kernel: det M, the d_i / D_i coefficients and the
// reduced 2×2 matrix Ξ that governs the cell integrals of the correlator.
//
// The coefficient chain cancels terms of size e^{2r} down to e^{−2r}, so it
// is evaluated in IEEE quad precision and rounded once at the end.

#include <array>
#include <string>

#include "squeezebell/complexfn.hpp"
#include "squeezebell/squeezed_state.hpp"

namespace squeezebell {

struct KernelCoefficients {
    Complex f_M;
    Complex d1, d2, d3, d4;
    Complex D1, D2, D3, D4;
    Complex Dbar1, Dbar2;
    Complex scrD1, scrD2, scrDbar1, scrDbar2;
};

struct XiMatrix {
    Complex xi11, xi22, xi12;
    Complex det;      ///< Ξ11Ξ22 − Ξ12²
    Complex schur1;   ///< Ξ11 − Ξ12²/Ξ22
    Complex schur2;   ///< Ξ22 − Ξ12²/Ξ11
    /// det(−Re Ξ); positive when Re Ξ is negative definite.
    double re_det = 0;
    bool converged = false;
    /// Convergence inequalities hold together with det(−Re Ξ) > 0.
    bool absolutely_convergent = false;
    /// Re Ξ11, Re Ξ22, Re(Ξ11 − Ξ12²/Ξ22), Re(Ξ22 − Ξ12²/Ξ11).
    std::array<double, 4> conditions{};
    /// Δθ offset actually used (0 unless the point was nudged off the
    /// degenerate locus).
    double dtheta_nudge = 0;

    /// Human-readable names of the violated inequalities.
    std::vector<std::string> failed_conditions() const;
};

/// f_M(a, b) = det M. Zero on the degenerate locus.
Complex det_M(const TransitionSpec& t);

struct DCoefficients {
    Complex d1, d2, d3, d4;
};

DCoefficients d_coefficients(const TransitionSpec& t);

/// f(θ) = 1 − cos2θ + 2i sin2θ.
Complex f_angle(double theta);

/// |f_M| at or below this fraction of max|d_i| counts as degenerate.
inline constexpr double kDegeneracyThreshold = 1e-12;
/// |f_M| at or below this is degenerate regardless of the d_i, which round to
/// zero together with f_M at coincident points.
inline constexpr double kDegeneracyFloor = 1e-28;
/// Δθ offset used to step off the degenerate locus.
inline constexpr double kDegeneracyNudge = 1e-7;

bool is_degenerate(const TransitionSpec& t);

/// Full coefficient set. Throws DegenerateKernelError on the degenerate locus.
KernelCoefficients kernel_coefficients(const TransitionSpec& t);

/// Ξ and its convergence diagnostics. Throws DegenerateKernelError on the
/// degenerate locus; an unmet convergence condition only clears `converged`.
XiMatrix xi_matrix(const TransitionSpec& t);

/// Like xi_matrix, but a degenerate point is evaluated at Δθ + 1e−7 (or
/// Δθ − 1e−7 if that is still degenerate) and the offset recorded.
XiMatrix xi_matrix_nudged(const TransitionSpec& t);

/// Leading large-squeezing form of Ξ. Throws SingularityError when |𝒳| < 1e−14.
XiMatrix large_squeeze_xi(const TransitionSpec& t);

/// 𝒳 = [4 − e^{2iΔθ}(e^{2iφa} + e^{−2iφb})²]/8.
Complex large_squeeze_chi(double phi_a, double phi_b, double dtheta);

/// √(Ξ11Ξ22 − Ξ12²)/(4π²). Requires xi.converged.
Complex prefactor(const XiMatrix& xi);

/// Left-hand side of the sign-free prefactor identity, which equals 16π⁴:
/// det Ξ·(𝒟1𝒟̄1 − D4²)·π⁴cosh⁴ra cosh⁴rb·(1 − e^{4iφa}tanh²ra)(1 − e^{−4iφb}tanh²rb)·det M.
/// `det_m` is supplied by the caller so an independent determinant can be used.
Complex squared_prefactor_lhs(const TransitionSpec& t, Complex det_m);

}  // namespace squeezebell
