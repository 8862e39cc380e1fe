#pragma once

// Branch-cut-aware complex special functions shared by all evaluators.
//
// Every function here is pure and reentrant.

#include <complex>
#include <string>
#include <vector>

namespace squeezebell {

using Complex = std::complex<double>;

/// Principal square root: √ρ·e^{iγ/2} for z = ρe^{iγ}, γ ∈ (−π, π].
/// The negative real axis maps to +i√|z| regardless of the sign of the
/// imaginary zero.
Complex principal_sqrt(Complex z);

/// Principal arctangent, Re(result) ∈ [−π/2, π/2]. Throws PoleError at ±i.
Complex principal_arctan(Complex z);

/// Faddeeva function w(z) = e^{−z²} erfc(−iz).
Complex faddeeva_w(Complex z);

/// Complementary error function for complex argument.
/// Throws OverflowError when e^{−z²} is not representable.
Complex erfc_complex(Complex z);

/// erfc(z)·e^{shift}, evaluated without forming erfc(z) or e^{shift} on
/// their own. Used where a huge erfc multiplies a tiny Gaussian.
Complex erfc_scaled(Complex z, Complex shift);

enum class Quadrant { PP, MP, PM, MM };

/// Condition values for ∫∫ e^{−ax²−2bxy−cy²} over quadrants.
struct GaussianConditions {
    double re_a = 0;
    double re_c = 0;
    double re_a_schur = 0;   ///< Re(a − b²/c)
    double re_c_schur = 0;   ///< Re(c − b²/a)
    double abs_margin = 0;   ///< Re(a)Re(c) − Re(b)²

    bool quadrant_ok() const {
        return re_a > 0 && re_c > 0 && re_a_schur > 0 && re_c_schur > 0;
    }
    /// Fubini-level absolute convergence on the full plane.
    bool absolutely_convergent() const { return re_a > 0 && re_c > 0 && abs_margin > 0; }

    std::vector<std::string> failed() const;
};

GaussianConditions gaussian_conditions(Complex a, Complex b, Complex c);

/// ∫∫ over the requested quadrant of e^{−ax²−2bxy−cy²} in closed form.
/// Throws ConvergenceError naming each violated inequality.
Complex quadrant_gaussian(Complex a, Complex b, Complex c, Quadrant quadrant);

}  // namespace squeezebell
