#pragma once

#include "squeezebell/complexfn.hpp"

namespace squeezebell {

/// State of the two-mode squeezed system at one measurement time.
struct SqueezeParams {
    double r = 0;       ///< squeezing amplitude, r >= 0
    double varphi = 0;  ///< squeezing angle [rad]
    double theta = 0;   ///< rotation angle [rad]
};

/// Ordered pair of measurement times. Rotation angles are only ever
/// consumed through delta_theta().
struct TransitionSpec {
    SqueezeParams a;
    SqueezeParams b;

    double delta_theta() const { return a.theta - b.theta; }
    TransitionSpec swapped() const { return {b, a}; }
};

/// Quadratic-form coefficient A(r, φ) of the position-space wavefunction.
/// Throws SingularityError when 1 − e^{−4iφ}tanh²r underflows.
Complex coeff_A(double r, double varphi);

/// Cross coefficient B(r, φ) of the position-space wavefunction.
Complex coeff_B(double r, double varphi);

/// 1 − e^{−4iφ}tanh²r written as sech²r + tanh²r(1 − e^{−4iφ}) so that
/// it keeps full relative precision at large r.
Complex squeeze_denominator(double r, double varphi);

/// Ψ(q1, q2) of the two-mode squeezed state. θ does not enter.
Complex wavefunction(double q1, double q2, const SqueezeParams& p);

/// Amplitude of |n, n⟩ in the number basis.
Complex fock_amplitude(int n, const SqueezeParams& p);

/// Smallest N with tanh^{2N} r below `tol` (N >= 1).
int fock_truncation(double r, double tol = 1e-14);

/// Covariance of the equal-time position distribution |Ψ|²:
/// Var(q1) = Var(q2) = variance, Cov(q1, q2) = covariance, and the
/// conditional variance of q2 given q1.
struct PositionCovariance {
    double variance;
    double covariance;
    double conditional_variance;
};

PositionCovariance position_covariance(double r, double varphi);

}  // namespace squeezebell
