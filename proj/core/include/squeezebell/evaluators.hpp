#pragma once

// Correlator E(t_a, t_b) = ½⟨{S1(t_a), S2(t_b)}⟩ of the pseudo-spin
// observable, by every available route.

#include <string>
#include <string_view>

#include "squeezebell/kernel.hpp"
#include "squeezebell/squeezed_state.hpp"

namespace squeezebell {

enum class Method { automatic, numeric, small_ell, large_ell, large_squeeze, equal_time, oracle };

std::string_view method_name(Method m);
/// Accepts the CLI spellings (auto, numeric, small-ell, ...). Throws std::invalid_argument.
Method parse_method(std::string_view name);

struct CorrelatorResult {
    double value = 0;
    Method method = Method::numeric;
    int n_bands_used = 0;
    /// Largest number of erfc / inner bin terms used for a single abscissa.
    int series_terms_used = 0;
    double quadrature_error_estimate = 0;
    bool degenerate_path = false;
    /// Δθ offset applied to step off the degenerate locus (0 if none).
    double dtheta_nudge = 0;
    /// Only the weaker convergence conditions hold (Re Ξ not negative definite).
    bool weak_convergence_only = false;
};

struct EvaluationSettings {
    double ell = 1.0;
    double trunc_rel_tol = 1e-10;
    double quad_rel_tol = 1e-9;
    int max_bands = 4096;
};

/// Exact finite-ℓ correlator: one analytic erfc integral, one adaptive
/// Gauss–Kronrod integral per band.
CorrelatorResult correlator_numeric(const TransitionSpec& t, const EvaluationSettings& s);
/// Same, with Ξ supplied by the caller.
CorrelatorResult correlator_numeric(const XiMatrix& xi, const EvaluationSettings& s);

/// ℓ ≪ e^r closed form (8/π²)Re(e^{p+} − e^{p−}).
CorrelatorResult correlator_small_ell(const TransitionSpec& t, double ell);
CorrelatorResult correlator_small_ell(const XiMatrix& xi, double ell);

/// ℓ → ∞ closed form (2/π)Re arctan(Ξ12/√det Ξ).
CorrelatorResult correlator_large_ell(const TransitionSpec& t);
CorrelatorResult correlator_large_ell(const XiMatrix& xi);

/// ℓ, r_a, r_b → ∞ closed form; exactly ±1 on the maximal-correlation locus.
CorrelatorResult correlator_large_ell_large_squeeze(double phi_a, double phi_b, double dtheta);

/// Equal-time ⟨S1 S2⟩ from |Ψ|²; independent of θ.
CorrelatorResult correlator_equal_time(const SqueezeParams& p, const EvaluationSettings& s);

/// Parameters coincide up to the rotation by Δθ = kπ, which acts as
/// (−1)^k on the pseudo-spin product. Returns k (mod 2) or −1 if not coincident.
int coincidence_parity(const TransitionSpec& t);

/// Dispatches on the coincidence rule and the ℓ/e^r thresholds.
CorrelatorResult correlator_auto(const TransitionSpec& t, const EvaluationSettings& s);

/// Forced-method entry point used by the Bell operator and the CLI.
/// Degenerate kernels go through the equal-time rule or the Δθ nudge.
CorrelatorResult correlator(const TransitionSpec& t, const EvaluationSettings& s, Method m);

/// Regime thresholds relative to e^r.
inline constexpr double kSmallEllFactor = 0.01;
inline constexpr double kLargeEllFactor = 100.0;

}  // namespace squeezebell
