#pragma once

// Brute-force reference routes used to check the production evaluators:
// the 12×12 coherent-state kernel matrix, direct 2D cell quadrature of
// the correlator, and partial sums of the elliptic theta functions.
//
// Everything here is deliberately slow and simple.

#include <array>

#include "squeezebell/complexfn.hpp"
#include "squeezebell/kernel.hpp"
#include "squeezebell/squeezed_state.hpp"

namespace squeezebell {

struct BigKernelMatrix {
    std::array<std::array<Complex, 12>, 12> entries{};

    Complex operator()(int i, int j) const { return entries[i][j]; }
};

/// Kernel matrix from C = e^{iθ}/(2cosh r), T = ½e^{2iφ}tanh r, Θ = e^{2iθ}T.
/// Uses the absolute θ values of both sides.
BigKernelMatrix build_M(const TransitionSpec& t);

/// det M by partial-pivot elimination in 50-digit arithmetic, with the
/// entries themselves assembled at that precision.
Complex det_big_M(const TransitionSpec& t);

/// Same elimination applied to an already rounded matrix.
Complex determinant(const BigKernelMatrix& m);

/// max |M − Mᵀ|
double symmetry_residual(const BigKernelMatrix& m);
/// max |MM† − M†M|
double normality_residual(const BigKernelMatrix& m);

/// Smallest admissible n_max, ceil(12·max(e^{r_a}, e^{r_b})/ℓ).
int min_cell_index(const TransitionSpec& t, double ell);

/// Upper limit on integrated cells.
inline constexpr long long kMaxOracleCells = 10'000'000;

/// Re{√det Ξ/(2π) Σ_{n,m}(−1)^{n+m} ∫∫_cell exp(½YᵀΞY)} by adaptive tensor
/// Gauss–Legendre cubature per cell. Cells with |n|, |m| > n_max are
/// dropped; cells whose Gaussian envelope is negligible are skipped.
/// Throws DomainError when n_max is below min_cell_index, ConvergenceError
/// unless Re Ξ is negative definite, BudgetError past kMaxOracleCells.
double correlator_quadrature(const TransitionSpec& t, double ell, int n_max);

/// Same with Ξ given; n_max = 0 keeps every non-negligible cell.
double correlator_quadrature(const XiMatrix& xi, double ell, int n_max = 0);

enum class ThetaKind { theta2, theta4 };

/// Symmetric partial sum of
///   θ4(z, q) = Σ_{n=−N..N} (−1)^n q^{n²} e^{2inz}
///   θ2(z, q) = Σ_{n=−N..N−1} q^{(n+½)²} e^{i(2n+1)z}
/// with q^x = e^{x log q}. Throws ConvergenceError for |q| >= 1.
Complex theta_partial(ThetaKind kind, Complex z, Complex q, int n_terms);

}  // namespace squeezebell
