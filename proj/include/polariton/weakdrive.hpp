#pragma once

// Weak-drive amplitudes of the effective non-Hermitian Hamiltonian for the
// QD-driven system at resonance (delta_a = delta_b = delta_q = D,
// kappa_a = kappa_b = kappa), truncated at two excitations:
//
//   |psi> = C00g |00g> + C10g |10g> + C01g |01g> + C00e |00e>
//         + C11g |11g> + C20g |20g> + C02g |02g> + C10e |10e> + C01e |01e>
//
// with C00g = 1. Quantum jumps are ignored, so these are an independent
// approximation to the master-equation steady state, not a reformulation.

#include "polariton/hilbert.hpp"
#include "polariton/model.hpp"

namespace polariton {

struct SingleExcitation {
    cplx c01g, c10g, c00e;
};

struct AmplitudeSet {
    cplx c00g = 1.0;
    cplx c10g, c01g, c00e;
    cplx c11g, c20g, c02g, c10e, c01e;

    /// Largest of |first-order| / |C00g| and |second-order| / |first-order|.
    double hierarchy_ratio() const;
};

struct HybridAmplitudeSet {
    cplx c10g, c01g, c10e, c01e;
    cplx c11g, c20g, c02g;
};

/// Throws PreconditionError unless the parameters are resonant, kappa_a =
/// kappa_b and only the QD is driven.
void require_oracle_conditions(const SystemParams& p);

/// Solves
///   (D - i kappa/2) C01g + f C10g + eta = 0
///   (D - i kappa/2) C10g + f C01g + g C00e = 0
///   (D - i gamma/2) C00e + g C10g = 0
/// with eta = eta_b. Throws ResonanceSingularity for a singular system.
SingleExcitation solve_single_excitation(const SystemParams& p);

/// Solves the two-excitation system driven by the singles (Dk = D - i kappa/2,
/// Dg = D - i gamma/2):
///   2Dk C11g + sqrt2 f (C20g + C02g) + g C01e + eta C10g = 0
///   (Dk + Dg) C10e + f C01e + sqrt2 g C20g = 0
///   (Dk + Dg) C01e + f C10e + g C11g + eta C00e = 0
///   2Dk C20g + sqrt2 f C11g + sqrt2 g C10e = 0
///   2Dk C02g + sqrt2 f C11g + sqrt2 eta C01g = 0
AmplitudeSet solve_double_excitation(const SystemParams& p, const SingleExcitation& singles);

AmplitudeSet solve_amplitudes(const SystemParams& p);

/// Closed-form solutions of the two systems written with the auxiliary
/// polynomials X1..X7. They carry the opposite overall sign (they solve the
/// systems with C00g = -1); C10e and C01e have no closed form and stay zero.
AmplitudeSet closed_form_amplitudes(const SystemParams& p);

/// Compares the factor-24 ratios C10g/C01g = f(24D - 2i kappa)/Q and
/// C00e/C01g = -24 f g/Q, Q = 24g^2 - 24D^2 + 14i kappa D + kappa^2, with
/// the same ratios from the linear solve. The two agree only when
/// kappa = 6 gamma.
struct FactorTwentyFourReport {
    cplx c10_ratio_snippet, c10_ratio_linear;
    cplx c00e_ratio_snippet, c00e_ratio_linear;
    double max_relative_discrepancy = 0.0;
};

FactorTwentyFourReport factor_twenty_four_diagnostic(const SystemParams& p);

/// Balanced-coupler images of the amplitudes:
///   C'10g = (C10g + C01g)/sqrt2   C'01g = (C10g - C01g)/sqrt2   (same for e)
///   C'11g = (C20g - C02g)/sqrt2
///   C'20g = (C20g + sqrt2 C11g + C02g)/2   C'02g = (C20g - sqrt2 C11g + C02g)/2
HybridAmplitudeSet bs_transform_amplitudes(const AmplitudeSet& A);

struct OracleG2 {
    double g2_a = 0.0; // 2|C20g|^2 / |C10g|^4
    double g2_b = 0.0; // 2|C02g|^2 / |C01g|^4
    double g2_c = 0.0; // 2|C'20g|^2 / |C'10g|^4
};

/// Throws UndefinedCorrelation when a squared single-excitation amplitude is
/// at or below the occupancy floor.
OracleG2 oracle_g2(const AmplitudeSet& A);

} // namespace polariton
