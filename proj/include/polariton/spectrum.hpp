#pragma once

// Polariton-number manifolds of the undriven Hamiltonian, the closed-form
// first and second manifolds at resonance, Jaynes-Cummings doublets and the
// k-photon resonance distances.

#include <array>
#include <span>
#include <vector>

#include "polariton/hilbert.hpp"
#include "polariton/model.hpp"

namespace polariton {

struct ManifoldSpectrum {
    int n = 0;
    std::vector<double> frequencies;  // ascending
    std::vector<FockLabel> basis;     // labels with n_a + n_b + q = n, canonical order
    Matrix eigenvectors;              // columns in the manifold basis
};

/// Labels with n_a + n_b + q = n, in canonical index order. Throws OutOfRange
/// when n is negative or the manifold does not fit the cutoffs.
std::vector<FockLabel> manifold_labels(int n, const TruncationConfig& cfg);

/// Eigenvalues of H restricted to the n-excitation subspace. Throws
/// PreconditionError when H does not commute with the polariton number.
ManifoldSpectrum manifold_spectrum(const QOperator& H, int n);

struct AnalyticManifolds {
    std::array<double, 3> first;   // ascending
    std::array<double, 5> second;  // ascending
};

/// Requires delta_a = delta_b = delta_q (PreconditionError otherwise):
///   E1 = D - sqrt(g^2 + f^2), D, D + sqrt(g^2 + f^2)
///   E2 = 2D -+ sqrt(2 (3g^2 + 5f^2 +- f1)) / 2, 2D,
///   f1 = sqrt(3 f^2 (10 g^2 + 3 f^2) + g^4).
AnalyticManifolds analytic_manifolds(const SystemParams& p);

struct JcDoublet {
    double e_plus = 0.0;
    double e_minus = 0.0;
    double rabi = 0.0;        // Omega_n = 2 g sqrt(n+1)
    double mixing_angle = 0.0; // tan(theta_n) = Omega_n / Delta_1, in (0, pi)
    bool resonant = false;     // Delta_1 = 0, theta_n = pi/2
};

/// Dressed doublet {|n,e>, |n+1,g>} of the photon-qubit JC model built from
/// omega_a = delta_a and omega_q = delta_q (rotating-frame values; f plays no
/// role). With Delta_1 = omega_q - omega_a,
///   E_n^+- = (n + 1) omega_a + Delta_1 / 2 +- sqrt(Delta_1^2 + Omega_n^2) / 2.
JcDoublet jc_spectrum(int n, const SystemParams& p);

struct ResonanceDistances {
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

/// D_k = min_i |k omega_p - omega_i^(k)|^2 for k = 1, 2, 3. spectra[k-1] must
/// hold manifold k. Throws PreconditionError on an empty manifold.
ResonanceDistances resonance_distances(double omega_p, std::span<const ManifoldSpectrum, 3> spectra);

/// Distances in the frame rotating at the pump: manifolds of the undriven
/// rotating-frame Hamiltonian (detunings as level energies, drives dropped)
/// compared with omega_p = 0.
ResonanceDistances resonance_distances(const SystemParams& p, const TruncationConfig& cfg);

struct ManifoldSweep {
    int n = 0;
    std::vector<double> x;
    std::vector<std::vector<double>> levels;  // levels[i][j]: level j at x[i], ascending
    double min_gap = 0.0;                     // smallest gap between adjacent levels
    double min_gap_at = 0.0;
    int min_gap_branch = 0;                   // lower level of the closest pair
};

/// Manifold-n levels of H_+ as delta_b (the QD frequency in the rotating
/// frame) runs over the grid; other parameters are taken from p with drives
/// dropped. The minimum adjacent gap locates the anti-crossing.
ManifoldSweep manifold_sweep(const SystemParams& p, int n, std::span<const double> delta_b_grid,
                             const TruncationConfig& cfg);

} // namespace polariton
