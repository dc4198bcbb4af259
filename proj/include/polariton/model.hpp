#pragma once

// Rotating-frame Hamiltonians of the qubit-SMR-QD system, the hybrid
// photon-phonon modes and the linear-coupler (beam-splitter) transform.
//
// All frequencies and rates are in units of the qubit decay rate gamma.

#include <numbers>
#include <string_view>
#include <utility>

#include "polariton/hilbert.hpp"

namespace polariton {

/// Physical value of the rate unit: gamma = 10*pi rad/us.
inline constexpr double gamma_rad_per_us = 10.0 * std::numbers::pi;

/// Converts a time measured in units of 1/gamma to microseconds.
constexpr double to_microseconds(double t_gamma) { return t_gamma / gamma_rad_per_us; }
constexpr double from_microseconds(double t_us) { return t_us * gamma_rad_per_us; }

struct SystemParams {
    double delta_a = 0.0; // SMR detuning from the pump
    double delta_b = 0.0; // QD detuning
    double delta_q = 0.0; // qubit detuning
    double g = 0.0;       // qubit-SMR coupling
    double f = 0.0;       // SMR-QD hopping
    double eta_a = 0.0;   // SMR drive
    double eta_b = 0.0;   // QD drive
    double kappa_a = 0.0;
    double kappa_b = 0.0;
    double gamma = 1.0;

    /// Throws ParameterError on negative or non-finite rates.
    void validate() const;

    double kappa_max() const;

    bool operator==(const SystemParams&) const = default;
};

namespace presets {

// SMR-driven set.
inline constexpr SystemParams A1{-3.0, 3.0, -6.0, 0.0, 5.0, 0.7, 0.0, 1.5, 6.0, 1.0};
// QD-driven sets.
inline constexpr SystemParams A2{5.0, -5.0, 3.0, 0.0, 7.0, 0.0, 0.5, 7.5, 6.0, 1.0};
inline constexpr SystemParams A3{4.0, -4.0, 7.0, 0.0, 6.4, 0.0, 0.22, 3.5, 0.002, 1.0};

} // namespace presets

enum class Mode { a, b, c, d };
std::string_view mode_name(Mode mode);

/// Sign of the a-b hopping term in the undriven Hamiltonian H_+-.
enum class CouplingSign { plus, minus };

/// H' = D_a a+a + D_b b+b + D_q s+s- + g(a+s- + a s+) + f(a+b + a b+) + eta_a(a + a+).
QOperator hamiltonian_smr_driven(const SystemParams& p, const TruncationConfig& cfg);

/// H'' : same undriven part with the drive eta_b(b + b+) on the QD.
QOperator hamiltonian_qd_driven(const SystemParams& p, const TruncationConfig& cfg);

/// H_+- without drive. The minus branch uses the phase convention
/// i f (a b+ - a+ b) with real f, i.e. H_+ with a -> i a.
/// Throws PreconditionError when either drive is nonzero.
QOperator hamiltonian_undriven(const SystemParams& p, CouplingSign sign, const TruncationConfig& cfg);

/// a+a + b+b + s+s-.
QOperator polariton_number(const TruncationConfig& cfg);

/// a, b, c = (a+b)/sqrt2 or d = (a-b)/sqrt2 on the composite space.
QOperator hybrid_mode_operator(Mode mode, const TruncationConfig& cfg);

/// c(theta) = a sin(theta) + b cos(theta), d(theta) = a cos(theta) - b sin(theta).
std::pair<QOperator, QOperator> linear_coupler(double theta, const TruncationConfig& cfg);

/// Applies the balanced coupler to the photon and phonon Fock amplitudes of a
/// composite ket (qubit untouched): a+ -> (a+ - b+)/sqrt2, b+ -> (a+ + b+)/sqrt2,
/// so |10> -> (|10> - |01>)/sqrt2 and |11> -> (|20> - |02>)/sqrt2.
/// Throws TruncationError if the image does not fit the cutoffs.
Vector bs_fock_map(const Vector& state, const TruncationConfig& cfg);

} // namespace polariton
