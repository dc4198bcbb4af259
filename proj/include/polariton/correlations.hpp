#pragma once

// Zero-delay and delay-time intensity correlations of bare and hybrid modes,
// plus the sign-based classifications of their statistics.
//
// A mode is any linear combination z = alpha a + beta b. Normally ordered
// moments are expanded in products a+^i a^j b+^m b^n before matrix elements
// are taken, so the truncation boundary never enters through a commutator.

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "polariton/lindblad.hpp"
#include "polariton/model.hpp"

namespace polariton {

inline constexpr double occupancy_floor = 1e-12;
inline constexpr double poissonian_band = 1e-2;
inline constexpr double unbunched_band = 1e-3;

struct ModeVector {
    cplx alpha; // weight of a
    cplx beta;  // weight of b
};

ModeVector mode_vector(Mode mode);

/// <a+^i a^j b+^m b^n>.
cplx local_moment(const DensityMatrix& rho, int i, int j, int m, int n);

/// <z+^k z^l> for z = alpha a + beta b.
cplx normal_moment(const DensityMatrix& rho, const ModeVector& z, int k, int l);

struct CorrelationPoint {
    Mode mode = Mode::a;
    int order = 2;
    double value = 0.0;
    double mean_occupation = 0.0;
};

/// <z+^k z^k> / <z+z>^k. Throws UndefinedCorrelation when <z+z> is at or
/// below the occupancy floor, OutOfRange for k < 2.
CorrelationPoint g_k_zero(const DensityMatrix& rho, Mode mode, int k);
double g_k_zero(const DensityMatrix& rho, const ModeVector& z, int k);

struct G2TauCurve {
    Mode mode = Mode::a;
    std::vector<double> tau;    // units of 1/gamma
    std::vector<double> values;
    double mean_occupation = 0.0;
};

/// Quantum regression: propagates z rho z+ under L and returns
/// <z+z>(tau) / <z+z>^2 on the grid (tau[0] >= 0, non-decreasing).
G2TauCurve g2_tau(const DensityMatrix& rho_ss, const Liouvillian& L, Mode mode,
                  std::span<const double> tau_grid, const EvolveOptions& options = {});

std::vector<double> g2_tau(const DensityMatrix& rho_ss, const Liouvillian& L, const ModeVector& z,
                           std::span<const double> tau_grid, const EvolveOptions& options = {});

struct StatisticsLabel {
    int case_number = 0;           // 1..8, 0 when some g2 equals 1 exactly
    std::array<int, 3> signs{};    // sgn(g2 - 1) for a, b, c
    bool boundary = false;         // some |g2 - 1| within the Poissonian band
};

/// Sign triple of (g2_a - 1, g2_b - 1, g2_c - 1) mapped to the eight cases:
///   1 (-,-,-)  2 (-,-,+)  3 (-,+,-)  4 (+,-,-)
///   5 (-,+,+)  6 (+,-,+)  7 (+,+,-)  8 (+,+,+)
/// Throws ClassificationError on non-finite input.
StatisticsLabel classify_statistics(double g2_a, double g2_b, double g2_c);

/// Sign triple of a case number; OutOfRange outside 1..8.
std::array<int, 3> case_signs(int case_number);

enum class DynamicsCase {
    I,   // sub-Poissonian, antibunched
    II,  // super-Poissonian, bunched
    III, // super-Poissonian, antibunched
    IV,  // sub-Poissonian, bunched
    unbunched_sub,
    unbunched_super,
};

std::string_view dynamics_name(DynamicsCase c);

/// 1 / max(kappa_a, kappa_b, gamma).
double bunching_window(const SystemParams& p);

struct DynamicsLabel {
    DynamicsCase dynamics = DynamicsCase::unbunched_sub;
    double g2_zero = 0.0;
    double mean_shift = 0.0;  // window average of g2(tau) - g2(0)
    double max_shift = 0.0;   // window maximum of |g2(tau) - g2(0)|
};

/// Bunching is decided over the whole window (0, tau_w]: unbunched when
/// |g2(tau) - g2(0)| never leaves the unbunched band there, otherwise
/// antibunched or bunched by the sign of the trapezoidal window average of
/// g2(tau) - g2(0). g2(0) < 1 counts as sub-Poissonian.
/// Throws InsufficientData when the curve stops short of tau_w or has no
/// point inside the window.
DynamicsLabel classify_dynamics(const G2TauCurve& curve, double tau_w);

struct G234Signature {
    std::array<double, 3> values{};  // g2, g3, g4
    std::array<int, 3> signs{};      // sgn log g(k)
    std::array<bool, 3> boundary{};  // |g(k) - 1| within the Poissonian band
};

G234Signature g234_signature(const DensityMatrix& rho, Mode mode);

struct HybridMoments {
    double n = 0.0;  // <z+z>
    double n2 = 0.0; // <z+^2 z^2>
};

/// <z+z> and <z+^2 z^2> for z = c = (a+b)/sqrt2 or d = (a-b)/sqrt2, assembled
/// term by term from the local photon and phonon moments f_kl = a+^k a^l and
/// g_mn = b+^m b^n (as measured separately on each resonator).
/// Throws OutOfRange for a bare mode.
HybridMoments hybrid_moments_from_local(const DensityMatrix& rho, Mode mode = Mode::c);

} // namespace polariton
