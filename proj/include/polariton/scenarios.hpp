#pragma once

// Named operating points and parameter sweeps over the steady-state,
// correlation, spectrum and weak-drive modules.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polariton/correlations.hpp"
#include "polariton/lindblad.hpp"
#include "polariton/model.hpp"
#include "polariton/spectrum.hpp"
#include "polariton/weakdrive.hpp"

namespace polariton {

enum class DrivenMode { smr, qd };

/// Absolute reference frequency of the resonators and qubit, units of gamma.
inline constexpr double omega_reference = 1560.0;

struct Preset {
    std::string_view name;
    SystemParams params;
    DrivenMode driven;
};

std::span<const Preset> preset_table();

/// Throws ConfigError for an unknown name.
const Preset& find_preset(std::string_view name);

/// How a Delta_SMR sweep moves the other detunings: all three equal to the
/// swept value, or all three shifted rigidly (a pump-frequency scan).
enum class DetuningSweep { resonant, rigid };

/// A preset amended by the values a particular operating point sets on top.
struct OverrideBundle {
    std::string_view name;
    std::string_view preset;
    SystemParams params;
    DetuningSweep detuning;
    std::string_view note;
};

std::span<const OverrideBundle> override_bundles();

/// Throws ConfigError for an unknown name.
const OverrideBundle& find_bundle(std::string_view name);

enum class SweepVar { g, delta_smr, eta_a, eta_b, omega_m };

std::string_view sweep_var_name(SweepVar v);
/// Throws ConfigError for an unknown name.
SweepVar parse_sweep_var(std::string_view name);

struct SweepSpec {
    SystemParams params;
    DrivenMode driven = DrivenMode::qd;
    TruncationConfig truncation;
    SweepVar var = SweepVar::g;
    DetuningSweep detuning = DetuningSweep::resonant;
    double min = 0.0;
    double max = 1.0;
    int count = 2;
    bool resonance_distances = false;
    bool oracle = false;
    int threads = 1;

    /// Throws ConfigError when the grid or the combination is invalid.
    void validate() const;
};

/// count equally spaced points from min to max inclusive.
std::vector<double> sweep_grid(const SweepSpec& spec);

/// Parameters at one grid value. For omega_m the value is the absolute QD
/// frequency; delta_b moves with it relative to omega_reference.
SystemParams params_at(const SweepSpec& spec, double x);

QOperator driven_hamiltonian(const SystemParams& p, DrivenMode driven, const TruncationConfig& cfg);

inline constexpr std::array<Mode, 4> all_modes{Mode::a, Mode::b, Mode::c, Mode::d};

struct SweepRow {
    double x = 0.0;
    SystemParams params;
    // g[mode][k-2] for k = 2, 3, 4; NaN when undefined
    std::array<std::array<double, 3>, 4> g{};
    std::array<double, 4> occupation{};
    std::optional<StatisticsLabel> statistics;
    std::array<std::optional<G234Signature>, 4> g234;
    std::optional<ResonanceDistances> distances;
    std::optional<OracleG2> oracle;
    bool failed = false;       // the steady state or a required quantity could not be computed
    std::string error;         // failure reason, or notes on quantities left undefined
    std::string oracle_error;

    double g2(Mode m) const { return g[static_cast<std::size_t>(m)][0]; }
};

/// Everything the sweep reports at a single parameter point.
SweepRow evaluate_point(const SystemParams& p, DrivenMode driven, const TruncationConfig& cfg,
                        bool distances, bool oracle);

/// One row per grid point, sorted by the swept value. Point failures are
/// recorded in the row; the sweep itself only throws for an invalid sweep.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Calls fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

struct Extrema {
    // Principal extrema on each half axis; NaN when the half axis is empty.
    double argmin_neg = 0.0, argmax_neg = 0.0;
    double argmin_pos = 0.0, argmax_pos = 0.0;
};

/// Locations of the smallest and largest finite values among x < 0 and x > 0.
Extrema principal_extrema(std::span<const double> x, std::span<const double> y);

struct ModeComparison {
    Mode mode = Mode::a;
    Extrema master;
    Extrema oracle;
};

struct OracleComparison {
    std::vector<SweepRow> rows;
    std::array<ModeComparison, 3> modes;  // a, b, c
    double grid_step = 0.0;
};

/// Runs the sweep with the oracle enabled and summarizes where both methods
/// put their extrema. Points outside the oracle's domain keep their
/// master-equation values and carry the reason in oracle_error.
OracleComparison compare_oracle(SweepSpec spec);

struct G2TauRun {
    SystemParams params;
    std::vector<G2TauCurve> curves;            // modes a, b, c
    std::vector<double> g2_zero;               // g_k_zero(k = 2) per curve
    std::vector<std::optional<DynamicsLabel>> dynamics;
};

/// Steady state plus g2(tau) for modes a, b, c on the grid (units of 1/gamma).
G2TauRun run_g2tau(const SystemParams& p, DrivenMode driven, const TruncationConfig& cfg,
                   std::span<const double> tau_grid);

/// Period of the strongest oscillation in y(tau): the mean is removed and the
/// Fourier magnitude is scanned over frequencies with at least two periods in
/// the sampled span. Throws InsufficientData for fewer than 8 samples.
double dominant_period(std::span<const double> tau, std::span<const double> y);

/// Mean spacing of successive interior local maxima, ignoring maxima whose
/// prominence is below a tenth of the largest; NaN with fewer than two.
double peak_spacing(std::span<const double> tau, std::span<const double> y);

} // namespace polariton
