#pragma once

// Command-line layer: run configuration, the four subcommands and their
// CSV/JSON emission. The executable in tools/ only parses flags.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polariton/scenarios.hpp"

namespace polariton::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_numerical_failure = 2;

enum class Format { csv, json };

struct SweepBlock {
    SweepVar var = SweepVar::g;
    DetuningSweep detuning = DetuningSweep::resonant;
    double min = 0.0;
    double max = 1.0;
    int count = 2;
};

struct TauBlock {
    double max = 1.0;          // in `unit`
    int count = 201;
    bool microseconds = false; // unit "us" instead of "gamma" (1/gamma)
};

struct SpectrumBlock {
    double min = 1540.0;       // omega_m, units of gamma
    double max = 1580.0;
    int count = 201;
    std::vector<int> manifolds{1, 2, 3};
};

struct RunConfig {
    std::string preset;        // exactly one of preset / bundle is set
    std::string bundle;
    SystemParams params;
    DrivenMode driven = DrivenMode::qd;
    TruncationConfig truncation;
    std::optional<SweepBlock> sweep;
    TauBlock tau;
    std::vector<nlohmann::json> points; // parameter overrides per g2tau point
    SpectrumBlock spectrum;
    bool resonance_distances = false;
    std::string out_dir = "out";
    Format format = Format::csv;
    int threads = 1;

    /// The configuration with every default filled in.
    nlohmann::json resolved() const;
};

/// Validates a configuration document and fills defaults. Unknown keys,
/// wrong types and out-of-range values throw ConfigError.
RunConfig parse_config(const nlohmann::json& doc);

/// Sets a dotted key path ("params.g", "sweep.count") to a value parsed as
/// JSON when possible and as a plain string otherwise. Unqualified names of
/// SystemParams fields are taken to live under "params".
void apply_override(nlohmann::json& doc, const std::string& assignment);

struct Invocation {
    std::string command;  // g2sweep | g2tau | spectrum | oracle-compare
    std::optional<std::string> config_path;
    std::optional<std::string> preset;
    std::vector<std::string> overrides;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::optional<std::string> format;
};

/// Builds the configuration (file, then --preset, --override, and the
/// direct flags; POLARITON_THREADS is the fallback thread count) and runs
/// the command. Outputs appear only once everything has been computed.
int run(const Invocation& inv, std::ostream& log);

/// snprintf("%.11e"), empty for NaN.
std::string format_number(double v);

} // namespace polariton::cli
