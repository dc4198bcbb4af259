#include "polariton/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "polariton/errors.hpp"

namespace polariton {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

SystemParams with(SystemParams p, std::initializer_list<std::pair<double SystemParams::*, double>> changes) {
    for (const auto& [field, value] : changes) p.*field = value;
    return p;
}

const std::array<Preset, 3> presets_{{
    {"A1", presets::A1, DrivenMode::smr},
    {"A2", presets::A2, DrivenMode::qd},
    {"A3", presets::A3, DrivenMode::qd},
}};

using P = SystemParams;

const std::vector<OverrideBundle>& bundles_() {
    static const std::vector<OverrideBundle> table = [] {
        const SystemParams A1 = presets::A1;
        const SystemParams A2 = presets::A2;
        const SystemParams A3 = presets::A3;
        const double k3 = A3.kappa_max();
        return std::vector<OverrideBundle>{
            {"a1_f5p5_g7p8", "A1", with(A1, {{&P::f, 5.5}, {&P::g, 7.8}}), DetuningSweep::rigid,
             "SMR drive, g = 1.3 kappa_max"},
            {"a1_f5p5_g6p6", "A1", with(A1, {{&P::f, 5.5}, {&P::g, 6.6}}), DetuningSweep::rigid,
             "SMR drive, g = 1.1 kappa_max"},
            {"a1_f5p5_g1p2", "A1", with(A1, {{&P::f, 5.5}, {&P::g, 1.2}}), DetuningSweep::rigid,
             "SMR drive, g = 0.2 kappa_max, oscillating g2_c(tau)"},
            {"a2_g5p25", "A2", with(A2, {{&P::g, 5.25}}), DetuningSweep::rigid, "QD drive, g = 0.7 kappa_max"},
            {"a2_g5p685", "A2", with(A2, {{&P::g, 5.685}}), DetuningSweep::rigid,
             "QD drive, g = 0.758 kappa_max"},
            {"a3_g10p5", "A3", with(A3, {{&P::g, 3.0 * k3}}), DetuningSweep::rigid, "g/kappa_a = 3.0"},
            {"a3_g7p35", "A3", with(A3, {{&P::g, 2.1 * k3}}), DetuningSweep::rigid, "g/kappa_a = 2.1"},
            {"a3_g13p3", "A3", with(A3, {{&P::g, 3.8 * k3}}), DetuningSweep::rigid, "g/kappa_a = 3.8"},
            {"a3_g7p7", "A3", with(A3, {{&P::g, 2.2 * k3}}), DetuningSweep::rigid, "g/kappa_a = 2.2"},
            {"a1_g7p5_resonant", "A1", with(A1, {{&P::g, 7.5}}), DetuningSweep::resonant,
             "SMR drive, g = 7.5, common detuning"},
            {"a1_g7p5_pump_scan", "A1", with(A1, {{&P::g, 7.5}}), DetuningSweep::rigid,
             "SMR drive, g = 7.5, pump-frequency scan"},
            {"a1_g7p58", "A1", with(A1, {{&P::g, 7.58}}), DetuningSweep::rigid,
             "SMR drive, g = 7.58, resonance distances"},
            {"a2_g4p5_resonant", "A2", with(A2, {{&P::g, 4.5}}), DetuningSweep::resonant,
             "QD drive, g = 4.5, common detuning"},
            {"a2_g4p5_pump_scan", "A2", with(A2, {{&P::g, 4.5}}), DetuningSweep::rigid,
             "QD drive, g = 4.5, pump-frequency scan"},
            {"a3_g9p5_resonant", "A3", with(A3, {{&P::g, 9.5}}), DetuningSweep::resonant,
             "QD drive, g = 9.5, common detuning"},
            {"a2_g4p5_kappa6_resonant", "A2", with(A2, {{&P::g, 4.5}, {&P::kappa_a, 6.0}, {&P::kappa_b, 6.0}}),
             DetuningSweep::resonant, "QD drive, g = 4.5, kappa_a = kappa_b = 6, oracle comparison"},
            {"a1_g7p5_wp1554", "A1",
             with(A1, {{&P::g, 7.5}, {&P::delta_a, 0.0}, {&P::delta_b, 6.0}, {&P::delta_q, -3.0}}),
             DetuningSweep::rigid, "SMR drive strength scan, omega_p = 1554"},
            {"a2_wp1568", "A2",
             with(A2, {{&P::g, 4.5}, {&P::delta_a, 2.0}, {&P::delta_b, -8.0}, {&P::delta_q, 0.0}}),
             DetuningSweep::rigid, "QD drive strength scan, omega_p = 1568 (g = 4.5 assumed)"},
            {"a1_g7p5_wp1551", "A1",
             with(A1, {{&P::g, 7.5}, {&P::delta_a, 3.0}, {&P::delta_b, 9.0}, {&P::delta_q, 0.0}}),
             DetuningSweep::rigid, "SMR drive strength scan, omega_p = 1551"},
            {"a2_wp1570", "A2",
             with(A2, {{&P::g, 4.5}, {&P::delta_a, 0.0}, {&P::delta_b, -10.0}, {&P::delta_q, -2.0}}),
             DetuningSweep::rigid, "QD drive strength scan, omega_p = 1570 (g = 4.5 assumed)"},
        };
    }();
    return table;
}

} // namespace

std::span<const Preset> preset_table() { return presets_; }

const Preset& find_preset(std::string_view name) {
    for (const Preset& p : presets_) {
        if (p.name == name) return p;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected A1, A2 or A3)");
}

std::span<const OverrideBundle> override_bundles() { return bundles_(); }

const OverrideBundle& find_bundle(std::string_view name) {
    for (const OverrideBundle& b : bundles_()) {
        if (b.name == name) return b;
    }
    throw ConfigError("unknown override bundle '" + std::string(name) + "'");
}

std::string_view sweep_var_name(SweepVar v) {
    switch (v) {
    case SweepVar::g: return "g";
    case SweepVar::delta_smr: return "delta_smr";
    case SweepVar::eta_a: return "eta_a";
    case SweepVar::eta_b: return "eta_b";
    case SweepVar::omega_m: return "omega_m";
    }
    return "?";
}

SweepVar parse_sweep_var(std::string_view name) {
    for (SweepVar v : {SweepVar::g, SweepVar::delta_smr, SweepVar::eta_a, SweepVar::eta_b, SweepVar::omega_m}) {
        if (sweep_var_name(v) == name) return v;
    }
    throw ConfigError("unknown sweep variable '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
    try {
        params.validate();
        truncation.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (count < 1) {
        throw ConfigError("sweep grid needs at least one point");
    }
    if (!std::isfinite(min) || !std::isfinite(max) || (count > 1 && !(max > min))) {
        throw ConfigError("sweep range must be finite with max > min");
    }
    if (threads < 1) {
        throw ConfigError("thread count must be >= 1");
    }
    if (resonance_distances && (truncation.n_a_max < 3 || truncation.n_b_max < 3)) {
        throw ConfigError("resonance distances need cutoffs >= 3 to hold the third manifold");
    }
    const bool drive_a = var == SweepVar::eta_a || params.eta_a != 0.0;
    const bool drive_b = var == SweepVar::eta_b || params.eta_b != 0.0;
    if (driven == DrivenMode::smr && drive_b) {
        throw ConfigError("SMR-driven sweep with a QD drive");
    }
    if (driven == DrivenMode::qd && drive_a) {
        throw ConfigError("QD-driven sweep with an SMR drive");
    }
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
    spec.validate();
    std::vector<double> x(static_cast<std::size_t>(spec.count));
    if (spec.count == 1) {
        x[0] = spec.min;
        return x;
    }
    const double h = (spec.max - spec.min) / (spec.count - 1);
    for (int i = 0; i < spec.count; ++i) x[static_cast<std::size_t>(i)] = spec.min + i * h;
    x.back() = spec.max;
    return x;
}

SystemParams params_at(const SweepSpec& spec, double x) {
    SystemParams p = spec.params;
    switch (spec.var) {
    case SweepVar::g: p.g = x; break;
    case SweepVar::eta_a: p.eta_a = x; break;
    case SweepVar::eta_b: p.eta_b = x; break;
    case SweepVar::omega_m: p.delta_b = p.delta_a + (x - omega_reference); break;
    case SweepVar::delta_smr:
        if (spec.detuning == DetuningSweep::resonant) {
            p.delta_a = p.delta_b = p.delta_q = x;
        } else {
            const double shift = x - p.delta_a;
            p.delta_a = x;
            p.delta_b += shift;
            p.delta_q += shift;
        }
        break;
    }
    return p;
}

QOperator driven_hamiltonian(const SystemParams& p, DrivenMode driven, const TruncationConfig& cfg) {
    return driven == DrivenMode::smr ? hamiltonian_smr_driven(p, cfg) : hamiltonian_qd_driven(p, cfg);
}

SweepRow evaluate_point(const SystemParams& p, DrivenMode driven, const TruncationConfig& cfg, bool distances,
                        bool oracle) {
    SweepRow row;
    row.params = p;
    for (auto& m : row.g) m.fill(nan);
    row.occupation.fill(nan);
    auto note = [&row](const std::string& msg) {
        if (!row.error.empty()) row.error += "; ";
        row.error += msg;
    };
    try {
        const Liouvillian L = build_liouvillian(driven_hamiltonian(p, driven, cfg), p);
        const DensityMatrix rho = steady_state(L);
        for (Mode mode : all_modes) {
            const auto m = static_cast<std::size_t>(mode);
            const ModeVector z = mode_vector(mode);
            row.occupation[m] = normal_moment(rho, z, 1, 1).real();
            try {
                for (int k = 2; k <= 4; ++k) row.g[m][static_cast<std::size_t>(k - 2)] = g_k_zero(rho, z, k);
                row.g234[m] = g234_signature(rho, mode);
            } catch (const UndefinedCorrelation& e) {
                note("mode " + std::string(mode_name(mode)) + ": " + e.what());
            }
        }
        if (std::isfinite(row.g2(Mode::a)) && std::isfinite(row.g2(Mode::b)) && std::isfinite(row.g2(Mode::c))) {
            row.statistics = classify_statistics(row.g2(Mode::a), row.g2(Mode::b), row.g2(Mode::c));
        }
        if (distances) row.distances = resonance_distances(p, cfg);
    } catch (const std::exception& e) {
        row.failed = true;
        note(e.what());
    }
    if (oracle) {
        try {
            row.oracle = oracle_g2(solve_amplitudes(p));
        } catch (const std::exception& e) {
            row.oracle_error = e.what();
        }
    }
    return row;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    const std::vector<double> x = sweep_grid(spec);
    std::vector<SweepRow> rows(x.size());
    parallel_for(x.size(), spec.threads, [&](std::size_t i) {
        rows[i] = evaluate_point(params_at(spec, x[i]), spec.driven, spec.truncation, spec.resonance_distances,
                                 spec.oracle);
        rows[i].x = x[i];
    });
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& l, const SweepRow& r) { return l.x < r.x; });
    return rows;
}

Extrema principal_extrema(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DimensionMismatch("extremum search needs matching x and y");
    }
    Extrema out{nan, nan, nan, nan};
    double lo_neg = std::numeric_limits<double>::infinity(), hi_neg = -lo_neg;
    double lo_pos = lo_neg, hi_pos = hi_neg;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(y[i])) continue;
        if (x[i] < 0.0) {
            if (y[i] < lo_neg) { lo_neg = y[i]; out.argmin_neg = x[i]; }
            if (y[i] > hi_neg) { hi_neg = y[i]; out.argmax_neg = x[i]; }
        } else if (x[i] > 0.0) {
            if (y[i] < lo_pos) { lo_pos = y[i]; out.argmin_pos = x[i]; }
            if (y[i] > hi_pos) { hi_pos = y[i]; out.argmax_pos = x[i]; }
        }
    }
    return out;
}

OracleComparison compare_oracle(SweepSpec spec) {
    // oracle preconditions (QD drive, equal kappas, resonance) fail per point
    spec.oracle = true;
    OracleComparison out;
    out.rows = run_sweep(spec);
    out.grid_step = spec.count > 1 ? (spec.max - spec.min) / (spec.count - 1) : 0.0;
    std::vector<double> x;
    for (const SweepRow& r : out.rows) x.push_back(r.x);
    const Mode modes[3] = {Mode::a, Mode::b, Mode::c};
    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<double> me, orc;
        for (const SweepRow& r : out.rows) {
            me.push_back(r.g2(modes[k]));
            const double o = !r.oracle ? nan : k == 0 ? r.oracle->g2_a : k == 1 ? r.oracle->g2_b : r.oracle->g2_c;
            orc.push_back(o);
        }
        out.modes[k] = {modes[k], principal_extrema(x, me), principal_extrema(x, orc)};
    }
    return out;
}

G2TauRun run_g2tau(const SystemParams& p, DrivenMode driven, const TruncationConfig& cfg,
                   std::span<const double> tau_grid) {
    G2TauRun out;
    out.params = p;
    const Liouvillian L = build_liouvillian(driven_hamiltonian(p, driven, cfg), p);
    const DensityMatrix rho = steady_state(L);
    const double tau_w = bunching_window(p);
    for (Mode mode : {Mode::a, Mode::b, Mode::c}) {
        G2TauCurve curve = g2_tau(rho, L, mode, tau_grid);
        out.g2_zero.push_back(g_k_zero(rho, mode, 2).value);
        std::optional<DynamicsLabel> label;
        if (!curve.tau.empty() && curve.tau.front() == 0.0 && curve.tau.back() >= tau_w) {
            label = classify_dynamics(curve, tau_w);
        }
        out.curves.push_back(std::move(curve));
        out.dynamics.push_back(label);
    }
    return out;
}

double dominant_period(std::span<const double> tau, std::span<const double> y) {
    const std::size_t n = tau.size();
    if (n != y.size() || n < 8) {
        throw InsufficientData("period estimate needs at least 8 matching samples");
    }
    const double span = tau.back() - tau.front();
    if (!(span > 0.0)) {
        throw InsufficientData("period estimate needs a positive time span");
    }
    double area = 0.0;
    double h_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < n; ++k) {
        const double h = tau[k] - tau[k - 1];
        area += 0.5 * h * (y[k] + y[k - 1]);
        if (h > 0.0) h_min = std::min(h_min, h);
    }
    const double mean = area / span;
    auto magnitude = [&](double w) {
        cplx s = 0.0;
        for (std::size_t k = 1; k < n; ++k) {
            const double h = tau[k] - tau[k - 1];
            const cplx e0 = (y[k - 1] - mean) * std::exp(cplx(0.0, -w * tau[k - 1]));
            const cplx e1 = (y[k] - mean) * std::exp(cplx(0.0, -w * tau[k]));
            s += 0.5 * h * (e0 + e1);
        }
        return std::abs(s);
    };
    const double w_lo = 2.0 * 2.0 * std::numbers::pi / span;
    const double w_hi = std::numbers::pi / h_min;
    if (!(w_hi > w_lo)) {
        throw InsufficientData("sampling too coarse for a period estimate over this span");
    }
    const int scan = 4000;
    double best_w = w_lo;
    double best = -1.0;
    const double dw = (w_hi - w_lo) / scan;
    for (int i = 0; i <= scan; ++i) {
        const double w = w_lo + i * dw;
        const double m = magnitude(w);
        if (m > best) {
            best = m;
            best_w = w;
        }
    }
    // golden-section refinement inside the bracketing scan cell
    double a = std::max(w_lo, best_w - dw);
    double b = std::min(w_hi, best_w + dw);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = magnitude(c);
    double fd = magnitude(d);
    for (int it = 0; it < 60; ++it) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - phi * (b - a); fc = magnitude(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + phi * (b - a); fd = magnitude(d);
        }
    }
    return 2.0 * std::numbers::pi / (0.5 * (a + b));
}

double peak_spacing(std::span<const double> tau, std::span<const double> y) {
    if (tau.size() != y.size()) {
        throw DimensionMismatch("peak search needs matching tau and y");
    }
    std::vector<std::size_t> maxima;
    for (std::size_t k = 1; k + 1 < y.size(); ++k) {
        if (y[k] > y[k - 1] && y[k] >= y[k + 1]) maxima.push_back(k);
    }
    // prominence: height above the higher of the two troughs reached before
    // the curve climbs past the peak on either side
    std::vector<double> prominence(maxima.size());
    double largest = 0.0;
    for (std::size_t i = 0; i < maxima.size(); ++i) {
        const std::size_t k = maxima[i];
        double left = y[k];
        for (std::size_t j = k; j-- > 0 && y[j] <= y[k];) left = std::min(left, y[j]);
        double right = y[k];
        for (std::size_t j = k + 1; j < y.size() && y[j] <= y[k]; ++j) right = std::min(right, y[j]);
        prominence[i] = y[k] - std::max(left, right);
        largest = std::max(largest, prominence[i]);
    }
    std::vector<double> peaks;
    for (std::size_t i = 0; i < maxima.size(); ++i) {
        if (prominence[i] >= 0.1 * largest) peaks.push_back(tau[maxima[i]]);
    }
    if (peaks.size() < 2) return nan;
    return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

} // namespace polariton
